//! Matrix-free system operator.
//!
//! Every off-diagonal block of the system matrix is a kernel evaluated at the
//! lag `x_n - x_m`, so on a uniform grid each block is block-Toeplitz with
//! Toeplitz blocks. The lags are tabulated on a `(2 n1) x (2 n2)` periodic
//! grid with the zero lag set to `0`, transformed once, and each product
//! becomes pointwise multiplication in the frequency domain:
//!
//! ```text
//! E1 <- T11 * w1 + T12 * w2 + c_mu  * B13 * w3
//! E2 <- T12 * w1 + T22 * w2 + c_mu  * B23 * w3
//! H3 <- c_eps * (B13 * w1 + B23 * w2) + T33 * w3
//! ```
//!
//! with `w = χ ⊙ u` (contrast at the source cell), `T = -h² A`,
//! `T33 = -h² k² g`, `c_mu = -iωμ h²` and `c_eps = -iωε h²`. The self-cell
//! terms are added as a per-cell diagonal.
//!
//! Table storage index is `j * (2 n1) + i` for lag `(i, j)` taken modulo the
//! embedding size.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::assembly::ElementContext;
use crate::error::{Error, Result};
use crate::kernels::{green, tensor_a, tensor_b, Displacement};
use crate::scene::{FieldVector, Scene};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Two-dimensional FFT over a row-major `m2 x m1` array.
#[derive(Clone)]
struct Fft2 {
    m1: usize,
    m2: usize,
    fwd1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(m1: usize, m2: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m1,
            m2,
            fwd1: planner.plan_fft_forward(m1),
            fwd2: planner.plan_fft_forward(m2),
            inv1: planner.plan_fft_inverse(m1),
            inv2: planner.plan_fft_inverse(m2),
        }
    }

    fn len(&self) -> usize {
        self.m1 * self.m2
    }

    fn scratch_len(&self) -> usize {
        let s = [&self.fwd1, &self.fwd2, &self.inv1, &self.inv2]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        s + self.len()
    }

    fn transform(&self, buf: &mut [Complex64], scratch: &mut [Complex64], inverse: bool) {
        let (f1, f2) = if inverse {
            (&self.inv1, &self.inv2)
        } else {
            (&self.fwd1, &self.fwd2)
        };
        let (m1, m2) = (self.m1, self.m2);
        let (tmp, fft_scratch) = scratch.split_at_mut(self.len());
        f1.process_with_scratch(buf, fft_scratch);
        for j in 0..m2 {
            for i in 0..m1 {
                tmp[i * m2 + j] = buf[j * m1 + i];
            }
        }
        f2.process_with_scratch(tmp, fft_scratch);
        for j in 0..m2 {
            for i in 0..m1 {
                buf[j * m1 + i] = tmp[i * m2 + j];
            }
        }
    }
}

/// Frequency-domain kernel tables and per-cell diagonal.
#[derive(Clone, PartialEq)]
pub struct ToeplitzTables {
    n1: usize,
    n2: usize,
    m1: usize,
    m2: usize,
    pub t11: Vec<Complex64>,
    pub t12: Vec<Complex64>,
    pub t22: Vec<Complex64>,
    pub b13: Vec<Complex64>,
    pub b23: Vec<Complex64>,
    pub t33: Vec<Complex64>,
    /// `1 + e_bracket χe(x_n)`, applied to E1 and E2.
    pub diag_e: Vec<Complex64>,
    /// `1 + h_bracket χm(x_n)`, applied to H3.
    pub diag_h: Vec<Complex64>,
}

impl ToeplitzTables {
    /// Embedding size `(2 n1, 2 n2)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    pub fn grid_shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }
}

impl std::fmt::Debug for ToeplitzTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzTables")
            .field("grid", &(self.n1, self.n2))
            .field("embedding", &(self.m1, self.m2))
            .finish()
    }
}

/// Immutable fast operator for one scene.
#[derive(Clone)]
pub struct FastOperator {
    tables: ToeplitzTables,
    chi_e: Vec<Complex64>,
    chi_m: Vec<Complex64>,
    c_mu: Complex64,
    c_eps: Complex64,
    fft: Fft2,
}

impl std::fmt::Debug for FastOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FastOperator")
            .field("tables", &self.tables)
            .finish()
    }
}

/// Caller-owned scratch space for [`FastOperator::apply_with`].
#[derive(Debug, Clone)]
pub struct Workspace {
    w: [Vec<Complex64>; 3],
    out: [Vec<Complex64>; 3],
    scratch: Vec<Complex64>,
}

/// Tabulates and transforms all kernels for `scene`.
pub fn build_operator(scene: &Scene) -> Result<FastOperator> {
    let grid = scene.grid();
    let (n1, n2) = (grid.n1(), grid.n2());
    if n1 == 0 || n2 == 0 {
        return Err(Error::config("fast operator needs a nonempty grid"));
    }
    let (m1, m2) = (2 * n1, 2 * n2);
    let len = m1 * m2;
    let h = grid.h();
    let h2 = h * h;
    let medium = scene.medium();
    let k = medium.k_b();

    let mut t11 = vec![ZERO; len];
    let mut t12 = vec![ZERO; len];
    let mut t22 = vec![ZERO; len];
    let mut b13 = vec![ZERO; len];
    let mut b23 = vec![ZERO; len];
    let mut t33 = vec![ZERO; len];
    let lag = |idx: usize, n: usize, m: usize| -> Option<i64> {
        match idx.cmp(&n) {
            std::cmp::Ordering::Less => Some(idx as i64),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(idx as i64 - m as i64),
        }
    };
    for j in 0..m2 {
        let Some(q) = lag(j, n2, m2) else { continue };
        for i in 0..m1 {
            let Some(p) = lag(i, n1, m1) else { continue };
            if p == 0 && q == 0 {
                continue;
            }
            let d = Displacement::new(p as f64 * h, q as f64 * h);
            let a = tensor_a(&d, k)?;
            let b = tensor_b(&d, k)?;
            let g = green(d.r(), k)?;
            let idx = j * m1 + i;
            t11[idx] = -h2 * a[(0, 0)];
            t12[idx] = -h2 * a[(0, 1)];
            t22[idx] = -h2 * a[(1, 1)];
            b13[idx] = b[(0, 2)];
            b23[idx] = b[(1, 2)];
            t33[idx] = -h2 * k * k * g;
        }
    }

    let fft = Fft2::new(m1, m2);
    let mut scratch = vec![ZERO; fft.scratch_len()];
    for t in [&mut t11, &mut t12, &mut t22, &mut b13, &mut b23, &mut t33] {
        fft.transform(t, &mut scratch, false);
        let norm = 1.0 / len as f64;
        t.iter_mut().for_each(|v| *v *= norm);
    }

    let ctx = ElementContext::new(scene);
    let chi_e = scene.contrast().chi_e().to_vec();
    let chi_m = scene.contrast().chi_m().to_vec();
    let diag_e = chi_e.iter().map(|c| ONE + ctx.e_bracket() * c).collect();
    let diag_h = chi_m.iter().map(|c| ONE + ctx.h_bracket() * c).collect();
    let iw = Complex64::new(0.0, medium.omega());
    Ok(FastOperator {
        tables: ToeplitzTables {
            n1,
            n2,
            m1,
            m2,
            t11,
            t12,
            t22,
            b13,
            b23,
            t33,
            diag_e,
            diag_h,
        },
        chi_e,
        chi_m,
        c_mu: -iw * medium.mu_b() * h2,
        c_eps: -iw * medium.eps_b() * h2,
        fft,
    })
}

impl FastOperator {
    pub fn tables(&self) -> &ToeplitzTables {
        &self.tables
    }

    pub fn cells(&self) -> usize {
        self.chi_e.len()
    }

    pub fn dim(&self) -> usize {
        3 * self.cells()
    }

    pub fn workspace(&self) -> Workspace {
        let len = self.fft.len();
        Workspace {
            w: std::array::from_fn(|_| vec![ZERO; len]),
            out: std::array::from_fn(|_| vec![ZERO; len]),
            scratch: vec![ZERO; self.fft.scratch_len()],
        }
    }

    pub fn apply(&self, u: &FieldVector) -> Result<FieldVector> {
        let mut y = FieldVector::zeros(self.cells());
        self.apply_slice(u.as_slice(), y.as_mut_slice())?;
        Ok(y)
    }

    /// `y = A x` with a fresh workspace.
    pub fn apply_slice(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        let mut ws = self.workspace();
        self.apply_with(x, y, &mut ws)
    }

    pub fn apply_with(&self, x: &[Complex64], y: &mut [Complex64], ws: &mut Workspace) -> Result<()> {
        let n = self.cells();
        if x.len() != 3 * n || y.len() != 3 * n {
            return Err(Error::domain(format!(
                "operator of dimension {} applied to lengths {} -> {}",
                3 * n,
                x.len(),
                y.len()
            )));
        }
        let t = &self.tables;
        let (n1, m1) = (t.n1, t.m1);
        for (b, w) in ws.w.iter_mut().enumerate() {
            w.iter_mut().for_each(|v| *v = ZERO);
            let chi = if b < 2 { &self.chi_e } else { &self.chi_m };
            for (cell, c) in chi.iter().enumerate() {
                let (i, j) = (cell % n1, cell / n1);
                w[j * m1 + i] = c * x[b * n + cell];
            }
            self.fft.transform(w, &mut ws.scratch, false);
        }
        let [w1, w2, w3] = &ws.w;
        let [o1, o2, o3] = &mut ws.out;
        for idx in 0..self.fft.len() {
            let (a, b, c) = (w1[idx], w2[idx], w3[idx]);
            o1[idx] = t.t11[idx] * a + t.t12[idx] * b + self.c_mu * t.b13[idx] * c;
            o2[idx] = t.t12[idx] * a + t.t22[idx] * b + self.c_mu * t.b23[idx] * c;
            o3[idx] = self.c_eps * (t.b13[idx] * a + t.b23[idx] * b) + t.t33[idx] * c;
        }
        for (b, o) in ws.out.iter_mut().enumerate() {
            self.fft.transform(o, &mut ws.scratch, true);
            let diag = if b < 2 { &t.diag_e } else { &t.diag_h };
            for (cell, dg) in diag.iter().enumerate() {
                let (i, j) = (cell % n1, cell / n1);
                y[b * n + cell] = dg * x[b * n + cell] + o[j * m1 + i];
            }
        }
        Ok(())
    }
}
