//! Linear solvers for the system `A u = b`.
//!
//! [`solve_iterative`] is restarted GMRES with modified Gram-Schmidt Arnoldi
//! and complex Givens rotations, over any [`LinearOperator`]. An optional
//! left diagonal scaling `M` turns the problem into `M A u = M b`; the
//! recorded residual history is then the scaled residual relative to
//! `‖M b‖`, while convergence is always confirmed on the true residual
//! `‖b - A u‖ / ‖b‖`.
//!
//! [`solve_direct`] is an LU factorization with partial pivoting.

use std::str::FromStr;

use faer::linalg::solvers::Solve;
use num_complex::Complex64;

use crate::assembly::{DenseSystemMatrix, SelfTermConstants};
use crate::error::{Error, Result};
use crate::fastop::FastOperator;
use crate::scene::{norm2, FieldVector, Scene};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Pivots below this magnitude make [`solve_direct`] fail.
pub const SINGULAR_PIVOT: f64 = 1e-300;

/// Square operator acting on `[E1 | E2 | H3]` vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()>;
}

impl LinearOperator for DenseSystemMatrix {
    fn dim(&self) -> usize {
        DenseSystemMatrix::dim(self)
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::domain("output length does not match the matrix"));
        }
        y.copy_from_slice(&self.matvec(x)?);
        Ok(())
    }
}

impl LinearOperator for FastOperator {
    fn dim(&self) -> usize {
        FastOperator::dim(self)
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        self.apply_slice(x, y)
    }
}

/// Which left preconditioner to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    #[default]
    None,
    SymbolDiagonal,
}

impl FromStr for Preconditioner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Preconditioner::None),
            "symbol_diagonal" => Ok(Preconditioner::SymbolDiagonal),
            other => Err(Error::config(format!(
                "unknown preconditioner {other:?}; expected none or symbol_diagonal"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub rel_tolerance: f64,
    pub max_iterations: usize,
    pub restart: usize,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-8,
            max_iterations: 2000,
            restart: 80,
            preconditioner: Preconditioner::None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance < 1.0) {
            return Err(Error::config(format!(
                "tolerance must lie in (0, 1), got {}",
                self.rel_tolerance
            )));
        }
        if self.restart < 1 {
            return Err(Error::config("restart must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: FieldVector,
    /// Relative residual before the first iteration and after every one.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖b - A u‖ / ‖b‖` of the returned solution.
    pub true_relative_residual: f64,
    /// Set when the Krylov process broke down before convergence.
    pub breakdown: Option<String>,
}

/// Left diagonal scaling applied row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalScaling {
    pub scale: Vec<Complex64>,
}

impl DiagonalScaling {
    fn apply(&self, v: &mut [Complex64]) {
        v.iter_mut().zip(&self.scale).for_each(|(x, s)| *x *= s);
    }
}

/// E rows of cell `n` scale by `1 / (1 + χe/2)`, the H3 row by
/// `1 / (1 + c33 χm)` with `c33` the H3 diagonal bracket.
pub fn precondition_symbol_diagonal(scene: &Scene) -> Result<DiagonalScaling> {
    let n = scene.num_cells();
    let st = SelfTermConstants::new(scene.medium().k_b(), scene.grid().h())?;
    let mut scale = vec![ONE; 3 * n];
    for (cell, (ce, cm)) in scene
        .contrast()
        .chi_e()
        .iter()
        .zip(scene.contrast().chi_m())
        .enumerate()
    {
        let de = ONE + ce * 0.5;
        let dh = ONE + st.h_bracket * cm;
        for (d, what) in [(de, "chi_e"), (dh, "chi_m")] {
            if d.norm() < 1e-14 {
                return Err(Error::domain(format!(
                    "degenerate contrast at cell {cell}: {what} makes the diagonal scaling singular"
                )));
            }
        }
        scale[cell] = ONE / de;
        scale[n + cell] = ONE / de;
        scale[2 * n + cell] = ONE / dh;
    }
    Ok(DiagonalScaling { scale })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn residual(op: &dyn LinearOperator, x: &[Complex64], b: &[Complex64], out: &mut [Complex64]) -> Result<()> {
    op.apply_into(x, out)?;
    out.iter_mut().zip(b).for_each(|(r, bi)| *r = bi - *r);
    Ok(())
}

/// Complex Givens rotation `[c, s; -conj(s), c]` zeroing `b` against `a`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

/// Builds the scaling requested by `cfg` and solves.
pub fn solve_scene(
    scene: &Scene,
    op: &dyn LinearOperator,
    b: &FieldVector,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let scaling = match cfg.preconditioner {
        Preconditioner::None => None,
        Preconditioner::SymbolDiagonal => Some(precondition_symbol_diagonal(scene)?),
    };
    solve_iterative(op, b, cfg, scaling.as_ref())
}

/// Restarted GMRES from a zero initial guess.
pub fn solve_iterative(
    op: &dyn LinearOperator,
    b: &FieldVector,
    cfg: &SolverConfig,
    scaling: Option<&DiagonalScaling>,
) -> Result<SolveReport> {
    cfg.validate()?;
    let dim = op.dim();
    if b.len() != dim {
        return Err(Error::domain(format!(
            "right-hand side has length {}, operator dimension is {dim}",
            b.len()
        )));
    }
    if let Some(s) = scaling {
        if s.scale.len() != dim {
            return Err(Error::domain("scaling length does not match the operator"));
        }
    }
    let bv = b.as_slice();
    let b_norm = norm2(bv);
    let cells = b.cells();
    if b_norm == 0.0 {
        return Ok(SolveReport {
            solution: FieldVector::zeros(cells),
            residual_history: vec![0.0],
            iterations: 0,
            converged: true,
            true_relative_residual: 0.0,
            breakdown: None,
        });
    }
    let precondition = |v: &mut [Complex64]| {
        if let Some(s) = scaling {
            s.apply(v);
        }
    };
    let mut mb = bv.to_vec();
    precondition(&mut mb);
    let mb_norm = norm2(&mb);

    let m = cfg.restart.min(dim).max(1);
    let tol = cfg.rel_tolerance;
    let mut target = tol;
    let mut x = vec![ZERO; dim];
    let mut r = vec![ZERO; dim];
    let mut w = vec![ZERO; dim];
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
    let mut hess = vec![vec![ZERO; m + 1]; m];
    let mut cs = vec![0.0; m];
    let mut sn = vec![ZERO; m];
    let mut g = vec![ZERO; m + 1];

    let mut history = vec![1.0];
    let mut iterations = 0;
    let mut converged = false;
    let mut breakdown = None;
    let mut true_rel;

    loop {
        residual(op, &x, bv, &mut r)?;
        true_rel = norm2(&r) / b_norm;
        if true_rel <= tol && (iterations > 0 || true_rel == 0.0) {
            converged = true;
            break;
        }
        precondition(&mut r);
        let beta = norm2(&r);
        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = ZERO);
        g[0] = beta.into();

        let mut k = 0;
        let mut cycle_breakdown = false;
        while k < m && iterations < cfg.max_iterations {
            op.apply_into(&basis[k], &mut w)?;
            precondition(&mut w);
            iterations += 1;
            let col = &mut hess[k];
            col.iter_mut().for_each(|v| *v = ZERO);
            for _pass in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let hij = dot(v, &w);
                    col[i] += hij;
                    axpy(-hij, v, &mut w);
                }
            }
            let h_next = norm2(&w);
            col[k + 1] = h_next.into();
            for i in 0..k {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = cs[i] * a + sn[i] * bb;
                col[i + 1] = -sn[i].conj() * a + cs[i] * bb;
            }
            let (c, s) = givens(col[k], col[k + 1]);
            cs[k] = c;
            sn[k] = s;
            col[k] = c * col[k] + s * col[k + 1];
            col[k + 1] = ZERO;
            g[k + 1] = -s.conj() * g[k];
            g[k] *= c;
            let res = g[k + 1].norm() / mb_norm;
            history.push(res);
            k += 1;
            if res <= target {
                break;
            }
            let col_scale = col[..k].iter().map(|v| v.norm()).fold(h_next, f64::max);
            if h_next <= 1e-14 * col_scale {
                cycle_breakdown = true;
                break;
            }
            basis.push(w.iter().map(|v| v / h_next).collect());
        }

        let mut y = vec![ZERO; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= hess[j][i] * y[j];
            }
            let d = hess[i][i];
            if d.norm() == 0.0 {
                breakdown = Some(format!("singular Hessenberg matrix at Arnoldi step {}", i + 1));
                break;
            }
            y[i] = acc / d;
        }
        if breakdown.is_some() {
            residual(op, &x, bv, &mut r)?;
            true_rel = norm2(&r) / b_norm;
            break;
        }
        for (yi, v) in y.iter().zip(&basis) {
            axpy(*yi, v, &mut x);
        }

        let last = *history.last().unwrap_or(&1.0);
        if last <= target {
            residual(op, &x, bv, &mut r)?;
            true_rel = norm2(&r) / b_norm;
            if true_rel <= tol {
                converged = true;
                break;
            }
            target = (target * 0.5 * tol / true_rel).min(target * 0.5);
            if target < 1e-15 {
                breakdown = Some(format!(
                    "scaled residual converged but the true residual stalls at {true_rel:e}"
                ));
                break;
            }
            if iterations >= cfg.max_iterations {
                break;
            }
            continue;
        }
        if cycle_breakdown {
            residual(op, &x, bv, &mut r)?;
            true_rel = norm2(&r) / b_norm;
            if true_rel <= tol {
                converged = true;
            } else {
                breakdown = Some(format!(
                    "Krylov breakdown after {iterations} iterations with relative residual {true_rel:e}"
                ));
            }
            break;
        }
        if iterations >= cfg.max_iterations {
            residual(op, &x, bv, &mut r)?;
            true_rel = norm2(&r) / b_norm;
            break;
        }
    }

    if let Some(msg) = &breakdown {
        log::warn!("GMRES: {msg}");
    }
    Ok(SolveReport {
        solution: FieldVector::from_vec(cells, x)?,
        residual_history: history,
        iterations,
        converged,
        true_relative_residual: true_rel,
        breakdown,
    })
}

/// Dense LU solve with partial pivoting.
pub fn solve_direct(a: &DenseSystemMatrix, b: &FieldVector) -> Result<FieldVector> {
    let dim = a.dim();
    if b.len() != dim {
        return Err(Error::domain(format!(
            "right-hand side has length {}, matrix dimension is {dim}",
            b.len()
        )));
    }
    let lu = a.as_faer().partial_piv_lu();
    let u = lu.U();
    for i in 0..dim {
        let p = u[(i, i)].norm();
        if p.is_nan() || p < SINGULAR_PIVOT {
            return Err(Error::Singular { column: i, pivot: p });
        }
    }
    let mut x = b.as_slice().to_vec();
    lu.solve_in_place(faer::MatMut::from_column_major_slice_mut(&mut x, dim, 1));
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numerical("LU solve produced non-finite values".into()));
    }
    FieldVector::from_vec(b.cells(), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(cells: usize, seed: u64, diag: f64) -> DenseSystemMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 3 * cells;
        let mut data: Vec<Complex64> = (0..dim * dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / dim as f64)
            .collect();
        for i in 0..dim {
            data[i * dim + i] += diag;
        }
        DenseSystemMatrix::from_column_major(cells, data).unwrap()
    }

    fn random_field(cells: usize, seed: u64) -> FieldVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..3 * cells)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        FieldVector::from_vec(cells, v).unwrap()
    }

    fn rel_residual(a: &DenseSystemMatrix, x: &FieldVector, b: &FieldVector) -> f64 {
        let ax = a.matvec(x.as_slice()).unwrap();
        let r: Vec<_> = ax.iter().zip(b.as_slice()).map(|(p, q)| p - q).collect();
        norm2(&r) / b.norm()
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = DenseSystemMatrix::identity(5);
        let b = random_field(5, 1);
        let rep = solve_iterative(&a, &b, &SolverConfig::default(), None).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 1);
        assert!((&rep.solution - &b).norm() < 1e-14);
    }

    #[test]
    fn zero_rhs() {
        let a = random_matrix(2, 3, 1.0);
        let rep = solve_iterative(&a, &FieldVector::zeros(2), &SolverConfig::default(), None).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.solution.norm(), 0.0);
    }

    #[test]
    fn gmres_matches_direct_with_restarts() {
        let a = random_matrix(16, 4, 1.5);
        let b = random_field(16, 5);
        let cfg = SolverConfig {
            rel_tolerance: 1e-11,
            restart: 5,
            ..Default::default()
        };
        let rep = solve_iterative(&a, &b, &cfg, None).unwrap();
        assert!(rep.converged);
        assert!(rep.true_relative_residual <= 1e-11);
        let direct = solve_direct(&a, &b).unwrap();
        assert!((&rep.solution - &direct).norm() / direct.norm() < 1e-9);
        assert_eq!(rep.residual_history[0], 1.0);
        assert!(rep.residual_history.iter().all(|&r| r <= 1.0));
        let again = solve_iterative(&a, &b, &cfg, None).unwrap();
        assert_eq!(rep.residual_history, again.residual_history);
    }

    #[test]
    fn history_monotone_within_cycle() {
        let a = random_matrix(10, 8, 0.8);
        let b = random_field(10, 9);
        let cfg = SolverConfig {
            restart: 7,
            rel_tolerance: 1e-10,
            ..Default::default()
        };
        let rep = solve_iterative(&a, &b, &cfg, None).unwrap();
        for cycle in rep.residual_history[1..].chunks(7) {
            for w in cycle.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn max_iterations_reports_nonconvergence() {
        let a = random_matrix(10, 10, 0.3);
        let b = random_field(10, 11);
        let cfg = SolverConfig {
            max_iterations: 3,
            restart: 2,
            ..Default::default()
        };
        let rep = solve_iterative(&a, &b, &cfg, None).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }

    #[test]
    fn direct_solve_residual_and_diagonal() {
        let a = random_matrix(16, 12, 1.0);
        let b = random_field(16, 13);
        let x = solve_direct(&a, &b).unwrap();
        assert!(rel_residual(&a, &x, &b) < 1e-10);

        let mut d = DenseSystemMatrix::identity(1);
        let vals = [
            Complex64::new(2.0, 1.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 4.0),
        ];
        for (i, v) in vals.iter().enumerate() {
            d.set(i, i, *v);
        }
        let b = random_field(1, 14);
        let x = solve_direct(&d, &b).unwrap();
        for ((xi, bi), v) in x.as_slice().iter().zip(b.as_slice()).zip(&vals) {
            assert!((xi - bi / v).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let mut a = DenseSystemMatrix::identity(1);
        a.set(1, 1, ZERO);
        assert!(matches!(
            solve_direct(&a, &random_field(1, 1)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig {
            rel_tolerance: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SolverConfig {
            restart: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert_eq!(
            "symbol_diagonal".parse::<Preconditioner>().unwrap(),
            Preconditioner::SymbolDiagonal
        );
        assert!("jacobi".parse::<Preconditioner>().is_err());
    }
}
