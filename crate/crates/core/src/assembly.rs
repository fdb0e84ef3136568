//! Dense system matrix of the collocated TE equations.
//!
//! The unknown vector is `[E1 | E2 | H3]` over all cells; the matrix is stored
//! column-major with the same 3x3 block layout, so entry `(b N + n, c N + m)`
//! couples component `c` at cell `m` into equation `b` at cell `n`.
//!
//! Off-diagonal elements use the closed forms with `r = |x_n - x_m|` and
//! `θ = (x_n - x_m) / r`; the sums run over every `m != n`. Diagonal elements
//! come from integrating the singular tensor over a disk of the same area as
//! the cell, radius `a = h / sqrt(π)`.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scene::{incident_fields, FieldVector, PlaneWaveTE, Scene};
use crate::specfun::hankel01;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default cap on dense storage, 4 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

const DUMP_MAGIC: &[u8; 6] = b"TEVIE\0";
const DUMP_VERSION: u32 = 1;

/// Equal-area disk radius and the self-cell bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfTermConstants {
    /// `h / sqrt(π)`.
    pub a_n: f64,
    /// `(iπ a k_b / 4) H1(k_b a) - 1/2`.
    pub l_diag: Complex64,
    /// Bracket multiplying `χe` on the E diagonals.
    pub e_bracket: Complex64,
    /// Bracket multiplying `χm` on the H3 diagonal.
    pub h_bracket: Complex64,
}

impl SelfTermConstants {
    pub fn new(k_b: f64, h: f64) -> Result<Self> {
        if !(k_b > 0.0 && k_b.is_finite() && h > 0.0 && h.is_finite()) {
            return Err(Error::domain(format!(
                "self term needs k_b > 0 and h > 0, got {k_b}, {h}"
            )));
        }
        let sqrt_pi = PI.sqrt();
        let a_n = h / sqrt_pi;
        let (_, h1) = hankel01(k_b * a_n);
        let l_diag = I * (PI * a_n * k_b / 4.0) * h1 - 0.5;
        let e_bracket = ONE - I * (PI * k_b * h / (4.0 * sqrt_pi)) * h1;
        let h_bracket = ONE - I * (PI * k_b * h / (2.0 * sqrt_pi)) * h1;
        Ok(Self {
            a_n,
            l_diag,
            e_bracket,
            h_bracket,
        })
    }
}

/// `-1/2 + (iπ a k_b / 4) H1(k_b a)` with `a = h / sqrt(π)`.
pub fn self_term(k_b: f64, h: f64) -> Result<Complex64> {
    Ok(SelfTermConstants::new(k_b, h)?.l_diag)
}

/// Scene-wide constants shared by every element evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ElementContext {
    k: f64,
    h2: f64,
    i_omega_mu: Complex64,
    i_omega_eps: Complex64,
    e_bracket: Complex64,
    h_bracket: Complex64,
}

impl ElementContext {
    pub(crate) fn new(scene: &Scene) -> Self {
        let m = scene.medium();
        let h = scene.grid().h();
        let st = SelfTermConstants::new(m.k_b(), h).expect("validated scene");
        Self {
            k: m.k_b(),
            h2: h * h,
            i_omega_mu: I * m.omega() * m.mu_b(),
            i_omega_eps: I * m.omega() * m.eps_b(),
            e_bracket: st.e_bracket,
            h_bracket: st.h_bracket,
        }
    }

    pub(crate) fn e_bracket(&self) -> Complex64 {
        self.e_bracket
    }

    pub(crate) fn h_bracket(&self) -> Complex64 {
        self.h_bracket
    }
}

/// The 3x3 block `[row component][column component]` coupling cell `m`
/// into the equations at cell `n`.
pub fn element_block(scene: &Scene, n: usize, m: usize) -> [[Complex64; 3]; 3] {
    element_block_with(&ElementContext::new(scene), scene, n, m)
}

pub(crate) fn element_block_with(
    ctx: &ElementContext,
    scene: &Scene,
    n: usize,
    m: usize,
) -> [[Complex64; 3]; 3] {
    let chi_e = scene.contrast().chi_e()[m];
    let chi_m = scene.contrast().chi_m()[m];
    let mut blk = [[ZERO; 3]; 3];
    if n == m {
        blk[0][0] = ONE + ctx.e_bracket * chi_e;
        blk[1][1] = ONE + ctx.e_bracket * chi_e;
        blk[2][2] = ONE + ctx.h_bracket * chi_m;
        return blk;
    }
    let xn = scene.grid().cell_center(n);
    let xm = scene.grid().cell_center(m);
    let (d1, d2) = (xn[0] - xm[0], xn[1] - xm[1]);
    let r = d1.hypot(d2);
    let th = [d1 / r, d2 / r];
    let kr = ctx.k * r;
    let (h0, h1) = hankel01(kr);

    let pre_e = -ctx.k * ctx.k * ctx.h2 * chi_e;
    let c_tt = I / (2.0 * kr) * h1 - I / 4.0 * h0;
    let c_delta = I / 4.0 * h0 - I / (4.0 * kr) * h1;
    for l in 0..2 {
        blk[l][l] = pre_e * (c_tt * th[l] * th[l] + c_delta);
    }
    let off = pre_e * c_tt * th[0] * th[1];
    blk[0][1] = off;
    blk[1][0] = off;

    let kh1 = I * ctx.k / 4.0 * h1;
    blk[0][2] = ctx.i_omega_mu * ctx.h2 * chi_m * kh1 * th[1];
    blk[1][2] = -ctx.i_omega_mu * ctx.h2 * chi_m * kh1 * th[0];
    blk[2][0] = ctx.i_omega_eps * ctx.h2 * chi_e * kh1 * th[1];
    blk[2][1] = -ctx.i_omega_eps * ctx.h2 * chi_e * kh1 * th[0];
    blk[2][2] = -ctx.k * ctx.k * ctx.h2 * chi_m * I / 4.0 * h0;
    blk
}

/// Dense `3N x 3N` matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystemMatrix {
    cells: usize,
    data: Vec<Complex64>,
}

impl DenseSystemMatrix {
    pub fn identity(cells: usize) -> Self {
        let dim = 3 * cells;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Self { cells, data }
    }

    pub fn from_column_major(cells: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = 3 * cells;
        if data.len() != dim * dim {
            return Err(Error::domain(format!(
                "dense matrix for {cells} cells needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { cells, data })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dim(&self) -> usize {
        3 * self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.dim() + row]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        let dim = self.dim();
        self.data[col * dim + row] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_faer(&self) -> faer::MatRef<'_, Complex64> {
        faer::MatRef::from_column_major_slice(&self.data, self.dim(), self.dim())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.dim();
        if x.len() != dim {
            return Err(Error::domain(format!(
                "matvec needs length {dim}, got {}",
                x.len()
            )));
        }
        let mut y = vec![ZERO; dim];
        for (col, xc) in self.data.chunks_exact(dim).zip(x) {
            if *xc == ZERO {
                continue;
            }
            for (yi, a) in y.iter_mut().zip(col) {
                *yi += a * xc;
            }
        }
        Ok(y)
    }

    /// Writes the binary dump: magic, version, `N`, then column-major
    /// complex128 entries, all little-endian.
    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&(self.cells as u64).to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_dump(path: &Path) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Numerical("not a matrix dump (bad magic)".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != DUMP_VERSION {
            return Err(Error::Numerical(format!("unsupported dump version {version}")));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let cells = u64::from_le_bytes(b8) as usize;
        let dim = 3 * cells;
        let mut data = Vec::with_capacity(dim * dim);
        for _ in 0..dim * dim {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            data.push(Complex64::new(re, f64::from_le_bytes(b8)));
        }
        Self::from_column_major(cells, data)
    }
}

/// Bytes needed to hold the dense matrix of a scene.
pub fn dense_bytes(cells: usize) -> u64 {
    let dim = 3 * cells as u64;
    dim * dim * std::mem::size_of::<Complex64>() as u64
}

pub fn check_dense_budget(cells: usize, budget_bytes: u64) -> Result<()> {
    let required = dense_bytes(cells);
    if required > budget_bytes {
        return Err(Error::Resource {
            what: format!("dense {0}x{0} system matrix (bytes)", 3 * cells),
            required,
            budget: budget_bytes,
        });
    }
    Ok(())
}

/// Assembles the dense matrix under [`DEFAULT_MEMORY_BUDGET`].
pub fn assemble_dense(scene: &Scene) -> Result<DenseSystemMatrix> {
    assemble_dense_with_budget(scene, DEFAULT_MEMORY_BUDGET)
}

pub fn assemble_dense_with_budget(scene: &Scene, budget_bytes: u64) -> Result<DenseSystemMatrix> {
    let n = scene.num_cells();
    check_dense_budget(n, budget_bytes)?;
    let dim = 3 * n;
    let ctx = ElementContext::new(scene);
    let mut data = vec![ZERO; dim * dim];
    let (c0, rest) = data.split_at_mut(n * dim);
    let (c1, c2) = rest.split_at_mut(n * dim);
    c0.par_chunks_mut(dim)
        .zip(c1.par_chunks_mut(dim))
        .zip(c2.par_chunks_mut(dim))
        .enumerate()
        .for_each(|(m, ((col0, col1), col2))| {
            for row in 0..n {
                let blk = element_block_with(&ctx, scene, row, m);
                for b in 0..3 {
                    col0[b * n + row] = blk[b][0];
                    col1[b * n + row] = blk[b][1];
                    col2[b * n + row] = blk[b][2];
                }
            }
        });
    Ok(DenseSystemMatrix { cells: n, data })
}

/// `A u` evaluated element by element, without storing `A`.
pub fn reference_matvec(scene: &Scene, u: &FieldVector) -> Result<FieldVector> {
    let n = scene.num_cells();
    if u.cells() != n {
        return Err(Error::domain(format!(
            "field has {} cells, scene has {n}",
            u.cells()
        )));
    }
    let ctx = ElementContext::new(scene);
    let rows: Vec<[Complex64; 3]> = (0..n)
        .into_par_iter()
        .map(|row| {
            let mut acc = [ZERO; 3];
            for m in 0..n {
                let blk = element_block_with(&ctx, scene, row, m);
                let um = [u.e1()[m], u.e2()[m], u.h3()[m]];
                for b in 0..3 {
                    acc[b] += blk[b][0] * um[0] + blk[b][1] * um[1] + blk[b][2] * um[2];
                }
            }
            acc
        })
        .collect();
    let mut out = FieldVector::zeros(n);
    let data = out.as_mut_slice();
    for (row, acc) in rows.iter().enumerate() {
        for b in 0..3 {
            data[b * n + row] = acc[b];
        }
    }
    Ok(out)
}

/// Right-hand side: the incident field sampled at cell centres.
pub fn assemble_rhs(scene: &Scene, wave: &PlaneWaveTE) -> FieldVector {
    incident_fields(wave, scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{tensor_a, tensor_b, Displacement};
    use crate::scene::{BackgroundMedium, ContrastMap, Grid2D};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scene_with(n1: usize, chi_e: Vec<Complex64>, chi_m: Vec<Complex64>, kh: f64) -> Scene {
        let medium = BackgroundMedium::new(1.3, 1.2, 0.9).unwrap();
        let h = kh / medium.k_b();
        let grid = Grid2D::new([0.1, -0.2], h, n1, chi_e.len() / n1).unwrap();
        Scene::new(medium, grid, ContrastMap::new(chi_e, chi_m).unwrap()).unwrap()
    }

    fn varied(n: usize, seed: f64) -> Vec<Complex64> {
        (0..n)
            .map(|i| c(0.5 + (seed * i as f64).sin(), 0.1 * (i % 3) as f64))
            .collect()
    }

    #[test]
    fn self_term_limits() {
        let st = SelfTermConstants::new(2.0, 0.3).unwrap();
        assert!((PI * st.a_n * st.a_n - 0.09).abs() <= 0.09 * f64::EPSILON * 2.0);
        assert!(self_term(1.0, 1e-4).unwrap().norm() <= 1e-6);
        assert!(self_term(0.0, 1.0).is_err());
        assert!(self_term(1.0, -1.0).is_err());
        assert!((st.e_bracket - (0.5 - st.l_diag)).norm() < 1e-15);
        assert!((st.h_bracket - (-2.0 * st.l_diag)).norm() < 1e-15);
    }

    #[test]
    fn zero_contrast_is_identity() {
        let s = scene_with(3, vec![c(0.0, 0.0); 9], vec![c(0.0, 0.0); 9], 0.3);
        assert_eq!(assemble_dense(&s).unwrap(), DenseSystemMatrix::identity(9));
    }

    #[test]
    fn single_cell_is_diagonal() {
        let s = scene_with(1, vec![c(0.3, 0.1)], vec![c(0.2, 0.0)], 0.4);
        let a = assemble_dense(&s).unwrap();
        let st = SelfTermConstants::new(s.medium().k_b(), s.grid().h()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(a.get(i, j), c(0.0, 0.0));
                }
            }
        }
        assert_eq!(a.get(0, 0), ONE + st.e_bracket * c(0.3, 0.1));
        assert_eq!(a.get(2, 2), ONE + st.h_bracket * c(0.2, 0.0));
    }

    #[test]
    fn diagonal_small_argument_limit() {
        let s = scene_with(1, vec![c(0.3, 0.0)], vec![c(0.7, 0.0)], 1e-3);
        let a = assemble_dense(&s).unwrap();
        assert!((a.get(0, 0) - 1.15).norm() < 1e-4);
        assert!((a.get(1, 1) - 1.15).norm() < 1e-4);
        assert!((a.get(2, 2) - 1.0).norm() < 1e-4);
    }

    #[test]
    fn diagonal_brackets_match_independent_constants() {
        let (k, h) = (1.7, 0.21);
        let x = k * h / PI.sqrt();
        let (_, h1) = hankel01(x);
        let st = SelfTermConstants::new(k, h).unwrap();
        let e = ONE - I * (PI * x / 4.0) * h1;
        let m = ONE - I * (PI * x / 2.0) * h1;
        assert!((st.e_bracket - e).norm() < 1e-14);
        assert!((st.h_bracket - m).norm() < 1e-14);
    }

    #[test]
    fn off_diagonal_blocks_match_tensors() {
        let n = 16;
        let s = scene_with(4, varied(n, 0.7), varied(n, 1.3), 0.35);
        let k = s.medium().k_b();
        let h2 = s.grid().cell_area();
        let iwm = I * s.medium().omega() * s.medium().mu_b();
        let iwe = I * s.medium().omega() * s.medium().eps_b();
        for row in 0..n {
            for col in 0..n {
                if row == col {
                    continue;
                }
                let blk = element_block(&s, row, col);
                let d = Displacement::between(s.grid().cell_center(row), s.grid().cell_center(col));
                let a = tensor_a(&d, k).unwrap();
                let b = tensor_b(&d, k).unwrap();
                let ce = s.contrast().chi_e()[col];
                let cm = s.contrast().chi_m()[col];
                let scale = blk.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
                for p in 0..2 {
                    for q in 0..2 {
                        let want = -h2 * ce * a[(p, q)];
                        assert!((blk[p][q] - want).norm() < 1e-12 * scale);
                    }
                    let want = -iwm * h2 * cm * b[(p, 2)];
                    assert!((blk[p][2] - want).norm() < 1e-12 * scale);
                    let want = iwe * h2 * ce * b[(2, p)];
                    assert!((blk[2][p] - want).norm() < 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn column_scaling_is_linear() {
        let n = 9;
        let chi = varied(n, 0.3);
        let s1 = scene_with(3, chi.clone(), chi.clone(), 0.3);
        let mut chi2 = chi.clone();
        chi2[4] *= 2.0;
        let s2 = scene_with(3, chi2, chi.clone(), 0.3);
        let a1 = assemble_dense(&s1).unwrap();
        let a2 = assemble_dense(&s2).unwrap();
        for row in 0..27 {
            for &col in &[4usize, 9 + 4] {
                let base = a1.get(row, col) - if row == col { ONE } else { ZERO };
                let dbl = a2.get(row, col) - if row == col { ONE } else { ZERO };
                assert!((dbl - 2.0 * base).norm() <= 1e-15 * base.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn uniform_contrast_offdiagonal_symmetry() {
        let n = 12;
        let s = scene_with(4, vec![c(0.8, 0.1); n], vec![c(0.3, 0.0); n], 0.3);
        let a = assemble_dense(&s).unwrap();
        for row in 0..n {
            for col in 0..n {
                assert_eq!(a.get(row, n + col), a.get(n + row, col));
            }
        }
    }

    #[test]
    fn reference_matvec_matches_dense() {
        let n = 12;
        let s = scene_with(4, varied(n, 0.9), varied(n, 0.4), 0.5);
        let a = assemble_dense(&s).unwrap();
        let u: Vec<Complex64> = (0..3 * n)
            .map(|i| c((i as f64).cos(), (0.5 * i as f64).sin()))
            .collect();
        let dense = a.matvec(&u).unwrap();
        let refv = reference_matvec(&s, &FieldVector::from_vec(n, u).unwrap()).unwrap();
        for (x, y) in dense.iter().zip(refv.as_slice()) {
            assert!((x - y).norm() < 1e-13 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn budget_and_dump_roundtrip() {
        let s = scene_with(2, varied(4, 0.2), varied(4, 0.5), 0.3);
        assert!(matches!(
            assemble_dense_with_budget(&s, 100),
            Err(Error::Resource { .. })
        ));
        let a = assemble_dense(&s).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        a.write_dump(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..6], b"TEVIE\0");
        assert_eq!(bytes.len(), 6 + 4 + 8 + 144 * 16);
        assert_eq!(DenseSystemMatrix::read_dump(&path).unwrap(), a);
    }

    #[test]
    fn rhs_is_incident_field() {
        let s = scene_with(2, vec![c(0.0, 0.0); 4], vec![c(0.0, 0.0); 4], 0.3);
        let w = PlaneWaveTE::new([0.0, 1.0], c(0.0, 0.0)).unwrap();
        assert_eq!(assemble_rhs(&s, &w).norm(), 0.0);
        let w = PlaneWaveTE::new([0.0, 1.0], c(1.0, 0.0)).unwrap();
        for h in assemble_rhs(&s, &w).h3() {
            assert!((h.norm() - 1.0).abs() < 1e-15);
        }
    }
}
