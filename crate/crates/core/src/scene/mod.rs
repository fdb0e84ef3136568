//! Physical problem description: background medium, grid, contrast and the
//! incident TE plane wave.
//!
//! Units are SI throughout. The time convention is `exp(-i omega t)`, so a
//! passive medium has `Im(chi) >= 0`.
//!
//! Cells are numbered `n = j * n1 + i` with `i` running along `x1`. A
//! [`FieldVector`] stores the three field components in contiguous blocks
//! `[E1 (N) | E2 (N) | H3 (N)]`.

pub mod config;

use std::f64::consts::PI;
use std::ops::Sub;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Lossless homogeneous background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundMedium {
    omega: f64,
    eps_b: f64,
    mu_b: f64,
}

impl BackgroundMedium {
    pub fn new(omega: f64, eps_b: f64, mu_b: f64) -> Result<Self> {
        for (name, v) in [("omega", omega), ("eps_b", eps_b), ("mu_b", mu_b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self { omega, eps_b, mu_b })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn eps_b(&self) -> f64 {
        self.eps_b
    }

    pub fn mu_b(&self) -> f64 {
        self.mu_b
    }

    /// `omega * sqrt(eps_b * mu_b)`, recomputed on every call.
    pub fn k_b(&self) -> f64 {
        self.omega * (self.eps_b * self.mu_b).sqrt()
    }

    /// Wave impedance `sqrt(mu_b / eps_b)`.
    pub fn impedance(&self) -> f64 {
        (self.mu_b / self.eps_b).sqrt()
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k_b()
    }
}

/// Uniform square-cell grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    origin: [f64; 2],
    h: f64,
    n1: usize,
    n2: usize,
}

impl Grid2D {
    pub fn new(origin: [f64; 2], h: f64, n1: usize, n2: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::config(format!("cell size h must be positive, got {h}")));
        }
        if n1 == 0 || n2 == 0 {
            return Err(Error::config(format!(
                "grid needs at least one cell per axis, got {n1}x{n2}"
            )));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(Error::config("grid origin must be finite"));
        }
        Ok(Self { origin, h, n1, n2 })
    }

    /// Grid of `n1 x n2` cells centred on `center`.
    pub fn centered(center: [f64; 2], h: f64, n1: usize, n2: usize) -> Result<Self> {
        let origin = [center[0] - 0.5 * h * n1 as f64, center[1] - 0.5 * h * n2 as f64];
        Self::new(origin, h, n1, n2)
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn num_cells(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2);
        j * self.n1 + i
    }

    pub fn ij(&self, n: usize) -> (usize, usize) {
        (n % self.n1, n / self.n1)
    }

    pub fn cell_center(&self, n: usize) -> [f64; 2] {
        let (i, j) = self.ij(n);
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    pub fn centers(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.num_cells()).map(move |n| self.cell_center(n))
    }
}

/// Analytic region used to rasterize a contrast at cell centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    Annulus {
        center: [f64; 2],
        inner: f64,
        outer: f64,
    },
    Square {
        center: [f64; 2],
        side: f64,
    },
}

impl Shape {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Shape::Disk { center, radius } => (p[0] - center[0]).hypot(p[1] - center[1]) < radius,
            Shape::Annulus { center, inner, outer } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                r >= inner && r < outer
            }
            Shape::Square { center, side } => {
                let half = 0.5 * side;
                (p[0] - center[0]).abs() < half && (p[1] - center[1]).abs() < half
            }
        }
    }
}

/// A shape carrying uniform contrast values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastShape {
    pub shape: Shape,
    pub chi_e: Complex64,
    pub chi_m: Complex64,
}

/// Per-cell normalized contrasts `eps/eps_b - 1` and `mu/mu_b - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastMap {
    chi_e: Vec<Complex64>,
    chi_m: Vec<Complex64>,
}

impl ContrastMap {
    pub fn new(chi_e: Vec<Complex64>, chi_m: Vec<Complex64>) -> Result<Self> {
        if chi_e.len() != chi_m.len() {
            return Err(Error::config(format!(
                "chi_e has {} cells but chi_m has {}",
                chi_e.len(),
                chi_m.len()
            )));
        }
        if let Some(n) = chi_e
            .iter()
            .chain(chi_m.iter())
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::config(format!(
                "non-finite contrast value at cell {}",
                n % chi_e.len().max(1)
            )));
        }
        Ok(Self { chi_e, chi_m })
    }

    pub fn uniform(cells: usize, chi_e: Complex64, chi_m: Complex64) -> Self {
        Self {
            chi_e: vec![chi_e; cells],
            chi_m: vec![chi_m; cells],
        }
    }

    /// Mid-point rasterization; later shapes override earlier ones.
    pub fn from_shapes(grid: &Grid2D, shapes: &[ContrastShape]) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut map = Self::uniform(grid.num_cells(), zero, zero);
        for (n, c) in grid.centers().enumerate() {
            for s in shapes {
                if s.shape.contains(c) {
                    map.chi_e[n] = s.chi_e;
                    map.chi_m[n] = s.chi_m;
                }
            }
        }
        map
    }

    pub fn len(&self) -> usize {
        self.chi_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi_e.is_empty()
    }

    pub fn chi_e(&self) -> &[Complex64] {
        &self.chi_e
    }

    pub fn chi_m(&self) -> &[Complex64] {
        &self.chi_m
    }

    /// `Im(chi) >= 0` everywhere.
    pub fn is_passive(&self) -> bool {
        self.chi_e.iter().chain(self.chi_m.iter()).all(|c| c.im >= 0.0)
    }

    pub fn has_magnetic_contrast(&self) -> bool {
        self.chi_m.iter().any(|c| c.norm_sqr() > 0.0)
    }
}

/// Immutable, validated problem aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    medium: BackgroundMedium,
    grid: Grid2D,
    contrast: ContrastMap,
}

impl Scene {
    pub fn new(medium: BackgroundMedium, grid: Grid2D, contrast: ContrastMap) -> Result<Self> {
        if contrast.len() != grid.num_cells() {
            return Err(Error::config(format!(
                "contrast has {} cells, grid {}x{} needs {}",
                contrast.len(),
                grid.n1(),
                grid.n2(),
                grid.num_cells()
            )));
        }
        let scene = Self {
            medium,
            grid,
            contrast,
        };
        if scene.kb_h() > PI / 5.0 {
            log::warn!(
                "k_b*h = {:.3} exceeds pi/5; fewer than 10 cells per wavelength",
                scene.kb_h()
            );
        }
        Ok(scene)
    }

    pub fn medium(&self) -> &BackgroundMedium {
        &self.medium
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn contrast(&self) -> &ContrastMap {
        &self.contrast
    }

    pub fn num_cells(&self) -> usize {
        self.grid.num_cells()
    }

    /// Number of unknowns, `3N`.
    pub fn dim(&self) -> usize {
        3 * self.grid.num_cells()
    }

    pub fn kb_h(&self) -> f64 {
        self.medium.k_b() * self.grid.h()
    }
}

/// Validates the pieces and builds a [`Scene`].
pub fn make_scene(medium: BackgroundMedium, grid: Grid2D, contrast: ContrastMap) -> Result<Scene> {
    Scene::new(medium, grid, contrast)
}

/// Per-cell `(E1, E2, H3)` in block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    cells: usize,
    data: Vec<Complex64>,
}

impl FieldVector {
    pub fn zeros(cells: usize) -> Self {
        Self {
            cells,
            data: vec![Complex64::new(0.0, 0.0); 3 * cells],
        }
    }

    pub fn from_vec(cells: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != 3 * cells {
            return Err(Error::domain(format!(
                "field vector for {cells} cells needs length {}, got {}",
                3 * cells,
                data.len()
            )));
        }
        Ok(Self { cells, data })
    }

    pub fn from_blocks(e1: &[Complex64], e2: &[Complex64], h3: &[Complex64]) -> Result<Self> {
        let cells = e1.len();
        if e2.len() != cells || h3.len() != cells {
            return Err(Error::domain("field blocks differ in length"));
        }
        let mut data = Vec::with_capacity(3 * cells);
        data.extend_from_slice(e1);
        data.extend_from_slice(e2);
        data.extend_from_slice(h3);
        Ok(Self { cells, data })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn e1(&self) -> &[Complex64] {
        &self.data[..self.cells]
    }

    pub fn e2(&self) -> &[Complex64] {
        &self.data[self.cells..2 * self.cells]
    }

    pub fn h3(&self) -> &[Complex64] {
        &self.data[2 * self.cells..]
    }

    /// Component block by index 0, 1, 2 for E1, E2, H3.
    pub fn block(&self, b: usize) -> &[Complex64] {
        &self.data[b * self.cells..(b + 1) * self.cells]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.data)
    }
}

impl Sub for &FieldVector {
    type Output = FieldVector;

    fn sub(self, rhs: &FieldVector) -> FieldVector {
        assert_eq!(self.cells, rhs.cells, "field vectors differ in size");
        FieldVector {
            cells: self.cells,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub(crate) fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// TE plane wave `H3 = amplitude * exp(i k_b d.x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveTE {
    direction: [f64; 2],
    amplitude_h3: Complex64,
}

impl PlaneWaveTE {
    /// `direction` is normalized; it must be finite and nonzero.
    pub fn new(direction: [f64; 2], amplitude_h3: Complex64) -> Result<Self> {
        let len = direction[0].hypot(direction[1]);
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::config(
                "plane-wave direction must be a nonzero finite vector",
            ));
        }
        if !(amplitude_h3.re.is_finite() && amplitude_h3.im.is_finite()) {
            return Err(Error::config("plane-wave amplitude must be finite"));
        }
        Ok(Self {
            direction: [direction[0] / len, direction[1] / len],
            amplitude_h3,
        })
    }

    pub fn from_angle(angle: f64, amplitude_h3: Complex64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::new([c, s], amplitude_h3)
    }

    pub fn direction(&self) -> [f64; 2] {
        self.direction
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude_h3
    }

    /// `(E1, E2, H3)` at `x`. The electric field follows from the source-free
    /// TE Maxwell system: `E = eta * H3 * (-d2, d1)`.
    pub fn fields_at(&self, x: [f64; 2], medium: &BackgroundMedium) -> [Complex64; 3] {
        let [d1, d2] = self.direction;
        let phase = medium.k_b() * (d1 * x[0] + d2 * x[1]);
        let h3 = self.amplitude_h3 * Complex64::from_polar(1.0, phase);
        let e = h3 * medium.impedance();
        [-e * d2, e * d1, h3]
    }
}

/// Samples the incident wave at every cell centre.
pub fn incident_fields(wave: &PlaneWaveTE, scene: &Scene) -> FieldVector {
    let n = scene.num_cells();
    let mut out = FieldVector::zeros(n);
    let data = out.as_mut_slice();
    for (idx, x) in scene.grid().centers().enumerate() {
        let [e1, e2, h3] = wave.fields_at(x, scene.medium());
        data[idx] = e1;
        data[n + idx] = e2;
        data[2 * n + idx] = h3;
    }
    out
}
