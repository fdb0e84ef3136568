//! Mikhlin symbol of the singular operator.
//!
//! The singular kernel is `F(θ) / r²` with characteristic
//! `F(φ) = -(1/2π) [[cos 2φ, sin 2φ, 0], [sin 2φ, -cos 2φ, 0], [0, 0, 0]]`.
//! Its symbol follows from the Fourier coefficients of each entry,
//!
//! ```text
//! Smb(φ̃) = Σ_p γ_p [a_p sin(pφ̃) + b_p cos(pφ̃)],   γ_p = π i^p Γ(p/2) / Γ(p/2 + 1)
//! ```
//!
//! and the symbol of the complete operator is `I + χe Q(k̃)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::KernelTensor;
use crate::scene::ContrastMap;

/// Uniform trapezoid nodes used for every Fourier coefficient.
pub const QUADRATURE_NODES: usize = 512;

/// Default highest harmonic.
pub const DEFAULT_P_MAX: usize = 8;

pub type SymbolMatrix = KernelTensor;

/// Real function on the circle.
#[derive(Clone)]
pub struct AngularFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl AngularFunction {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        (self.f)(phi)
    }

    /// Trapezoid mean over the circle.
    pub fn mean(&self) -> f64 {
        let n = QUADRATURE_NODES;
        (0..n)
            .map(|j| self.eval(2.0 * PI * j as f64 / n as f64))
            .sum::<f64>()
            / n as f64
    }

    fn max_abs(&self) -> f64 {
        let n = QUADRATURE_NODES;
        (0..n)
            .map(|j| self.eval(2.0 * PI * j as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }
}

impl std::fmt::Debug for AngularFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("AngularFunction")
    }
}

/// Fourier coefficients `a_p = (1/π)∫ f sin(pφ)` and `b_p = (1/π)∫ f cos(pφ)`,
/// stored for `p = 1..=p_max` at index `p - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoefficients {
    pub sin: Vec<f64>,
    pub cos: Vec<f64>,
}

impl HarmonicCoefficients {
    pub fn p_max(&self) -> usize {
        self.sin.len()
    }

    pub fn sin_coef(&self, p: usize) -> f64 {
        self.sin[p - 1]
    }

    pub fn cos_coef(&self, p: usize) -> f64 {
        self.cos[p - 1]
    }
}

/// `F(φ)` for the in-plane singular kernel.
pub fn characteristic_matrix(phi: f64) -> [[f64; 3]; 3] {
    let f = -1.0 / (2.0 * PI);
    let (s, c) = (2.0 * phi).sin_cos();
    [[f * c, f * s, 0.0], [f * s, -f * c, 0.0], [0.0, 0.0, 0.0]]
}

/// Entries of [`characteristic_matrix`] as angular functions.
pub fn characteristic_functions() -> [[AngularFunction; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i < 2 && j < 2 {
                AngularFunction::new(move |phi| characteristic_matrix(phi)[i][j])
            } else {
                AngularFunction::zero()
            }
        })
    })
}

pub fn harmonic_coefficients(f: &AngularFunction, p_max: usize) -> Result<HarmonicCoefficients> {
    if p_max < 1 {
        return Err(Error::domain("p_max must be at least 1"));
    }
    let n = QUADRATURE_NODES;
    let step = 2.0 * PI / n as f64;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let phi = step * j as f64;
            (phi, f.eval(phi))
        })
        .collect();
    let mut sin = Vec::with_capacity(p_max);
    let mut cos = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let (mut a, mut b) = (0.0, 0.0);
        for &(phi, v) in &samples {
            let (s, c) = (p as f64 * phi).sin_cos();
            a += v * s;
            b += v * c;
        }
        sin.push(a * step / PI);
        cos.push(b * step / PI);
    }
    Ok(HarmonicCoefficients { sin, cos })
}

/// `γ_p = π i^p Γ(p/2) / Γ(p/2 + 1)`. Since `Γ(x + 1) = x Γ(x)` the gamma
/// ratio is exactly `2 / p`.
pub fn gamma_multiplier(p: i64) -> Result<Complex64> {
    if p < 1 {
        return Err(Error::domain(format!(
            "harmonic order must be at least 1, got {p}"
        )));
    }
    let ip = match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    Ok(ip * (2.0 * PI / p as f64))
}

/// Symbol reconstructed from harmonic coefficients of a characteristic.
#[derive(Debug, Clone)]
pub struct SymbolExpansion {
    coefficients: Vec<Vec<HarmonicCoefficients>>,
    gammas: Vec<Complex64>,
}

impl SymbolExpansion {
    pub fn p_max(&self) -> usize {
        self.gammas.len()
    }

    pub fn coefficients(&self, i: usize, j: usize) -> &HarmonicCoefficients {
        &self.coefficients[i][j]
    }

    /// `Smb(φ̃)`.
    pub fn eval(&self, phi_tilde: f64) -> SymbolMatrix {
        let mut t = KernelTensor::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let c = &self.coefficients[i][j];
                t.0[i][j] = self
                    .gammas
                    .iter()
                    .enumerate()
                    .map(|(idx, g)| {
                        let (s, co) = ((idx + 1) as f64 * phi_tilde).sin_cos();
                        g * (c.sin[idx] * s + c.cos[idx] * co)
                    })
                    .sum();
            }
        }
        t
    }
}

/// Expands a 3x3 characteristic; every entry must have zero mean.
pub fn symbol_from_characteristic(f: &[[AngularFunction; 3]; 3], p_max: usize) -> Result<SymbolExpansion> {
    let mut coefficients = Vec::with_capacity(3);
    for (i, row) in f.iter().enumerate() {
        let mut out = Vec::with_capacity(3);
        for (j, entry) in row.iter().enumerate() {
            let mean = entry.mean();
            if mean.abs() > 1e-12 * entry.max_abs().max(1.0) {
                return Err(Error::domain(format!(
                    "characteristic entry ({}, {}) has mean {mean:e}; a singular characteristic must have zero mean",
                    i + 1,
                    j + 1
                )));
            }
            out.push(harmonic_coefficients(entry, p_max)?);
        }
        coefficients.push(out);
    }
    let gammas = (1..=p_max as i64)
        .map(gamma_multiplier)
        .collect::<Result<Vec<_>>>()?;
    Ok(SymbolExpansion { coefficients, gammas })
}

/// `I + χe Q(k̃)` with `k̃ = (cos φ̃, sin φ̃)`.
pub fn full_symbol(chi_e: Complex64, phi_tilde: f64) -> SymbolMatrix {
    let (s, c) = phi_tilde.sin_cos();
    let k = [c, s];
    let mut t = KernelTensor::identity();
    for p in 0..2 {
        for q in 0..2 {
            t.0[p][q] += chi_e * (k[p] * k[q]);
        }
    }
    t
}

/// `{1} ∪ {1 + χe(x_n)}` over all cells, without deduplication.
pub fn predicted_accumulation(contrast: &ContrastMap) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    std::iter::once(one)
        .chain(contrast.chi_e().iter().map(|c| one + c))
        .collect()
}

/// Removes points within `tol` of an earlier point, keeping first occurrences.
pub fn dedup_points(points: &[Complex64], tol: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for &p in points {
        if out.iter().all(|q| (p - q).norm() > tol) {
            out.push(p);
        }
    }
    out
}
