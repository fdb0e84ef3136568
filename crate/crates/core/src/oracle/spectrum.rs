//! Dense eigenvalues of the system matrix compared with symbol predictions.

use num_complex::Complex64;

use crate::assembly::DenseSystemMatrix;
use crate::error::{Error, Result};
use crate::symbol::dedup_points;

/// Largest matrix dimension accepted by [`dense_spectrum`].
pub const EIGEN_BUDGET: usize = 6000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    /// Predicted accumulation points, deduplicated at `1e-12`.
    pub predicted: Vec<Complex64>,
    /// Minimum distance from each predicted point to the eigenvalue cloud.
    pub distances: Vec<f64>,
}

impl SpectrumReport {
    pub fn min_modulus(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Smallest distance from `p` to any point of `cloud`.
pub fn min_distance(p: Complex64, cloud: &[Complex64]) -> f64 {
    cloud.iter().map(|z| (z - p).norm()).fold(f64::INFINITY, f64::min)
}

/// All `3N` eigenvalues of `a` and their distances to `predicted`.
pub fn dense_spectrum(a: &DenseSystemMatrix, predicted: &[Complex64]) -> Result<SpectrumReport> {
    let dim = a.dim();
    if dim > EIGEN_BUDGET {
        return Err(Error::Resource {
            what: "dense eigensolver dimension".into(),
            required: dim as u64,
            budget: EIGEN_BUDGET as u64,
        });
    }
    let eigenvalues = a
        .as_faer()
        .eigenvalues()
        .map_err(|e| Error::Numerical(format!("eigensolver did not converge: {e:?}")))?;
    if eigenvalues.len() != dim {
        return Err(Error::Numerical(format!(
            "eigensolver returned {} values for dimension {dim}",
            eigenvalues.len()
        )));
    }
    let predicted = dedup_points(predicted, 1e-12);
    let distances = predicted.iter().map(|&p| min_distance(p, &eigenvalues)).collect();
    Ok(SpectrumReport {
        eigenvalues,
        predicted,
        distances,
    })
}
