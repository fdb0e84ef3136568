//! Brute-force quadratures for the angular identities and the self-cell
//! integral.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{tensor_a, tensor_q, tensor_theta_cross, Displacement, KernelTensor};

/// Largest deviations of the trapezoid angular integrals from their exact
/// values `∫Q = π δ`, `∫δ = 2π δ` and `∫Θx = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularReport {
    pub samples: usize,
    pub q_deviation: f64,
    pub delta_deviation: f64,
    pub theta_cross_deviation: f64,
    /// `∫Q_11`, `∫Q_12` and `∫(Θx)_13` as computed.
    pub q11: f64,
    pub q12: f64,
    pub theta13: f64,
}

impl AngularReport {
    pub fn max_deviation(&self) -> f64 {
        self.q_deviation
            .max(self.delta_deviation)
            .max(self.theta_cross_deviation)
    }
}

pub fn check_angular_identities(samples: usize) -> Result<AngularReport> {
    if samples < 64 {
        return Err(Error::domain(format!("need at least 64 samples, got {samples}")));
    }
    let step = 2.0 * PI / samples as f64;
    let mut q = KernelTensor::zeros();
    let mut tc = KernelTensor::zeros();
    for j in 0..samples {
        let phi = step * j as f64;
        let theta = [phi.cos(), phi.sin()];
        q = q + tensor_q(theta)?.scale(step.into());
        tc = tc + tensor_theta_cross(theta)?.scale(step.into());
    }
    let mut q_dev = 0.0f64;
    let mut d_dev = 0.0f64;
    for p in 0..2 {
        for r in 0..2 {
            let delta = if p == r { 1.0 } else { 0.0 };
            q_dev = q_dev.max((q[(p, r)] - Complex64::new(PI * delta, 0.0)).norm());
            let int_delta = delta * step * samples as f64;
            d_dev = d_dev.max((int_delta - 2.0 * PI * delta).abs());
        }
    }
    Ok(AngularReport {
        samples,
        q_deviation: q_dev,
        delta_deviation: d_dev,
        theta_cross_deviation: tc.max_abs(),
        q11: q[(0, 0)].re,
        q12: q[(0, 1)].re,
        theta13: tc[(0, 2)].re,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const ANGULAR_NODES: usize = 64;
const GL_ORDER: usize = 12;
const PANEL_WIDTH: f64 = 0.5;

/// `∫ A dS` over the annulus `a / 10^refinement < ρ < a`, `a = h / sqrt(π)`,
/// in polar coordinates with `t = ln ρ` radially.
pub fn brute_force_self_tensor(k_b: f64, h: f64, refinement: u32) -> Result<KernelTensor> {
    if refinement < 2 {
        return Err(Error::domain("refinement must be at least 2"));
    }
    if !(k_b > 0.0 && h > 0.0) {
        return Err(Error::domain("k_b and h must be positive"));
    }
    let a = h / PI.sqrt();
    let t_hi = a.ln();
    let t_lo = t_hi - refinement as f64 * std::f64::consts::LN_10;
    let panels = ((t_hi - t_lo) / PANEL_WIDTH).ceil() as usize;
    let width = (t_hi - t_lo) / panels as f64;
    let (gx, gw) = gauss_legendre(GL_ORDER);
    let dphi = 2.0 * PI / ANGULAR_NODES as f64;
    let mut acc = KernelTensor::zeros();
    for panel in 0..panels {
        let t0 = t_lo + panel as f64 * width;
        for (x, w) in gx.iter().zip(&gw) {
            let t = t0 + 0.5 * width * (x + 1.0);
            let rho = t.exp();
            let weight = 0.5 * width * w * rho * rho * dphi;
            let mut ring = KernelTensor::zeros();
            for j in 0..ANGULAR_NODES {
                let d = Displacement::from_polar(rho, dphi * j as f64);
                ring = ring + tensor_a(&d, k_b)?;
            }
            acc = acc + ring.scale(weight.into());
        }
    }
    Ok(acc)
}

/// `(1,1)` entry of [`brute_force_self_tensor`] plus `1/2`.
pub fn brute_force_self_term(k_b: f64, h: f64, refinement: u32) -> Result<Complex64> {
    Ok(brute_force_self_tensor(k_b, h, refinement)?[(0, 0)] + 0.5)
}
