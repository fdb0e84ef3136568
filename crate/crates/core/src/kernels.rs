//! Translation-invariant kernels of the TE volume integral equation.
//!
//! With `g(r) = (i/4) H0(k r)` the Green's function of the 2D Helmholtz
//! operator, the tensors are
//!
//! ```text
//! A = (i/4)(k/r) H1(kr) [2Q - I2] - (i/4) k^2 H0(kr) [Q - I2]
//! B = -(i/4) k H1(kr) Θx
//! ```
//!
//! where `Q = θθᵀ` on the in-plane block and `I2` is the identity with its
//! (3,3) entry removed. The principal-value part `G` and the compact remainder
//! `K` satisfy `G + K = -A` on the in-plane block.
//!
//! Structural zeros are never computed; they are left at exact `0`.

use std::f64::consts::PI;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scene::BackgroundMedium;
use crate::specfun::hankel01;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Separation vector `x - x'` with cached length and direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    d: [f64; 2],
    r: f64,
    theta: [f64; 2],
}

impl Displacement {
    pub fn new(d1: f64, d2: f64) -> Self {
        let r = d1.hypot(d2);
        let theta = if r > 0.0 { [d1 / r, d2 / r] } else { [0.0, 0.0] };
        Self {
            d: [d1, d2],
            r,
            theta,
        }
    }

    /// `x - x_prime`.
    pub fn between(x: [f64; 2], x_prime: [f64; 2]) -> Self {
        Self::new(x[0] - x_prime[0], x[1] - x_prime[1])
    }

    pub fn from_polar(r: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self {
            d: [r * c, r * s],
            r,
            theta: [c, s],
        }
    }

    pub fn vector(&self) -> [f64; 2] {
        self.d
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> [f64; 2] {
        self.theta
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.d[0] - s * self.d[1], s * self.d[0] + c * self.d[1])
    }

    fn nonzero(&self) -> Result<()> {
        if self.r > 0.0 && self.r.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("kernel evaluated at r = {}", self.r)))
        }
    }
}

impl Neg for Displacement {
    type Output = Displacement;

    fn neg(self) -> Displacement {
        Displacement {
            d: [-self.d[0], -self.d[1]],
            r: self.r,
            theta: [-self.theta[0], -self.theta[1]],
        }
    }
}

/// Complex 3x3 matrix, indexed `(row, col)` from zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTensor(pub [[Complex64; 3]; 3]);

impl KernelTensor {
    pub fn zeros() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            t.0[i][i] = Complex64::new(1.0, 0.0);
        }
        t
    }

    /// Identity with the (3,3) entry zeroed.
    pub fn identity_2() -> Self {
        let mut t = Self::identity();
        t.0[2][2] = ZERO;
        t
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut t = *self;
        t.0.iter_mut().flatten().for_each(|v| *v *= s);
        t
    }

    pub fn matmul(&self, rhs: &KernelTensor) -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Index<(usize, usize)> for KernelTensor {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for KernelTensor {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for KernelTensor {
    type Output = KernelTensor;

    fn add(mut self, rhs: KernelTensor) -> KernelTensor {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for KernelTensor {
    type Output = KernelTensor;

    fn sub(self, rhs: KernelTensor) -> KernelTensor {
        self + (-rhs)
    }
}

impl Neg for KernelTensor {
    type Output = KernelTensor;

    fn neg(self) -> KernelTensor {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for KernelTensor {
    type Output = KernelTensor;

    fn mul(self, s: Complex64) -> KernelTensor {
        self.scale(s)
    }
}

fn check_unit(theta: [f64; 2]) -> Result<()> {
    let len = theta[0].hypot(theta[1]);
    if (len - 1.0).abs() <= 1e-12 {
        Ok(())
    } else {
        Err(Error::domain(format!("direction has length {len}, expected 1")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `g(r) = (i/4) H0(k_b r)`.
pub fn green(r: f64, k_b: f64) -> Result<Complex64> {
    check_positive("r", r)?;
    check_positive("k_b", k_b)?;
    let (h0, _) = hankel01(k_b * r);
    Ok(0.25 * I * h0)
}

/// `∇g = -(i/4) k_b H1(k_b r) θ`.
pub fn grad_green(d: &Displacement, k_b: f64) -> Result<[Complex64; 2]> {
    d.nonzero()?;
    check_positive("k_b", k_b)?;
    let (_, h1) = hankel01(k_b * d.r);
    let f = -0.25 * I * k_b * h1;
    Ok([f * d.theta[0], f * d.theta[1]])
}

/// `Q = θθᵀ` on the in-plane block.
pub fn tensor_q(theta: [f64; 2]) -> Result<KernelTensor> {
    check_unit(theta)?;
    Ok(q_unchecked(theta))
}

fn q_unchecked(theta: [f64; 2]) -> KernelTensor {
    let mut t = KernelTensor::zeros();
    for p in 0..2 {
        for q in 0..2 {
            t.0[p][q] = (theta[p] * theta[q]).into();
        }
    }
    t
}

/// The antisymmetric cross-product matrix `Θx`.
pub fn tensor_theta_cross(theta: [f64; 2]) -> Result<KernelTensor> {
    check_unit(theta)?;
    Ok(theta_cross_unchecked(theta))
}

fn theta_cross_unchecked(theta: [f64; 2]) -> KernelTensor {
    let mut t = KernelTensor::zeros();
    t.0[0][2] = theta[1].into();
    t.0[1][2] = (-theta[0]).into();
    t.0[2][0] = (-theta[1]).into();
    t.0[2][1] = theta[0].into();
    t
}

/// Scalar coefficients of `A` on `Q` and `I2`: `A = cq Q + ci I2`.
#[inline]
pub(crate) fn a_coefficients(r: f64, k_b: f64, h0: Complex64, h1: Complex64) -> (Complex64, Complex64) {
    let a = 0.25 * I * (k_b / r) * h1;
    let b = 0.25 * I * k_b * k_b * h0;
    (2.0 * a - b, b - a)
}

/// The in-plane tensor `A(d)`.
pub fn tensor_a(d: &Displacement, k_b: f64) -> Result<KernelTensor> {
    d.nonzero()?;
    check_positive("k_b", k_b)?;
    let (h0, h1) = hankel01(k_b * d.r);
    let (cq, ci) = a_coefficients(d.r, k_b, h0, h1);
    let mut t = KernelTensor::zeros();
    for p in 0..2 {
        for q in 0..2 {
            let delta = if p == q { ci } else { ZERO };
            t.0[p][q] = cq * (d.theta[p] * d.theta[q]) + delta;
        }
    }
    Ok(t)
}

/// The coupling tensor `B(d) = -(i/4) k_b H1(k_b r) Θx`.
pub fn tensor_b(d: &Displacement, k_b: f64) -> Result<KernelTensor> {
    d.nonzero()?;
    check_positive("k_b", k_b)?;
    let (_, h1) = hankel01(k_b * d.r);
    let f = -0.25 * I * k_b * h1;
    let mut t = KernelTensor::zeros();
    t.0[0][2] = f * d.theta[1];
    t.0[1][2] = -f * d.theta[0];
    t.0[2][0] = -f * d.theta[1];
    t.0[2][1] = f * d.theta[0];
    Ok(t)
}

/// Principal-value kernel `G_nm = -(2 θn θm - δnm) / (2π r²)`.
pub fn kernel_g_singular(d: &Displacement) -> Result<KernelTensor> {
    d.nonzero()?;
    let f = -1.0 / (2.0 * PI * d.r * d.r);
    let mut t = KernelTensor::zeros();
    for p in 0..2 {
        for q in 0..2 {
            let delta = if p == q { 1.0 } else { 0.0 };
            t.0[p][q] = (f * (2.0 * d.theta[p] * d.theta[q] - delta)).into();
        }
    }
    Ok(t)
}

/// Compact remainder kernels `K_nm`, all nine entries.
pub fn kernel_k_compact(d: &Displacement, medium: &BackgroundMedium) -> Result<KernelTensor> {
    d.nonzero()?;
    let k = medium.k_b();
    let (omega, eps, mu) = (medium.omega(), medium.eps_b(), medium.mu_b());
    let r = d.r;
    let [t1, t2] = d.theta;
    let (h0, h1) = hankel01(k * r);

    let radial = Complex64::new(1.0 / (2.0 * PI * r * r), 0.0) - I * k / (4.0 * r) * h1;
    let tangential = I * k * k / 4.0 * h0;
    let mut t = KernelTensor::zeros();
    for p in 0..2 {
        for q in 0..2 {
            let delta = if p == q { 1.0 } else { 0.0 };
            let tt = d.theta[p] * d.theta[q];
            t.0[p][q] = radial * (2.0 * tt - delta) + tangential * (tt - delta);
        }
    }
    let quarter_kh1 = 0.25 * k * h1;
    t.0[0][2] = -omega * mu * t2 * quarter_kh1;
    t.0[2][0] = -omega * eps * t2 * quarter_kh1;
    t.0[1][2] = omega * mu * t1 * quarter_kh1;
    t.0[2][1] = omega * eps * t1 * quarter_kh1;
    t.0[2][2] = -tangential;
    Ok(t)
}

/// Rotation about the 3-axis acting on the in-plane block.
pub fn rotation(angle: f64) -> KernelTensor {
    let (s, c) = angle.sin_cos();
    let mut t = KernelTensor::identity();
    t.0[0][0] = c.into();
    t.0[0][1] = (-s).into();
    t.0[1][0] = s.into();
    t.0[1][1] = c.into();
    t
}
