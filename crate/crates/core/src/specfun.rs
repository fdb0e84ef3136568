//! Cylinder functions of order zero and one for real positive arguments.
//!
//! Every kernel in the crate reduces to `J0, J1, Y0, Y1` evaluated at
//! `k_b * r > 0`, so this module only covers that slice of the Bessel family.
//! Three regimes are used:
//!
//! * `x <= 2`: ascending power series (terms shrink monotonically, no
//!   cancellation);
//! * `2 < x <= 25`: Miller backward recurrence for `J_n`, normalized with
//!   `J0 + 2 * sum J_2k = 1`, and Neumann series for `Y0`, `Y1` built from the
//!   same sequence;
//! * `x > 25`: Hankel large-argument expansion in modulus/phase form, whose
//!   smallest term is below `e^{-2x}`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant, 0.57721566490153286061.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_MAX: f64 = 2.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

/// Order of a cylinder function. Only orders 0 and 1 appear in the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CylOrder {
    Zero,
    One,
}

impl TryFrom<i32> for CylOrder {
    type Error = Error;

    fn try_from(value: i32) -> Result<Self> {
        match value {
            0 => Ok(CylOrder::Zero),
            1 => Ok(CylOrder::One),
            n => Err(Error::domain(format!(
                "cylinder function order {n} is not supported"
            ))),
        }
    }
}

impl From<CylOrder> for i32 {
    fn from(order: CylOrder) -> i32 {
        match order {
            CylOrder::Zero => 0,
            CylOrder::One => 1,
        }
    }
}

/// `J0, J1, Y0, Y1` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cyl01 {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Cyl01 {
    #[inline]
    pub fn h0(&self) -> Complex64 {
        Complex64::new(self.j0, self.y0)
    }

    #[inline]
    pub fn h1(&self) -> Complex64 {
        Complex64::new(self.j1, self.y1)
    }
}

/// Bessel function of the first kind, `x >= 0`.
pub fn bessel_j(order: CylOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!("bessel_j needs a finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(match order {
            CylOrder::Zero => 1.0,
            CylOrder::One => 0.0,
        });
    }
    let c = cyl01(x);
    Ok(match order {
        CylOrder::Zero => c.j0,
        CylOrder::One => c.j1,
    })
}

/// Bessel function of the second kind (Neumann function), `x > 0`.
pub fn bessel_y(order: CylOrder, x: f64) -> Result<f64> {
    check_positive("bessel_y", x)?;
    let c = cyl01(x);
    Ok(match order {
        CylOrder::Zero => c.y0,
        CylOrder::One => c.y1,
    })
}

/// Hankel function of the first kind, `J + iY`, `x > 0`.
pub fn hankel1(order: CylOrder, x: f64) -> Result<Complex64> {
    check_positive("hankel1", x)?;
    let c = cyl01(x);
    Ok(match order {
        CylOrder::Zero => c.h0(),
        CylOrder::One => c.h1(),
    })
}

/// `(H0^(1)(x), H1^(1)(x))` without argument checks. Callers guarantee `x > 0`.
#[inline]
pub(crate) fn hankel01(x: f64) -> (Complex64, Complex64) {
    let c = cyl01(x);
    (c.h0(), c.h1())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!("{name} needs a finite x > 0, got {x}")));
    }
    Ok(())
}

pub(crate) fn cyl01(x: f64) -> Cyl01 {
    debug_assert!(x > 0.0);
    if x <= SERIES_MAX {
        ascending_series(x)
    } else if x <= ASYMPTOTIC_MIN {
        miller_neumann(x)
    } else {
        hankel_asymptotic(x)
    }
}

fn ascending_series(x: f64) -> Cyl01 {
    let half = 0.5 * x;
    let q = half * half;
    let log_term = (half).ln() + EULER_GAMMA;

    // t0_k = (-q)^k / (k!)^2, t1_k = (-q)^k / (k! (k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut j0 = 1.0;
    let mut j1 = 1.0;
    let mut harmonic = 0.0; // H_k
    let mut y0_sum = 0.0;
    // psi(k+1) + psi(k+2) + 2 gamma = H_k + H_{k+1}
    let mut y1_sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        t0 *= -q / (kf * kf);
        t1 *= -q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        j0 += t0;
        j1 += t1;
        y0_sum += harmonic * t0;
        y1_sum += (2.0 * harmonic + 1.0 / (kf + 1.0)) * t1;
        if t0.abs() < 1e-18 * j0.abs() && t1.abs() < 1e-18 {
            break;
        }
    }
    let j1 = half * j1;
    let y0 = FRAC_2_PI * (log_term * j0 - y0_sum);
    // psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma
    let y1 = -FRAC_2_PI / x + FRAC_2_PI * half.ln() * j1
        - (half / PI) * (y1_sum - 2.0 * EULER_GAMMA * (j1 / half));
    Cyl01 { j0, j1, y0, y1 }
}

fn miller_neumann(x: f64) -> Cyl01 {
    let start = (x + 14.0 * x.cbrt() + 24.0).ceil() as usize;
    let m = start + (start % 2);
    let mut f = vec![0.0_f64; m + 2];
    f[m] = 1e-30;
    let two_over_x = 2.0 / x;
    for k in (1..=m).rev() {
        f[k - 1] = (k as f64) * two_over_x * f[k] - f[k + 1];
        if f[k - 1].abs() > 1e250 {
            for v in f[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }

    let mut norm = f[0];
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut sign = -1.0;
    let mut k = 1;
    while 2 * k <= m {
        let kf = k as f64;
        norm += 2.0 * f[2 * k];
        s0 += sign * f[2 * k] / kf;
        s1 += sign * (f[2 * k - 1] - f[2 * k + 1]) / kf;
        sign = -sign;
        k += 1;
    }
    let inv = 1.0 / norm;
    let j0 = f[0] * inv;
    let j1 = f[1] * inv;
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let y0 = FRAC_2_PI * (log_term * j0 - 2.0 * s0 * inv);
    let y1 = -FRAC_2_PI * j0 / x + FRAC_2_PI * (log_term * j1 + s1 * inv);
    Cyl01 { j0, j1, y0, y1 }
}

fn hankel_asymptotic(x: f64) -> Cyl01 {
    let (p0, q0) = asymptotic_pq(0.0, x);
    let (p1, q1) = asymptotic_pq(1.0, x);
    let (s, c) = x.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    // x - pi/4 and x - 3pi/4 expanded to keep the phase exact for large x
    let cos0 = FRAC_1_SQRT_2 * (c + s);
    let sin0 = FRAC_1_SQRT_2 * (s - c);
    let cos1 = FRAC_1_SQRT_2 * (s - c);
    let sin1 = -FRAC_1_SQRT_2 * (s + c);
    Cyl01 {
        j0: amp * (p0 * cos0 - q0 * sin0),
        y0: amp * (p0 * sin0 + q0 * cos0),
        j1: amp * (p1 * cos1 - q1 * sin1),
        y1: amp * (p1 * sin1 + q1 * cos1),
    }
}

/// Modulus-phase series `P(nu, x)`, `Q(nu, x)` of the Hankel expansion,
/// summed until the terms stop decreasing.
fn asymptotic_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * x);
        let mag = term.abs();
        if mag >= prev || mag < 1e-18 {
            break;
        }
        prev = mag;
        // a_k / x^k enters P at even k and Q at odd k, with alternating signs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_conversion() {
        assert_eq!(CylOrder::try_from(0).unwrap(), CylOrder::Zero);
        assert_eq!(CylOrder::try_from(1).unwrap(), CylOrder::One);
        assert!(CylOrder::try_from(2).is_err());
        assert!(CylOrder::try_from(-1).is_err());
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(CylOrder::Zero, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(CylOrder::One, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(CylOrder::Zero, f64::NAN).is_err());
        assert!(bessel_j(CylOrder::Zero, -1.0).is_err());
        assert!(bessel_j(CylOrder::One, f64::INFINITY).is_err());
        assert!(bessel_y(CylOrder::Zero, 0.0).is_err());
        assert!(bessel_y(CylOrder::One, -0.5).is_err());
        assert!(hankel1(CylOrder::Zero, 0.0).is_err());
    }

    #[test]
    fn regimes_agree_at_seams() {
        for &seam in &[SERIES_MAX, ASYMPTOTIC_MIN] {
            let a = if seam == SERIES_MAX {
                ascending_series(seam)
            } else {
                miller_neumann(seam)
            };
            let b = if seam == SERIES_MAX {
                miller_neumann(seam)
            } else {
                hankel_asymptotic(seam)
            };
            let scale = (a.j0 * a.j0 + a.y0 * a.y0).sqrt();
            for (u, v) in [(a.j0, b.j0), (a.j1, b.j1), (a.y0, b.y0), (a.y1, b.y1)] {
                assert!((u - v).abs() < 2e-15 * scale.max(1.0), "seam {seam}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn small_argument_limits() {
        let x = 1e-7;
        let y0 = bessel_y(CylOrder::Zero, x).unwrap();
        let lead = FRAC_2_PI * (EULER_GAMMA + (x / 2.0).ln());
        assert!((y0 - lead).abs() < 1e-12);
        let y1 = bessel_y(CylOrder::One, x).unwrap();
        assert!((x * y1 + FRAC_2_PI).abs() < 1e-12);
    }

    #[test]
    fn hankel_is_j_plus_iy() {
        for &x in &[0.3, 1.7, 5.0, 19.0, 40.0] {
            let h = hankel1(CylOrder::Zero, x).unwrap();
            assert_eq!(h.re, bessel_j(CylOrder::Zero, x).unwrap());
            assert_eq!(h.im, bessel_y(CylOrder::Zero, x).unwrap());
            let h = hankel1(CylOrder::One, x).unwrap();
            assert_eq!(h.re, bessel_j(CylOrder::One, x).unwrap());
            assert_eq!(h.im, bessel_y(CylOrder::One, x).unwrap());
        }
    }
}
