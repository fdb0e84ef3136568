//! Separation-of-variables solution for a homogeneous dielectric cylinder
//! under TE plane-wave incidence.
//!
//! With the cylinder centred at the origin of polar coordinates `(r, φ)`,
//!
//! ```text
//! H3 = Σ_n [a_n J_n(k r) + b_n H_n(k r)] e^{inφ}     r > R
//! H3 = Σ_n  c_n J_n(m k r) e^{inφ}                  r < R
//! ```
//!
//! with `a_n = A i^n e^{-inφ0}` and `m = sqrt(1 + χe)`. Continuity of `H3`
//! and of `(1/ε) ∂r H3` at `r = R` fixes `b_n, c_n`. The electric field is
//! `E = (i / (ω ε)) (∂2 H3, -∂1 H3)` with the local permittivity.
//!
//! Cylinder Bessel functions of integer order and complex argument come from
//! the `complex-bessel` crate, not from [`crate::specfun`].

use complex_bessel::{besselj, bessely};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scene::{BackgroundMedium, PlaneWaveTE};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest accepted magnitude of the last retained series terms.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

/// Homogeneous non-magnetic cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSpec {
    pub radius: f64,
    pub chi_e_inside: Complex64,
    pub center: [f64; 2],
}

impl CylinderSpec {
    pub fn new(radius: f64, chi_e_inside: Complex64, center: [f64; 2]) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!(
                "cylinder radius must be positive, got {radius}"
            )));
        }
        if (Complex64::new(1.0, 0.0) + chi_e_inside).norm() == 0.0 {
            return Err(Error::domain("relative permittivity 1 + chi_e must be nonzero"));
        }
        Ok(Self {
            radius,
            chi_e_inside,
            center,
        })
    }
}

fn bessel_err(e: complex_bessel::Error) -> Error {
    Error::Accuracy(format!("cylinder Bessel evaluation failed: {e:?}"))
}

/// `J_n(z)` for `n = 0..=count-1`.
fn j_seq(z: Complex64, count: usize) -> Result<Vec<Complex64>> {
    // Order by order: the sequence routine corrupts low orders once high orders underflow.
    (0..count)
        .map(|n| besselj(n as f64, z).map_err(bessel_err))
        .collect()
}

fn h_seq(x: f64, count: usize) -> Result<Vec<Complex64>> {
    let z = Complex64::new(x, 0.0);
    let j = j_seq(z, count)?;
    let y = (0..count)
        .map(|n| bessely(n as f64, z).map_err(bessel_err))
        .collect::<Result<Vec<_>>>()?;
    Ok(j.iter()
        .zip(&y)
        .map(|(a, b)| Complex64::new(a.re, 0.0) + I * b.re)
        .collect())
}

/// Values and derivatives for orders `-M..=M` given nonnegative orders
/// `0..=M+1`, using `Z_{-n} = (-1)^n Z_n` and `Z_n' = Z_{n-1} - (n/z) Z_n`.
struct Signed {
    order: i64,
    pos: Vec<Complex64>,
}

impl Signed {
    fn value(&self, n: i64) -> Complex64 {
        let v = self.pos[n.unsigned_abs() as usize];
        if n < 0 && n % 2 != 0 {
            -v
        } else {
            v
        }
    }

    /// Derivative with respect to the argument `z`.
    fn deriv(&self, n: i64, z: Complex64) -> Complex64 {
        debug_assert!(n.abs() <= self.order);
        if n == 0 {
            return -self.pos[1];
        }
        self.value(n - 1) - self.value(n) * (n as f64) / z
    }
}

/// Precomputed series solution.
#[derive(Debug, Clone)]
pub struct MieCylinder {
    spec: CylinderSpec,
    medium: BackgroundMedium,
    wave: PlaneWaveTE,
    order: i64,
    m: Complex64,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
    truncation: f64,
}

impl MieCylinder {
    /// Uses `M = ceil(k_b R) + 15`.
    pub fn new(spec: CylinderSpec, medium: BackgroundMedium, wave: PlaneWaveTE) -> Result<Self> {
        let order = (medium.k_b() * spec.radius).ceil() as i64 + 15;
        Self::with_order(spec, medium, wave, order)
    }

    pub fn with_order(
        spec: CylinderSpec,
        medium: BackgroundMedium,
        wave: PlaneWaveTE,
        order: i64,
    ) -> Result<Self> {
        if order < 1 {
            return Err(Error::domain("series order must be at least 1"));
        }
        let k = medium.k_b();
        let x = k * spec.radius;
        let m = (Complex64::new(1.0, 0.0) + spec.chi_e_inside).sqrt();
        let mx = m * x;
        let count = order as usize + 2;
        let jx = Signed {
            order,
            pos: j_seq(Complex64::new(x, 0.0), count)?,
        };
        let hx = Signed {
            order,
            pos: h_seq(x, count)?,
        };
        let jm = Signed {
            order,
            pos: j_seq(mx, count)?,
        };

        let [d1, d2] = wave.direction();
        let phi0 = d2.atan2(d1);
        let phase =
            wave.amplitude() * Complex64::from_polar(1.0, k * (d1 * spec.center[0] + d2 * spec.center[1]));

        let size = (2 * order + 1) as usize;
        let mut b = vec![ZERO; size];
        let mut c = vec![ZERO; size];
        for n in -order..=order {
            let a = phase * I.powi(n.rem_euclid(4) as i32) * Complex64::from_polar(1.0, -(n as f64) * phi0);
            let (jn, jdn) = (jx.value(n), jx.deriv(n, Complex64::new(x, 0.0)));
            let (hn, hdn) = (hx.value(n), hx.deriv(n, Complex64::new(x, 0.0)));
            let (jmn, jmdn) = (jm.value(n), jm.deriv(n, mx));
            // c J_n(mx) - b H_n(x) = a J_n(x);  (1/m) c J_n'(mx) - b H_n'(x) = a J_n'(x)
            let det = jmn * (-hdn) + hn * jmdn / m;
            if det.norm() == 0.0 || !det.is_finite() {
                return Err(Error::Accuracy(format!("singular boundary system at order {n}")));
            }
            let idx = (n + order) as usize;
            c[idx] = a * (jn * (-hdn) + hn * jdn) / det;
            b[idx] = a * (jmn * jdn - jmdn / m * jn) / det;
        }
        let mut truncation = 0.0f64;
        for n in [order - 1, order, -order, 1 - order] {
            let idx = (n + order) as usize;
            let t = (b[idx] * hx.value(n)).norm() + (c[idx] * jm.value(n)).norm();
            truncation = truncation.max(t / wave.amplitude().norm().max(f64::MIN_POSITIVE));
        }
        if truncation.is_nan() || truncation > TRUNCATION_LIMIT {
            return Err(Error::Accuracy(format!(
                "series tail {truncation:e} exceeds {TRUNCATION_LIMIT:e} at order {order}"
            )));
        }
        Ok(Self {
            spec,
            medium,
            wave,
            order,
            m,
            b,
            c,
            truncation,
        })
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Magnitude of the last retained terms at the boundary, relative to the
    /// incident amplitude.
    pub fn truncation_estimate(&self) -> f64 {
        self.truncation
    }

    pub fn scattering_coefficients(&self) -> &[Complex64] {
        &self.b
    }

    /// Total `(E1, E2, H3)` at `point`.
    pub fn fields_at(&self, point: [f64; 2]) -> Result<[Complex64; 3]> {
        let (rx, ry) = (point[0] - self.spec.center[0], point[1] - self.spec.center[1]);
        let r_true = rx.hypot(ry);
        let big_r = self.spec.radius;
        if (r_true - big_r).abs() <= 1e-9 * big_r {
            return Err(Error::domain(format!(
                "point ({}, {}) lies on the cylinder boundary",
                point[0], point[1]
            )));
        }
        let phi = ry.atan2(rx);
        let k = self.medium.k_b();
        let count = self.order as usize + 2;
        let inside = r_true < big_r;
        let r = r_true;

        let (kk, eps, order_vals) = if inside {
            let z = self.m * k * r;
            let eps = self.medium.eps_b() * (Complex64::new(1.0, 0.0) + self.spec.chi_e_inside);
            (
                self.m * k,
                eps,
                Signed {
                    order: self.order,
                    pos: j_seq(z, count)?,
                },
            )
        } else {
            let eps = Complex64::new(self.medium.eps_b(), 0.0);
            (
                Complex64::new(k, 0.0),
                eps,
                Signed {
                    order: self.order,
                    pos: h_seq(k * r, count)?,
                },
            )
        };
        let coef = if inside { &self.c } else { &self.b };

        // (d1 + i d2) Z_n e^{in phi} = -kk Z_{n+1} e^{i(n+1) phi}
        // (d1 - i d2) Z_n e^{in phi} = kk Z_{n-1} e^{i(n-1) phi}
        let rot = |n: i64| Complex64::from_polar(1.0, n as f64 * phi);
        let (mut h, mut d1, mut d2) = (ZERO, ZERO, ZERO);
        for n in -self.order..=self.order {
            let c = coef[(n + self.order) as usize];
            let lo = order_vals.value(n - 1) * rot(n - 1);
            let hi = order_vals.value(n + 1) * rot(n + 1);
            h += c * order_vals.value(n) * rot(n);
            d1 += c * kk * 0.5 * (lo - hi);
            d2 += c * kk * 0.5 * I * (lo + hi);
        }
        let f = I / (self.medium.omega() * eps);
        let mut out = [f * d2, -f * d1, h];
        if !inside {
            let inc = self.wave.fields_at(point, &self.medium);
            for (o, v) in out.iter_mut().zip(inc) {
                *o += v;
            }
        }
        Ok(out)
    }
}

/// Total fields of the cylinder problem at each point.
pub fn mie_cylinder_fields(
    spec: &CylinderSpec,
    medium: &BackgroundMedium,
    wave: &PlaneWaveTE,
    points: &[[f64; 2]],
) -> Result<Vec<[Complex64; 3]>> {
    let mie = MieCylinder::new(*spec, *medium, *wave)?;
    points.iter().map(|&p| mie.fields_at(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(chi: f64) -> (CylinderSpec, BackgroundMedium, PlaneWaveTE) {
        let medium = BackgroundMedium::new(2.0, 1.0, 1.0).unwrap();
        let spec = CylinderSpec::new(0.5, Complex64::new(chi, 0.0), [0.1, -0.2]).unwrap();
        let wave = PlaneWaveTE::new([1.0, 0.0], Complex64::new(1.0, 0.0)).unwrap();
        (spec, medium, wave)
    }

    fn points() -> Vec<[f64; 2]> {
        vec![
            [0.1, -0.2],
            [0.3, 0.0],
            [-0.1, -0.4],
            [1.0, 0.3],
            [-1.5, 2.0],
            [0.1, 0.7],
        ]
    }

    #[test]
    fn no_scatterer_gives_incident_field() {
        let (spec, medium, wave) = setup(0.0);
        let f = mie_cylinder_fields(&spec, &medium, &wave, &points()).unwrap();
        for (p, v) in points().iter().zip(&f) {
            let inc = wave.fields_at(*p, &medium);
            for i in 0..3 {
                assert!(
                    (v[i] - inc[i]).norm() < 1e-12,
                    "{p:?} component {i}: {} vs {}",
                    v[i],
                    inc[i]
                );
            }
        }
    }

    #[test]
    fn mirror_symmetry_about_incidence_axis() {
        let medium = BackgroundMedium::new(2.0, 1.0, 1.0).unwrap();
        let spec = CylinderSpec::new(0.5, Complex64::new(1.0, 0.2), [0.0, 0.0]).unwrap();
        let wave = PlaneWaveTE::new([1.0, 0.0], Complex64::new(1.0, 0.0)).unwrap();
        let mie = MieCylinder::new(spec, medium, wave).unwrap();
        for p in [[0.2, 0.3], [1.2, 0.4], [-0.7, 0.9]] {
            let a = mie.fields_at(p).unwrap();
            let b = mie.fields_at([p[0], -p[1]]).unwrap();
            assert!((a[0] + b[0]).norm() < 1e-12);
            assert!((a[1] - b[1]).norm() < 1e-12);
            assert!((a[2] - b[2]).norm() < 1e-12);
        }
    }

    #[test]
    fn doubling_order_changes_little() {
        let medium = BackgroundMedium::new(1.0, 1.0, 1.0).unwrap();
        let spec = CylinderSpec::new(1.0, Complex64::new(1.0, 0.0), [0.0, 0.0]).unwrap();
        let wave = PlaneWaveTE::from_angle(0.3, Complex64::new(1.0, 0.0)).unwrap();
        let a = MieCylinder::new(spec, medium, wave).unwrap();
        let b = MieCylinder::with_order(spec, medium, wave, 2 * a.order()).unwrap();
        assert!(a.truncation_estimate() < 1e-10);
        for p in [[0.0, 0.0], [0.4, -0.3], [1.5, 0.2], [-2.0, -1.0]] {
            let fa = a.fields_at(p).unwrap();
            let fb = b.fields_at(p).unwrap();
            for i in 0..3 {
                assert!(
                    (fa[i] - fb[i]).norm() < 1e-10 * fb[i].norm().max(1.0),
                    "{p:?} {i} {} {}",
                    fa[i],
                    fb[i]
                );
            }
        }
    }

    #[test]
    fn boundary_conditions_hold() {
        let (spec, medium, wave) = setup(1.5);
        let mie = MieCylinder::new(spec, medium, wave).unwrap();
        let eps_in = 1.0 + 1.5;
        for phi in [0.0f64, 1.0, 2.5, 4.0] {
            let (s, c) = phi.sin_cos();
            let rin = spec.radius * (1.0 - 1e-7);
            let rout = spec.radius * (1.0 + 1e-7);
            let pin = [spec.center[0] + rin * c, spec.center[1] + rin * s];
            let pout = [spec.center[0] + rout * c, spec.center[1] + rout * s];
            let fi = mie.fields_at(pin).unwrap();
            let fo = mie.fields_at(pout).unwrap();
            assert!((fi[2] - fo[2]).norm() < 1e-5);
            let et_i = -s * fi[0] + c * fi[1];
            let et_o = -s * fo[0] + c * fo[1];
            assert!((et_i - et_o).norm() < 1e-5);
            let en_i = c * fi[0] + s * fi[1];
            let en_o = c * fo[0] + s * fo[1];
            assert!((eps_in * en_i - en_o).norm() < 1e-5);
        }
    }

    #[test]
    fn rejects_boundary_points_and_bad_specs() {
        let (spec, medium, wave) = setup(1.0);
        let mie = MieCylinder::new(spec, medium, wave).unwrap();
        assert!(mie
            .fields_at([spec.center[0] + spec.radius, spec.center[1]])
            .is_err());
        assert!(CylinderSpec::new(0.0, Complex64::new(1.0, 0.0), [0.0, 0.0]).is_err());
        assert!(CylinderSpec::new(1.0, Complex64::new(-1.0, 0.0), [0.0, 0.0]).is_err());
        assert!(MieCylinder::with_order(spec, medium, wave, 1).is_err());
    }
}
