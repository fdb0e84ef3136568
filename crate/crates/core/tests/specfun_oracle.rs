mod common;

use std::f64::consts::PI;

use common::bigfloat;
use tevie::specfun::{bessel_j, bessel_y, hankel1, CylOrder, EULER_GAMMA};

fn sample_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn oracle_constants() {
    assert_eq!(bigfloat::pi().to_f64(), PI);
    assert_eq!(bigfloat::euler_gamma().to_f64(), EULER_GAMMA);
    let ln3 = bigfloat::ln(&bigfloat::Fixed::from_f64(3.0)).to_f64();
    assert_eq!(ln3, 3f64.ln());
}

#[test]
fn oracle_self_consistency() {
    for x in [0.3, 2.5, 11.0, 37.0] {
        let [j0, j1, y0, y1] = bigfloat::cyl01(x);
        let w = j1 * y0 - j0 * y1;
        assert!((w * PI * x / 2.0 - 1.0).abs() < 1e-15, "x = {x}");
    }
}

#[test]
fn hankel_matches_oracle_up_to_20() {
    let mut worst = 0.0f64;
    for x in sample_points(1e-4, 20.0, 300) {
        let [j0, j1, y0, y1] = bigfloat::cyl01(x);
        let h0 = hankel1(CylOrder::Zero, x).unwrap();
        let h1 = hankel1(CylOrder::One, x).unwrap();
        let e0 = ((h0.re - j0).powi(2) + (h0.im - y0).powi(2)).sqrt() / j0.hypot(y0);
        let e1 = ((h1.re - j1).powi(2) + (h1.im - y1).powi(2)).sqrt() / j1.hypot(y1);
        worst = worst.max(e0).max(e1);
    }
    assert!(worst < 1e-12, "worst relative error {worst:e}");
}

#[test]
fn bessel_values_match_oracle_up_to_50() {
    for x in sample_points(20.0, 50.0, 40) {
        let [j0, j1, y0, y1] = bigfloat::cyl01(x);
        let scale = j0.hypot(y0).max(j1.hypot(y1));
        let got = [
            bessel_j(CylOrder::Zero, x).unwrap(),
            bessel_j(CylOrder::One, x).unwrap(),
            bessel_y(CylOrder::Zero, x).unwrap(),
            bessel_y(CylOrder::One, x).unwrap(),
        ];
        for (g, r) in got.iter().zip([j0, j1, y0, y1]) {
            assert!((g - r).abs() < 1e-12 * scale, "x = {x}: {g} vs {r}");
        }
    }
}

#[test]
fn wronskian_over_working_range() {
    for x in sample_points(0.01, 50.0, 500) {
        let w = bessel_j(CylOrder::One, x).unwrap() * bessel_y(CylOrder::Zero, x).unwrap()
            - bessel_j(CylOrder::Zero, x).unwrap() * bessel_y(CylOrder::One, x).unwrap();
        assert!((w * PI * x / 2.0 - 1.0).abs() < 1e-10, "x = {x}");
    }
}

#[test]
fn small_argument_limits() {
    let x = 1e-6;
    let h1 = hankel1(CylOrder::One, x).unwrap() * x;
    assert!((h1.im + 2.0 / PI).abs() < 1e-6);
    assert!(h1.re.abs() < 1e-6);
    let y0 = bessel_y(CylOrder::Zero, x).unwrap();
    let expected = 2.0 / PI * ((x / 2.0).ln() + EULER_GAMMA);
    assert!((y0 - expected).abs() < 1e-10);
}
