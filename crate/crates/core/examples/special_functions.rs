//! Tabulates `H0` and `H1` and checks the Wronskian along the way.

use std::f64::consts::PI;

use tevie::specfun::{bessel_j, bessel_y, hankel1, CylOrder};

fn main() -> tevie::Result<()> {
    println!("{:>8} {:>24} {:>24} {:>10}", "x", "H0(x)", "H1(x)", "wronskian");
    for x in [1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0] {
        let h0 = hankel1(CylOrder::Zero, x)?;
        let h1 = hankel1(CylOrder::One, x)?;
        let w = bessel_j(CylOrder::One, x)? * bessel_y(CylOrder::Zero, x)?
            - bessel_j(CylOrder::Zero, x)? * bessel_y(CylOrder::One, x)?;
        let err = (w * PI * x / 2.0 - 1.0).abs();
        println!(
            "{x:>8} {:>11.8} {:>+11.8}i {:>11.8} {:>+11.8}i {err:>10.1e}",
            h0.re, h0.im, h1.re, h1.im
        );
    }
    Ok(())
}
