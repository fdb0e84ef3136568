//! Arbitrary-precision fixed-point reference values for `J0, J1, Y0, Y1`.
//!
//! Numbers are `BigInt` multiples of `2^-PREC`. The ascending series is
//! summed exactly at this precision, so cancellation up to `x = 50` still
//! leaves far more than 53 correct bits.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const PREC: u32 = 320;

const GAMMA_DIGITS: &str = "57721566490153286060651209008240243104215933593992";

#[derive(Clone, Debug)]
pub struct Fixed(pub BigInt);

impl Fixed {
    pub fn one() -> Self {
        Fixed(BigInt::one() << PREC)
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Fixed(BigInt::zero());
        }
        let bits = x.abs().to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let mant = if exp == 0 {
            (bits & ((1 << 52) - 1)) << 1
        } else {
            (bits & ((1 << 52) - 1)) | (1 << 52)
        };
        let shift = exp - 1075 + PREC as i64;
        let m = BigInt::from(mant);
        let v = if shift >= 0 {
            m << shift as u32
        } else {
            m >> (-shift) as u32
        };
        Fixed(if x < 0.0 { -v } else { v })
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.0.bits() as i64;
        let drop = (bits - 60).max(0) as u32;
        let top = (&self.0 >> drop).to_f64().unwrap();
        top * 2f64.powi(drop as i32 - PREC as i32)
    }

    pub fn add(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> PREC)
    }

    pub fn div(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 << PREC) / &o.0)
    }

    pub fn div_int(&self, n: i64) -> Fixed {
        Fixed(&self.0 / BigInt::from(n))
    }

    pub fn mul_int(&self, n: i64) -> Fixed {
        Fixed(&self.0 * BigInt::from(n))
    }

    pub fn neg(&self) -> Fixed {
        Fixed(-&self.0)
    }

    pub fn is_negligible(&self) -> bool {
        self.0.abs() < BigInt::from(2)
    }
}

/// `sum z^(2k+1) / (2k+1)` for `|z| < 1`.
fn artanh(z: &Fixed) -> Fixed {
    let z2 = z.mul(z);
    let mut power = z.clone();
    let mut sum = Fixed(BigInt::zero());
    let mut k = 0i64;
    while !power.is_negligible() {
        sum = sum.add(&power.div_int(2 * k + 1));
        power = power.mul(&z2);
        k += 1;
    }
    sum
}

/// `sum (-1)^k / ((2k+1) n^(2k+1))`.
fn arctan_inv(n: i64) -> Fixed {
    let mut power = Fixed::one().div_int(n);
    let mut sum = Fixed(BigInt::zero());
    let mut k = 0i64;
    while !power.is_negligible() {
        let t = power.div_int(2 * k + 1);
        sum = if k % 2 == 0 { sum.add(&t) } else { sum.sub(&t) };
        power = power.div_int(n * n);
        k += 1;
    }
    sum
}

pub fn pi() -> Fixed {
    arctan_inv(5).mul_int(16).sub(&arctan_inv(239).mul_int(4))
}

pub fn euler_gamma() -> Fixed {
    let digits: BigInt = GAMMA_DIGITS.parse().unwrap();
    let scale = BigInt::from(10).pow(GAMMA_DIGITS.len() as u32);
    Fixed((digits << PREC) / scale)
}

fn ln2() -> Fixed {
    artanh(&Fixed::one().div_int(3)).mul_int(2)
}

/// Natural logarithm of a positive fixed-point value.
pub fn ln(y: &Fixed) -> Fixed {
    assert!(y.0.is_positive());
    let bits = y.0.bits() as i64 - 1 - PREC as i64;
    let m = if bits >= 0 {
        Fixed(&y.0 >> bits as u32)
    } else {
        Fixed(&y.0 << (-bits) as u32)
    };
    let one = Fixed::one();
    let z = m.sub(&one).div(&m.add(&one));
    artanh(&z).mul_int(2).add(&ln2().mul_int(bits))
}

/// `J0, J1, Y0, Y1` at `x > 0`.
pub fn cyl01(x: f64) -> [f64; 4] {
    assert!(x > 0.0);
    let xf = Fixed::from_f64(x);
    let q = xf.mul(&xf).div_int(4);
    let pi = pi();
    let gamma = euler_gamma();

    // t_k = (-q)^k / (k!)^2,  u_k = (-q)^k / (k! (k+1)!)
    let mut t = Fixed::one();
    let mut u = Fixed::one();
    let mut harmonic = Fixed(BigInt::zero());
    let mut j0 = Fixed(BigInt::zero());
    let mut s1 = Fixed(BigInt::zero());
    let mut y0_sum = Fixed(BigInt::zero());
    let mut y1_sum = Fixed(BigInt::zero());
    let mut k = 0i64;
    loop {
        // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        let psi_pair = gamma
            .mul_int(-2)
            .add(&harmonic.mul_int(2))
            .add(&Fixed::one().div_int(k + 1));
        j0 = j0.add(&t);
        s1 = s1.add(&u);
        if k >= 1 {
            y0_sum = y0_sum.sub(&t.mul(&harmonic));
        }
        y1_sum = y1_sum.add(&u.mul(&psi_pair));
        if k as f64 > x && t.is_negligible() && u.is_negligible() {
            break;
        }
        k += 1;
        harmonic = harmonic.add(&Fixed::one().div_int(k));
        t = t.mul(&q).neg().div_int(k * k);
        u = u.mul(&q).neg().div_int(k * (k + 1));
    }
    let half_x = xf.div_int(2);
    let j1 = half_x.mul(&s1);
    let log_term = ln(&half_x);
    let two_over_pi = Fixed::one().mul_int(2).div(&pi);
    let y0 = two_over_pi.mul(&log_term.add(&gamma).mul(&j0).add(&y0_sum));
    let y1 = two_over_pi
        .mul(&Fixed::one().div(&xf))
        .neg()
        .add(&two_over_pi.mul(&log_term).mul(&j1))
        .sub(&half_x.mul(&y1_sum).div(&pi));
    [j0.to_f64(), j1.to_f64(), y0.to_f64(), y1.to_f64()]
}
