//! Multiprecision binary floats and complex numbers over them.
//!
//! Finite-N quantities such as the coefficients of P_N or the double sums of the
//! correlation kernel cancel catastrophically: at N = 128 roughly sixty decimal
//! digits disappear. Everything here carries an explicit precision in bits;
//! at least one operand of every operation must be a limited-precision value.

use dashu_float::FBig;
use num_complex::{Complex, Complex64};
use num_traits::Zero;

pub type Hp = FBig;
pub type HpC = Complex<Hp>;

/// Working precision (bits) that keeps ~64 bits after the cancellation of the
/// degree-N q-series at q = e^{c/2N}.
pub fn bits_for(n: usize, c: f64) -> usize {
    64 + (2.0 * n as f64 * (1.0 + c.abs() / 2.0)).ceil() as usize
}

pub fn from_f64(x: f64, bits: usize) -> Hp {
    Hp::try_from(x)
        .expect("finite f64")
        .with_precision(bits)
        .value()
}

pub fn int(v: i64, bits: usize) -> Hp {
    Hp::from(v).with_precision(bits).value()
}

pub fn to_f64(x: &Hp) -> f64 {
    x.to_f64().value()
}

pub fn complex(re: f64, im: f64, bits: usize) -> HpC {
    Complex::new(from_f64(re, bits), from_f64(im, bits))
}

pub fn to_c64(z: &HpC) -> Complex64 {
    Complex64::new(to_f64(&z.re), to_f64(&z.im))
}

pub fn abs(x: &Hp) -> Hp {
    if *x < Hp::ZERO {
        -x.clone()
    } else {
        x.clone()
    }
}

/// e^{x} for a double argument at the given precision.
pub fn exp(x: f64, bits: usize) -> Hp {
    from_f64(x, bits).exp()
}

/// Principal logarithm of a multiprecision complex number, returned in double
/// precision. Works far outside the f64 exponent range.
pub fn ln_c64(z: &HpC) -> Complex64 {
    let (ar, ai) = (abs(&z.re), abs(&z.im));
    let m = if ar >= ai { ar } else { ai };
    if m.is_zero() {
        return Complex64::new(f64::NEG_INFINITY, 0.0);
    }
    let (re, im) = (to_f64(&(z.re.clone() / &m)), to_f64(&(z.im.clone() / &m)));
    let log_m = to_f64(&m.ln());
    Complex64::new(log_m + 0.5 * (re * re + im * im).ln(), im.atan2(re))
}

/// (sign, log₁₀|x|) without leaving the multiprecision exponent range.
pub fn sign_log10(x: &Hp) -> (f64, f64) {
    if x.is_zero() {
        return (0.0, f64::NEG_INFINITY);
    }
    let sign = if *x < Hp::ZERO { -1.0 } else { 1.0 };
    (sign, to_f64(&abs(x).ln()) / std::f64::consts::LN_10)
}

/// Table of q^k for k in [lo, hi], built by repeated multiplication.
#[derive(Clone, Debug)]
pub struct Powers<T> {
    lo: i64,
    table: Vec<T>,
}

impl<T: crate::scalar::Scalar> Powers<T> {
    pub fn new(q: &T, lo: i64, hi: i64) -> Self {
        assert!(lo <= 0 && hi >= 0);
        let mut table = vec![T::one(); (hi - lo + 1) as usize];
        let origin = (-lo) as usize;
        let inv = T::one() / q.clone();
        for k in 1..=hi as usize {
            table[origin + k] = table[origin + k - 1].clone() * q.clone();
        }
        for k in 1..=(-lo) as usize {
            table[origin - k] = table[origin - k + 1].clone() * inv.clone();
        }
        Powers { lo, table }
    }

    pub fn get(&self, k: i64) -> &T {
        &self.table[(k - self.lo) as usize]
    }

    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.table.len() as i64 - 1)
    }
}
