//! The field abstraction shared by the exact and multiprecision layers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;

/// Anything that behaves like a field for the polynomial algorithms:
/// big rationals, multiprecision floats, `f64`, complex numbers.
pub trait Scalar: Clone + Num + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for num_complex::Complex64 {
    fn from_i64(v: i64) -> Self {
        num_complex::Complex64::new(v as f64, 0.0)
    }
}

impl Scalar for crate::numeric::hp::Hp {
    fn from_i64(v: i64) -> Self {
        crate::numeric::hp::Hp::from(v)
    }
}

/// q^k for any integer k.
pub fn ipow<T: Scalar>(q: &T, k: i64) -> T {
    let p = num_traits::pow(q.clone(), k.unsigned_abs() as usize);
    if k >= 0 {
        p
    } else {
        T::one() / p
    }
}

pub fn is_one<T: Scalar>(x: &T) -> bool {
    x.is_one()
}

pub fn zero<T: Scalar>() -> T {
    T::zero()
}

/// Parse "p/q", "p" or a decimal string into an exact rational.
pub fn parse_rational(s: &str) -> crate::Result<BigRational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<BigRational>() {
        return Ok(r);
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        if let Ok(num) = digits.parse::<BigInt>() {
            let den = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(BigRational::new(num, den));
        }
    }
    crate::error::invalid(format!("cannot parse {s:?} as a rational number"))
}
