//! Exact q-series, the moment functional of the weight ∏_{j=1}^{2N}(1 + q^j/z)
//! and the monic orthogonal polynomials P_n(z; q, N).
//!
//! Pairings are stored without the common factor 2πi: `pairing(p, r)` is the
//! residue at infinity (coefficient of z^{-1}) of p(z) r(z) w(z).
//!
//! The polynomials are available by four constructions that must agree
//! exactly for rational q: a Hankel solve, a closed-form coefficient ratio,
//! the little q-Jacobi hypergeometric sum and the three-term recurrence.

use crate::error::{invalid, Error, Result};
use crate::poly;
use crate::scalar::{ipow, Scalar};
use num_rational::BigRational;
use serde::Serialize;

/// (a; q)_k = ∏_{j=1}^{k} (1 − a q^{j−1}).
pub fn q_pochhammer<T: Scalar>(a: &T, q: &T, k: usize) -> T {
    let mut out = T::one();
    let mut aq = a.clone();
    for _ in 0..k {
        out = out * (T::one() - aq.clone());
        aq = aq * q.clone();
    }
    out
}

/// Gaussian binomial [n choose m]_q; zero when m > n, the ordinary binomial at q = 1.
pub fn q_binomial<T: Scalar>(n: usize, m: usize, q: &T) -> T {
    if m > n {
        return T::zero();
    }
    let m = m.min(n - m);
    if m == 0 {
        return T::one();
    }
    if q.is_one() {
        let mut out = T::one();
        for i in 0..m {
            out = out * T::from_i64((n - i) as i64) / T::from_i64((i + 1) as i64);
        }
        return out;
    }
    let mut num = T::one();
    let mut den = T::one();
    for i in 1..=m {
        num = num * (T::one() - ipow(q, (n - m + i) as i64));
        den = den * (T::one() - ipow(q, i as i64));
    }
    num / den
}

/// Coefficients c_j, j = 0..2N, of ∏_{j=1}^{2N}(1 + q^j/z) = Σ c_j z^{-j}.
pub fn weight_laurent<T: Scalar>(n_half: usize, q: &T) -> Vec<T> {
    let two_n = 2 * n_half;
    (0..=two_n)
        .map(|j| q_binomial(two_n, j, q) * ipow(q, (j * (j + 1) / 2) as i64))
        .collect()
}

/// μ'_k = q^{(k+1)(k+2)/2} [2N choose k+1]_q, the moments divided by 2πi.
#[derive(Clone, Debug)]
pub struct MomentTable<T> {
    pub n_half: usize,
    pub q: T,
    /// μ'_0 .. μ'_{2N-1}; all higher moments vanish.
    pub mu: Vec<T>,
}

impl<T: Scalar> MomentTable<T> {
    pub fn new(n_half: usize, q: &T) -> Result<Self> {
        if n_half == 0 {
            return invalid("N must be at least 1");
        }
        let two_n = 2 * n_half;
        let mu = (0..two_n)
            .map(|k| ipow(q, ((k + 1) * (k + 2) / 2) as i64) * q_binomial(two_n, k + 1, q))
            .collect();
        Ok(MomentTable {
            n_half,
            q: q.clone(),
            mu,
        })
    }

    pub fn get(&self, k: usize) -> T {
        self.mu.get(k).cloned().unwrap_or_else(T::zero)
    }

    /// Σ p_i r_j μ'_{i+j}.
    pub fn pairing(&self, p: &[T], r: &[T]) -> T {
        let mut out = T::zero();
        for (i, a) in p.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in r.iter().enumerate() {
                let m = self.get(i + j);
                if !m.is_zero() {
                    out = out + a.clone() * b.clone() * m;
                }
            }
        }
        out
    }
}

pub fn moments<T: Scalar>(n_half: usize, q: &T) -> Result<MomentTable<T>> {
    MomentTable::new(n_half, q)
}

/// Coefficient of z^{-1} in p(z)·w(z), read directly off the Laurent expansion.
pub fn residue<T: Scalar>(p: &[T], laurent: &[T]) -> T {
    let mut out = T::zero();
    for (k, a) in p.iter().enumerate() {
        if let Some(c) = laurent.get(k + 1) {
            out = out + a.clone() * c.clone();
        }
    }
    out
}

fn check_degree(n: usize, n_half: usize) -> Result<()> {
    if n >= 2 * n_half {
        return Err(Error::DegreeTooLarge {
            n,
            two_n: 2 * n_half,
        });
    }
    Ok(())
}

/// Monic P_n from the moment (Hankel) system Σ_j p_j μ'_{i+j} = −μ'_{i+n}, i < n.
pub fn op_via_hankel<T: Scalar>(n: usize, n_half: usize, q: &T) -> Result<Vec<T>> {
    check_degree(n, n_half)?;
    let m = moments(n_half, q)?;
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row: Vec<T> = (0..n).map(|j| m.get(i + j)).collect();
            row.push(T::zero() - m.get(i + n));
            row
        })
        .collect();
    let sol = solve(&mut a)?;
    let mut p = sol;
    p.push(T::one());
    Ok(p)
}

/// Gaussian elimination on an augmented n×(n+1) system; first nonzero pivot.
fn solve<T: Scalar>(a: &mut [Vec<T>]) -> Result<Vec<T>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::Singular(col))?;
        a.swap(col, piv);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / a[col][col].clone();
            for c in col..=n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut s = a[r][n].clone();
        for c in r + 1..n {
            s = s - a[r][c].clone() * x[c].clone();
        }
        x[r] = s / a[r][r].clone();
    }
    Ok(x)
}

/// Monic P_n from the ratio of consecutive coefficients
/// p_k / p_{k+1} = −q^{2N}(1 − q^{k+1−2N})(1 − q^{k+1}) / ((1 − q^{n+k+1})(1 − q^{k−n})).
pub fn op_closed_form<T: Scalar>(n: usize, n_half: usize, q: &T) -> Result<Vec<T>> {
    check_degree(n, n_half)?;
    let two_n = (2 * n_half) as i64;
    let mut p = vec![T::zero(); n + 1];
    p[n] = T::one();
    let q2n = ipow(q, two_n);
    for k in (0..n).rev() {
        let ki = k as i64;
        let ni = n as i64;
        let num = (T::one() - ipow(q, ki + 1 - two_n)) * (T::one() - ipow(q, ki + 1)) * q2n.clone();
        let den = (T::one() - ipow(q, ni + ki + 1)) * (T::one() - ipow(q, ki - ni));
        if den.is_zero() {
            return Err(Error::VanishingDenominator(k));
        }
        p[k] = T::zero() - p[k + 1].clone() * num / den;
    }
    Ok(p)
}

/// Parameters (a, b, q) of the little q-Jacobi family.
#[derive(Clone, Debug)]
pub struct QJacobiParams<T> {
    pub a: T,
    pub b: T,
    pub q: T,
}

impl<T: Scalar> QJacobiParams<T> {
    /// a = q^{-2N}, b = q^{2N}: the parameters under which the q-Jacobi
    /// polynomials become P_n after z = −q^{2N+1} x.
    pub fn for_model(n_half: usize, q: &T) -> Self {
        let two_n = (2 * n_half) as i64;
        QJacobiParams {
            a: ipow(q, -two_n),
            b: ipow(q, two_n),
            q: q.clone(),
        }
    }

    /// A_n = q^n (1 − a q^{n+1})(1 − ab q^{n+1}) / ((1 − ab q^{2n+1})(1 − ab q^{2n+2})).
    pub fn a_coef(&self, n: usize) -> Result<T> {
        let ab = self.a.clone() * self.b.clone();
        let qn = |k: usize| ipow(&self.q, k as i64);
        let den = (T::one() - ab.clone() * qn(2 * n + 1)) * (T::one() - ab.clone() * qn(2 * n + 2));
        if den.is_zero() {
            return Err(Error::VanishingDenominator(n));
        }
        let num = qn(n) * (T::one() - self.a.clone() * qn(n + 1)) * (T::one() - ab * qn(n + 1));
        Ok(num / den)
    }

    /// C_n = a q^n (1 − q^n)(1 − b q^n) / ((1 − ab q^{2n})(1 − ab q^{2n+1})); C_0 = 0.
    pub fn c_coef(&self, n: usize) -> Result<T> {
        if n == 0 {
            // the numerator carries (1 − q^0); at ab = 1 the quotient is 0/0 and
            // the recurrence needs the value 0
            return Ok(T::zero());
        }
        let ab = self.a.clone() * self.b.clone();
        let qn = |k: usize| ipow(&self.q, k as i64);
        let den = (T::one() - ab.clone() * qn(2 * n)) * (T::one() - ab * qn(2 * n + 1));
        if den.is_zero() {
            return Err(Error::VanishingDenominator(n));
        }
        let num = self.a.clone() * qn(n) * (T::one() - qn(n)) * (T::one() - self.b.clone() * qn(n));
        Ok(num / den)
    }
}

/// Monic little q-Jacobi J_n(x; a, b | q) from the terminating 2φ1 sum
/// j_n(x) = Σ_k (q^{-n};q)_k (abq^{n+1};q)_k / ((aq;q)_k (q;q)_k) (qx)^k.
pub fn monic_qjacobi<T: Scalar>(n: usize, p: &QJacobiParams<T>) -> Result<Vec<T>> {
    let q = &p.q;
    let qinv_n = ipow(q, -(n as i64));
    let abq = p.a.clone() * p.b.clone() * ipow(q, n as i64 + 1);
    let aq = p.a.clone() * q.clone();
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let num = q_pochhammer(&qinv_n, q, k) * q_pochhammer(&abq, q, k);
        let den = q_pochhammer(&aq, q, k) * q_pochhammer(q, q, k);
        if den.is_zero() {
            return Err(Error::VanishingDenominator(k));
        }
        coeffs.push(num / den * ipow(q, k as i64));
    }
    let lead = coeffs[n].clone();
    if lead.is_zero() {
        return Err(Error::VanishingDenominator(n));
    }
    Ok(coeffs.into_iter().map(|c| c / lead.clone()).collect())
}

/// Monic J_n by J_{n+1} = (x − A_n − C_n) J_n − A_{n−1} C_n J_{n−1}.
pub fn op_via_recurrence<T: Scalar>(n: usize, p: &QJacobiParams<T>) -> Result<Vec<T>> {
    let mut prev: Vec<T> = Vec::new();
    let mut cur = vec![T::one()];
    let mut a_prev = T::zero();
    for k in 0..n {
        let a = p.a_coef(k)?;
        let c = p.c_coef(k)?;
        let shift = T::zero() - a.clone() - c.clone();
        let mut next = poly::mul(&cur, &[shift, T::one()]);
        let gamma = a_prev.clone() * c;
        if !gamma.is_zero() {
            for (i, v) in prev.iter().enumerate() {
                next[i] = next[i].clone() - gamma.clone() * v.clone();
            }
        }
        prev = cur;
        cur = next;
        a_prev = a;
    }
    Ok(cur)
}

/// P_n(z) = (−Q)^n J_n(−z/Q) with Q = q^{2N+1}.
pub fn jacobi_to_op<T: Scalar>(j: &[T], n_half: usize, q: &T) -> Vec<T> {
    let big_q = ipow(q, (2 * n_half + 1) as i64);
    let n = j.len() - 1;
    j.iter()
        .enumerate()
        .map(|(k, c)| {
            let v = c.clone() * ipow(&big_q, (n - k) as i64);
            if (n + k) % 2 == 1 {
                T::zero() - v
            } else {
                v
            }
        })
        .collect()
}

pub fn op_via_qjacobi<T: Scalar>(n: usize, n_half: usize, q: &T) -> Result<Vec<T>> {
    check_degree(n, n_half)?;
    let params = QJacobiParams::for_model(n_half, q);
    Ok(jacobi_to_op(&monic_qjacobi(n, &params)?, n_half, q))
}

/// P_n through the recurrence route, already transformed to the z variable.
pub fn op_recurrence_in_z<T: Scalar>(n: usize, n_half: usize, q: &T) -> Result<Vec<T>> {
    check_degree(n, n_half)?;
    let params = QJacobiParams::for_model(n_half, q);
    Ok(jacobi_to_op(&op_via_recurrence(n, &params)?, n_half, q))
}

/// κ_n / 2πi = residue of P_n² w. Signs vary with n; only nonvanishing is required.
pub fn kappa<T: Scalar>(n: usize, n_half: usize, q: &T) -> Result<T> {
    let p = op_closed_form(n, n_half, q)?;
    let m = moments(n_half, q)?;
    let k = m.pairing(&p, &p);
    if k.is_zero() {
        return Err(Error::ZeroNorm(n));
    }
    Ok(k)
}

/// Coefficients as "p/q" strings.
pub fn exact_strings(p: &[BigRational]) -> Vec<String> {
    p.iter().map(|c| c.to_string()).collect()
}

#[derive(Serialize)]
pub struct MomentTableJson {
    pub n_half: usize,
    pub q: String,
    pub mu_prime: Vec<String>,
}

impl MomentTable<BigRational> {
    pub fn to_json(&self) -> MomentTableJson {
        MomentTableJson {
            n_half: self.n_half,
            q: self.q.to_string(),
            mu_prime: exact_strings(&self.mu),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(q_pochhammer(&r("5"), &r("7"), 0), r("1"));
        assert_eq!(q_pochhammer(&r("2"), &r("2"), 2), r("3"));
        assert_eq!(q_pochhammer(&r("1"), &r("1"), 3), r("0"));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(q_binomial(2, 1, &r("2")), r("3"));
        assert_eq!(q_binomial(7, 0, &r("3/2")), r("1"));
        assert_eq!(q_binomial(4, 2, &r("1")), r("6"));
        assert_eq!(q_binomial(2, 3, &r("2")), r("0"));
        assert_eq!(q_binomial(6, 2, &r("5/3")), q_binomial(6, 4, &r("5/3")));
    }

    #[test]
    fn laurent_expansion_small() {
        let w = weight_laurent(1, &r("2"));
        assert_eq!(w, vec![r("1"), r("6"), r("8")]);
        assert_eq!(weight_laurent(1, &r("1")), vec![r("1"), r("2"), r("1")]);
        // direct product of (1 + q^j/z) in the variable 1/z
        let q = r("3/2");
        let direct = poly::linear_product((1..=6).map(|j| ipow(&q, j)));
        assert_eq!(weight_laurent(3, &q), direct);
    }

    #[test]
    fn moments_match_laurent() {
        let q = r("2");
        let m = moments(1, &q).unwrap();
        assert_eq!(m.get(0), r("6"));
        assert_eq!(m.get(1), r("8"));
        assert_eq!(m.get(2), r("0"));
        let q = r("5/2");
        let m = moments(4, &q).unwrap();
        let w = weight_laurent(4, &q);
        for k in 0..12 {
            let mut zk = vec![r("0"); k + 1];
            zk[k] = r("1");
            assert_eq!(m.get(k), residue(&zk, &w));
        }
    }

    #[test]
    fn first_polynomial() {
        let q = r("2");
        let want = vec![r("-4/3"), r("1")];
        assert_eq!(op_via_hankel(1, 1, &q).unwrap(), want);
        assert_eq!(op_closed_form(1, 1, &q).unwrap(), want);
        assert_eq!(op_via_qjacobi(1, 1, &q).unwrap(), want);
        assert_eq!(op_recurrence_in_z(1, 1, &q).unwrap(), want);
        assert_eq!(kappa(0, 1, &q).unwrap(), r("6"));
        assert_eq!(kappa(1, 1, &q).unwrap(), r("-32/3"));
    }

    #[test]
    fn hankel_against_determinant() {
        // n = 2: p_1 = (μ0 μ3 − μ1 μ2)/(μ1² − μ0 μ2)·(−1) by Cramer
        let q = r("3/2");
        let m = moments(2, &q).unwrap();
        let p = op_via_hankel(2, 2, &q).unwrap();
        let d = m.get(0) * m.get(2) - m.get(1) * m.get(1);
        let p0 = (m.get(1) * m.get(3) - m.get(2) * m.get(2)) / d.clone();
        let p1 = (m.get(1) * m.get(2) - m.get(0) * m.get(3)) / d;
        assert_eq!(p, vec![p0, p1, r("1")]);
    }

    #[test]
    fn degenerate_degree_rejected() {
        assert!(matches!(
            op_via_hankel(4, 2, &r("2")),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn top_recurrence_coefficient_vanishes() {
        for n_half in 1..5 {
            let p = QJacobiParams::for_model(n_half, &r("3/2"));
            assert_eq!(p.a_coef(2 * n_half - 1).unwrap(), r("0"));
        }
    }

    #[test]
    fn recurrence_base_case() {
        let p = QJacobiParams::for_model(2, &r("2"));
        let j1 = op_via_recurrence(1, &p).unwrap();
        let a0 = p.a_coef(0).unwrap();
        assert_eq!(j1, vec![r("0") - a0, r("1")]);
    }

    #[test]
    fn three_three_routes() {
        let q = r("3/2");
        let h = op_via_hankel(3, 3, &q).unwrap();
        assert_eq!(h, op_recurrence_in_z(3, 3, &q).unwrap());
        assert_eq!(h, op_via_qjacobi(3, 3, &q).unwrap());
    }

    #[test]
    fn json_export_is_exact() {
        let m = moments(1, &r("3/2")).unwrap();
        let s = serde_json::to_string(&m.to_json()).unwrap();
        assert!(s.contains("\"15/4\""), "{s}");
    }
}
