//! Finite-N polynomials in the scaling q = e^{c/2N} against their limits:
//! the weight approximation, the zeros of P_N and Plancherel–Rotach asymptotics.
//!
//! P_N has coefficients of size q^{O(N²)} that cancel almost completely near
//! the arc, so it is built and evaluated in multiprecision.

use crate::equilibrium::Arc;
use crate::error::{invalid, Error, Result};
use crate::numeric::hp::{self, Hp, HpC};
use crate::numeric::roots::{aberth, circle_start};
use crate::qcore;
use num_complex::{Complex, Complex64};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

/// P_N(z; e^{c/2N}, N) with multiprecision coefficients.
#[derive(Clone, Debug)]
pub struct ScaledPolynomial {
    pub n: usize,
    pub c: f64,
    pub bits: usize,
    pub coeffs: Vec<Hp>,
}

impl ScaledPolynomial {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return invalid("N must be at least 1");
        }
        if !(c > 0.0) {
            return invalid("c must be positive");
        }
        let bits = hp::bits_for(n, c);
        let q = hp::exp(c / (2.0 * n as f64), bits);
        let coeffs = qcore::op_closed_form(n, n, &q)?;
        Ok(ScaledPolynomial { n, c, bits, coeffs })
    }

    fn lift(&self, z: Complex64) -> HpC {
        hp::complex(z.re, z.im, self.bits)
    }

    /// (P(z), P′(z)) in multiprecision.
    pub fn eval_with_derivative(&self, z: Complex64) -> (HpC, HpC) {
        let x = self.lift(z);
        let zero = hp::int(0, self.bits);
        let mut v = Complex::new(zero.clone(), zero.clone());
        let mut d = Complex::new(zero.clone(), zero);
        for c in self.coeffs.iter().rev() {
            d = d * x.clone() + v.clone();
            v = v * x.clone();
            v.re += c;
        }
        (v, d)
    }

    /// log P_N(z) (principal imaginary part).
    pub fn log_value(&self, z: Complex64) -> Complex64 {
        hp::ln_c64(&self.eval_with_derivative(z).0)
    }

    /// log Σ|p_k||z|^k, the natural size against which P(z) is small.
    pub fn log_scale(&self, z: Complex64) -> f64 {
        let r = hp::from_f64(z.norm(), self.bits);
        let mut acc = hp::int(0, self.bits);
        for c in self.coeffs.iter().rev() {
            acc = acc * r.clone() + hp::abs(c);
        }
        hp::to_f64(&acc.ln())
    }

    /// Newton correction P/P′ in double precision.
    pub fn newton_step(&self, z: Complex64) -> Complex64 {
        let (v, d) = self.eval_with_derivative(z);
        if d.re.is_zero() && d.im.is_zero() {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        (hp::ln_c64(&v) - hp::ln_c64(&d)).exp()
    }
}

/// ∏_{j=1}^{2N}(1 + q^j/z) against e^{−NV(z)+ν(z)}:
/// max over the grid of |e^{NV − ν}∏ − 1|.
pub fn weight_approx_error(n: usize, c: f64, grid: &[Complex64]) -> Result<f64> {
    let arc = Arc::new(c)?;
    let q = (c / (2.0 * n as f64)).exp();
    let mut worst = 0.0f64;
    for &z in grid {
        if (z + arc.rho).norm() < 1e-12 * arc.rho {
            return Err(Error::OnCut(format!("z = −e^{{c/2}} is excluded, got {z}")));
        }
        let log_prod: Complex64 = (1..=2 * n)
            .map(|j| (1.0 + q.powi(j as i32) / z).ln())
            .sum();
        let e = (n as f64 * arc.v(z) - arc.nu(z) + log_prod).exp() - 1.0;
        worst = worst.max(e.norm());
    }
    Ok(worst)
}

/// m points on |z| = e^{c/2} with |arg z| ≤ 0.9π.
pub fn circle_grid(c: f64, m: usize) -> Vec<Complex64> {
    let rho = (c / 2.0).exp();
    (0..m)
        .map(|k| {
            let t = -0.9 * std::f64::consts::PI + 1.8 * std::f64::consts::PI * k as f64 / (m - 1) as f64;
            Complex64::from_polar(rho, t)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroSet {
    pub n: usize,
    pub c: f64,
    pub zeros: Vec<Complex64>,
    pub distances: Vec<f64>,
    pub max_residual: f64,
    pub iterations: usize,
}

impl ZeroSet {
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().cloned().fold(0.0, f64::max)
    }
}

/// All zeros of P_N(z; e^{c/2N}, N) by Aberth iteration started on |z| = e^{c/2}.
pub fn zeros(n: usize, c: f64) -> Result<ZeroSet> {
    if n > 200 {
        return invalid("N is capped at 200");
    }
    let arc = Arc::new(c)?;
    let p = ScaledPolynomial::new(n, c)?;
    let rep = aberth(circle_start(n, arc.rho), |z| p.newton_step(z), 1e-14, 400);
    if !rep.unconverged.is_empty() {
        return Err(Error::NoConvergence(format!(
            "Aberth iteration left roots {:?} unconverged",
            rep.unconverged
        )));
    }
    let mut zeros = rep.roots;
    zeros.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
    let mut max_residual = 0.0f64;
    for &z in &zeros {
        let rel = (p.log_value(z).re - p.log_scale(z)).exp();
        max_residual = max_residual.max(rel);
    }
    if max_residual > 1e-8 {
        return Err(Error::NoConvergence(format!("relative residual {max_residual:e}")));
    }
    let distances = zeros.iter().map(|&z| arc.distance_to_arc(z)).collect();
    Ok(ZeroSet {
        n,
        c,
        zeros,
        distances,
        max_residual,
        iterations: rep.iterations,
    })
}

/// Zeros for several degrees at once, one thread per degree.
pub fn zeros_many(ns: &[usize], c: f64) -> Result<Vec<ZeroSet>> {
    ns.par_iter().map(|&n| zeros(n, c)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PlancherelRotach {
    pub n: usize,
    pub z: Complex64,
    pub log_exact: Complex64,
    pub log_leading: Complex64,
    pub relative_error: f64,
}

/// P_N(z) against e^{Ng(z)} · ½(a(z) + 1/a(z)) · ς(z)/ς(∞).
pub fn plancherel_rotach(z: Complex64, n: usize, c: f64) -> Result<PlancherelRotach> {
    let arc = Arc::new(c)?;
    let d = (z - arc.z_plus).norm().min((z - arc.z_minus).norm());
    if d < 0.1 * arc.rho {
        return invalid(format!("z = {z} is within 0.1·e^{{c/2}} of an endpoint"));
    }
    if arc.near_arc(z, 1e-6 * arc.rho) {
        return Err(Error::OnCut(format!("z = {z}")));
    }
    let a = arc.a(z);
    let lead = 0.5 * (a + 1.0 / a);
    if lead.norm() <= 0.1 {
        return invalid(format!("leading factor nearly vanishes at z = {z}"));
    }
    let log_leading = n as f64 * arc.g(z)? + lead.ln() + arc.log_szego(z)? - arc.log_szego_infinity();
    let p = ScaledPolynomial::new(n, c)?;
    let log_exact = p.log_value(z);
    let relative_error = ((log_exact - log_leading).exp() - 1.0).norm();
    Ok(PlancherelRotach {
        n,
        z,
        log_exact,
        log_leading,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiprecision_matches_exact_small_case() {
        // N = 1: P_1(z) = z − q²/(1 + q)
        let p = ScaledPolynomial::new(1, 1.0).unwrap();
        let q = 0.5f64.exp();
        let want = -q * q / (1.0 + q);
        assert!((hp::to_f64(&p.coeffs[0]) - want).abs() < 1e-15);
    }

    #[test]
    fn weight_approximation_improves() {
        let grid = circle_grid(1.0, 41);
        let e: Vec<f64> = [20, 40, 80]
            .iter()
            .map(|&n| weight_approx_error(n, 1.0, &grid).unwrap())
            .collect();
        assert!(e[1] < e[0] && e[2] < e[1], "{e:?}");
        assert!(e[1] / e[0] <= 0.7 && e[2] / e[1] <= 0.7, "{e:?}");
        let bad = [Complex64::from_polar(0.5f64.exp(), std::f64::consts::PI)];
        assert!(weight_approx_error(10, 1.0, &bad).is_err());
    }

    #[test]
    fn zeros_small_degree() {
        let z = zeros(12, 1.0).unwrap();
        assert_eq!(z.zeros.len(), 12);
        for w in &z.zeros {
            assert!(z.zeros.iter().any(|v| (v - w.conj()).norm() < 1e-8));
        }
    }

    #[test]
    fn plancherel_rotach_rejects_endpoints() {
        let arc = Arc::new(1.0).unwrap();
        assert!(plancherel_rotach(arc.z_plus * 1.01, 10, 1.0).is_err());
    }
}
