//! The equilibrium problem on the circular arc γ₀ = {e^{c/2}e^{it}: |t| < θ_c}.
//!
//! Branch conventions:
//!
//! * `a²(z)` is the square root of (z − z₊)/(z − z₋) whose argument lies in
//!   (θ_c − π, θ_c + π]; its cut is exactly γ₀ and a²(0) = e^{iθ_c}.
//!   `R(z) = (z − z₋)a²(z)` behaves like z at infinity and R(0) = −e^{c/2}.
//! * On γ₀ the boundary value from outside the circle is the `Outer` (minus)
//!   side, the one from inside is `Inner` (plus); the two differ by a sign.
//! * ψ, V and ν use principal logarithms and dilogarithms, so they carry a
//!   cut along (−e^c, −1) or (−∞, 0) in addition to γ₀.
//! * φ(z) = ∫ψ from z₊: first radially at angle θ_c out (or in) to |z|, then
//!   along the circle of radius |z|. g = V/2 − ℓ/2 + φ.

use crate::error::{invalid, Error, Result};
use crate::numeric::dilog::li2;
use crate::numeric::quad::{adaptive, adaptive_real, circle_mean};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which boundary value to take on γ₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// limit from |z| < e^{c/2}
    Inner,
    /// limit from |z| > e^{c/2}
    Outer,
}

#[derive(Clone, Debug)]
pub struct Arc {
    pub c: f64,
    pub theta: f64,
    pub rho: f64,
    pub z_plus: Complex64,
    pub z_minus: Complex64,
    a2_neg_one: Complex64,
    a2_neg_ec: Complex64,
    ell: OnceLock<Complex64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcGeometry {
    pub c: f64,
    pub theta_c: f64,
    pub z_plus: [f64; 2],
    pub z_minus: [f64; 2],
}

/// θ_c from cos θ_c = −cosh(c/2)/(1 + cosh(c/2)), in the form
/// θ_c = π − 2 asin(1/(2cosh(c/4))) that keeps full accuracy for large c.
pub fn theta_c(c: f64) -> f64 {
    PI - 2.0 * (0.5 / (c / 4.0).cosh()).asin()
}

impl Arc {
    /// Geometry and branch data for c ≥ 0. At c = 0 only the geometry is
    /// meaningful; the analytic functions divide by c.
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return invalid(format!("c must be a finite nonnegative number, got {c}"));
        }
        let theta = theta_c(c);
        let rho = (c / 2.0).exp();
        let z_plus = Complex64::from_polar(rho, theta);
        let z_minus = z_plus.conj();
        let mut arc = Arc {
            c,
            theta,
            rho,
            z_plus,
            z_minus,
            a2_neg_one: Complex64::new(0.0, 0.0),
            a2_neg_ec: Complex64::new(0.0, 0.0),
            ell: OnceLock::new(),
        };
        arc.a2_neg_one = arc.a2(c64(-1.0, 0.0));
        arc.a2_neg_ec = arc.a2(c64(-c.exp(), 0.0));
        Ok(arc)
    }

    pub fn geometry(&self) -> ArcGeometry {
        ArcGeometry {
            c: self.c,
            theta_c: self.theta,
            z_plus: [self.z_plus.re, self.z_plus.im],
            z_minus: [self.z_minus.re, self.z_minus.im],
        }
    }

    /// cos θ_c + cosh(c/2)/(1 + cosh(c/2)); zero up to rounding.
    pub fn angle_residual(&self) -> f64 {
        let ch = (self.c / 2.0).cosh();
        self.theta.cos() + ch / (1.0 + ch)
    }

    pub fn arc_point(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.rho, t)
    }

    /// Euclidean distance from z to γ₀.
    pub fn distance_to_arc(&self, z: Complex64) -> f64 {
        let t = z.arg();
        if t.abs() <= self.theta {
            (z.norm() - self.rho).abs()
        } else {
            (z - self.z_plus).norm().min((z - self.z_minus).norm())
        }
    }

    /// True when z is within `tol` of γ₀ (endpoints included).
    pub fn near_arc(&self, z: Complex64, tol: f64) -> bool {
        self.distance_to_arc(z) <= tol
    }

    fn sqrt_rot(&self, w: Complex64) -> Complex64 {
        let mut a = w.arg();
        let lo = self.theta - PI;
        while a <= lo {
            a += 2.0 * PI;
        }
        while a > lo + 2.0 * PI {
            a -= 2.0 * PI;
        }
        Complex64::from_polar(w.norm().sqrt(), a / 2.0)
    }

    /// a²(z) = √((z − z₊)/(z − z₋)), analytic off γ₀.
    pub fn a2(&self, z: Complex64) -> Complex64 {
        self.sqrt_rot((z - self.z_plus) / (z - self.z_minus))
    }

    /// Boundary value of a² at e^{c/2}e^{it}, |t| < θ_c.
    pub fn a2_arc(&self, t: f64, side: Side) -> Complex64 {
        self.a2_arc_split(self.theta - t, self.theta + t, side)
    }

    /// a² on γ₀ in terms of the distances dm = θ_c − t and dp = θ_c + t to the
    /// endpoint angles, which callers near an endpoint know more accurately than t.
    fn a2_arc_split(&self, dm: f64, dp: f64, side: Side) -> Complex64 {
        let num = (dm / 2.0).sin().max(0.0);
        let den = (dp / 2.0).sin();
        let outer = Complex64::from_polar((num / den).sqrt(), (self.theta - PI) / 2.0);
        match side {
            Side::Outer => outer,
            Side::Inner => -outer,
        }
    }

    /// a(z), the principal square root of a²(z).
    pub fn a(&self, z: Complex64) -> Complex64 {
        self.a2(z).sqrt()
    }

    pub fn a2_neg_one(&self) -> Complex64 {
        self.a2_neg_one
    }

    pub fn a2_neg_ec(&self) -> Complex64 {
        self.a2_neg_ec
    }

    /// R(z) = √((z − z₊)(z − z₋)) ~ z at infinity.
    pub fn r(&self, z: Complex64) -> Complex64 {
        (z - self.z_minus) * self.a2(z)
    }

    pub fn r_arc(&self, t: f64, side: Side) -> Complex64 {
        self.r_arc_split(self.theta - t, self.theta + t, side)
    }

    fn r_arc_split(&self, dm: f64, dp: f64, side: Side) -> Complex64 {
        // x − z₋ = 2iρ e^{i(t−θ_c)/2} sin((t + θ_c)/2)
        let t = 0.5 * (dp - dm);
        let diff = 2.0 * I * Complex64::from_polar(self.rho, 0.5 * (t - self.theta)) * (0.5 * dp).sin();
        diff * self.a2_arc_split(dm, dp, side)
    }

    /// R on the real line, where it is real and negative on (0, e^{c/2}); the
    /// value at x = e^{c/2} is the inner one.
    pub fn r_real(&self, x: f64) -> f64 {
        if (x - self.rho).abs() < 1e-14 * self.rho {
            return self.r_arc(0.0, Side::Inner).re;
        }
        self.r(c64(x, 0.0)).re
    }

    fn psi_with(&self, z: Complex64, a2: Complex64) -> Complex64 {
        let (a1, ae) = (self.a2_neg_one, self.a2_neg_ec);
        let l1 = (-I * (a2 - a1) / (a2 + a1)).ln();
        let le = (-I * (a2 - ae) / (a2 + ae)).ln();
        let v = (l1 - le) / (self.c * z);
        // ψ is real on the real axis away from [−e^c, −1]; on the axis itself a
        // logarithm argument can land exactly on its cut
        if z.im == 0.0 && !(z.re > -self.c.exp() && z.re < -1.0) {
            c64(v.re, 0.0)
        } else {
            v
        }
    }

    /// ψ(z) in closed form; analytic off γ₀ ∪ [−e^c, −1] ∪ {0}.
    pub fn psi(&self, z: Complex64) -> Complex64 {
        self.psi_with(z, self.a2(z))
    }

    pub fn psi_arc(&self, t: f64, side: Side) -> Complex64 {
        self.psi_with(self.arc_point(t), self.a2_arc(t, side))
    }

    /// h₁ = c/R(0).
    pub fn h1(&self) -> f64 {
        self.c / self.r(c64(0.0, 0.0)).re
    }

    /// h₂ = c.
    pub fn h2(&self) -> f64 {
        self.c
    }

    /// h(z) = cψ(z)/R(z) + h₁/z.
    pub fn h(&self, z: Complex64) -> Complex64 {
        self.c * self.psi(z) / self.r(z) + self.h1() / z
    }

    /// h(z) = ∫_{−e^c}^{−1} dt / (t R(t) (t − z)) by adaptive quadrature.
    pub fn h_integral(&self, z: Complex64) -> Complex64 {
        let ec = self.c.exp();
        adaptive(
            |t| {
                let tc = c64(t, 0.0);
                1.0 / (tc * self.r(tc) * (tc - z))
            },
            -ec,
            -1.0,
            1e-14,
        )
    }

    /// (h₁, h₂) as −∫ dt/(tR(t)) and −∫ dt/R(t) over [−e^c, −1].
    pub fn h_coefficients_integral(&self) -> (f64, f64) {
        let ec = self.c.exp();
        let h1 = -adaptive_real(|t| 1.0 / (t * self.r(c64(t, 0.0)).re), -ec, -1.0, 1e-15);
        let h2 = -adaptive_real(|t| 1.0 / self.r(c64(t, 0.0)).re, -ec, -1.0, 1e-15);
        (h1, h2)
    }

    /// (h₁, h₂) as the coefficients of 1/z and 1/z² of the closed-form h,
    /// read off by the trapezoid rule on a circle enclosing every cut.
    pub fn h_coefficients_contour(&self) -> (f64, f64) {
        let radius = 2.0 * self.c.exp() + 1.0;
        let n = 512;
        let zero = c64(0.0, 0.0);
        let h1 = circle_mean(|z| self.h(z), zero, radius, n, 0.5);
        let h2 = circle_mean(|z| z * self.h(z), zero, radius, n, 0.5);
        (h1.re, h2.re)
    }

    /// zψ₋ at e^{c/2}e^{it}: real, positive, the density of μ in dt up to 1/π.
    pub fn density(&self, t: f64) -> f64 {
        let a = self.a2_arc(t, Side::Outer);
        let a1 = self.a2_neg_one;
        2.0 / self.c * ((a - a1) / (a + a1)).norm().ln()
    }

    /// Total mass (1/π)∫_{−θ_c}^{θ_c} zψ₋ dt with t = θ_c cos u.
    pub fn mass(&self) -> f64 {
        let th = self.theta;
        adaptive_real(|u| self.density(th * u.cos()) * th * u.sin(), 0.0, PI, 1e-14) / PI
    }

    /// V(z) = (2/c)(Li₂(−e^c/z) − Li₂(−1/z)).
    pub fn v(&self, z: Complex64) -> Complex64 {
        let ec = self.c.exp();
        2.0 / self.c * (li2(-ec / z) - li2(-1.0 / z))
    }

    pub fn v_prime(&self, z: Complex64) -> Complex64 {
        let ec = self.c.exp();
        2.0 / (self.c * z) * ((1.0 + ec / z).ln() - (1.0 + 1.0 / z).ln())
    }

    /// ν(z) = ½Log(1 + e^c/z) − ½Log(1 + 1/z).
    pub fn nu(&self, z: Complex64) -> Complex64 {
        let ec = self.c.exp();
        0.5 * ((1.0 + ec / z).ln() - (1.0 + 1.0 / z).ln())
    }

    /// ℓ = V(z₊) − 2g(z₊), from the normalisation g(z) = log z + o(1):
    /// ℓ = 2[∫_{z₊}^{∞}(ψ(s) − 1/s)ds − log z₊].
    pub fn ell(&self) -> Complex64 {
        *self.ell.get_or_init(|| {
            let zp = self.z_plus;
            // s = z₊/τ, τ = 1 − v²
            let j = adaptive(
                |v| {
                    let tau = 1.0 - v * v;
                    if tau <= 0.0 {
                        return c64(0.0, 0.0);
                    }
                    let s = zp / tau;
                    (self.psi(s) - tau / zp) * zp / (tau * tau) * (2.0 * v)
                },
                0.0,
                1.0,
                1e-14,
            );
            2.0 * (j - c64(self.c / 2.0, self.theta))
        })
    }

    /// ∫_{θ_c}^{t} ψ(re^{is}) i r e^{is} ds, sampled densely near θ_c.
    fn angular_leg<F: Fn(f64) -> Complex64>(&self, t: f64, f: F) -> Complex64 {
        let d = t - self.theta;
        if d == 0.0 {
            return c64(0.0, 0.0);
        }
        adaptive(|v| f(self.theta + d * v * v) * (2.0 * d * v), 0.0, 1.0, 1e-13)
    }

    /// φ(z) = ∫_{z₊}^{z} ψ(s) ds along the radial-then-angular path.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        let r = z.norm();
        let t = z.arg();
        if (r - self.rho).abs() < 1e-12 * self.rho && t.abs() < self.theta {
            return Err(Error::OnCut(format!("z = {z}")));
        }
        let e = Complex64::from_polar(1.0, self.theta);
        let d = r - self.rho;
        let radial = if d == 0.0 {
            c64(0.0, 0.0)
        } else {
            adaptive(
                |v| self.psi(e * (self.rho + d * v * v)) * e * (2.0 * d * v),
                0.0,
                1.0,
                1e-13,
            )
        };
        let angular = self.angular_leg(t, |s| {
            let w = Complex64::from_polar(r, s);
            self.psi(w) * I * w
        });
        Ok(radial + angular)
    }

    /// Boundary value of φ on γ₀ at angle t.
    pub fn phi_arc(&self, t: f64, side: Side) -> Complex64 {
        self.angular_leg(t, |s| self.psi_arc(s, side) * I * self.arc_point(s))
    }

    /// g(z) = V(z)/2 − ℓ/2 + φ(z).
    pub fn g(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.v(z) / 2.0 - self.ell() / 2.0 + self.phi(z)?)
    }

    /// g′ = V′/2 + ψ.
    pub fn g_prime(&self, z: Complex64) -> Complex64 {
        self.v_prime(z) / 2.0 + self.psi(z)
    }

    /// Re g(z) = ∫ log|z − x| dμ(x), computed directly from the density.
    pub fn re_g_direct(&self, z: Complex64) -> f64 {
        let th = self.theta;
        adaptive_real(
            |u| {
                let t = th * u.cos();
                (z - self.arc_point(t)).norm().ln() * self.density(t) * th * u.sin()
            },
            0.0,
            PI,
            1e-13,
        ) / PI
    }

    /// ∫_{γ₀} f(dm, dp, x) dx with x = e^{c/2}e^{it}, t = θ_c cos u, oriented
    /// from z₋ to z₊; dm = θ_c − t and dp = θ_c + t are passed without cancellation.
    fn arc_integral<F: Fn(f64, f64, Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        let th = self.theta;
        adaptive(
            |u| {
                let t = th * u.cos();
                let dm = 2.0 * th * (0.5 * u).sin().powi(2);
                let dp = 2.0 * th * (0.5 * u).cos().powi(2);
                let x = self.arc_point(t);
                f(dm, dp, x) * I * x * th * u.sin()
            },
            0.0,
            PI,
            1e-13,
        )
    }

    /// Change of log(x − z) as x runs over γ₀ from z₋ to z₊.
    fn arc_log_increment(&self, z: Complex64) -> Complex64 {
        fn sweep(arc: &Arc, z: Complex64, a: f64, b: f64, depth: u32) -> f64 {
            let r = (arc.arc_point(b) - z) / (arc.arc_point(a) - z);
            let d = r.arg();
            if d.abs() < 0.5 || depth > 60 {
                d
            } else {
                let m = 0.5 * (a + b);
                sweep(arc, z, a, m, depth + 1) + sweep(arc, z, m, b, depth + 1)
            }
        }
        let re = ((self.z_plus - z).norm() / (self.z_minus - z).norm()).ln();
        c64(re, sweep(self, z, -self.theta, self.theta, 0))
    }

    /// log ς(z) = R(z)/(2πi) ∫_{γ₀} ν(x) / ((x − z) R₋(x)) dx.
    pub fn log_szego(&self, z: Complex64) -> Result<Complex64> {
        let scale = self.rho;
        if (z - self.z_plus).norm() < 1e-9 * scale || (z - self.z_minus).norm() < 1e-9 * scale {
            return Err(Error::OnCut(format!("Szegő function requested at an endpoint, z = {z}")));
        }
        if self.near_arc(z, 1e-14 * scale) {
            return Err(Error::OnCut(format!("z = {z}")));
        }
        let f = |dm: f64, dp: f64, x: Complex64| self.nu(x) / self.r_arc_split(dm, dp, Side::Outer);
        // subtract the value at the nearest arc point to tame z close to γ₀
        let t0 = z.arg();
        let integral = if t0.abs() < self.theta && self.distance_to_arc(z) < 0.2 * scale {
            let x0 = self.arc_point(t0);
            let f0 = f(self.theta - t0, self.theta + t0, x0);
            self.arc_integral(|dm, dp, x| (f(dm, dp, x) - f0) / (x - z)) + f0 * self.arc_log_increment(z)
        } else {
            self.arc_integral(|dm, dp, x| f(dm, dp, x) / (x - z))
        };
        Ok(self.r(z) / (2.0 * PI * I) * integral)
    }

    pub fn szego(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.log_szego(z)?.exp())
    }

    /// log ς(∞) = −(1/2πi) ∫_{γ₀} ν / R₋ dx.
    pub fn log_szego_infinity(&self) -> Complex64 {
        -self.arc_integral(|dm, dp, x| self.nu(x) / self.r_arc_split(dm, dp, Side::Outer)) / (2.0 * PI * I)
    }

    /// Boundary value of log ς at e^{c/2}e^{it} by one-sided Richardson limits.
    pub fn log_szego_arc(&self, t: f64, side: Side) -> Complex64 {
        let x0 = self.arc_point(t);
        let dir = match side {
            Side::Outer => x0 / x0.norm(),
            Side::Inner => -x0 / x0.norm(),
        };
        crate::numeric::quad::one_sided_limit(
            |z| self.log_szego(z).unwrap_or(c64(f64::NAN, f64::NAN)),
            x0,
            dir,
            1e-3 * self.rho,
        )
    }
}

/// Density profile (t, zψ₋) on an m-point interior grid.
pub fn density_profile(arc: &Arc, m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|k| {
            let t = -arc.theta + 2.0 * arc.theta * (k as f64 + 0.5) / m as f64;
            (t, arc.density(t))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub c: f64,
    pub mass: f64,
    pub min_density: f64,
    pub min_at: f64,
    pub grid: usize,
    pub pass: bool,
}

/// Total mass and positivity of zψ₋ on an m-point interior grid.
pub fn equilibrium_measure_check(arc: &Arc, m: usize, tol: f64) -> Result<MeasureReport> {
    if m < 8 {
        return invalid("grid must have at least 8 points");
    }
    let mass = arc.mass();
    let (min_at, min_density) = density_profile(arc, m)
        .into_iter()
        .fold((0.0, f64::INFINITY), |acc, (t, d)| if d < acc.1 { (t, d) } else { acc });
    Ok(MeasureReport {
        c: arc.c,
        mass,
        min_density,
        min_at,
        grid: m,
        pass: (mass - 1.0).abs() <= tol && min_density > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn geometry() {
        let a0 = Arc::new(0.0).unwrap();
        assert!((a0.theta - 2.0 * PI / 3.0).abs() < 1e-15);
        for c in [0.5, 1.0, 5.0, 25.0] {
            let a = Arc::new(c).unwrap();
            assert!(a.angle_residual().abs() < 1e-14);
            assert!((a.z_plus.norm() - a.rho).abs() < 1e-12 * a.rho);
        }
        assert!(Arc::new(60.0).unwrap().theta > PI - 1e-5);
        assert!(Arc::new(-1.0).is_err());
    }

    #[test]
    fn r_normalisation_and_identities() {
        let a = Arc::new(1.0).unwrap();
        assert!(a.r(a.z_plus).norm() < 1e-12);
        let big = c64(1e6, 3e5);
        assert!((a.r(big) / big - 1.0).norm() < 1e-5);
        let ratio = a.r(c64(-1f64.exp(), 0.0)) / a.r(c64(-1.0, 0.0));
        assert!(close(ratio, c64(0.5f64.exp(), 0.0), 1e-12));
        assert!((a.r(c64(0.0, 0.0)) + a.rho).norm() < 1e-12);
        // R² = (z − z₊)(z − z₋)
        let z = c64(0.3, -1.7);
        assert!(close(a.r(z).powi(2), (z - a.z_plus) * (z - a.z_minus), 1e-13));
    }

    #[test]
    fn a_squared_symmetries() {
        for c in [0.5, 1.0, 2.0, 5.0] {
            let a = Arc::new(c).unwrap();
            let a0 = a.a2(c64(0.0, 0.0));
            assert!(close(a0, Complex64::from_polar(1.0, a.theta), 1e-12));
            assert!(close(a.a2_neg_one() * a.a2_neg_ec(), a0, 1e-12));
        }
    }

    #[test]
    fn psi_residues() {
        let a = Arc::new(1.0).unwrap();
        let z = c64(1e4, 2e3);
        assert!((z * a.psi(z) - 1.0).norm() < 1e-3);
        let z = c64(1e-4, 5e-5);
        assert!((z * a.psi(z) + 1.0).norm() < 1e-3);
    }

    #[test]
    fn h_closed_form_matches_integral() {
        let a = Arc::new(1.0).unwrap();
        for z in [c64(0.0, 3.0), c64(3.0, 1.0), c64(-0.5, 0.7), c64(-5.0, 0.1)] {
            assert!(close(a.h(z), a.h_integral(z), 1e-9), "{z}");
        }
    }

    #[test]
    fn h_coefficients() {
        for c in [0.5, 1.0, 2.0, 5.0] {
            let a = Arc::new(c).unwrap();
            let r0 = a.r(c64(0.0, 0.0)).re;
            let (i1, i2) = a.h_coefficients_integral();
            let (k1, k2) = a.h_coefficients_contour();
            assert!((i1 * r0 - c).abs() < 1e-10 && (i2 - c).abs() < 1e-10);
            assert!((k1 * r0 - c).abs() < 1e-10 && (k2 - c).abs() < 1e-10);
        }
    }

    #[test]
    fn psi_jumps() {
        let a = Arc::new(1.0).unwrap();
        let eps = 1e-9;
        for x in [-1.5, -2.0, -2.6] {
            let up = a.psi(c64(x, eps));
            let dn = a.psi(c64(x, -eps));
            assert!(close(up - dn, 2.0 * PI * I / (a.c * x), 1e-7), "{}", up - dn);
        }
        for t in [-0.9, 0.0, 0.4, 1.7] {
            let s = a.psi_arc(t, Side::Inner) + a.psi_arc(t, Side::Outer);
            assert!(s.norm() < 1e-12);
            let z = a.arc_point(t);
            assert!(close(a.psi(z * (1.0 + 1e-10)), a.psi_arc(t, Side::Outer), 1e-6));
            assert!(close(a.psi(z * (1.0 - 1e-10)), a.psi_arc(t, Side::Inner), 1e-6));
        }
    }

    #[test]
    fn psi_reflection() {
        let a = Arc::new(1.3).unwrap();
        let ec = a.c.exp();
        for z in [c64(0.2, 0.9), c64(4.0, -1.0), c64(-0.3, -0.2), c64(7.0, 3.0)] {
            let w = ec / z;
            assert!(close(w * a.psi(w), -z * a.psi(z), 1e-12));
        }
    }

    #[test]
    fn measure_is_a_probability() {
        for c in [1.0, 5.0, 25.0] {
            let a = Arc::new(c).unwrap();
            let rep = equilibrium_measure_check(&a, 64, 1e-8).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn density_vanishes_like_square_root() {
        let a = Arc::new(1.0).unwrap();
        let (d1, d2) = (1e-6, 1e-8);
        let p = (a.density(a.theta - d1) / a.density(a.theta - d2)).ln() / (d1 / d2).ln();
        assert!((p - 0.5).abs() < 0.05, "{p}");
    }

    #[test]
    fn v_jump_on_interval() {
        let a = Arc::new(1.0).unwrap();
        for x in [-1.3f64, -2.0, -2.5] {
            let up = a.v(c64(x, 1e-12));
            let dn = a.v(c64(x, -1e-12));
            let want = 4.0 * PI * I * (1.0 - x.abs().ln() / a.c);
            assert!(close(up - dn, want, 1e-8), "{}", up - dn);
        }
    }

    #[test]
    fn g_is_log_potential() {
        let a = Arc::new(1.0).unwrap();
        for z in [c64(3.0, 1.0), c64(0.4, 0.5), c64(10.0, -3.0), c64(-0.5, 0.2)] {
            let g = a.g(z).unwrap();
            assert!((g.re - a.re_g_direct(z)).abs() < 1e-9, "{z}");
        }
        let z = c64(1e4, 0.0);
        assert!((a.g(z).unwrap() - z.ln()).norm() < 2e-4);
        let ell = a.ell();
        assert!((ell.re + 1.56416).abs() < 1e-4 && (ell.im + PI).abs() < 1e-9, "{ell}");
    }

    #[test]
    fn g_derivative() {
        let a = Arc::new(1.0).unwrap();
        let z = c64(2.0, 1.5);
        let h = 1e-5;
        let fd = (a.g(z + h).unwrap() - a.g(z - h).unwrap()) / (2.0 * h);
        assert!(close(fd, a.g_prime(z), 1e-8));
    }

    #[test]
    fn phi_on_and_off_the_arc() {
        for c in [1.0, 2.0, 5.0] {
            let a = Arc::new(c).unwrap();
            assert!(a.phi_arc(0.0, Side::Outer).re.abs() < 1e-8);
            let s = a.phi_arc(0.3, Side::Outer) + a.phi_arc(0.3, Side::Inner);
            assert!(s.re.abs() < 1e-10);
            // on the rest of the circle Re φ is strictly negative
            let back = a.phi(a.arc_point(PI - 1e-12)).unwrap();
            assert!(back.re < 0.0, "c = {c}: {back}");
        }
        let a = Arc::new(1.0).unwrap();
        let back = a.phi(a.arc_point(PI - 1e-12)).unwrap();
        assert!((back.re + 1.4536).abs() < 1e-3, "{back}");
    }

    #[test]
    fn szego_function() {
        let a = Arc::new(1.0).unwrap();
        let inf = a.log_szego_infinity();
        assert!((inf - c64(-0.25, 0.0)).norm() < 1e-9, "{inf}");
        let far = a.log_szego(c64(1e5, 1e4)).unwrap();
        assert!((far - inf).norm() < 1e-4);
        let z = c64(0.7, 1.9);
        assert!(close(a.log_szego(z.conj()).unwrap(), a.log_szego(z).unwrap().conj(), 1e-11));
        for t in [0.0, 0.8, -1.3] {
            let plus = a.log_szego_arc(t, Side::Inner);
            let minus = a.log_szego_arc(t, Side::Outer);
            let nu = a.nu(a.arc_point(t));
            assert!(close(plus + minus, -nu, 1e-8), "t = {t}: {} vs {}", plus + minus, -nu);
        }
        assert!(a.log_szego(a.z_plus).is_err());
    }
}
