//! Gauss–Legendre quadrature, adaptive bisection, and trapezoid sums on circles.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F, a: f64, b: f64) -> Complex64 {
        let h = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(mid + h * x) * *w;
        }
        s * h
    }

    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.integrate(|x| Complex64::new(f(x), 0.0), a, b).re
    }

    /// Composite rule over `panels` equal subintervals.
    pub fn composite<F: FnMut(f64) -> Complex64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        panels: usize,
    ) -> Complex64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| self.integrate(&mut f, a + k as f64 * h, a + (k + 1) as f64 * h))
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 20-point rule used by the adaptive integrator.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

pub fn gl64() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(64))
}

pub fn gl128() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(128))
}

/// Adaptive bisection with a 20-point Gauss–Legendre rule.
/// Stops a branch when the two-half estimate agrees with the whole to `tol`
/// (absolute, halved at each level), when the difference is at rounding level,
/// or at depth 30.
pub fn adaptive<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    let rule = gl20();
    let whole = rule.integrate(&mut f, a, b);
    recurse(&mut f, rule, a, b, whole, tol, 0)
}

fn recurse<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(&mut *f, a, m);
    let right = rule.integrate(&mut *f, m, b);
    let both = left + right;
    let noise = 8.0 * f64::EPSILON * (left.norm() + right.norm());
    if (both - whole).norm() <= tol.max(noise) || depth >= 30 {
        return both;
    }
    recurse(f, rule, a, m, left, 0.5 * tol, depth + 1)
        + recurse(f, rule, m, b, right, 0.5 * tol, depth + 1)
}

pub fn adaptive_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    adaptive(|x| Complex64::new(f(x), 0.0), a, b, tol).re
}

/// (1/2πi)∮ f(z) dz over |z - center| = r by the n-point trapezoid rule,
/// nodes rotated by `phase` (a fraction of one step).
pub fn circle_mean<F: FnMut(Complex64) -> Complex64>(
    mut f: F,
    center: Complex64,
    r: f64,
    n: usize,
    phase: f64,
) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let t = 2.0 * PI * (k as f64 + phase) / n as f64;
        let u = Complex64::from_polar(r, t);
        s += f(center + u) * u;
    }
    s / n as f64
}

/// Limit of f(x0 + h·dir) as h → 0+, by Richardson extrapolation on h, h/2, h/4, h/8.
pub fn one_sided_limit<F: FnMut(Complex64) -> Complex64>(
    mut f: F,
    x0: Complex64,
    dir: Complex64,
    h: f64,
) -> Complex64 {
    let mut t: Vec<Complex64> = (0..4)
        .map(|k| f(x0 + dir * (h / f64::powi(2.0, k))))
        .collect();
    // Neville tableau for an expansion in integer powers of h.
    for level in 1..4 {
        let fac = f64::powi(2.0, level);
        for k in (level as usize..4).rev() {
            t[k] = (t[k] * fac - t[k - 1]) / (fac - 1.0);
        }
    }
    t[3]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let g = GaussLegendre::new(10);
        let v = g.integrate_real(|x| x.powi(19) + x.powi(18), -1.0, 1.0);
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let v = adaptive_real(|x| x.sqrt(), 0.0, 1.0, 1e-13);
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn circle_mean_picks_residue() {
        let v = circle_mean(|z| (z.exp()) / z.powi(3), Complex64::new(0.0, 0.0), 1.0, 32, 0.0);
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn richardson_limit() {
        let v = one_sided_limit(
            |z| (z.exp() - 1.0) / z,
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            0.1,
        );
        assert!((v.re - 1.0).abs() < 1e-7);
    }
}
