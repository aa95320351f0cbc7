//! Aberth–Ehrlich simultaneous root finding.

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct AberthReport {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    pub unconverged: Vec<usize>,
}

/// Runs the Aberth iteration. `newton` returns the Newton correction p(z)/p'(z)
/// at a point, which lets callers evaluate in any precision.
pub fn aberth<F>(init: Vec<Complex64>, mut newton: F, tol: f64, max_iter: usize) -> AberthReport
where
    F: FnMut(Complex64) -> Complex64,
{
    let n = init.len();
    let mut z = init;
    let mut done = vec![false; n];
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let ratio = newton(z[i]);
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if !w.is_finite() {
                continue;
            }
            z[i] -= w;
            if w.norm() <= tol * z[i].norm().max(1e-300) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    let unconverged = (0..n).filter(|&i| !done[i]).collect();
    AberthReport {
        roots: z,
        iterations,
        unconverged,
    }
}

/// Initial guesses: n points on a circle, rotated off the real axis.
pub fn circle_start(n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4 / n as f64;
            Complex64::from_polar(radius, t)
        })
        .collect()
}

/// All roots of a double-precision polynomial (ascending coefficients),
/// followed by two Newton polishing steps per root.
pub fn poly_roots(coeffs: &[Complex64]) -> crate::Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(crate::Error::InvalidParameter("zero leading coefficient".into()));
    }
    // geometric-mean radius of the roots
    let radius = (coeffs[0] / lead).norm().powf(1.0 / deg as f64).max(1e-3);
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            d = d * z + p;
            p = p * z + c;
        }
        (p, d)
    };
    let rep = aberth(
        circle_start(deg, radius),
        |z| {
            let (p, d) = eval(z);
            p / d
        },
        1e-15,
        500,
    );
    let mut roots = rep.roots;
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let (p, d) = eval(*r);
            if d.norm() > 0.0 {
                let step = p / d;
                if step.is_finite() {
                    *r -= step;
                }
            }
        }
    }
    Ok(roots)
}
