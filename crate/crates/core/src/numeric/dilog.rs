//! Complex dilogarithm Li₂(z) on the principal branch (cut along [1, ∞)).

use num_complex::Complex64;
use std::f64::consts::PI;

const PI2_6: f64 = PI * PI / 6.0;

/// B_{2k}/(2k+1)! for k = 1..11, the coefficients of the series in u = -ln(1-z).
fn bernoulli_coefficients() -> [f64; 11] {
    const B: [(f64, f64); 11] = [
        (1.0, 6.0),
        (-1.0, 30.0),
        (1.0, 42.0),
        (-1.0, 30.0),
        (5.0, 66.0),
        (-691.0, 2730.0),
        (7.0, 6.0),
        (-3617.0, 510.0),
        (43867.0, 798.0),
        (-174611.0, 330.0),
        (854513.0, 138.0),
    ];
    let mut out = [0.0; 11];
    let mut fact = 1.0;
    let mut n = 1.0;
    for (k, (num, den)) in B.iter().enumerate() {
        // advance fact to (2k+3)!
        while n < (2 * k + 3) as f64 {
            n += 1.0;
            fact *= n;
        }
        out[k] = num / den / fact;
    }
    out
}

pub fn li2(z: Complex64) -> Complex64 {
    if z.norm_sqr() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if (z - 1.0).norm_sqr() == 0.0 {
        return Complex64::new(PI2_6, 0.0);
    }
    if z.norm_sqr() > 1.0 {
        let l = (-z).ln();
        return -li2_unit(1.0 / z) - PI2_6 - 0.5 * l * l;
    }
    li2_unit(z)
}

fn li2_unit(z: Complex64) -> Complex64 {
    if z.re > 0.5 {
        let w = 1.0 - z;
        return -li2_core(w) + PI2_6 - z.ln() * w.ln();
    }
    li2_core(z)
}

fn li2_core(z: Complex64) -> Complex64 {
    let u = -(1.0 - z).ln();
    let u2 = u * u;
    let b = bernoulli_coefficients();
    // Horner in u² for the odd tail u³ Σ b_k u^{2k-2}
    let mut tail = Complex64::new(0.0, 0.0);
    for c in b.iter().rev() {
        tail = tail * u2 + *c;
    }
    u - 0.25 * u2 + u * u2 * tail
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(z: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        let mut p = z;
        for k in 1..20000 {
            s += p / (k * k) as f64;
            p *= z;
        }
        s
    }

    #[test]
    fn special_values() {
        let ln2 = 2f64.ln();
        assert!((li2(Complex64::new(-1.0, 0.0)).re + PI * PI / 12.0).abs() < 1e-15);
        assert!((li2(Complex64::new(0.5, 0.0)).re - (PI * PI / 12.0 - ln2 * ln2 / 2.0)).abs() < 1e-15);
        let catalan = 0.915_965_594_177_219_015;
        let v = li2(Complex64::new(0.0, 1.0));
        assert!((v.re + PI * PI / 48.0).abs() < 1e-15);
        assert!((v.im - catalan).abs() < 1e-15);
    }

    #[test]
    fn series_agreement_inside_disc() {
        for &(r, t) in &[(0.3, 0.4), (0.6, 2.9), (0.7, -1.2), (0.55, 0.1)] {
            let z = Complex64::from_polar(r, t);
            assert!((li2(z) - direct(z)).norm() < 1e-14);
        }
    }

    #[test]
    fn inversion_region_matches_reflection_identity() {
        // Li₂(z) + Li₂(1/z) = -π²/6 - ½ ln²(-z) for z off [0, ∞)
        let z = Complex64::new(-3.0, 2.0);
        let lhs = li2(z) + li2(1.0 / z);
        let l = (-z).ln();
        assert!((lhs - (-PI2_6 - 0.5 * l * l)).norm() < 1e-14);
        // derivative check: d/dz Li₂ = -ln(1-z)/z
        let h = 1e-5;
        let d = (li2(z + h) - li2(z - h)) / (2.0 * h);
        assert!((d + (1.0 - z).ln() / z).norm() < 1e-9);
    }
}
