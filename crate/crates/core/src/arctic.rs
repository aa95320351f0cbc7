//! Saddle points of the phase Φ_c, the frozen boundary, its curvature, the
//! critical value c*, the edge constants and level lines of Re Φ_c.
//!
//! Φ_c(z; ξ, η) = g(z) + 2∫₀^{(1+ξ)/2} log(1 + z e^{−cu}) du − (1 + η) log z + ℓ/2,
//! and the integral equals (2/c)(Li₂(−z e^{−c(1+ξ)/2}) − Li₂(−z)).
//!
//! Points of the frozen boundary are parametrised by a real s. The segment
//! of interest uses s ∈ (0, e^{c/2}) on the principal sheet of ψ and R; past
//! s = e^{c/2} the parametrisation continues on the second sheet, where both
//! change sign.

use crate::equilibrium::{Arc, Side};
use crate::error::{invalid, Error, Result};
use crate::numeric::dilog::li2;
use crate::numeric::quad::gl20;
use crate::numeric::roots::poly_roots;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub use crate::numeric::airy::{airy_kernel, extended_airy};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// e^{c(1+ξ)/2}.
pub fn e_xi(c: f64, xi: f64) -> f64 {
    (c * (1.0 + xi) / 2.0).exp()
}

/// Membership in the closed hexagon |ξ|, |η|, |η − ξ| ≤ 1.
pub fn in_hexagon(xi: f64, eta: f64) -> bool {
    xi.abs() <= 1.0 && eta.abs() <= 1.0 && (eta - xi).abs() <= 1.0
}

/// Φ_c(z) on the principal branches. Re Φ_c is single valued; the imaginary
/// part depends on the path used for g.
pub fn phase(arc: &Arc, z: Complex64, xi: f64, eta: f64) -> Result<Complex64> {
    Ok(arc.g(z)? + dilog_part(arc.c, z, xi) - (1.0 + eta) * z.ln() + arc.ell() / 2.0)
}

fn dilog_part(c: f64, z: Complex64, xi: f64) -> Complex64 {
    2.0 / c * (li2(-z / e_xi(c, xi)) - li2(-z))
}

/// Re Φ_c(z), with Re g taken directly as the logarithmic potential of μ.
pub fn re_phase(arc: &Arc, z: Complex64, xi: f64, eta: f64) -> f64 {
    arc.re_g_direct(z) + dilog_part(arc.c, z, xi).re - (1.0 + eta) * z.norm().ln() + arc.ell().re / 2.0
}

/// Φ′_c(z) = V′/2 + σψ + (ξ − η)/z + (2/cz)(log(z + 1) − log(z + e^{c(1+ξ)/2})),
/// with σ = ±1 selecting the sheet of ψ.
pub fn dphase(arc: &Arc, z: Complex64, xi: f64, eta: f64, sheet: f64) -> Complex64 {
    let c = arc.c;
    let e = e_xi(c, xi);
    arc.v_prime(z) / 2.0 + sheet * arc.psi(z) + (xi - eta) / z
        + 2.0 / (c * z) * ((z + 1.0).ln() - (z + e).ln())
}

/// ψ′ from (czψ)′ = (R(−1)/(z + 1) − R(−e^c)/(z + e^c)) / R(z); `r` is R(z) on
/// the chosen sheet and `psi` the matching ψ.
fn psi_prime(arc: &Arc, z: Complex64, r: Complex64, psi: Complex64) -> Complex64 {
    let c = arc.c;
    let ec = c.exp();
    let r1 = arc.r(c64(-1.0, 0.0));
    let re = arc.r(c64(-ec, 0.0));
    let czpsi_prime = (r1 / (z + 1.0) - re / (z + ec)) / r;
    (czpsi_prime - c * psi) / (c * z)
}

/// Φ″_c(z) in closed form.
pub fn d2phase(arc: &Arc, z: Complex64, xi: f64, eta: f64, sheet: f64) -> Complex64 {
    let c = arc.c;
    let ec = c.exp();
    let e = e_xi(c, xi);
    let vp = arc.v_prime(z);
    let vpp = -vp / z + 2.0 / (c * z) * (-ec / (z * (z + ec)) + 1.0 / (z * (z + 1.0)));
    let t = 2.0 / (c * z) * ((z + 1.0).ln() - (z + e).ln());
    let tp = -t / z + 2.0 / (c * z) * (1.0 / (z + 1.0) - 1.0 / (z + e));
    let psi = sheet * arc.psi(z);
    let r = sheet * arc.r(z);
    vpp / 2.0 + psi_prime(arc, z, r, psi) - (xi - eta) / (z * z) + tp
}

/// Quartic p(s; ξ, η) = π₁² − coth²(c/2)π₂² − 2e^{c/2}cosh²(c/2)sech²(c/4)·s(π₁ + π₂),
/// ascending coefficients.
pub fn saddle_quartic(c: f64, xi: f64, eta: f64) -> [f64; 5] {
    let (pi1, pi2) = pi_pair(c, xi, eta);
    let coth2 = 1.0 / (c / 2.0).tanh().powi(2);
    let k = 2.0 * (c / 2.0).exp() * (c / 2.0).cosh().powi(2) / (c / 4.0).cosh().powi(2);
    let sq1 = mul3(&pi1, &pi1);
    let sq2 = mul3(&pi2, &pi2);
    let mut p = [0.0; 5];
    for i in 0..5 {
        p[i] = sq1[i] - coth2 * sq2[i];
    }
    for i in 0..3 {
        p[i + 1] -= k * (pi1[i] + pi2[i]);
    }
    p
}

fn pi_pair(c: f64, xi: f64, eta: f64) -> ([f64; 3], [f64; 3]) {
    let e = |x: f64| (c * x).exp();
    let a = e(eta + 1.0);
    let b = 2.0 * e((2.0 * eta - xi + 1.0) / 2.0);
    let d = e(eta - xi);
    let ec = c.exp();
    (
        [a + ec, b + ec + 1.0, d + 1.0],
        [a - ec, b - ec - 1.0, d - 1.0],
    )
}

fn mul3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 5] {
    let mut out = [0.0; 5];
    for i in 0..3 {
        for j in 0..3 {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// The sextic Π = (s² − 2e^{c/2}cos θ_c s + e^c)π₁² − coth²(c/2)(s + e^{c/2})²π₂²
/// before the factors (s + 1)(s + e^c) are removed.
pub fn saddle_sextic(arc: &Arc, xi: f64, eta: f64) -> [f64; 7] {
    let c = arc.c;
    let (pi1, pi2) = pi_pair(c, xi, eta);
    let coth2 = 1.0 / (c / 2.0).tanh().powi(2);
    let zz = [c.exp(), -2.0 * arc.rho * arc.theta.cos(), 1.0];
    let sh = [c.exp(), 2.0 * arc.rho, 1.0];
    let a = mul3(&pi1, &pi1);
    let b = mul3(&pi2, &pi2);
    let mut out = [0.0; 7];
    for i in 0..5 {
        for j in 0..3 {
            out[i + j] += zz[j] * a[i] - coth2 * sh[j] * b[i];
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootPattern {
    TwoRealOneConjugatePair,
    FourReal,
    TwoConjugatePairs,
}

#[derive(Clone, Debug, Serialize)]
pub struct SaddleData {
    pub xi: f64,
    pub eta: f64,
    pub c: f64,
    pub quartic: [f64; 5],
    pub roots: Vec<Complex64>,
    pub pattern: RootPattern,
    /// The critical point of Φ_c in the open upper half-plane, if any.
    pub s_plus: Option<Complex64>,
}

/// Roots of the saddle quartic, classified, with the upper-half-plane critical
/// point singled out. The quartic carries the critical points of both sheets of
/// Φ′; the saddle sits on the principal sheet while it stays on the same side
/// of γ₀ as the centre saddle and crosses to the continuation through γ₀
/// otherwise, so a root is accepted when Φ′ vanishes on either sheet.
pub fn saddle(arc: &Arc, xi: f64, eta: f64) -> Result<SaddleData> {
    if !(xi.abs() < 1.0 && eta.abs() < 1.0 && (eta - xi).abs() < 1.0) {
        return invalid(format!("({xi}, {eta}) is not in the open hexagon"));
    }
    let c = arc.c;
    let quartic = saddle_quartic(c, xi, eta);
    let coeffs: Vec<Complex64> = quartic.iter().map(|&v| c64(v, 0.0)).collect();
    let mut roots = poly_roots(&coeffs)?;
    roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let real = roots.iter().filter(|r| r.im.abs() <= 1e-9 * scale).count();
    let pattern = match real {
        4 => RootPattern::FourReal,
        2 => RootPattern::TwoRealOneConjugatePair,
        _ => RootPattern::TwoConjugatePairs,
    };
    let s_plus = roots
        .iter()
        .filter(|r| r.im > 1e-9 * scale)
        .filter(|&&r| is_critical(arc, r, xi, eta, 1e-8))
        .cloned()
        .next();
    Ok(SaddleData {
        xi,
        eta,
        c,
        quartic,
        roots,
        pattern,
        s_plus,
    })
}

fn is_critical(arc: &Arc, z: Complex64, xi: f64, eta: f64, tol: f64) -> bool {
    dphase(arc, z, xi, eta, 1.0).norm() < tol || dphase(arc, z, xi, eta, -1.0).norm() < tol
}

/// (ξ, η) lies in the liquid region iff Φ_c has a critical point in ℂ₊.
pub fn liquid_membership(arc: &Arc, xi: f64, eta: f64) -> Result<bool> {
    Ok(saddle(arc, xi, eta)?.s_plus.is_some())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HexPoint {
    pub xi: f64,
    pub eta: f64,
}

/// Sheet used by the boundary parametrisation at s: principal below
/// e^{c/2}, second sheet above it.
pub fn sheet_for(arc: &Arc, s: f64) -> f64 {
    if s <= arc.rho {
        1.0
    } else {
        -1.0
    }
}

/// (R(s), sψ(s)) on the given sheet, with the inner boundary value at s = e^{c/2}
/// and the limit sψ → −1 at s = 0.
fn r_and_spsi(arc: &Arc, s: f64, sheet: f64) -> (f64, f64) {
    if s == 0.0 {
        return (arc.r(c64(0.0, 0.0)).re, -1.0);
    }
    if (s - arc.rho).abs() <= 1e-14 * arc.rho {
        let r = arc.r_arc(0.0, Side::Inner).re;
        let psi = arc.psi_arc(0.0, Side::Inner).re;
        return (r, s * psi);
    }
    let z = c64(s, 0.0);
    (sheet * arc.r(z).re, sheet * s * arc.psi(z).re)
}

/// The frozen-boundary point touched by the double critical point s:
/// e^{c(1+ξ)/2} = num/den and e^{c(1+η)} = num² e^{csψ(s)} / (4(1+s)(e^c+s)(s−z₊)(s−z₋)).
pub fn arctic_curve_on_sheet(arc: &Arc, s: f64, sheet: f64) -> Result<HexPoint> {
    let c = arc.c;
    let ec = c.exp();
    if s < 0.0 {
        return invalid("the boundary parametrisation is implemented for s ≥ 0");
    }
    let (rs, spsi) = r_and_spsi(arc, s, sheet);
    let r1 = arc.r(c64(-1.0, 0.0)).re;
    let re = arc.r(c64(-ec, 0.0)).re;
    let mix = r1 * (s + ec) - re * (s + 1.0);
    let num = (s + ec * (s + 2.0)) * rs - s * mix;
    let den = (1.0 + ec + 2.0 * s) * rs + mix;
    if den.abs() < 1e-14 * (num.abs() + 1.0) || num / den <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "boundary parametrisation degenerates at s = {s}"
        )));
    }
    let e = num / den;
    let xi = 2.0 * e.ln() / c - 1.0;
    let quad = (s - arc.z_plus) * (s - arc.z_minus);
    let e2 = num * num / (4.0 * (1.0 + s) * (ec + s) * quad.re) * (c * spsi).exp();
    let eta = e2.ln() / c - 1.0;
    Ok(HexPoint { xi, eta })
}

pub fn arctic_curve(arc: &Arc, s: f64) -> Result<HexPoint> {
    arctic_curve_on_sheet(arc, s, sheet_for(arc, s))
}

/// Rotation of the hexagon by 2π/3, a symmetry of the model.
pub fn rotate(p: HexPoint) -> HexPoint {
    HexPoint {
        xi: p.eta - p.xi,
        eta: -p.xi,
    }
}

/// The segment s ∈ [0, ∞) of the boundary, sampled at s = e^{c/2}t/(1 − t)
/// for `samples` values of t in [0, 1).
pub fn boundary_segment(arc: &Arc, samples: usize) -> Result<Vec<(f64, HexPoint)>> {
    (0..samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            let s = arc.rho * t / (1.0 - t);
            arctic_curve(arc, s).map(|p| (s, p))
        })
        .collect()
}

/// The whole boundary, closed, by bisecting liquid membership along `rays`
/// rays from the centre. Assumes the liquid region is star-shaped about (0, 0).
pub fn boundary_by_rays(arc: &Arc, rays: usize) -> Result<Vec<HexPoint>> {
    (0..=rays)
        .into_par_iter()
        .map(|k| {
            let t = 2.0 * PI * (k % rays) as f64 / rays as f64;
            let (dx, dy) = (t.cos(), t.sin());
            // distance from the centre to the hexagon along the ray
            let edge = [dx.abs(), dy.abs(), (dy - dx).abs()]
                .iter()
                .fold(0.0f64, |m, &v| m.max(v))
                .recip();
            let liquid = |r: f64| liquid_membership(arc, r * dx, r * dy);
            let (mut lo, mut hi) = (0.0, edge * (1.0 - 1e-12));
            if liquid(hi)? {
                lo = hi;
            } else {
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    if liquid(mid)? {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            Ok(HexPoint {
                xi: lo * dx,
                eta: lo * dy,
            })
        })
        .collect()
}

/// Residuals |Φ′(s)| and |Φ″(s)| at the boundary point produced by s.
pub fn boundary_residuals(arc: &Arc, s: f64) -> Result<(f64, f64)> {
    let p = arctic_curve(arc, s)?;
    let sheet = sheet_for(arc, s);
    let z = c64(s, 0.0);
    Ok((
        dphase(arc, z, p.xi, p.eta, sheet).norm(),
        d2phase(arc, z, p.xi, p.eta, sheet).norm(),
    ))
}

/// Table of the partial derivatives φ_{ijk} = ∂_z^i ∂_ξ^j ∂_η^k Φ_c at a boundary point.
#[derive(Clone, Debug, Serialize)]
pub struct PhiDerivatives {
    pub p001: f64,
    pub p010: f64,
    pub p020: f64,
    pub p030: f64,
    pub p101: f64,
    pub p110: f64,
    pub p120: f64,
    pub p201: f64,
    pub p210: f64,
    pub p220: f64,
    pub p300: f64,
    pub p301: f64,
    pub p310: f64,
}

impl PhiDerivatives {
    /// φ₁₁₀φ₂₀₁ − φ₁₀₁φ₂₁₀.
    pub fn det(&self) -> f64 {
        self.p110 * self.p201 - self.p101 * self.p210
    }
}

/// Φ‴(s) at a boundary point, from differentiating the closed form of Φ″ once more.
pub fn phi300(arc: &Arc, s: f64, xi: f64) -> f64 {
    let c = arc.c;
    let ec = c.exp();
    let e = e_xi(c, xi);
    let sheet = sheet_for(arc, s);
    let (rs, _) = r_and_spsi(arc, s, sheet);
    let r1 = arc.r(c64(-1.0, 0.0)).re;
    let re = arc.r(c64(-ec, 0.0)).re;
    let rp = (s - arc.rho * arc.theta.cos()) / rs;
    let val = (re / (s + ec).powi(2) - r1 / (s + 1.0).powi(2)) / rs
        + rp / (rs * rs) * (re / (s + ec) - r1 / (s + 1.0))
        + 2.0 / (s + e).powi(2)
        - 1.0 / (s + ec).powi(2)
        - 1.0 / (s + 1.0).powi(2);
    val / (c * s)
}

pub fn phi_derivatives(arc: &Arc, s: f64, p: HexPoint) -> PhiDerivatives {
    let c = arc.c;
    let e = e_xi(c, p.xi);
    let se = s + e;
    PhiDerivatives {
        p001: -s.ln(),
        p010: (1.0 + s / e).ln(),
        p020: -(c / 2.0) * s / se,
        p030: c * c / 4.0 * s * e / (se * se),
        p101: -1.0 / s,
        p110: 1.0 / se,
        p120: -(c / 2.0) * e / (se * se),
        p201: 1.0 / (s * s),
        p210: -1.0 / (se * se),
        p220: c * e / se.powi(3),
        p300: phi300(arc, s, p.xi),
        p301: -2.0 / s.powi(3),
        p310: 2.0 / se.powi(3),
    }
}

/// Signed curvature ξ′η″ − ξ″η′ of the boundary at parameter s, in the form
/// φ₃₀₀²/D³ · (D² − φ₁₀₁²φ₁₂₀φ₃₀₀) with D = φ₁₁₀φ₂₀₁ − φ₁₀₁φ₂₁₀.
pub fn curvature(arc: &Arc, s: f64) -> Result<f64> {
    let ec = arc.c.exp();
    for bad in [0.0, -1.0, -ec] {
        if (s - bad).abs() < 1e-12 {
            return invalid(format!("curvature undefined at s = {s}"));
        }
    }
    let p = arctic_curve(arc, s)?;
    let d = phi_derivatives(arc, s, p);
    let det = d.det();
    Ok(d.p300 * d.p300 / det.powi(3) * (det * det - d.p101 * d.p101 * d.p120 * d.p300))
}

/// ξ′η″ − ξ″η′ from central differences of the parametrisation.
pub fn curvature_finite_difference(arc: &Arc, s: f64, h: f64) -> Result<f64> {
    let pts: Vec<HexPoint> = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|k| arctic_curve(arc, s + k * h))
        .collect::<Result<_>>()?;
    let d1 = |f: &dyn Fn(&HexPoint) -> f64| {
        (-f(&pts[4]) + 8.0 * f(&pts[3]) - 8.0 * f(&pts[1]) + f(&pts[0])) / (12.0 * h)
    };
    let d2 = |f: &dyn Fn(&HexPoint) -> f64| {
        (-f(&pts[4]) + 16.0 * f(&pts[3]) - 30.0 * f(&pts[2]) + 16.0 * f(&pts[1]) - f(&pts[0]))
            / (12.0 * h * h)
    };
    let xi = |p: &HexPoint| p.xi;
    let eta = |p: &HexPoint| p.eta;
    Ok(d1(&xi) * d2(&eta) - d2(&xi) * d1(&eta))
}

/// c s² φ₃₀₀ + 2e^{c(1+ξ)/2}/(s + e^{c(1+ξ)/2})², whose zeros on (0, e^{c/2})
/// are the inflection points of the boundary segment.
pub fn inflection_function(arc: &Arc, s: f64) -> Result<f64> {
    let p = arctic_curve(arc, s)?;
    let e = e_xi(arc.c, p.xi);
    Ok(arc.c * s * s * phi300(arc, s, p.xi) + 2.0 * e / (s + e).powi(2))
}

/// Sign changes of the inflection function on a uniform grid of (0, e^{c/2}),
/// each refined by bisection.
pub fn inflection_points(arc: &Arc, grid: usize) -> Result<Vec<f64>> {
    let lo = 1e-6 * arc.rho;
    let hi = arc.rho * (1.0 - 1e-9);
    let xs: Vec<f64> = (0..=grid)
        .map(|k| lo + (hi - lo) * k as f64 / grid as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&s| inflection_function(arc, s)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for k in 0..grid {
        if vals[k] == 0.0 {
            out.push(xs[k]);
        } else if vals[k] * vals[k + 1] < 0.0 {
            let (mut a, mut b, fa) = (xs[k], xs[k + 1], vals[k]);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let fm = inflection_function(arc, m)?;
                if fm * fa > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
    }
    Ok(out)
}

/// R(−1)/R₊(e^{c/2}) − 2/(e^{c/2} − 1), whose root in c is c*.
pub fn c_star_function(c: f64) -> Result<f64> {
    let arc = Arc::new(c)?;
    let r1 = arc.r(c64(-1.0, 0.0)).re;
    Ok(r1 / arc.r_real(arc.rho) - 2.0 / (arc.rho - 1.0))
}

/// c* by bisection on [lo, hi]; the bracket must show a sign change.
pub fn find_c_star_in(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = c_star_function(a)?;
    let fb = c_star_function(b)?;
    if fa * fb > 0.0 {
        return Err(Error::NoConvergence(format!(
            "no sign change of the c* equation on [{lo}, {hi}]"
        )));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if c_star_function(m)? * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

pub fn find_c_star() -> Result<f64> {
    find_c_star_in(2.0, 5.0, 1e-12)
}

/// Local frame and constants of the Airy edge limit at a boundary point.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeFrame {
    pub c: f64,
    pub s: f64,
    pub xi: f64,
    pub eta: f64,
    pub phi: PhiDerivatives,
    pub det: f64,
    pub n: [f64; 2],
    pub n_perp: [f64; 2],
    pub k: [f64; 6],
    /// coefficient of β² in r(α, β)/(−k₆)
    pub beta2_coef: f64,
}

pub fn edge_frame(arc: &Arc, s: f64) -> Result<EdgeFrame> {
    if !(s > 0.0 && s < arc.rho) {
        return invalid(format!("edge frames are built for s in (0, e^{{c/2}}), got {s}"));
    }
    let p = arctic_curve(arc, s)?;
    let d = phi_derivatives(arc, s, p);
    let det = d.det();
    let n = [d.p110, d.p101];
    let n_perp = [-d.p101, d.p110];
    let nn = n[0] * n[0] + n[1] * n[1];
    let ratio = det / d.p300;
    let k1 = ratio.powi(3) * d.p300 / 3.0 - 0.5 * ratio * d.p120 * d.p101.powi(2)
        - d.p030 * d.p101.powi(3) / 6.0;
    let k2 = nn * ratio + d.p020 * d.p110 * d.p101;
    let k3 = d.p001 * d.p110 + d.p010 * d.p101;
    let k4 = 0.5 * d.p020 * d.p101.powi(2);
    let k5 = d.p001 * d.p110 - d.p010 * d.p101;
    // φ₃₀₀ < 0, so this is the real, negative cube root
    let k6 = (2.0 / d.p300).cbrt();
    let beta2_coef = 0.5 * d.p120 * d.p101.powi(2) - 0.5 * det * det / d.p300;
    Ok(EdgeFrame {
        c: arc.c,
        s,
        xi: p.xi,
        eta: p.eta,
        phi: d,
        det,
        n,
        n_perp,
        k: [k1, k2, k3, k4, k5, k6],
        beta2_coef,
    })
}

impl EdgeFrame {
    pub fn k6(&self) -> f64 {
        self.k[5]
    }

    /// r(α, β) = −k₆(α‖n‖² + β²(½φ₁₂₀φ₁₀₁² − ½D²/φ₃₀₀)).
    pub fn r(&self, alpha: f64, beta: f64) -> f64 {
        let nn = self.n[0] * self.n[0] + self.n[1] * self.n[1];
        -self.k6() * (alpha * nn + beta * beta * self.beta2_coef)
    }

    /// τ(β) = β(φ₃₀₀/2)^{1/3} D/φ₃₀₀.
    pub fn tau(&self, beta: f64) -> f64 {
        beta * (self.phi.p300 / 2.0).cbrt() * self.det / self.phi.p300
    }

    /// (ξ, η) + α n/N^{2/3} + β n⊥/N^{1/3}.
    pub fn point(&self, n: usize, alpha: f64, beta: f64) -> HexPoint {
        let nf = n as f64;
        let a = alpha / nf.powf(2.0 / 3.0);
        let b = beta / nf.powf(1.0 / 3.0);
        HexPoint {
            xi: self.xi + a * self.n[0] + b * self.n_perp[0],
            eta: self.eta + a * self.n[1] + b * self.n_perp[1],
        }
    }

    /// (α, β) of a given point, inverting [`EdgeFrame::point`].
    pub fn local_coordinates(&self, n: usize, p: HexPoint) -> (f64, f64) {
        let (dx, dy) = (p.xi - self.xi, p.eta - self.eta);
        let det = self.n[0] * self.n_perp[1] - self.n[1] * self.n_perp[0];
        let a = (dx * self.n_perp[1] - dy * self.n_perp[0]) / det;
        let b = (self.n[0] * dy - self.n[1] * dx) / det;
        let nf = n as f64;
        (a * nf.powf(2.0 / 3.0), b * nf.powf(1.0 / 3.0))
    }
}

/// A traced level line of Re(Φ_c(z) − Φ_c(s)).
#[derive(Clone, Debug, Serialize)]
pub struct LevelLine {
    pub start_angle: f64,
    pub points: Vec<Complex64>,
    /// real-axis crossing, if the line reached ℝ
    pub hit: Option<f64>,
    pub truncated: bool,
}

/// Re ∫_z^w Φ′ along the segment [z, w], split where it crosses γ₀ so each
/// piece sees one boundary value of ψ. Re Φ is continuous across γ₀.
fn re_phase_increment(arc: &Arc, z: Complex64, w: Complex64, xi: f64, eta: f64) -> f64 {
    let d = w - z;
    let mut cuts = arc_crossings(arc, z, w);
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let gl = gl20();
    cuts.windows(2)
        .map(|ab| gl.integrate(|t| dphase(arc, z + d * t, xi, eta, 1.0) * d, ab[0], ab[1]).re)
        .sum()
}

/// Parameters t ∈ (0, 1) where z + t(w − z) meets γ₀.
fn arc_crossings(arc: &Arc, z: Complex64, w: Complex64) -> Vec<f64> {
    let d = w - z;
    // |z + t d|² = ρ²
    let (a, b, c) = (d.norm_sqr(), 2.0 * (z.conj() * d).re, z.norm_sqr() - arc.rho * arc.rho);
    let disc = b * b - 4.0 * a * c;
    let mut out = Vec::new();
    if a > 0.0 && disc >= 0.0 {
        for t in [(-b - disc.sqrt()) / (2.0 * a), (-b + disc.sqrt()) / (2.0 * a)] {
            if t > 0.0 && t < 1.0 && (z + d * t).arg().abs() < arc.theta {
                out.push(t);
            }
        }
    }
    out
}

/// Secant iteration for a zero of f started from x0, x1.
fn secant<F: FnMut(f64) -> f64>(mut f: F, mut x0: f64, mut x1: f64) -> f64 {
    let (mut f0, mut f1) = (f(x0), f(x1));
    for _ in 0..40 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if (x1 - x0).abs() < 1e-13 * (1.0 + x1.abs()) {
            break;
        }
    }
    x1
}

/// Traces the three level lines of Re(Φ_c − Φ_c(s)) leaving a boundary point s
/// into ℂ₊ at angles π/6, π/2, 5π/6 (the zero directions of the cubic local
/// model), by predictor–corrector steps, until each returns to ℝ or the
/// arc-length budget runs out. Re Φ is carried along the path by integrating Φ′.
pub fn level_set_trace(arc: &Arc, s: f64, step: f64, max_len: f64) -> Result<Vec<LevelLine>> {
    if !(step > 0.0 && max_len > step) {
        return invalid("need 0 < step < max_len");
    }
    let p = arctic_curve(arc, s)?;
    let (xi, eta) = (p.xi, p.eta);
    let s0 = c64(s, 0.0);
    let grad = |z: Complex64| dphase(arc, z, xi, eta, 1.0).conj();
    let mut lines = Vec::new();
    for &ang in &[PI / 6.0, PI / 2.0, 5.0 * PI / 6.0] {
        let mut dir = Complex64::from_polar(1.0, ang);
        let mut z = s0 + dir * step;
        let mut uz = re_phase_increment(arc, s0, z, xi, eta);
        let mut pts = vec![s0, z];
        let mut len = step;
        let mut hit = None;
        let mut h = step;
        while len < max_len {
            let g = grad(z);
            if !(g.norm() > 0.0) || !g.is_finite() {
                break;
            }
            let mut tangent = g * Complex64::i() / g.norm();
            if (tangent.conj() * dir).re < 0.0 {
                tangent = -tangent;
            }
            let mut hh = h;
            let crossing = tangent.im < 0.0 && z.im + tangent.im * hh <= 0.0;
            if crossing {
                hh = z.im / -tangent.im;
            }
            let mut w = z + tangent * hh;
            if crossing {
                // corrector along ℝ: secant on x ↦ u(x)
                let u = |x: f64| uz + re_phase_increment(arc, z, c64(x, 0.0), xi, eta);
                let x1 = secant(u, w.re, w.re + 0.1 * hh);
                if (x1 - w.re).abs() > 3.0 * hh {
                    h *= 0.5;
                    if h < 1e-6 * step {
                        break;
                    }
                    continue;
                }
                pts.push(c64(x1, 0.0));
                hit = Some(x1);
                break;
            }
            if let Some(&t0) = arc_crossings(arc, z, w).first() {
                // the line has a corner on γ₀: land on it, then step just past
                let a0 = (z + (w - z) * t0).arg();
                let u = |t: f64| uz + re_phase_increment(arc, z, arc.arc_point(t), xi, eta);
                let ta = secant(u, a0, a0 + 0.01 * hh / arc.rho);
                let on = arc.arc_point(ta);
                if ta.abs() < arc.theta && (on - w).norm() < 3.0 * hh {
                    let past = on + dir * (1e-9 * arc.rho);
                    let up = uz + re_phase_increment(arc, z, past, xi, eta);
                    dir = (on - z) / (on - z).norm();
                    len += (on - z).norm();
                    pts.push(on);
                    z = past;
                    uz = up;
                    continue;
                }
            }
            let mut uw = uz + re_phase_increment(arc, z, w, xi, eta);
            let mut ok = false;
            for _ in 0..10 {
                let gw = grad(w);
                let corr = gw * (uw / gw.norm_sqr());
                let next = w - corr;
                uw += re_phase_increment(arc, w, next, xi, eta);
                w = next;
                if corr.norm() < 1e-10 * hh {
                    ok = true;
                    break;
                }
            }
            if !ok || (w - z).norm() > 2.0 * hh || w.im <= 0.0 {
                h *= 0.5;
                if h < 1e-6 * step {
                    break;
                }
                continue;
            }
            dir = (w - z) / (w - z).norm();
            len += (w - z).norm();
            pts.push(w);
            z = w;
            uz = uw;
            h = (h * 1.5).min(step * 8.0);
        }
        lines.push(LevelLine {
            start_angle: ang,
            points: pts,
            hit,
            truncated: hit.is_none(),
        });
    }
    Ok(lines)
}

/// Largest |4ξ² − 4ξη + 4η² − 3|/|∇| over boundary samples, a first-order
/// distance to the c → 0 ellipse.
pub fn ellipse_deviation(arc: &Arc, samples: usize) -> Result<f64> {
    let top = arc.c.exp();
    let mut worst = 0.0f64;
    for k in 1..=samples {
        let s = top * k as f64 / (samples + 1) as f64;
        let p = arctic_curve(arc, s)?;
        let f = 4.0 * p.xi * p.xi - 4.0 * p.xi * p.eta + 4.0 * p.eta * p.eta - 3.0;
        let gx = 8.0 * p.xi - 4.0 * p.eta;
        let gy = 8.0 * p.eta - 4.0 * p.xi;
        worst = worst.max(f.abs() / (gx * gx + gy * gy).sqrt());
    }
    Ok(worst)
}
