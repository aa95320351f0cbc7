//! The finite-N correlation kernel of the path ensemble, its Christoffel–Darboux
//! and avatar forms, contour quadrature, and the edge-scaling diagnostic.
//!
//! For path points (x, y + ½),
//!
//! K_N(x₁, y₁; x₂, y₂) = −χ_{x₁>x₂} [z^{y₁−y₂}] ∏_{j=x₂+1}^{x₁}(1 + q^{−j}z)
//!     + q^{N(2N+1)} Σ_{n<N} A_n(x₂, y₂) B_n(x₁, y₁) / κ'_n,
//!
//! A_n = [w^{2N−1−y₂}] ∏_{j=x₂+1}^{2N}(1 + q^{−j}w) P_n(w), B_n = [z^{y₁}] P_n(z) ∏_{j=1}^{x₁}(1 + q^{−j}z),
//! where the coefficient extractions are the residues of the contour-integral form.

use crate::arctic::{self, EdgeFrame, HexPoint};
use crate::equilibrium::Arc;
use crate::error::{invalid, Error, Result};
use crate::numeric::airy::extended_airy;
use crate::numeric::hp::{self, Hp, HpC};
use crate::poly;
use crate::qcore::{self, MomentTable};
use crate::scalar::{ipow, Scalar};
use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
}

impl KernelQuery {
    pub fn new(x1: i64, y1: i64, x2: i64, y2: i64) -> Self {
        KernelQuery { x1, y1, x2, y2 }
    }

    pub fn diagonal(x: i64, y: i64) -> Self {
        KernelQuery::new(x, y, x, y)
    }

    fn check(&self, n: usize) -> Result<()> {
        let two_n = 2 * n as i64;
        for x in [self.x1, self.x2] {
            if !(0..=two_n).contains(&x) {
                return invalid(format!("x = {x} outside 0..={two_n}"));
            }
        }
        for y in [self.y1, self.y2] {
            if !(0..two_n).contains(&y) {
                return invalid(format!("y = {y} outside 0..{two_n}"));
            }
        }
        Ok(())
    }
}

/// Everything the kernel needs at fixed (N, q): P_0..P_N, κ'_n and q^{N(2N+1)}.
#[derive(Clone, Debug)]
pub struct FiniteKernel<T> {
    pub n: usize,
    pub q: T,
    pub polys: Vec<Vec<T>>,
    pub kappa: Vec<T>,
    pub prefactor: T,
    moments: MomentTable<T>,
}

impl<T: Scalar> FiniteKernel<T> {
    pub fn new(n: usize, q: &T) -> Result<Self> {
        if n == 0 {
            return invalid("N must be at least 1");
        }
        let moments = qcore::moments(n, q)?;
        let mut polys = Vec::with_capacity(n + 1);
        let mut kappa = Vec::with_capacity(n);
        for k in 0..=n {
            let p = qcore::op_closed_form(k, n, q)?;
            if k < n {
                // orthogonality reduces ⟨P_k, P_k⟩ to ⟨P_k, z^k⟩
                let kk = p
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (i, c)| acc + c.clone() * moments.get(k + i));
                if kk.is_zero() {
                    return Err(Error::ZeroNorm(k));
                }
                kappa.push(kk);
            }
            polys.push(p);
        }
        let prefactor = ipow(q, (n * (2 * n + 1)) as i64);
        Ok(FiniteKernel {
            n,
            q: q.clone(),
            polys,
            kappa,
            prefactor,
            moments,
        })
    }

    pub fn moments(&self) -> &MomentTable<T> {
        &self.moments
    }

    /// ∏_{j=lo}^{hi}(1 + q^{−j}z) as coefficients.
    pub fn shifted_product(&self, lo: i64, hi: i64) -> Vec<T> {
        poly::linear_product((lo..=hi).map(|j| ipow(&self.q, -j)))
    }

    fn single_term(&self, qr: &KernelQuery) -> T {
        if qr.x1 > qr.x2 {
            let p = self.shifted_product(qr.x2 + 1, qr.x1);
            T::zero() - poly::coeff(&p, qr.y1 - qr.y2)
        } else {
            T::zero()
        }
    }

    /// Exact value through coefficient extraction.
    pub fn value(&self, qr: &KernelQuery) -> Result<T> {
        qr.check(self.n)?;
        let n = self.n as i64;
        let wp = self.shifted_product(qr.x2 + 1, 2 * n);
        let zp = self.shifted_product(1, qr.x1);
        let conv = |a: &[T], b: &[T], k: i64| {
            let mut out = T::zero();
            for (i, c) in a.iter().enumerate() {
                let j = k - i as i64;
                if j >= 0 && (j as usize) < b.len() {
                    out = out + c.clone() * b[j as usize].clone();
                }
            }
            out
        };
        let mut sum = T::zero();
        for k in 0..self.n {
            let a = conv(&self.polys[k], &wp, 2 * n - 1 - qr.y2);
            let b = conv(&self.polys[k], &zp, qr.y1);
            sum = sum + a * b / self.kappa[k].clone();
        }
        Ok(self.single_term(qr) + self.prefactor.clone() * sum)
    }

    /// det[K(p_i; p_j)] for distinct points (x, y).
    pub fn correlation(&self, points: &[(i64, i64)]) -> Result<T> {
        let k = points.len();
        let mut m = vec![vec![T::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                let (a, b) = (points[i], points[j]);
                m[i][j] = self.value(&KernelQuery::new(a.0, a.1, b.0, b.1))?;
            }
        }
        Ok(det(m))
    }

    /// Σ_{n<N} P_n(w)P_n(z)/κ'_n.
    pub fn cd_sum(&self, w: &T, z: &T) -> T {
        (0..self.n).fold(T::zero(), |acc, k| {
            acc + poly::eval(&self.polys[k], w) * poly::eval(&self.polys[k], z) / self.kappa[k].clone()
        })
    }

    /// (P_N(z)P_{N−1}(w) − P_N(w)P_{N−1}(z)) / (κ'_{N−1}(z − w)), with the
    /// confluent form (P_N′P_{N−1} − P_N P′_{N−1})(z)/κ'_{N−1} at w = z.
    pub fn cd(&self, w: &T, z: &T) -> T {
        let (pn, pm) = (&self.polys[self.n], &self.polys[self.n - 1]);
        let kap = self.kappa[self.n - 1].clone();
        if w == z {
            let (a, da) = poly::eval_with_derivative(pn, z);
            let (b, db) = poly::eval_with_derivative(pm, z);
            return (da * b - a * db) / kap;
        }
        (poly::eval(pn, z) * poly::eval(pm, w) - poly::eval(pn, w) * poly::eval(pm, z))
            / (kap * (z.clone() - w.clone()))
    }

    /// R_N(w, ·) as a polynomial in z of degree N − 1, from the sum form.
    pub fn cd_in_z(&self, w: &T) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for k in 0..self.n {
            let f = poly::eval(&self.polys[k], w) / self.kappa[k].clone();
            for (i, c) in self.polys[k].iter().enumerate() {
                out[i] = out[i].clone() + f.clone() * c.clone();
            }
        }
        out
    }

    /// Polynomial part C_n of P_n(z)∏_{j=1}^{2N}(1 + q^j/z).
    pub fn polynomial_part(&self, k: usize) -> Vec<T> {
        let lw = qcore::weight_laurent(self.n, &self.q);
        let p = &self.polys[k];
        (0..p.len())
            .map(|m| {
                lw.iter()
                    .enumerate()
                    .filter(|(j, _)| m + j < p.len())
                    .fold(T::zero(), |acc, (j, c)| acc + c.clone() * p[m + j].clone())
            })
            .collect()
    }

    /// The avatar R̃_N(w, z) = (C_N(w)P_{N−1}(z) − C_{N−1}(w)P_N(z))/κ'_{N−1},
    /// a polynomial in both variables with R̃_N(z, z) = 1.
    pub fn avatar_polys(&self) -> AvatarPolys<T> {
        AvatarPolys {
            c_n: self.polynomial_part(self.n),
            c_m: self.polynomial_part(self.n - 1),
            p_n: self.polys[self.n].clone(),
            p_m: self.polys[self.n - 1].clone(),
            kappa: self.kappa[self.n - 1].clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AvatarPolys<T> {
    pub c_n: Vec<T>,
    pub c_m: Vec<T>,
    pub p_n: Vec<T>,
    pub p_m: Vec<T>,
    pub kappa: T,
}

impl<T: Scalar> AvatarPolys<T> {
    pub fn eval(&self, w: &T, z: &T) -> T {
        (poly::eval(&self.c_n, w) * poly::eval(&self.p_m, z) - poly::eval(&self.c_m, w) * poly::eval(&self.p_n, z))
            / self.kappa.clone()
    }
}

/// Determinant by elimination, pivoting on the first nonzero entry.
pub fn det<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let k = m.len();
    let mut out = T::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !m[r][c].is_zero()) else {
            return T::zero();
        };
        if p != c {
            m.swap(p, c);
            out = T::zero() - out;
        }
        let piv = m[c][c].clone();
        out = out * piv.clone();
        for r in c + 1..k {
            let f = m[r][c].clone() / piv.clone();
            if f.is_zero() {
                continue;
            }
            for j in c..k {
                let v = m[c][j].clone();
                m[r][j] = m[r][j].clone() - f.clone() * v;
            }
        }
    }
    out
}

/// Circles |z| = z_radius and |w| = w_radius sampled with a power-of-two number
/// of trapezoid nodes, doubled until the relative change drops below `tol`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContourSpec {
    pub z_radius: f64,
    pub w_radius: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub tol: f64,
}

impl ContourSpec {
    /// |z| = q^N = e^{c/2}, |w| = 1.25 q^N.
    pub fn for_model(n: usize, q: f64) -> Self {
        let r = q.powi(n as i32);
        ContourSpec {
            z_radius: r,
            w_radius: 1.25 * r,
            min_nodes: 16,
            max_nodes: 1 << 16,
            tol: 1e-9,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.z_radius > 0.0 && self.w_radius > 0.0) {
            return invalid("contour radii must be positive");
        }
        if !self.min_nodes.is_power_of_two() || !self.max_nodes.is_power_of_two() || self.min_nodes > self.max_nodes {
            return invalid("node counts must be powers of two with min ≤ max");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadratureValue {
    pub value: f64,
    pub imag: f64,
    pub nodes: usize,
}

fn nodes(r: f64, m: usize, shift: f64) -> Vec<Complex64> {
    (0..m)
        .map(|a| Complex64::from_polar(r, 2.0 * PI * (a as f64 + shift) / m as f64))
        .collect()
}

fn log_product(z: Complex64, q: f64, lo: i64, hi: i64) -> Complex64 {
    (lo..=hi).map(|j| (1.0 + q.powi(-j as i32) * z).ln()).sum()
}

fn doubling<F: FnMut(usize) -> Complex64>(spec: &ContourSpec, mut f: F) -> Result<(Complex64, usize)> {
    let mut m = spec.min_nodes;
    let mut prev = f(m);
    while m < spec.max_nodes {
        m *= 2;
        let cur = f(m);
        if (cur - prev).norm() <= spec.tol * cur.norm().max(1.0) {
            return Ok((cur, m));
        }
        prev = cur;
    }
    Err(Error::NoConvergence(format!(
        "trapezoid rule did not settle by {} nodes",
        spec.max_nodes
    )))
}

/// K_N by trapezoid quadrature of the contour integrals. The double integral of
/// q^{N(2N+1)}R_N is evaluated through the sum form of R_N, so each doubling costs
/// O(M N²); the large prefactor is folded into the per-node logarithm.
pub fn correlation_kernel(qr: &KernelQuery, kern: &FiniteKernel<f64>, spec: &ContourSpec) -> Result<QuadratureValue> {
    qr.check(kern.n)?;
    spec.check()?;
    let n = kern.n as i64;
    let q = kern.q;
    let log_big = (n * (2 * n + 1)) as f64 * q.ln();
    let (val, m) = doubling(spec, |m| {
        let zs = nodes(spec.z_radius, m, 0.5);
        let ws = nodes(spec.w_radius, m, 0.0);
        let single = if qr.x1 > qr.x2 {
            zs.iter()
                .map(|&z| (log_product(z, q, qr.x2 + 1, qr.x1) - (qr.y1 - qr.y2) as f64 * z.ln()).exp())
                .sum::<Complex64>()
                / m as f64
        } else {
            Complex64::new(0.0, 0.0)
        };
        let wl: Vec<Complex64> = ws
            .iter()
            .map(|&w| log_big + log_product(w, q, qr.x2 + 1, 2 * n) + (qr.y2 - 2 * n + 1) as f64 * w.ln())
            .collect();
        let zl: Vec<Complex64> = zs
            .iter()
            .map(|&z| log_product(z, q, 1, qr.x1) - qr.y1 as f64 * z.ln())
            .collect();
        let mut double = Complex64::new(0.0, 0.0);
        for k in 0..kern.n {
            let p: Vec<Complex64> = kern.polys[k].iter().map(|&c| Complex64::new(c, 0.0)).collect();
            let a: Complex64 = ws.iter().zip(&wl).map(|(w, l)| l.exp() * poly::eval(&p, w)).sum::<Complex64>() / m as f64;
            let b: Complex64 = zs.iter().zip(&zl).map(|(z, l)| l.exp() * poly::eval(&p, z)).sum::<Complex64>() / m as f64;
            double += a * b / kern.kappa[k];
        }
        double - single
    })?;
    Ok(QuadratureValue {
        value: val.re,
        imag: val.im,
        nodes: m,
    })
}

/// Which contour arrangement the avatar evaluation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AvatarCase {
    /// |z| < |w|: the avatar double integral plus the explicit single integral
    Nested,
    /// |z| > |w|: the contours pass through one another and the residue at
    /// w = z absorbs the single integral; valid for x₁ > x₂
    Crossed,
}

/// K_N from (1/(2πi)²)∮∮ R̃_N(w, z) F(z; x₁, y₁)/F(w; x₂, y₂) dz dw / (z(w − z)),
/// F(z; x, y) = z^{−y}∏_{j=1}^{x}(1 + q^{−j}z), with the w-circle enclosing every
/// −q^j, j ≤ 2N.
pub fn kernel_via_avatar(qr: &KernelQuery, kern: &FiniteKernel<f64>, case: AvatarCase, max_nodes: usize) -> Result<f64> {
    qr.check(kern.n)?;
    let n = kern.n as i64;
    let q = kern.q;
    if case == AvatarCase::Crossed && qr.x1 <= qr.x2 {
        return invalid("crossed contours apply only for x1 > x2");
    }
    let outer = q.powi(2 * n as i32);
    let (rz, rw) = match case {
        AvatarCase::Nested => (q.powi(n as i32), 2.0 * outer),
        AvatarCase::Crossed => (3.0 * outer, 1.5 * outer),
    };
    let av = kern.avatar_polys();
    let to_c = |p: &[f64]| p.iter().map(|&c| Complex64::new(c, 0.0)).collect::<Vec<_>>();
    let (cn, cm, pn, pm) = (to_c(&av.c_n), to_c(&av.c_m), to_c(&av.p_n), to_c(&av.p_m));
    let spec = ContourSpec {
        z_radius: rz,
        w_radius: rw,
        min_nodes: 32,
        max_nodes,
        tol: 1e-12,
    };
    let (val, _) = doubling(&spec, |m| {
        let zs = nodes(rz, m, 0.5);
        let ws = nodes(rw, m, 0.0);
        let zf: Vec<(Complex64, Complex64, Complex64)> = zs
            .iter()
            .map(|&z| {
                let f = (log_product(z, q, 1, qr.x1) - qr.y1 as f64 * z.ln()).exp();
                (z, f * poly::eval(&pm, &z), f * poly::eval(&pn, &z))
            })
            .collect();
        let total: Complex64 = ws
            .par_iter()
            .map(|&w| {
                let g = (qr.y2 as f64 * w.ln() - log_product(w, q, 1, qr.x2)).exp() * w;
                let (a, b) = (poly::eval(&cn, &w), poly::eval(&cm, &w));
                zf.iter().map(|&(z, fm, fn_)| (a * fm - b * fn_) / (w - z)).sum::<Complex64>() * g
            })
            .sum();
        total / (av.kappa * (m * m) as f64)
    })?;
    let single = match case {
        AvatarCase::Nested => kern.single_term(qr),
        AvatarCase::Crossed => 0.0,
    };
    Ok(val.re + single)
}

/// R̃_N(w, z)e^{N(g(w) − g(z))} at q = e^{c/2N}, which tends to 1.
#[derive(Clone, Debug, Serialize)]
pub struct AvatarCheck {
    pub n: usize,
    pub c: f64,
    pub w: Complex64,
    pub z: Complex64,
    pub value: Complex64,
    pub deviation: f64,
}

pub fn avatar_normalization(n: usize, c: f64, w: Complex64, z: Complex64) -> Result<AvatarCheck> {
    let arc = Arc::new(c)?;
    if !(c > 0.0) {
        return invalid("c must be positive");
    }
    // inside the circle, or between γ₀ and the outer boundary; stay clear of the
    // real cut (−∞, 0] of the logarithms and of γ₀ itself
    if w.norm() >= arc.rho && (w.norm() > 2.0 * arc.rho || w.arg().abs() > arc.theta) {
        return Err(Error::InvalidParameter(format!(
            "w = {w} lies outside the analytic-continuation domain"
        )));
    }
    for v in [w, z] {
        if arc.near_arc(v, 1e-6 * arc.rho) || (v.im == 0.0 && v.re <= 0.0) {
            return Err(Error::OnCut(format!("{v}")));
        }
    }
    let bits = hp::bits_for(n, c) + 64;
    let q = hp::exp(c / (2.0 * n as f64), bits);
    let kern = FiniteKernel::new(n, &q)?;
    let av = kern.avatar_polys();
    let lift = |v: Complex64| hp::complex(v.re, v.im, bits);
    let to_c = |p: &[Hp]| -> Vec<HpC> { p.iter().map(|c| Complex::new(c.clone(), hp::int(0, bits))).collect() };
    let (wh, zh) = (lift(w), lift(z));
    let ev = |p: &[HpC], x: &HpC| {
        p.iter()
            .rev()
            .fold(Complex::new(hp::int(0, bits), hp::int(0, bits)), |acc, c| acc * x.clone() + c.clone())
    };
    let num = ev(&to_c(&av.c_n), &wh) * ev(&to_c(&av.p_m), &zh) - ev(&to_c(&av.c_m), &wh) * ev(&to_c(&av.p_n), &zh);
    let log_r = hp::ln_c64(&num) - hp::ln_c64(&Complex::new(av.kappa.clone(), hp::int(0, bits)));
    let value = (log_r + n as f64 * (arc.g(w)? - arc.g(z)?)).exp();
    Ok(AvatarCheck {
        n,
        c,
        w,
        z,
        value,
        deviation: (value - 1.0).norm(),
    })
}

/// One row of the edge-scaling table.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeRow {
    pub n: usize,
    pub x: i64,
    pub y: i64,
    pub kernel: f64,
    /// N^{1/3} K̃_N
    pub scaled: f64,
    pub target: f64,
    pub deviation: f64,
    /// (α, β) actually realised after rounding to the lattice
    pub alpha_eff: f64,
    pub beta_eff: f64,
    pub target_eff: f64,
    pub deviation_eff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeTable {
    pub c: f64,
    pub inflection: bool,
    pub frame: EdgeFrame,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub delta: f64,
    pub rows: Vec<EdgeRow>,
    /// |deviation| at the largest N below that at the smallest
    pub improves: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeScalingJob {
    pub c: f64,
    /// boundary parameter s ∈ (0, e^{c/2}); defaults to e^{c/2}/2 below c* and
    /// to the inflection point above it
    pub s: Option<f64>,
    pub ns: Vec<usize>,
    pub alpha: f64,
    pub beta: f64,
    /// tangential shift ω N^δ, used at an inflection point
    pub omega: f64,
    pub delta: f64,
}

impl EdgeScalingJob {
    pub fn new(c: f64) -> Self {
        EdgeScalingJob {
            c,
            s: None,
            ns: vec![32, 64, 128],
            alpha: 0.0,
            beta: 0.0,
            omega: 0.0,
            delta: 0.1,
        }
    }
}

/// Lattice point nearest to (N(1 + ξ), N(1 + η)), rejected when off the hexagon.
pub fn lattice_point(n: usize, p: HexPoint) -> Result<(i64, i64)> {
    let nf = n as f64;
    let x = (nf * (1.0 + p.xi)).round() as i64;
    let y = (nf * (1.0 + p.eta)).round() as i64;
    let ni = n as i64;
    let lo = (x - ni).max(0);
    let hi = (ni + x).min(2 * ni);
    if !(0..=2 * ni).contains(&x) || y < lo || y >= hi {
        return Err(Error::InvalidParameter(format!(
            "rounded point ({x}, {y}) falls outside the hexagon for N = {n}"
        )));
    }
    Ok((x, y))
}

/// Prefactor of K̃_N for a pair of local coordinates, as in the edge limit theorem.
pub fn edge_prefactor(f: &EdgeFrame, n: usize, a1: (f64, f64), a2: (f64, f64)) -> f64 {
    let [k1, k2, k3, k4, k5, k6] = f.k;
    let nf = n as f64;
    let lin = |(a, b): (f64, f64)| -(nf.powf(2.0 / 3.0) * k5 * b + nf.powf(1.0 / 3.0) * (k3 * a + k4 * b * b));
    let cub = |(a, b): (f64, f64)| k1 * b * b * b - k2 * a * b;
    -f.s * k6 * (lin(a1) - lin(a2) + cub(a2) - cub(a1)).exp()
}

/// The α = β = 0 style diagonal entry N^{1/3}K̃_N(x, y; x, y) for each N,
/// next to the extended Airy target A(τ, r; τ, r).
pub fn edge_scaling_diagnostic(job: &EdgeScalingJob) -> Result<EdgeTable> {
    let arc = Arc::new(job.c)?;
    let infl = arctic::inflection_points(&arc, 400)?;
    let inflection = job.s.is_none() && !infl.is_empty();
    let s = match job.s {
        Some(s) => s,
        None if inflection => infl[0],
        None => arc.rho / 2.0,
    };
    let frame = arctic::edge_frame(&arc, s)?;
    if job.ns.iter().any(|&n| n == 0 || n > 128) {
        return invalid("N must lie in 1..=128");
    }
    if inflection && !(job.delta < 1.0 / 9.0) {
        return invalid("the tangential shift exponent must be below 1/9");
    }
    let rows: Vec<EdgeRow> = job
        .ns
        .par_iter()
        .map(|&n| -> Result<EdgeRow> {
            let shift = if inflection { job.omega * (n as f64).powf(job.delta) } else { 0.0 };
            let beta = job.beta + shift;
            let (x, y) = lattice_point(n, frame.point(n, job.alpha, beta))?;
            let bits = hp::bits_for(n, job.c);
            let q = hp::exp(job.c / (2.0 * n as f64), bits);
            let kern = FiniteKernel::new(n, &q)?;
            let k = hp::to_f64(&kern.value(&KernelQuery::diagonal(x, y))?);
            let here = (job.alpha, beta);
            let scaled = (n as f64).powf(1.0 / 3.0) * edge_prefactor(&frame, n, here, here) * k;
            let r_of = |a: f64, b: f64| if inflection { frame.r(a, 0.0) } else { frame.r(a, b) };
            let tau_b = if inflection { job.beta } else { beta };
            let (t, r) = (frame.tau(tau_b), r_of(job.alpha, beta));
            let target = extended_airy(t, r, t, r);
            let nf = n as f64;
            let (ae, be) = frame.local_coordinates(n, HexPoint { xi: x as f64 / nf - 1.0, eta: y as f64 / nf - 1.0 });
            let (te, re) = (frame.tau(be - shift), r_of(ae, be));
            let target_eff = extended_airy(te, re, te, re);
            Ok(EdgeRow {
                n,
                x,
                y,
                kernel: k,
                scaled,
                target,
                deviation: scaled - target,
                alpha_eff: ae,
                beta_eff: be,
                target_eff,
                deviation_eff: scaled - target_eff,
            })
        })
        .collect::<Result<_>>()?;
    let improves = match (rows.iter().min_by_key(|r| r.n), rows.iter().max_by_key(|r| r.n)) {
        (Some(a), Some(b)) => b.n > a.n && b.deviation.abs() < a.deviation.abs(),
        _ => false,
    };
    Ok(EdgeTable {
        c: job.c,
        inflection,
        frame,
        alpha: job.alpha,
        beta: job.beta,
        omega: job.omega,
        delta: job.delta,
        rows,
        improves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::One;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn one_point_matches_enumeration_exactly() {
        let q = rat(13, 10);
        let kern = FiniteKernel::new(2, &q).unwrap();
        let ens = sampler::ensemble(2, &q).unwrap();
        for x in 0..=4 {
            for y in 0..4 {
                let k = kern.value(&KernelQuery::diagonal(x, y)).unwrap();
                assert_eq!(k, ens.occupation(&[(x as usize, y)]), "({x}, {y})");
            }
        }
    }

    #[test]
    fn two_point_matches_enumeration_exactly() {
        let q = rat(13, 10);
        let kern = FiniteKernel::new(2, &q).unwrap();
        let ens = sampler::ensemble(2, &q).unwrap();
        let pts: Vec<(i64, i64)> = (0..=4).flat_map(|x| (0..4).map(move |y| (x, y))).collect();
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let k = kern.correlation(&[*a, *b]).unwrap();
                let e = ens.occupation(&[(a.0 as usize, a.1), (b.0 as usize, b.1)]);
                assert_eq!(k, e, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn boundary_columns_are_frozen() {
        let q = rat(3, 2);
        let kern = FiniteKernel::new(3, &q).unwrap();
        let first: Vec<(i64, i64)> = (0..3).map(|y| (0, y)).collect();
        assert!(kern.correlation(&first).unwrap().is_one());
        let last: Vec<(i64, i64)> = (3..6).map(|y| (6, y)).collect();
        assert!(kern.correlation(&last).unwrap().is_one());
    }

    #[test]
    fn cd_forms_agree() {
        let kern = FiniteKernel::new(4, &1.5f64).unwrap();
        let pts = [(0.3, -1.2), (2.0, 0.7), (-0.4, 0.1), (5.0, 3.0), (1.1, 1.1000001)];
        for &(w, z) in &pts {
            let a = kern.cd_sum(&w, &z);
            let b = kern.cd(&w, &z);
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{w} {z}: {a} {b}");
        }
        let d = kern.cd(&0.8, &0.8);
        assert!((d - kern.cd_sum(&0.8, &0.8)).abs() < 1e-10 * d.abs().max(1.0));
        let one = FiniteKernel::new(1, &rat(3, 2)).unwrap();
        assert_eq!(one.cd(&rat(1, 3), &rat(7, 2)), BigRational::one() / one.moments().get(0));
    }

    #[test]
    fn reproducing_property() {
        let q = rat(3, 2);
        let kern = FiniteKernel::new(3, &q).unwrap();
        let w = rat(-2, 7);
        let rz = kern.cd_in_z(&w);
        for k in 0..3 {
            let mut zk = vec![BigRational::from_integer(0.into()); k + 1];
            zk[k] = BigRational::one();
            assert_eq!(kern.moments().pairing(&rz, &zk), num_traits::pow(w.clone(), k));
        }
    }

    #[test]
    fn quadrature_matches_exact() {
        let q = rat(13, 10);
        let exact = FiniteKernel::new(2, &q).unwrap();
        let kf = FiniteKernel::new(2, &1.3f64).unwrap();
        let spec = ContourSpec::for_model(2, 1.3);
        for (x1, y1, x2, y2) in [(1, 1, 1, 1), (3, 2, 1, 1), (0, 0, 4, 3), (4, 3, 2, 2), (2, 1, 3, 2)] {
            let qr = KernelQuery::new(x1, y1, x2, y2);
            let e: f64 = num_traits::ToPrimitive::to_f64(&exact.value(&qr).unwrap()).unwrap();
            let v = correlation_kernel(&qr, &kf, &spec).unwrap();
            assert!((v.value - e).abs() < 1e-9, "{qr:?}: {} {e}", v.value);
            assert!(v.imag.abs() < 1e-8);
            for scale in [0.6, 1.4] {
                let mut s2 = spec.clone();
                s2.z_radius *= scale;
                let u = correlation_kernel(&qr, &kf, &s2).unwrap();
                assert!((u.value - v.value).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn avatar_paths_agree() {
        let kern = FiniteKernel::new(2, &1.3f64).unwrap();
        let av = kern.avatar_polys();
        for z in [0.3, -0.7, 2.5] {
            assert!((av.eval(&z, &z) - 1.0).abs() < 1e-12);
        }
        for (x1, y1, x2, y2) in [(1, 1, 1, 1), (1, 0, 3, 2), (2, 1, 1, 0), (4, 3, 0, 0), (3, 2, 2, 2)] {
            let qr = KernelQuery::new(x1, y1, x2, y2);
            let direct = kern.value(&qr).unwrap();
            let nested = kernel_via_avatar(&qr, &kern, AvatarCase::Nested, 1 << 10).unwrap();
            assert!((nested - direct).abs() < 1e-9, "{qr:?}: {nested} {direct}");
            if x1 > x2 {
                let crossed = kernel_via_avatar(&qr, &kern, AvatarCase::Crossed, 1 << 10).unwrap();
                assert!((crossed - direct).abs() < 1e-9, "{qr:?}: {crossed} {direct}");
            }
        }
    }

    #[test]
    fn queries_are_validated() {
        let kern = FiniteKernel::new(2, &1.3f64).unwrap();
        assert!(kern.value(&KernelQuery::diagonal(5, 0)).is_err());
        assert!(kern.value(&KernelQuery::diagonal(1, 4)).is_err());
    }
}
