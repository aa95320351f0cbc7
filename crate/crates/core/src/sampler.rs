//! Boxed plane partitions as lozenge tilings: exhaustive enumeration, the
//! bijection with non-intersecting paths, Glauber dynamics for the q^{−Volume}
//! measure and per-site tile statistics.
//!
//! Paths live on vertical lines m = 0..2N at integer heights h (the paper's
//! half-integer x = h + ½). Path j starts at h = j, ends at h = N + j, and steps
//! up (type I tile, weight q^{−(m+1)}) or flat (type II) between lines m and m+1.
//! Unit segments of a vertical line not crossed by a path are the middles of
//! type III tiles.

use crate::error::{invalid, Error, Result};
use crate::scalar::{ipow, Scalar};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

pub const ENUMERATION_CAP: usize = 4;

/// An N×N array with entries in 0..=N, weakly decreasing along rows and columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PlanePartition {
    pub n: usize,
    pub pi: Vec<Vec<u32>>,
}

impl PlanePartition {
    pub fn new(pi: Vec<Vec<u32>>) -> Result<Self> {
        let n = pi.len();
        if n == 0 || pi.iter().any(|r| r.len() != n) {
            return invalid("a plane partition must be a non-empty square array");
        }
        let p = PlanePartition { n, pi };
        if !p.is_valid() {
            return invalid("entries must lie in 0..=N and decrease weakly along rows and columns");
        }
        Ok(p)
    }

    pub fn empty(n: usize) -> Self {
        PlanePartition {
            n,
            pi: vec![vec![0; n]; n],
        }
    }

    pub fn full(n: usize) -> Self {
        PlanePartition {
            n,
            pi: vec![vec![n as u32; n]; n],
        }
    }

    pub fn is_valid(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let v = self.pi[i][j];
                v as usize <= n
                    && (i == 0 || self.pi[i - 1][j] >= v)
                    && (j == 0 || self.pi[i][j - 1] >= v)
            })
        })
    }

    pub fn volume(&self) -> u64 {
        self.pi.iter().flatten().map(|&v| v as u64).sum()
    }

    /// π̃_{ij} = N − π_{N−1−i, N−1−j}, the complementary stack in the N×N×N box.
    pub fn complement(&self) -> Self {
        let n = self.n;
        let pi = (0..n)
            .map(|i| (0..n).map(|j| n as u32 - self.pi[n - 1 - i][n - 1 - j]).collect())
            .collect();
        PlanePartition { n, pi }
    }

    fn can_add(&self, i: usize, j: usize) -> bool {
        let v = self.pi[i][j];
        (v as usize) < self.n && (i == 0 || self.pi[i - 1][j] > v) && (j == 0 || self.pi[i][j - 1] > v)
    }

    fn can_remove(&self, i: usize, j: usize) -> bool {
        let v = self.pi[i][j];
        v > 0
            && (i + 1 == self.n || self.pi[i + 1][j] < v)
            && (j + 1 == self.n || self.pi[i][j + 1] < v)
    }
}

/// All plane partitions in the N×N×N box, in lexicographic order of the
/// row-major entries.
pub fn enumerate(n: usize) -> Result<Vec<PlanePartition>> {
    if n == 0 || n > ENUMERATION_CAP {
        return invalid(format!("enumeration is capped at N = {ENUMERATION_CAP}, got {n}"));
    }
    let mut out = Vec::new();
    let mut pi = vec![vec![0u32; n]; n];
    fn rec(idx: usize, n: usize, pi: &mut Vec<Vec<u32>>, out: &mut Vec<PlanePartition>) {
        if idx == n * n {
            out.push(PlanePartition { n, pi: pi.clone() });
            return;
        }
        let (i, j) = (idx / n, idx % n);
        let mut hi = n as u32;
        if i > 0 {
            hi = hi.min(pi[i - 1][j]);
        }
        if j > 0 {
            hi = hi.min(pi[i][j - 1]);
        }
        for v in 0..=hi {
            pi[i][j] = v;
            rec(idx + 1, n, pi, out);
        }
        pi[i][j] = 0;
    }
    rec(0, n, &mut pi, &mut out);
    Ok(out)
}

/// Enumerated ensemble with exact weights q^{−|π|}.
#[derive(Clone, Debug)]
pub struct Ensemble<T> {
    pub n: usize,
    pub states: Vec<PlanePartition>,
    pub weights: Vec<T>,
    pub partition_function: T,
}

pub fn ensemble<T: Scalar>(n: usize, q: &T) -> Result<Ensemble<T>> {
    let states = enumerate(n)?;
    let weights: Vec<T> = states.iter().map(|p| ipow(q, -(p.volume() as i64))).collect();
    let z = weights.iter().fold(T::zero(), |a, w| a + w.clone());
    Ok(Ensemble {
        n,
        states,
        weights,
        partition_function: z,
    })
}

impl<T: Scalar> Ensemble<T> {
    pub fn probabilities(&self) -> Vec<T> {
        self.weights
            .iter()
            .map(|w| w.clone() / self.partition_function.clone())
            .collect()
    }

    /// Probability that paths pass through every one of the given points (m, h).
    pub fn occupation(&self, points: &[(usize, i64)]) -> T {
        let mut out = T::zero();
        for (p, w) in self.states.iter().zip(&self.weights) {
            let e = to_paths(p);
            if points.iter().all(|&(m, h)| e.occupied(m, h)) {
                out = out + w.clone();
            }
        }
        out / self.partition_function.clone()
    }
}

/// MacMahon's box formula ∏_{i,j,k=1}^{N} (i + j + k − 1)/(i + j + k − 2).
pub fn macmahon(n: usize) -> BigRational {
    let mut out = BigRational::one();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let s = (i + j + k) as i64;
                out *= BigRational::new((s - 1).into(), (s - 2).into());
            }
        }
    }
    out
}

/// Integer heights h_j^m of the N paths on the lines m = 0..2N.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathEnsemble {
    pub n: usize,
    pub heights: Vec<Vec<i64>>,
}

impl PathEnsemble {
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.heights.len() != n || self.heights.iter().any(|h| h.len() != 2 * n + 1) {
            return bad("expected N paths over 2N + 1 lines");
        }
        for (j, h) in self.heights.iter().enumerate() {
            if h[0] != j as i64 || h[2 * n] != (n + j) as i64 {
                return bad("paths must run from h = j to h = N + j");
            }
            if h.windows(2).any(|w| !(w[1] - w[0] == 0 || w[1] - w[0] == 1)) {
                return bad("steps must be 0 or 1");
            }
        }
        for m in 0..=2 * n {
            for j in 1..n {
                if self.heights[j - 1][m] >= self.heights[j][m] {
                    return bad("paths must not touch");
                }
            }
        }
        Ok(())
    }

    pub fn occupied(&self, m: usize, h: i64) -> bool {
        self.heights.iter().any(|p| p[m] == h)
    }

    /// Σ over up-steps of (m + 1); q to minus this is the path weight.
    pub fn up_step_weight_exponent(&self) -> u64 {
        self.heights
            .iter()
            .map(|h| {
                h.windows(2)
                    .enumerate()
                    .filter(|(_, w)| w[1] > w[0])
                    .map(|(m, _)| m as u64 + 1)
                    .sum::<u64>()
            })
            .sum()
    }

    /// Weight ∏ q^{−(m+1)} over up-steps.
    pub fn weight<T: Scalar>(&self, q: &T) -> T {
        ipow(q, -(self.up_step_weight_exponent() as i64))
    }
}

/// Path j steps up at the lines u_k = π_{j, N−1−k} + k, k = 0..N−1.
pub fn to_paths(p: &PlanePartition) -> PathEnsemble {
    let n = p.n;
    let heights = (0..n)
        .map(|j| {
            let mut ups = vec![false; 2 * n];
            for k in 0..n {
                ups[p.pi[j][n - 1 - k] as usize + k] = true;
            }
            let mut h = Vec::with_capacity(2 * n + 1);
            let mut y = j as i64;
            h.push(y);
            for up in ups {
                y += up as i64;
                h.push(y);
            }
            h
        })
        .collect();
    PathEnsemble { n, heights }
}

pub fn from_paths(e: &PathEnsemble) -> Result<PlanePartition> {
    e.validate()?;
    let n = e.n;
    let mut pi = vec![vec![0u32; n]; n];
    for (j, h) in e.heights.iter().enumerate() {
        let ups: Vec<usize> = (0..2 * n).filter(|&m| h[m + 1] > h[m]).collect();
        for (k, &u) in ups.iter().enumerate() {
            pi[j][n - 1 - k] = (u - k) as u32;
        }
    }
    PlanePartition::new(pi)
}

/// q^{N²(N+1)/2}: path weight times this equals q^{−|π|}.
pub fn path_weight_exponent_offset(n: usize) -> u64 {
    (n * n * (n + 1) / 2) as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Tile {
    /// path step up
    I,
    /// flat path step
    II,
    /// no path
    III,
}

impl Tile {
    pub fn index(self) -> usize {
        match self {
            Tile::I => 0,
            Tile::II => 1,
            Tile::III => 2,
        }
    }
}

/// Sites (m, h) with 0 ≤ m < 2N and max(0, m − N) ≤ h < min(N + m, 2N); each
/// carries exactly one tile, 3N² in total.
pub fn sites(n: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::with_capacity(3 * n * n);
    for m in 0..2 * n {
        let lo = m.saturating_sub(n) as i64;
        let hi = (n + m).min(2 * n) as i64;
        for h in lo..hi {
            out.push((m, h));
        }
    }
    out
}

/// Tile at every site, in the order of [`sites`].
pub fn tiles(e: &PathEnsemble) -> Vec<Tile> {
    let n = e.n;
    let mut grid: HashMap<(usize, i64), Tile> = HashMap::new();
    for h in &e.heights {
        for m in 0..2 * n {
            grid.insert((m, h[m]), if h[m + 1] > h[m] { Tile::I } else { Tile::II });
        }
    }
    sites(n)
        .into_iter()
        .map(|s| grid.get(&s).copied().unwrap_or(Tile::III))
        .collect()
}

/// Corners of the tile at a site in sheared coordinates.
pub fn tile_polygon(site: (usize, i64), t: Tile) -> [(f64, f64); 4] {
    let (m, h) = (site.0 as f64, site.1 as f64);
    match t {
        Tile::I => [(m, h), (m, h + 1.0), (m + 1.0, h + 2.0), (m + 1.0, h + 1.0)],
        Tile::II => [(m, h), (m, h + 1.0), (m + 1.0, h + 1.0), (m + 1.0, h)],
        Tile::III => [(m - 1.0, h), (m, h + 1.0), (m + 1.0, h + 1.0), (m, h)],
    }
}

/// The affine map from sheared to symmetric (regular hexagon) coordinates.
pub fn symmetric(p: (f64, f64)) -> (f64, f64) {
    (p.0 * 3f64.sqrt() / 2.0, p.1 - p.0 / 2.0)
}

/// One Glauber proposal at site (i, j): add a cube with probability 1/q
/// (when allowed) or remove one (when allowed), each direction chosen with
/// probability ½. Returns whether the state changed.
pub fn glauber_step<R: Rng>(state: &mut PlanePartition, rng: &mut R, q: f64) -> bool {
    let n = state.n;
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    let add = rng.gen::<bool>();
    let u: f64 = rng.gen();
    if add {
        if state.can_add(i, j) && u * q < 1.0 {
            state.pi[i][j] += 1;
            return true;
        }
    } else if state.can_remove(i, j) {
        state.pi[i][j] -= 1;
        return true;
    }
    false
}

/// N² proposals.
pub fn sweep<R: Rng>(state: &mut PlanePartition, rng: &mut R, q: f64) {
    for _ in 0..state.n * state.n {
        glauber_step(state, rng, q);
    }
}

/// The exact transition matrix of one proposal on an enumerated state space,
/// as sparse (from, to, probability) triples including the diagonal.
pub fn transition_matrix(states: &[PlanePartition], q: &BigRational) -> Vec<(usize, usize, BigRational)> {
    let index: HashMap<&PlanePartition, usize> = states.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let n = states[0].n;
    let pick = BigRational::new(1.into(), (2 * n * n).into());
    let accept_add = BigRational::one() / q;
    let mut out = Vec::new();
    for (a, s) in states.iter().enumerate() {
        let mut stay = BigRational::one();
        for i in 0..n {
            for j in 0..n {
                if s.can_add(i, j) {
                    let mut t = s.clone();
                    t.pi[i][j] += 1;
                    let p = &pick * &accept_add;
                    stay -= &p;
                    out.push((a, index[&t], p));
                }
                if s.can_remove(i, j) {
                    let mut t = s.clone();
                    t.pi[i][j] -= 1;
                    stay -= &pick;
                    out.push((a, index[&t], pick.clone()));
                }
            }
        }
        if !stay.is_zero() {
            out.push((a, a, stay));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRun {
    pub n: usize,
    pub q: f64,
    pub seed: u64,
    pub burn_in: usize,
    pub sweeps: usize,
    pub state: PlanePartition,
}

/// A chain from the empty box: `burn_in` sweeps, then `sweeps` more.
pub fn sample(n: usize, q: f64, burn_in: usize, sweeps: usize, seed: u64) -> Result<SampleRun> {
    if n == 0 {
        return invalid("N must be at least 1");
    }
    if !(q >= 1.0) {
        return invalid("the sampler targets q^{−Volume} with q ≥ 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = PlanePartition::empty(n);
    for _ in 0..burn_in + sweeps {
        sweep(&mut state, &mut rng, q);
    }
    Ok(SampleRun {
        n,
        q,
        seed,
        burn_in,
        sweeps,
        state,
    })
}

/// Per-site tile frequencies and mean stack heights.
#[derive(Clone, Debug, Serialize)]
pub struct TilingStats {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub sites: Vec<(usize, i64)>,
    /// [I, II, III] frequencies per site
    pub frequencies: Vec<[f64; 3]>,
    pub mean_height: Vec<Vec<f64>>,
}

/// Runs `chains` independent chains (one ChaCha stream each) in parallel; each
/// records a sample after every sweep following burn-in.
pub fn stats(n: usize, q: f64, burn_in: usize, sweeps: usize, seed: u64, chains: usize) -> Result<TilingStats> {
    if n == 0 || sweeps == 0 || chains == 0 {
        return invalid("need N, sweeps and chains ≥ 1");
    }
    if !(q >= 1.0) {
        return invalid("the sampler targets q^{−Volume} with q ≥ 1");
    }
    let site_list = sites(n);
    let parts: Vec<(Vec<[u64; 3]>, Vec<Vec<u64>>)> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut state = PlanePartition::empty(n);
            for _ in 0..burn_in {
                sweep(&mut state, &mut rng, q);
            }
            let mut counts = vec![[0u64; 3]; site_list.len()];
            let mut heights = vec![vec![0u64; n]; n];
            for _ in 0..sweeps {
                sweep(&mut state, &mut rng, q);
                for (k, t) in tiles(&to_paths(&state)).into_iter().enumerate() {
                    counts[k][t.index()] += 1;
                }
                for i in 0..n {
                    for j in 0..n {
                        heights[i][j] += state.pi[i][j] as u64;
                    }
                }
            }
            (counts, heights)
        })
        .collect();
    let total = (sweeps * chains) as f64;
    let mut freq = vec![[0.0; 3]; site_list.len()];
    let mut mean = vec![vec![0.0; n]; n];
    for (counts, heights) in &parts {
        for (f, c) in freq.iter_mut().zip(counts) {
            for t in 0..3 {
                f[t] += c[t] as f64 / total;
            }
        }
        for i in 0..n {
            for j in 0..n {
                mean[i][j] += heights[i][j] as f64 / total;
            }
        }
    }
    Ok(TilingStats {
        n,
        seed,
        samples: sweeps * chains,
        sites: site_list,
        frequencies: freq,
        mean_height: mean,
    })
}

/// Exact per-site tile marginals from the enumeration.
pub fn exact_tile_marginals(ens: &Ensemble<f64>) -> Vec<[f64; 3]> {
    let site_list = sites(ens.n);
    let mut out = vec![[0.0; 3]; site_list.len()];
    for (s, p) in ens.states.iter().zip(ens.probabilities()) {
        for (k, t) in tiles(&to_paths(s)).into_iter().enumerate() {
            out[k][t.index()] += p;
        }
    }
    out
}

/// max over sites of ½Σ|f − p|.
pub fn max_site_tv(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| 0.5 * (0..3).map(|t| (x[t] - y[t]).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn state_counts() {
        let counts: Vec<usize> = (1..=3).map(|n| enumerate(n).unwrap().len()).collect();
        assert_eq!(counts, vec![2, 20, 980]);
        for n in 1..=3 {
            assert_eq!(macmahon(n), BigRational::from_integer(BigInt::from(enumerate(n).unwrap().len())));
        }
        assert!(enumerate(5).is_err());
    }

    #[test]
    fn unit_hexagon_partition_function() {
        let q = rat(3, 2);
        let e = ensemble(1, &q).unwrap();
        assert_eq!(e.partition_function, BigRational::one() + BigRational::one() / q);
    }

    #[test]
    fn partition_function_decreases_in_q() {
        let z: Vec<f64> = [1.1, 1.5, 2.0, 4.0]
            .iter()
            .map(|&q| ensemble(2, &q).unwrap().partition_function)
            .collect();
        assert!(z.windows(2).all(|w| w[1] < w[0]), "{z:?}");
    }

    #[test]
    fn path_bijection() {
        for p in enumerate(3).unwrap() {
            let e = to_paths(&p);
            e.validate().unwrap();
            assert_eq!(from_paths(&e).unwrap(), p);
            assert_eq!(
                e.up_step_weight_exponent(),
                p.volume() + path_weight_exponent_offset(3)
            );
        }
        let flat = to_paths(&PlanePartition::empty(2));
        assert_eq!(flat.heights, vec![vec![0, 1, 2, 2, 2], vec![1, 2, 3, 3, 3]]);
        let full = to_paths(&PlanePartition::full(2));
        assert_eq!(full.heights, vec![vec![0, 0, 0, 1, 2], vec![1, 1, 1, 2, 3]]);
    }

    #[test]
    fn complement_volume() {
        for p in enumerate(3).unwrap() {
            let c = p.complement();
            assert!(c.is_valid());
            assert_eq!(p.volume() + c.volume(), 27);
            assert_eq!(c.complement(), p);
        }
    }

    #[test]
    fn tiles_cover_the_hexagon_once() {
        let n = 2;
        for p in enumerate(n).unwrap() {
            let t = tiles(&to_paths(&p));
            assert_eq!(t.len(), 3 * n * n);
            assert_eq!(t.iter().filter(|&&x| x == Tile::III).count(), n * n);
            // sample cell centres of a fine grid: every interior point is covered once
            let polys: Vec<[(f64, f64); 4]> =
                sites(n).into_iter().zip(&t).map(|(s, &k)| tile_polygon(s, k)).collect();
            let mut covered = 0;
            let steps = 40;
            for a in 0..2 * n * steps {
                for b in 0..2 * n * steps {
                    let pt = ((a as f64 + 0.37) / steps as f64, (b as f64 + 0.61) / steps as f64);
                    let hits = polys.iter().filter(|poly| inside(pt, poly)).count();
                    assert!(hits <= 1);
                    covered += hits;
                }
            }
            // area 3N² sampled at steps² points per unit
            assert!((covered as f64 / (steps * steps) as f64 - 3.0 * (n * n) as f64).abs() < 0.1);
        }
    }

    fn inside(p: (f64, f64), poly: &[(f64, f64); 4]) -> bool {
        let mut sign = 0.0;
        for k in 0..4 {
            let (a, b) = (poly[k], poly[(k + 1) % 4]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return false;
            }
        }
        true
    }

    #[test]
    fn proposals_respect_monotonicity() {
        let mut p = PlanePartition::new(vec![vec![1, 0], vec![0, 0]]).unwrap();
        assert!(!p.can_add(1, 1));
        assert!(p.can_add(0, 1));
        assert!(p.can_remove(0, 0));
        assert!(!p.can_remove(1, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            glauber_step(&mut p, &mut rng, 1.7);
            assert!(p.is_valid());
        }
    }

    #[test]
    fn huge_q_only_removes() {
        let mut p = PlanePartition::new(vec![vec![2, 1], vec![1, 0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut last = p.volume();
        for _ in 0..200 {
            glauber_step(&mut p, &mut rng, f64::INFINITY);
            assert!(p.volume() <= last);
            last = p.volume();
        }
        assert_eq!(last, 0);
    }

    #[test]
    fn detailed_balance_exact() {
        let q = rat(6, 5);
        let ens = ensemble(2, &q).unwrap();
        let probs = ens.probabilities();
        let t = transition_matrix(&ens.states, &q);
        let mut m: HashMap<(usize, usize), BigRational> = HashMap::new();
        for (a, b, p) in t {
            m.insert((a, b), p);
        }
        for a in 0..ens.states.len() {
            let row: BigRational = m.iter().filter(|((x, _), _)| *x == a).map(|(_, p)| p.clone()).sum();
            assert!(row.is_one());
        }
        for ((a, b), p) in &m {
            let back = m.get(&(*b, *a)).cloned().unwrap_or_else(BigRational::zero);
            assert_eq!(&probs[*a] * p, &probs[*b] * back);
        }
    }

    #[test]
    fn seed_reproducibility() {
        let a = sample(5, 1.3, 10, 20, 42).unwrap();
        let b = sample(5, 1.3, 10, 20, 42).unwrap();
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn stationary_distribution_small_box() {
        let q = 1.2;
        let ens = ensemble(2, &q).unwrap();
        let probs = ens.probabilities();
        let index: HashMap<&PlanePartition, usize> =
            ens.states.iter().enumerate().map(|(k, s)| (s, k)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = PlanePartition::empty(2);
        let mut counts = vec![0usize; ens.states.len()];
        let sweeps = 200_000;
        for _ in 0..sweeps {
            sweep(&mut state, &mut rng, q);
            counts[index[&state]] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&c, p)| (c as f64 / sweeps as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "{tv}");
    }
}
