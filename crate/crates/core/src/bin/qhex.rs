//! `qhex`: command-line jobs over the qhex library.
//!
//! Every run prints a JSON summary (checks with pass/fail, outputs written,
//! results) on stdout; `--json` also writes it to a file. Exit codes:
//! 0 success, 1 a hard check failed, 2 usage or configuration error,
//! 3 numerical failure, 4 I/O error.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use qhex::arctic::{self, HexPoint};
use qhex::equilibrium::{self, Arc};
use qhex::io::{self, fmt_f64, fmt_hp};
use qhex::kernel::{self, ContourSpec, EdgeScalingJob, FiniteKernel, KernelQuery};
use qhex::numeric::hp::{self, Hp};
use qhex::sampler::{self, PlanePartition};
use qhex::scalar::{parse_rational, Scalar};
use qhex::{asymptotics, qcore, Error};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

const REFERENCE_C_STAR: f64 = 3.32577;

#[derive(Parser, Debug)]
#[command(name = "qhex", version, about = "Exact and asymptotic numerics for q^Volume lozenge tilings of a hexagon")]
#[command(args_override_self = true)]
struct Cli {
    /// JSON job file: {"command": "...", "<flag>": value, ...}; flags given on
    /// the command line override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cap on worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Describe the command (or all commands) and exit
    #[arg(long, global = true)]
    describe: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moments μ'_k of the orthogonality functional
    Moments(MomentsArgs),
    /// Exact orthogonality and agreement of the polynomial constructions
    OpCheck(OpCheckArgs),
    /// Zeros of P_N(z; e^{c/2N}, N) and their distance to the arc
    Zeros(ZerosArgs),
    /// Density of the equilibrium measure, its mass and the h-identities
    Density(DensityArgs),
    /// The arctic curve, endpoint checks and the small-c ellipse
    Arctic(ArcticArgs),
    /// The critical c* where inflection points appear
    Cstar(CstarArgs),
    /// Level lines of Re Φ_c through a boundary saddle
    Levelsets(LevelsetsArgs),
    /// The finite-N correlation kernel and correlation functions
    Kernel(KernelArgs),
    /// Edge scaling of the kernel against the extended Airy kernel
    Edge(EdgeArgs),
    /// Glauber dynamics on boxed plane partitions
    Sample(SampleArgs),
    /// Draw the SVG for a JSON summary written by another command
    Render(RenderArgs),
}

#[derive(Args, Debug, Default)]
struct Model {
    /// c in q = e^{c/2N}
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// q as an exact rational "p/q" or a decimal
    #[arg(long)]
    q: Option<String>,
}

enum Param {
    C(f64),
    Q(BigRational),
}

impl Model {
    fn resolve(&self) -> Result<Param, Failure> {
        match (self.c, &self.q) {
            (Some(c), None) => Ok(Param::C(c)),
            (None, Some(q)) => {
                let q = parse_rational(q).map_err(Failure::from)?;
                if !q.is_positive() || q.is_one() {
                    return Err(Failure::usage("q must be positive and different from 1"));
                }
                Ok(Param::Q(q))
            }
            _ => Err(Failure::usage("give exactly one of --c and --q")),
        }
    }
}

#[derive(Args, Debug)]
struct Outputs {
    /// Write a CSV table here
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the JSON summary here
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write an SVG figure here
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[arg(long = "N")]
    n: usize,
    #[command(flatten)]
    model: Model,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct OpCheckArgs {
    #[arg(long = "N")]
    n: usize,
    #[command(flatten)]
    model: Model,
    /// Highest degree checked (default 2N − 1)
    #[arg(long)]
    max_degree: Option<usize>,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    #[arg(long)]
    c: f64,
    /// One or more degrees, comma separated
    #[arg(long = "N", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Require the largest distance to the arc to decrease along the listed N
    /// and end below this multiple of e^{c/2}
    #[arg(long, default_value_t = 0.05)]
    arc_tol: f64,
    /// Also compare P_N with its leading-order asymptotics at two points
    #[arg(long)]
    plancherel_rotach: bool,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[arg(long, default_value_t = 1e-8)]
    mass_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    h_tol: f64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct ArcticArgs {
    /// One or more values of c, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1")]
    c: Vec<f64>,
    /// Samples of the parametrised segment
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Rays used to trace the closed boundary
    #[arg(long, default_value_t = 720)]
    rays: usize,
    #[arg(long, default_value_t = 1e-10)]
    endpoint_tol: f64,
    /// Compare with the ellipse 4ξ² − 4ξη + 4η² = 3 over 100 samples
    #[arg(long)]
    check_ellipse: bool,
    #[arg(long, default_value_t = 1e-2)]
    ellipse_tol: f64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct CstarArgs {
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1e-3)]
    reference_tol: f64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct LevelsetsArgs {
    #[arg(long)]
    c: f64,
    /// Boundary parameter in (0, e^{c/2}); default e^{c/2}/2
    #[arg(long)]
    s: Option<f64>,
    /// Step as a fraction of e^{c/2}
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
    /// Arc-length budget as a multiple of e^{c/2}
    #[arg(long, default_value_t = 50.0)]
    max_len: f64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long = "N")]
    n: usize,
    #[command(flatten)]
    model: Model,
    /// Points "x,y;x,y;..." whose joint correlation is reported
    #[arg(long)]
    points: Option<String>,
    /// Compare 1-, 2- and 3-point correlations with exhaustive enumeration
    /// (exact q, N ≤ 4; pairs for N ≤ 3, triples for N ≤ 2)
    #[arg(long)]
    check_enumeration: bool,
    /// Compare the contour-integral evaluation with the exact values
    #[arg(long)]
    quadrature: bool,
    #[arg(long, default_value_t = 1e-8)]
    quadrature_tol: f64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct EdgeArgs {
    #[arg(long)]
    c: f64,
    /// Boundary parameter; default e^{c/2}/2, or the inflection point when there is one
    #[arg(long)]
    s: Option<f64>,
    #[arg(long = "N", value_delimiter = ',', default_value = "32,64,128")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    omega: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long = "N")]
    n: usize,
    #[command(flatten)]
    model: Model,
    #[arg(long, default_value_t = 100_000)]
    sweeps: usize,
    /// Sweeps discarded before sampling (default N³)
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Bound on the per-site total-variation distance to the exact marginals (N ≤ 4)
    #[arg(long, default_value_t = 0.02)]
    tv_tol: f64,
    /// Verify detailed balance exactly on the N = 2 state graph (exact q)
    #[arg(long)]
    detailed_balance: bool,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// JSON summary written by zeros, density, arctic, levelsets or sample
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    svg: PathBuf,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::DegreeTooLarge { .. } => EXIT_USAGE,
            Error::Io(_) | Error::Csv(_) => EXIT_IO,
            Error::Json(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    /// hard checks decide the exit status; soft ones are reported only
    hard: bool,
    value: Option<f64>,
    detail: String,
}

#[derive(Serialize)]
struct Summary {
    command: String,
    pass: bool,
    checks: Vec<Check>,
    outputs: Vec<String>,
    results: Value,
}

struct Job {
    command: &'static str,
    checks: Vec<Check>,
    outputs: Vec<String>,
}

impl Job {
    fn new(command: &'static str) -> Self {
        Job {
            command,
            checks: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, pass: bool, value: Option<f64>, detail: impl Into<String>) {
        self.push(name, pass, true, value, detail);
    }

    fn soft(&mut self, name: &str, pass: bool, value: Option<f64>, detail: impl Into<String>) {
        self.push(name, pass, false, value, detail);
    }

    fn push(&mut self, name: &str, pass: bool, hard: bool, value: Option<f64>, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            hard,
            value,
            detail: detail.into(),
        });
    }

    fn csv(&mut self, path: &Option<PathBuf>, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), Failure> {
        if let Some(p) = path {
            io::write_csv(p, header, rows)?;
            self.outputs.push(p.display().to_string());
        }
        Ok(())
    }

    fn svg(&mut self, path: &Option<PathBuf>, make: impl FnOnce() -> String) -> Result<(), Failure> {
        if let Some(p) = path {
            io::atomic_write(p, make().as_bytes())?;
            self.outputs.push(p.display().to_string());
        }
        Ok(())
    }

    fn finish(mut self, json_path: &Option<PathBuf>, results: Value) -> Result<Summary, Failure> {
        if let Some(p) = json_path {
            self.outputs.push(p.display().to_string());
        }
        let summary = Summary {
            command: self.command.into(),
            pass: self.checks.iter().all(|c| c.pass || !c.hard),
            checks: self.checks,
            outputs: self.outputs,
            results,
        };
        if let Some(p) = json_path {
            io::write_json(p, &summary)?;
        }
        Ok(summary)
    }
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn run_moments(a: &MomentsArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("moments");
    let n = a.n;
    let (rows, top_ok, exact) = match a.model.resolve()? {
        Param::Q(q) => {
            let m = qcore::moments(n, &q)?;
            let rows: Vec<Vec<String>> = m
                .mu
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), v.to_string(), f(rat_f64(v))])
                .collect();
            let top = qhex::scalar::ipow(&q, (n * (2 * n + 1)) as i64);
            (rows, m.mu[2 * n - 1] == top, true)
        }
        Param::C(c) => {
            let bits = hp::bits_for(n, c);
            let q = hp::exp(c / (2.0 * n as f64), bits);
            let m = qcore::moments(n, &q)?;
            let rows: Vec<Vec<String>> = m
                .mu
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), fmt_hp(v), fmt_hp(v)])
                .collect();
            let top = qhex::scalar::ipow(&q, (n * (2 * n + 1)) as i64);
            let rel = hp::to_f64(&hp::abs(&((m.mu[2 * n - 1].clone() - top.clone()) / top)));
            (rows, rel < 1e-15, false)
        }
    };
    job.check(
        "top moment equals q^{N(2N+1)}",
        top_ok,
        None,
        if exact { "exact" } else { "relative 1e-15" },
    );
    job.csv(&a.out.csv, &["k", "mu", "mu_decimal"], rows.clone())?;
    let results = json!({
        "n": n,
        "exact": exact,
        "moments": rows.iter().map(|r| json!({"k": r[0], "value": r[1]})).collect::<Vec<_>>(),
    });
    job.finish(&a.out.json, results)
}

fn run_op_check(a: &OpCheckArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("op-check");
    let n_half = a.n;
    let q = match a.model.resolve()? {
        Param::Q(q) => q,
        Param::C(_) => return Err(Failure::usage("op-check works in exact arithmetic; give --q")),
    };
    let max = a.max_degree.unwrap_or(2 * n_half - 1);
    if max >= 2 * n_half {
        return Err(Error::DegreeTooLarge { n: max, two_n: 2 * n_half }.into());
    }
    let m = qcore::moments(n_half, &q)?;
    let mut rows = Vec::new();
    let mut orth_ok = true;
    let mut routes_ok = true;
    let mut worst = String::new();
    for n in 0..=max {
        let p = qcore::op_closed_form(n, n_half, &q)?;
        for k in 0..n {
            let mut zk = vec![BigRational::from_integer(0.into()); k + 1];
            zk[k] = BigRational::from_integer(1.into());
            if m.pairing(&zk, &p) != BigRational::from_integer(0.into()) {
                orth_ok = false;
                worst = format!("<z^{k}, P_{n}> ≠ 0");
            }
        }
        let others = [
            qcore::op_via_hankel(n, n_half, &q)?,
            qcore::op_via_qjacobi(n, n_half, &q)?,
            qcore::op_recurrence_in_z(n, n_half, &q)?,
        ];
        if others.iter().any(|o| *o != p) {
            routes_ok = false;
        }
        for (k, c) in p.iter().enumerate() {
            rows.push(vec![n.to_string(), k.to_string(), c.to_string(), f(rat_f64(c))]);
        }
    }
    job.check("orthogonality", orth_ok, None, if orth_ok { "all pairings vanish exactly".into() } else { worst });
    job.check(
        "constructions agree",
        routes_ok,
        None,
        "closed form, Hankel determinants, q-Jacobi recurrence and recurrence in z",
    );
    job.csv(&a.out.csv, &["n", "k", "coefficient", "decimal"], rows)?;
    job.finish(&a.out.json, json!({"n": n_half, "q": q.to_string(), "max_degree": max}))
}

fn run_zeros(a: &ZerosArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("zeros");
    let arc = Arc::new(a.c)?;
    let sets = asymptotics::zeros_many(&a.n, a.c)?;
    let dists: Vec<f64> = sets.iter().map(|s| s.max_distance()).collect();
    for s in &sets {
        job.check(
            &format!("residual N={}", s.n),
            s.max_residual <= 1e-8,
            Some(s.max_residual),
            "relative residual of every zero",
        );
    }
    if sets.len() > 1 {
        let dec = dists.windows(2).all(|w| w[1] < w[0]);
        job.check("distance to arc decreases", dec, None, format!("{dists:?}"));
    }
    let last = *dists.last().expect("at least one N");
    job.check(
        "final distance to arc",
        last < a.arc_tol * arc.rho,
        Some(last / arc.rho),
        format!("max distance / e^(c/2) < {}", a.arc_tol),
    );
    let mut pr = Vec::new();
    if a.plancherel_rotach {
        for z in [
            Complex64::new(2.0 * arc.rho, 0.0),
            0.4 * arc.rho * Complex64::from_polar(1.0, std::f64::consts::PI / 5.0),
        ] {
            let errs: Vec<f64> = a
                .n
                .iter()
                .map(|&n| asymptotics::plancherel_rotach(z, n, a.c).map(|r| r.relative_error))
                .collect::<Result<_, _>>()?;
            let dec = errs.windows(2).all(|w| w[1] < w[0]);
            job.check(&format!("Plancherel-Rotach error decreases at ({}, {})", f(z.re), f(z.im)), dec, None, format!("{errs:?}"));
            pr.push(json!({"z": [z.re, z.im], "errors": errs}));
        }
    }
    let rows: Vec<Vec<String>> = sets
        .iter()
        .flat_map(|s| {
            s.zeros
                .iter()
                .zip(&s.distances)
                .map(move |(z, d)| vec![s.n.to_string(), f(z.re), f(z.im), f(*d)])
        })
        .collect();
    job.csv(&a.out.csv, &["N", "re", "im", "distance_to_arc"], rows)?;
    let last_set = sets.last().expect("at least one N");
    job.svg(&a.out.svg, || io::zeros_svg(&arc, &last_set.zeros))?;
    let results = json!({
        "c": a.c,
        "sets": sets.iter().map(|s| json!({
            "n": s.n,
            "max_distance": s.max_distance(),
            "zeros": s.zeros.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "plancherel_rotach": pr,
    });
    job.finish(&a.out.json, results)
}

fn run_density(a: &DensityArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("density");
    let arc = Arc::new(a.c)?;
    let rep = equilibrium::equilibrium_measure_check(&arc, a.grid, a.mass_tol)?;
    job.check("total mass", (rep.mass - 1.0).abs() <= a.mass_tol, Some(rep.mass), format!("|mass − 1| ≤ {}", a.mass_tol));
    job.check("density positive", rep.min_density > 0.0, Some(rep.min_density), format!("minimum on a {}-point grid", a.grid));
    let (h1, h2) = arc.h_coefficients_integral();
    let r0 = arc.r(Complex64::new(0.0, 0.0)).re;
    job.check("h1 R(0) = c", (h1 * r0 - a.c).abs() < a.h_tol, Some(h1 * r0 - a.c), "h1 by quadrature over [−e^c, −1]");
    job.check("h2 = c", (h2 - a.c).abs() < a.h_tol, Some(h2 - a.c), "h2 by quadrature over [−e^c, −1]");
    let profile = equilibrium::density_profile(&arc, a.grid);
    job.csv(&a.out.csv, &["angle", "density"], profile.iter().map(|&(t, d)| vec![f(t), f(d)]).collect())?;
    job.svg(&a.out.svg, || io::profile_svg(&profile, &format!("density along the arc, c = {}", f(a.c))))?;
    job.finish(&a.out.json, json!({"c": a.c, "report": rep, "h1": h1, "h2": h2, "profile": profile}))
}

fn run_arctic(a: &ArcticArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("arctic");
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut drawn = Vec::new();
    for &c in &a.c {
        let arc = Arc::new(c)?;
        let start = arctic::arctic_curve(&arc, 0.0)?;
        job.check(
            &format!("eta(0) = -1 at c={}", f(c)),
            (start.eta + 1.0).abs() < a.endpoint_tol,
            Some(start.eta + 1.0),
            "start of the segment on the bottom side",
        );
        let mid = arctic::arctic_curve(&arc, arc.rho)?;
        job.check(
            &format!("xi(e^(c/2)) = 0 at c={}", f(c)),
            mid.xi.abs() < a.endpoint_tol,
            Some(mid.xi),
            "the saddle at e^(c/2) sits on the axis of symmetry",
        );
        let far = arctic::arctic_curve(&arc, c.exp())?;
        job.soft(
            &format!("xi(e^c) = 0 at c={}", f(c)),
            far.xi.abs() < a.endpoint_tol,
            Some(far.xi),
            "reported only; xi vanishes at s = e^(c/2), not at s = e^c",
        );
        let seg = arctic::boundary_segment(&arc, a.samples)?;
        let mut worst = 0.0f64;
        for &(s, _) in seg.iter().skip(1) {
            let (r1, r2) = arctic::boundary_residuals(&arc, s)?;
            worst = worst.max(r1).max(r2);
        }
        job.check(
            &format!("double critical points at c={}", f(c)),
            worst < 1e-7,
            Some(worst),
            "max |Φ′(s)|, |Φ″(s)| along the segment",
        );
        if a.check_ellipse {
            let d = arctic::ellipse_deviation(&arc, 100)?;
            job.check(&format!("ellipse at c={}", f(c)), d < a.ellipse_tol, Some(d), "sup distance over 100 samples");
        }
        let closed = arctic::boundary_by_rays(&arc, a.rays)?;
        for (s, p) in &seg {
            rows.push(vec![f(c), "segment".into(), f(*s), f(p.xi), f(p.eta)]);
        }
        for (k, p) in closed.iter().enumerate() {
            rows.push(vec![f(c), "boundary".into(), k.to_string(), f(p.xi), f(p.eta)]);
        }
        curves.push(json!({
            "c": c,
            "segment": seg.iter().map(|(s, p)| json!({"s": s, "xi": p.xi, "eta": p.eta})).collect::<Vec<_>>(),
            "boundary": closed,
        }));
        drawn.push((format!("c = {}", f(c)), closed));
    }
    job.csv(&a.out.csv, &["c", "curve", "parameter", "xi", "eta"], rows)?;
    job.svg(&a.out.svg, || io::arctic_svg(&drawn))?;
    job.finish(&a.out.json, json!({"curves": curves}))
}

fn run_cstar(a: &CstarArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("cstar");
    let cs = arctic::find_c_star_in(2.0, 5.0, a.tol)?;
    eprintln!("c* = {}", fmt_f64(cs));
    job.check(
        "c* matches 3.32577",
        (cs - REFERENCE_C_STAR).abs() < a.reference_tol,
        Some(cs),
        format!("within {}", a.reference_tol),
    );
    let mut counts = Vec::new();
    for (c, want) in [(3.0, 0usize), (5.0, 1)] {
        let k = arctic::inflection_points(&Arc::new(c)?, 400)?.len();
        job.check(&format!("inflection count at c={c}"), k == want, Some(k as f64), format!("expected {want}"));
        counts.push(json!({"c": c, "count": k}));
    }
    job.csv(&a.out.csv, &["c_star"], vec![vec![f(cs)]])?;
    job.finish(&a.out.json, json!({"c_star": cs, "inflection_counts": counts}))
}

fn run_levelsets(a: &LevelsetsArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("levelsets");
    let arc = Arc::new(a.c)?;
    let s = a.s.unwrap_or(arc.rho / 2.0);
    if !(s > 0.0 && s < arc.rho) {
        return Err(Failure::usage("--s must lie in (0, e^(c/2))"));
    }
    let lines = arctic::level_set_trace(&arc, s, a.step * arc.rho, a.max_len * arc.rho)?;
    let hits: Vec<Option<f64>> = lines.iter().map(|l| l.hit).collect();
    let all = hits.iter().all(|h| h.is_some());
    job.check("every line returns to the real axis", all, None, format!("{hits:?}"));
    let left = hits.iter().flatten().filter(|&&x| x < 0.0).count();
    job.soft("two lines land left of 0, one right", left == 2 && all, Some(left as f64), "");
    let rows: Vec<Vec<String>> = lines
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.points.iter().map(move |z| vec![i.to_string(), f(z.re), f(z.im)]))
        .collect();
    job.csv(&a.out.csv, &["line", "re", "im"], rows)?;
    let pts: Vec<Vec<Complex64>> = lines.iter().map(|l| l.points.clone()).collect();
    job.svg(&a.out.svg, || io::level_lines_svg(&arc, s, &pts))?;
    let results = json!({
        "c": a.c,
        "s": s,
        "lines": lines.iter().map(|l| json!({
            "start_angle": l.start_angle,
            "hit": l.hit,
            "points": l.points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    job.finish(&a.out.json, results)
}

fn parse_points(s: &str) -> Result<Vec<(i64, i64)>, Failure> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (x, y) = t
                .split_once(',')
                .ok_or_else(|| Failure::usage(format!("point {t:?} is not \"x,y\"")))?;
            let p = |v: &str| v.trim().parse::<i64>().map_err(|_| Failure::usage(format!("bad coordinate {v:?}")));
            Ok((p(x)?, p(y)?))
        })
        .collect()
}

/// Path points (x, y) the kernel can see: 0 ≤ x ≤ 2N with y between the
/// lowest and highest possible path heights at x.
fn lattice(n: usize) -> Vec<(i64, i64)> {
    let n = n as i64;
    (0..=2 * n)
        .flat_map(|x| ((x - n).max(0)..(n + x).min(2 * n)).map(move |y| (x, y)))
        .collect()
}

fn kernel_rows<T: Scalar>(
    kern: &FiniteKernel<T>,
    show: impl Fn(&T) -> (String, f64),
) -> Result<Vec<Vec<String>>, Failure> {
    lattice(kern.n)
        .into_iter()
        .map(|(x, y)| {
            let (s, d) = show(&kern.value(&KernelQuery::diagonal(x, y))?);
            Ok(vec![x.to_string(), y.to_string(), s, f(d)])
        })
        .collect()
}

fn run_kernel(a: &KernelArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("kernel");
    let n = a.n;
    let points = a.points.as_deref().map(parse_points).transpose()?;
    let mut results = json!({"n": n});
    let (rows, qf) = match a.model.resolve()? {
        Param::Q(q) => {
            let kern = FiniteKernel::new(n, &q)?;
            let rows = kernel_rows(&kern, |v: &BigRational| (v.to_string(), rat_f64(v)))?;
            if let Some(pts) = &points {
                let v = kern.correlation(pts)?;
                results["correlation"] = json!({"exact": v.to_string(), "value": rat_f64(&v)});
            }
            if a.check_enumeration {
                if n > sampler::ENUMERATION_CAP {
                    return Err(Failure::usage(format!("enumeration is capped at N = {}", sampler::ENUMERATION_CAP)));
                }
                enumeration_checks(&mut job, &kern, &q)?;
            }
            (rows, rat_f64(&q))
        }
        Param::C(c) => {
            if a.check_enumeration {
                return Err(Failure::usage("enumeration checks need an exact --q"));
            }
            let bits = hp::bits_for(n, c);
            let q = hp::exp(c / (2.0 * n as f64), bits);
            let kern = FiniteKernel::new(n, &q)?;
            let rows = kernel_rows(&kern, |v: &Hp| (fmt_hp(v), hp::to_f64(v)))?;
            if let Some(pts) = &points {
                let v = kern.correlation(pts)?;
                results["correlation"] = json!({"value": hp::to_f64(&v)});
            }
            (rows, (c / (2.0 * n as f64)).exp())
        }
    };
    if a.quadrature {
        let kf = FiniteKernel::new(n, &qf)?;
        let spec = ContourSpec::for_model(n, qf);
        let pts = lattice(n);
        let mut worst = 0.0f64;
        for (i, &(x1, y1)) in pts.iter().enumerate() {
            let (x2, y2) = pts[(i * 7 + 3) % pts.len()];
            for qr in [KernelQuery::diagonal(x1, y1), KernelQuery::new(x1, y1, x2, y2)] {
                let v = kernel::correlation_kernel(&qr, &kf, &spec)?;
                worst = worst.max((v.value - kf.value(&qr)?).abs());
            }
        }
        job.check(
            "contour quadrature matches",
            worst < a.quadrature_tol,
            Some(worst),
            "trapezoid rule on circles against coefficient extraction, double precision",
        );
    }
    let total: f64 = rows.iter().map(|r| r[3].parse::<f64>().unwrap_or(f64::NAN)).sum();
    job.check(
        "one-point densities sum to N(2N+1)",
        (total - (n * (2 * n + 1)) as f64).abs() < 1e-6 * total.abs().max(1.0),
        Some(total),
        "N paths on each of the 2N + 1 lines",
    );
    job.csv(&a.out.csv, &["x", "y", "density", "density_decimal"], rows)?;
    job.finish(&a.out.json, results)
}

fn enumeration_checks(job: &mut Job, kern: &FiniteKernel<BigRational>, q: &BigRational) -> Result<(), Failure> {
    let n = kern.n;
    let ens = sampler::ensemble(n, q)?;
    let pts = lattice(n);
    let site = |p: (i64, i64)| (p.0 as usize, p.1);
    let mut bad = 0usize;
    for &p in &pts {
        if kern.correlation(&[p])? != ens.occupation(&[site(p)]) {
            bad += 1;
        }
    }
    job.check("one-point correlations", bad == 0, Some(bad as f64), format!("{} points, exact", pts.len()));
    if n <= 3 {
        let mut bad = 0usize;
        let mut count = 0usize;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                count += 1;
                if kern.correlation(&[pts[i], pts[j]])? != ens.occupation(&[site(pts[i]), site(pts[j])]) {
                    bad += 1;
                }
            }
        }
        job.check("two-point correlations", bad == 0, Some(bad as f64), format!("{count} pairs, exact"));
    }
    if n <= 2 {
        let mut bad = 0usize;
        let mut count = 0usize;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                for k in j + 1..pts.len() {
                    count += 1;
                    let three = [pts[i], pts[j], pts[k]];
                    if kern.correlation(&three)? != ens.occupation(&three.map(site)) {
                        bad += 1;
                    }
                }
            }
        }
        job.check("three-point correlations", bad == 0, Some(bad as f64), format!("{count} triples, exact"));
    }
    Ok(())
}

fn run_edge(a: &EdgeArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("edge");
    let spec = EdgeScalingJob {
        c: a.c,
        s: a.s,
        ns: a.n.clone(),
        alpha: a.alpha,
        beta: a.beta,
        omega: a.omega,
        delta: a.delta,
    };
    let table = kernel::edge_scaling_diagnostic(&spec)?;
    job.soft(
        "deviation shrinks from the smallest to the largest N",
        table.improves,
        table.rows.last().map(|r| r.deviation),
        "trend only; absolute agreement is not expected at these sizes",
    );
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.x.to_string(),
                r.y.to_string(),
                f(r.kernel),
                f(r.scaled),
                f(r.target),
                f(r.deviation),
                f(r.alpha_eff),
                f(r.beta_eff),
                f(r.target_eff),
                f(r.deviation_eff),
            ]
        })
        .collect();
    job.csv(
        &a.out.csv,
        &[
            "N", "x", "y", "kernel", "scaled", "target", "deviation", "alpha_eff", "beta_eff", "target_eff",
            "deviation_eff",
        ],
        rows,
    )?;
    job.finish(&a.out.json, serde_json::to_value(&table).map_err(Error::from)?)
}

fn run_sample(a: &SampleArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("sample");
    let n = a.n;
    let (q, exact) = match a.model.resolve()? {
        Param::Q(q) => (rat_f64(&q), Some(q)),
        Param::C(c) => ((c / (2.0 * n as f64)).exp(), None),
    };
    let burn_in = a.burn_in.unwrap_or(n * n * n);
    let st = sampler::stats(n, q, burn_in, a.sweeps, a.seed, a.chains)?;
    let run = sampler::sample(n, q, burn_in, a.sweeps, a.seed)?;
    let mut tv = None;
    if n <= sampler::ENUMERATION_CAP {
        let ens = sampler::ensemble(n, &q)?;
        let d = sampler::max_site_tv(&st.frequencies, &sampler::exact_tile_marginals(&ens));
        job.check("tile marginals", d < a.tv_tol, Some(d), format!("max per-site total variation < {}", a.tv_tol));
        tv = Some(d);
    }
    if a.detailed_balance {
        let q = exact.ok_or_else(|| Failure::usage("detailed balance is checked with an exact --q"))?;
        let ok = detailed_balance(&q)?;
        job.check("detailed balance on N = 2", ok, None, "exact rational transition matrix");
    }
    let rows = st
        .sites
        .iter()
        .zip(&st.frequencies)
        .map(|(s, fr)| vec![s.0.to_string(), s.1.to_string(), f(fr[0]), f(fr[1]), f(fr[2])])
        .collect();
    job.csv(&a.out.csv, &["x", "y", "type_I", "type_II", "type_III"], rows)?;
    job.svg(&a.out.svg, || io::tiling_svg(&run.state))?;
    let results = json!({
        "n": n,
        "q": q,
        "seed": a.seed,
        "sweeps": a.sweeps,
        "burn_in": burn_in,
        "chains": a.chains,
        "max_site_tv": tv,
        "state": {"n": run.state.n, "pi": run.state.pi, "volume": run.state.volume()},
    });
    job.finish(&a.out.json, results)
}

fn detailed_balance(q: &BigRational) -> Result<bool, Failure> {
    let ens = sampler::ensemble(2, q)?;
    let p = ens.probabilities();
    let t = sampler::transition_matrix(&ens.states, q);
    let lookup: std::collections::HashMap<(usize, usize), &BigRational> = t.iter().map(|(i, j, v)| ((*i, *j), v)).collect();
    Ok(t.iter().all(|(i, j, v)| {
        let back = lookup.get(&(*j, *i)).copied();
        back.is_some_and(|b| p[*i].clone() * v == p[*j].clone() * b)
    }))
}

fn get_pairs(v: &Value) -> Vec<Complex64> {
    v.as_array()
        .map(|a| {
            a.iter()
                .filter_map(|p| Some(Complex64::new(p.get(0)?.as_f64()?, p.get(1)?.as_f64()?)))
                .collect()
        })
        .unwrap_or_default()
}

fn run_render(a: &RenderArgs) -> Result<Summary, Failure> {
    let mut job = Job::new("render");
    let text = std::fs::read_to_string(&a.input).map_err(Error::from)?;
    let v: Value = serde_json::from_str(&text).map_err(Error::from)?;
    let bad = || Failure::usage(format!("{} is not a summary this command can draw", a.input.display()));
    let cmd = v["command"].as_str().ok_or_else(bad)?.to_string();
    let r = &v["results"];
    let svg = match cmd.as_str() {
        "zeros" => {
            let arc = Arc::new(r["c"].as_f64().ok_or_else(bad)?)?;
            let set = r["sets"].as_array().and_then(|s| s.last()).ok_or_else(bad)?;
            io::zeros_svg(&arc, &get_pairs(&set["zeros"]))
        }
        "density" => {
            let pts: Vec<(f64, f64)> = get_pairs(&r["profile"]).iter().map(|z| (z.re, z.im)).collect();
            io::profile_svg(&pts, &format!("density along the arc, c = {}", f(r["c"].as_f64().unwrap_or(f64::NAN))))
        }
        "arctic" => {
            let curves: Vec<(String, Vec<HexPoint>)> = r["curves"]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|cv| {
                    let pts = cv["boundary"]
                        .as_array()
                        .map(|b| {
                            b.iter()
                                .filter_map(|p| {
                                    Some(HexPoint {
                                        xi: p["xi"].as_f64()?,
                                        eta: p["eta"].as_f64()?,
                                    })
                                })
                                .collect()
                        })
                        .unwrap_or_default();
                    (format!("c = {}", f(cv["c"].as_f64().unwrap_or(f64::NAN))), pts)
                })
                .collect();
            io::arctic_svg(&curves)
        }
        "levelsets" => {
            let arc = Arc::new(r["c"].as_f64().ok_or_else(bad)?)?;
            let lines: Vec<Vec<Complex64>> = r["lines"]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|l| get_pairs(&l["points"]))
                .collect();
            io::level_lines_svg(&arc, r["s"].as_f64().ok_or_else(bad)?, &lines)
        }
        "sample" => {
            let pi: Vec<Vec<u32>> = serde_json::from_value(r["state"]["pi"].clone()).map_err(|_| bad())?;
            io::tiling_svg(&PlanePartition::new(pi)?)
        }
        _ => return Err(bad()),
    };
    job.svg(&Some(a.svg.clone()), || svg)?;
    job.finish(&None, json!({"source": cmd}))
}

const DESCRIPTIONS: &[(&str, &str)] = &[
    ("moments", "Moments mu'_k = q^((k+1)(k+2)/2) [2N choose k+1]_q of the orthogonality functional, exact for rational q and in multiprecision for q = e^(c/2N). Table: k, mu."),
    ("op-check", "Builds P_n(z; q, N) four ways (closed form, Hankel determinants, q-Jacobi recurrence, recurrence in z) in exact arithmetic and checks that they agree and that <z^k, P_n> = 0 for k < n."),
    ("zeros", "Zeros of P_N(z; e^(c/2N), N) by Aberth iteration. Figure: the zeros for one c together with the circle |z| = e^(c/2) and the arc gamma_0 on which they accumulate. Also reports the largest zero-to-arc distance for each N."),
    ("density", "Density of the equilibrium measure along the arc, its total mass and the identities h1 R(0) = h2 = c. Figure: the density profile against the angle."),
    ("arctic", "The frozen boundary: the explicit segment s >= 0 and the closed curve traced by liquid-region membership. Figure: arctic curves inside the hexagon for the listed values of c; at small c they approach the ellipse 4xi^2 - 4 xi eta + 4 eta^2 = 3."),
    ("cstar", "Bisection for the critical c* ~ 3.32577 beyond which the boundary has inflection points, plus inflection counts at c = 3 and c = 5."),
    ("levelsets", "Level lines of Re(Phi_c - Phi_c(s)) leaving the boundary saddle s into the upper half-plane. Figure: the three lines, the circle and the arc, for s = e^(c/2)/2 by default."),
    ("kernel", "The correlation kernel K_N by coefficient extraction, exact for rational q. Table: the one-point density at every lattice point. Optional checks against enumeration and against contour quadrature."),
    ("edge", "N^(1/3) times the rescaled kernel at lattice points approaching the boundary, next to the extended Airy target and the signed deviation, for N in 32, 64, 128 by default. At an inflection point the tangential shift omega N^delta is applied."),
    ("sample", "Glauber dynamics on boxed plane partitions with weight q^(-Volume). Table: tile frequencies per site. Figure: the final tiling of the first chain."),
    ("render", "Redraws the figure of a JSON summary written by zeros, density, arctic, levelsets or sample."),
];

fn describe(which: Option<&str>) -> String {
    DESCRIPTIONS
        .iter()
        .filter(|(name, _)| which.map_or(true, |w| w == *name))
        .map(|(name, text)| format!("{name}\n  {text}\n"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// argv with the `--config` file expanded into subcommand flags.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, Failure> {
    let mut out = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| Failure::usage("--config needs a path"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            out.push(a);
        }
    }
    let Some(path) = path else { return Ok(out) };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
    let obj = v.as_object().ok_or_else(|| Failure::usage(format!("{path}: expected a JSON object")))?;
    let cmd = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| Failure::usage(format!("{path}: missing \"command\"")))?;
    let mut flags = Vec::new();
    for (k, val) in obj {
        if k == "command" {
            continue;
        }
        let flag = format!("--{}", k.replace('_', "-"));
        match val {
            Value::Bool(true) => flags.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => flags.extend([flag, s.clone()]),
            Value::Number(x) => flags.extend([flag, x.to_string()]),
            Value::Array(items) => {
                let joined = items
                    .iter()
                    .map(|i| match i {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(",");
                flags.extend([flag, joined]);
            }
            Value::Object(_) => return Err(Failure::usage(format!("{path}: nested object under {k:?}"))),
        }
    }
    // command-line arguments after the subcommand name override the file
    let prog = out.first().cloned().unwrap_or_else(|| "qhex".into());
    let rest: Vec<String> = out.into_iter().skip(1).collect();
    let (before, after): (Vec<String>, Vec<String>) = match rest.iter().position(|a| a == cmd) {
        Some(i) => (rest[..i].to_vec(), rest[i + 1..].to_vec()),
        None => (Vec::new(), rest),
    };
    let mut argv = vec![prog];
    argv.extend(before);
    argv.push(cmd.to_string());
    argv.extend(flags);
    argv.extend(after);
    Ok(argv)
}

fn run(cli: Cli) -> Result<Summary, Failure> {
    match cli.command.ok_or_else(|| Failure::usage("no command given; see --help"))? {
        Command::Moments(a) => run_moments(&a),
        Command::OpCheck(a) => run_op_check(&a),
        Command::Zeros(a) => run_zeros(&a),
        Command::Density(a) => run_density(&a),
        Command::Arctic(a) => run_arctic(&a),
        Command::Cstar(a) => run_cstar(&a),
        Command::Levelsets(a) => run_levelsets(&a),
        Command::Kernel(a) => run_kernel(&a),
        Command::Edge(a) => run_edge(&a),
        Command::Sample(a) => run_sample(&a),
        Command::Render(a) => run_render(&a),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("error: {}", f.message);
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    if raw.iter().any(|a| a == "--describe") {
        let which = raw
            .iter()
            .skip(1)
            .find(|a| DESCRIPTIONS.iter().any(|(n, _)| n == a))
            .map(String::as_str);
        print!("{}", describe(which));
        return ExitCode::SUCCESS;
    }
    let argv = match expand_config(raw) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return fail(Failure::usage("--threads must be at least 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return fail(Failure::usage(e.to_string()));
        }
    }
    match run(cli) {
        Ok(summary) => {
            for c in &summary.checks {
                let tag = match (c.pass, c.hard) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL",
                    (false, false) => "WARN",
                };
                eprintln!("{tag} {}", c.name);
            }
            match io::json_string(&summary) {
                Ok(s) => print!("{s}"),
                Err(e) => return fail(e.into()),
            }
            if summary.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e) => fail(e),
    }
}

