//! Adversarial checks of the bounds.
//!
//! The main adversary is the extremal function: the `u` that satisfies the
//! hypothesis inequality with equality, built by forward recursion. Every
//! valid instance must have its bound dominate that `u`. Around it sit the
//! random instance generator, the sweep runner, cross-engine and gauge
//! comparisons, and refinement studies towards the continuum.

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::transform::{adaptive_simpson, QUAD_MAX_DEPTH, QUAD_TOL};
use crate::bounds::{
    bound, bound_corollary_hz, bound_corollary_z, compute_p, BoundReport, BoundsError, FnSource, InstanceParts,
    KernelMap, ProblemInstance, ProblemSpec, Theorem,
};
use crate::expr::{Env, Expr, ScalarMap, Signature};
use crate::timescale::{GridFunction, ScaleError, ScaleSpec, TimeScale};

/// Equality recursions beyond this value are skipped, not failed.
pub const SKIP_ABOVE: f64 = 1e100;
/// Relative tolerance for the hypothesis check and for domination.
pub const REL_TOL: f64 = 1e-9;
/// Attempts of [`random_instance`] before giving up.
pub const MAX_RETRIES: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error("equality recursion exceeded {SKIP_ABOVE} at t = {t}")]
    Overflow { t: f64 },
    #[error("u does not satisfy the hypothesis at t = {t}: u = {u} > {rhs}")]
    HypothesisViolated { t: f64, u: f64, rhs: f64 },
    #[error("u must be nonnegative and finite, u({t}) = {u}")]
    InvalidU { t: f64, u: f64 },
    #[error("no valid instance after {MAX_RETRIES} attempts (seed {seed})")]
    GeneratorExhausted { seed: u64 },
    #[error("{0} is not refinable")]
    NotRefinable(String),
}

fn eval_map(m: &ScalarMap, x: f64, name: &str) -> Result<f64, HarnessError> {
    m.eval(x)
        .map_err(|fault| BoundsError::Eval { context: format!("{name}({x})"), fault }.into())
}

/// Drives the right-hand side of the hypothesis along a sequence of `u`
/// values, where `choose(i, rhs_i)` supplies `u_i` once `rhs_i` is known.
///
/// `rhs_i = a_i + Σ_{s<i} μ f L(u_s) + Σ_{s<i} μ w W(Σ_{τ<s} μ inner(s,τ) Φ(u_τ))`,
/// with `L = id` or `g`, `w = f` or `f h` and `inner = k(s,τ)` or `b(τ)`.
fn drive(
    inst: &ProblemInstance,
    mut choose: impl FnMut(usize, f64) -> Result<f64, HarnessError>,
) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let scale = inst.scale();
    let n = scale.len();
    let f = inst.f().values();
    let weight: Vec<f64> = match inst.h() {
        Some(h) => f.iter().zip(h.values()).map(|(f, h)| f * h).collect(),
        None => f.to_vec(),
    };
    let inner = |s: usize, tau: usize| match (inst.kernel(), inst.b()) {
        (Some(k), _) => k.at(s, tau),
        (None, Some(b)) => b.at(tau),
        (None, None) => unreachable!("validated instance has a kernel or b"),
    };
    let mut u = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    let mut phi_u = Vec::with_capacity(n);
    let mut linear = 0.0;
    let mut nonlinear = 0.0;
    for i in 0..n {
        let r = inst.a().at(i) + linear + nonlinear;
        let ui = choose(i, r)?;
        rhs.push(r);
        u.push(ui);
        phi_u.push(eval_map(inst.phi(), ui, "Phi")?);
        if i + 1 == n {
            break;
        }
        let mu = scale.mu_at(i);
        let lin = match inst.g() {
            Some(g) => eval_map(g, ui, "g")?,
            None => ui,
        };
        let mut m = 0.0;
        for tau in 0..i {
            m += scale.mu_at(tau) * inner(i, tau) * phi_u[tau];
        }
        linear += mu * f[i] * lin;
        nonlinear += mu * weight[i] * eval_map(inst.w(), m, "W")?;
    }
    Ok((u, rhs))
}

/// The `u` attaining equality in the instance's hypothesis inequality.
pub fn synthesize_u_equality(inst: &ProblemInstance) -> Result<GridFunction, HarnessError> {
    let scale = inst.scale();
    let (u, _) = drive(inst, |i, rhs| {
        if rhs.is_finite() && rhs <= SKIP_ABOVE {
            Ok(rhs)
        } else {
            Err(HarnessError::Overflow { t: scale.point(i) })
        }
    })?;
    Ok(GridFunction::new(scale.clone(), u)?)
}

/// Right-hand side of the hypothesis for a given `u`; fails if `u` exceeds it.
pub fn check_hypothesis(inst: &ProblemInstance, u: &GridFunction) -> Result<Vec<f64>, HarnessError> {
    if u.scale().points() != inst.scale().points() {
        return Err(ScaleError::ScaleMismatch.into());
    }
    let scale = inst.scale();
    let (_, rhs) = drive(inst, |i, rhs| {
        let (t, ui) = (scale.point(i), u.at(i));
        if !(ui >= 0.0 && ui.is_finite()) {
            return Err(HarnessError::InvalidU { t, u: ui });
        }
        if ui > rhs + REL_TOL * rhs.abs() {
            return Err(HarnessError::HypothesisViolated { t, u: ui, rhs });
        }
        Ok(ui)
    })?;
    Ok(rhs)
}

#[derive(Debug, Clone)]
pub struct DominationReport {
    pub report: BoundReport,
    pub u: Vec<f64>,
    /// `bound(t) − u(t)` at in-domain points
    pub margins: Vec<Option<f64>>,
    pub worst_margin: Option<f64>,
    /// `max u / bound` over in-domain points after `a` (both sides equal `a(a)` there)
    pub tightness: Option<f64>,
    pub violations: usize,
}

impl DominationReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `u` against the hypothesis, then `u ≤ bound (1 + 1e-9)` at every in-domain point.
pub fn verify_domination(inst: &ProblemInstance, u: &GridFunction) -> Result<DominationReport, HarnessError> {
    check_hypothesis(inst, u)?;
    let report = bound(inst)?;
    let mut margins = Vec::with_capacity(report.points.len());
    let (mut worst, mut tight, mut violations) = (None::<f64>, None::<f64>, 0);
    for (i, (p, &ui)) in report.points.iter().zip(u.values()).enumerate() {
        let m = p.bound.map(|b| {
            if ui > b + REL_TOL * b {
                violations += 1;
            }
            worst = Some(worst.map_or(b - ui, |w| w.min(b - ui)));
            if i > 0 {
                tight = Some(tight.map_or(ui / b, |w| w.max(ui / b)));
            }
            b - ui
        });
        margins.push(m);
    }
    Ok(DominationReport { report, u: u.values().to_vec(), margins, worst_margin: worst, tightness: tight, violations })
}

/// Largest relative gap between the generic engine and the ℤ / hℤ closed forms.
///
/// `None` for other scale kinds; a disagreement in the domain flags counts as an infinite gap.
pub fn oracle_gap(inst: &ProblemInstance) -> Result<Option<f64>, HarnessError> {
    let oracle = match inst.scale().spec() {
        ScaleSpec::Integer { .. } => bound_corollary_z(inst)?,
        ScaleSpec::Hgrid { .. } => bound_corollary_hz(inst)?,
        _ => return Ok(None),
    };
    let generic = bound(inst)?;
    Ok(Some(max_gap(&generic, &oracle).0))
}

fn max_gap(x: &BoundReport, y: &BoundReport) -> (f64, usize) {
    let mut gap: f64 = 0.0;
    let mut mismatched = 0;
    for (p, q) in x.points.iter().zip(&y.points) {
        match (p.bound, q.bound) {
            (Some(a), Some(b)) => gap = gap.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)),
            (None, None) => {}
            _ => mismatched += 1,
        }
    }
    (if mismatched > 0 { f64::INFINITY } else { gap }, mismatched)
}

/// Base points used by [`gauge_gap`].
pub const GAUGE_POINTS: [f64; 3] = [0.5, 1.0, 2.0];

/// Largest relative change of the bound over `x0, delta0 ∈ {0.5, 1, 2}`,
/// and how many points changed their domain flag.
pub fn gauge_gap(inst: &ProblemInstance) -> Result<(f64, usize), HarnessError> {
    let reference = bound(&inst.with_base_points(1.0, 1.0)?)?;
    let mut gap: f64 = 0.0;
    let mut flips = 0;
    for x0 in GAUGE_POINTS {
        for d0 in GAUGE_POINTS {
            let r = bound(&inst.with_base_points(x0, d0)?)?;
            for (p, q) in reference.points.iter().zip(&r.points) {
                match (p.bound, q.bound) {
                    (Some(a), Some(b)) => gap = gap.max((a - b).abs() / a.abs()),
                    (None, None) => {}
                    _ => flips += 1,
                }
            }
        }
    }
    Ok((gap, flips))
}

const PHI_LIBRARY: [&str; 4] = ["x", "sqrt(x)", "pow(x,0.75)", "2*sqrt(x)"];
const W_LIBRARY: [&str; 5] = ["x", "pow(x,2)", "sqrt(x)", "x/(1+x)", "1+x"];
const G_LIBRARY: [&str; 5] = ["x", "sqrt(x)", "1", "x/(1+x)", "1+x"];
const LIBRARY_CERT_HI: f64 = 1e3;

fn certified_library(cell: &'static OnceLock<Vec<ScalarMap>>, sources: &[&str]) -> &'static [ScalarMap] {
    cell.get_or_init(|| {
        sources
            .iter()
            .map(|s| {
                ScalarMap::parse(s)
                    .expect("library expression parses")
                    .certified(LIBRARY_CERT_HI, crate::bounds::CERT_SAMPLES, 0)
                    .expect("library expression evaluates")
            })
            .collect()
    })
}

fn phi_library() -> &'static [ScalarMap] {
    static CELL: OnceLock<Vec<ScalarMap>> = OnceLock::new();
    certified_library(&CELL, &PHI_LIBRARY)
}

fn w_library() -> &'static [ScalarMap] {
    static CELL: OnceLock<Vec<ScalarMap>> = OnceLock::new();
    certified_library(&CELL, &W_LIBRARY)
}

fn g_library() -> &'static [ScalarMap] {
    static CELL: OnceLock<Vec<ScalarMap>> = OnceLock::new();
    certified_library(&CELL, &G_LIBRARY)
}

fn theorem_stream(theorem: Theorem) -> u64 {
    match theorem {
        Theorem::Thm1 => 1,
        Theorem::Thm2 => 2,
        Theorem::Thm3 => 3,
        Theorem::Thm4 => 4,
    }
}

/// A random scale: ℤ, hℤ with `h ∈ {0.1, 0.5, 2}`, uniform, or q-geometric.
pub fn random_scale(seed: u64) -> ScaleSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x5ca1e);
    match rng.gen_range(0..4) {
        0 => {
            let a = rng.gen_range(-3..=3);
            ScaleSpec::Integer { a, b: a + rng.gen_range(3..=12) }
        }
        1 => {
            let h = [0.1, 0.5, 2.0][rng.gen_range(0..3)];
            let a = rng.gen_range(-2..=2) as f64 * h;
            ScaleSpec::Hgrid { a, b: a + rng.gen_range(3..=30) as f64 * h, h }
        }
        2 => ScaleSpec::Uniform { a: 0.0, b: rng.gen_range(0.5..3.0), n: rng.gen_range(3..=60) },
        _ => ScaleSpec::Qgeometric { q: rng.gen_range(1.05..1.6), a: rng.gen_range(0.5..2.0), count: rng.gen_range(4..=20) },
    }
}

/// Piecewise-constant nonnegative values with 1 to 3 pieces, each level in `[lo, hi]`.
fn piecewise(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let pieces = rng.gen_range(1..=3usize);
    let mut cuts: Vec<usize> = (0..pieces - 1).map(|_| rng.gen_range(0..n)).collect();
    cuts.sort_unstable();
    let levels: Vec<f64> = (0..pieces).map(|_| rng.gen_range(lo..=hi)).collect();
    (0..n).map(|i| levels[cuts.iter().filter(|&&c| c <= i).count()]).collect()
}

fn random_kernel(rng: &mut ChaCha8Rng, start: f64, c: f64, d: f64) -> String {
    match rng.gen_range(0..5) {
        0 => format!("{c}"),
        1 => format!("{c}*(1+{d}*(t-s))"),
        2 => format!("{c}*exp({d}*(t-s))"),
        3 => format!("{c}*exp(-{d}*(s-({start})))"),
        _ => format!("{c}*(1+{d}*(t-({start})))"),
    }
}

/// Deterministic valid instance for `(seed, theorem, scale)`.
pub fn random_instance(seed: u64, theorem: Theorem, scale: &ScaleSpec) -> Result<ProblemInstance, HarnessError> {
    let ts = Arc::new(scale.build()?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(theorem_stream(theorem));
    for _ in 0..MAX_RETRIES {
        if let Ok(inst) = try_random_instance(&mut rng, theorem, &ts) {
            return Ok(inst);
        }
    }
    Err(HarnessError::GeneratorExhausted { seed })
}

fn try_random_instance(rng: &mut ChaCha8Rng, theorem: Theorem, ts: &Arc<TimeScale>) -> Result<ProblemInstance, HarnessError> {
    let n = ts.len();
    let span = ts.span();
    let rate = 2.0 / span;
    let grid = |v: Vec<f64>| GridFunction::new(ts.clone(), v);

    let mut a = Vec::with_capacity(n);
    let mut level = rng.gen_range(0.2..2.0);
    for _ in 0..n {
        a.push(level);
        if rng.gen_bool(0.5) {
            level += rng.gen_range(0.0..0.3);
        }
    }
    let f = piecewise(rng, n, 0.0, rate);
    let (kernel, h, b) = if theorem.separable() {
        let h = piecewise(rng, n, 0.0, 1.0);
        let b = piecewise(rng, n, 0.05 * rate, rate);
        (None, Some(grid(h)?), Some(grid(b)?))
    } else {
        let c = rng.gen_range(0.05..1.0) * rate;
        let d = rng.gen_range(0.0..1.0) / span;
        let text = random_kernel(rng, ts.min(), c, d);
        (Some(KernelMap::new(&text, ts.clone())?), None, None)
    };
    let phi = phi_library()[rng.gen_range(0..PHI_LIBRARY.len())].clone();
    let w = w_library()[rng.gen_range(0..W_LIBRARY.len())].clone();
    let g = theorem.uses_g().then(|| g_library()[rng.gen_range(0..G_LIBRARY.len())].clone());
    Ok(ProblemInstance::new(InstanceParts {
        theorem,
        scale: ts.clone(),
        a: grid(a)?,
        f: grid(f)?,
        h,
        b,
        kernel,
        phi,
        w,
        g,
        x0: 1.0,
        delta0: 1.0,
    })?)
}

/// Settings of a randomized domination sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub seed: u64,
    pub count: usize,
    #[serde(default = "all_theorems")]
    pub theorems: Vec<Theorem>,
    /// cycled through by instance index; random scales when empty
    #[serde(default)]
    pub scales: Vec<ScaleSpec>,
}

fn all_theorems() -> Vec<Theorem> {
    Theorem::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass { worst_margin: Option<f64>, tightness: Option<f64> },
    Fail { worst_margin: Option<f64>, tightness: Option<f64>, violations: usize },
    Skipped(String),
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub seed: u64,
    pub theorem: Theorem,
    pub scale: ScaleSpec,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    pub fn count(&self, pred: impl Fn(&Outcome) -> bool) -> usize {
        self.rows.iter().filter(|r| pred(&r.outcome)).count()
    }

    pub fn passed(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Pass { .. }))
    }

    pub fn failed(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Fail { .. } | Outcome::Error(_)))
    }

    pub fn skipped(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Skipped(_)))
    }

    /// Columns `seed,theorem,scale,worst_margin,tightness,status`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,theorem,scale,worst_margin,tightness,status\n");
        for r in &self.rows {
            let (wm, ti, status) = match &r.outcome {
                Outcome::Pass { worst_margin, tightness } => (*worst_margin, *tightness, "pass".to_string()),
                Outcome::Fail { worst_margin, tightness, violations } => {
                    (*worst_margin, *tightness, format!("fail:{violations}"))
                }
                Outcome::Skipped(why) => (None, None, format!("skipped:{why}")),
                Outcome::Error(why) => (None, None, format!("error:{why}")),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.seed,
                r.theorem,
                csv_field(&r.scale.to_string()),
                num(wm),
                num(ti),
                csv_field(&status)
            );
        }
        out
    }
}

/// Runs one extremal domination check per `(instance index, theorem)`, in parallel.
pub fn run_sweep(config: &SweepConfig) -> SweepSummary {
    let jobs: Vec<(u64, Theorem, ScaleSpec)> = (0..config.count as u64)
        .flat_map(|i| {
            let seed = config.seed.wrapping_add(i);
            let scale = if config.scales.is_empty() {
                random_scale(seed)
            } else {
                config.scales[i as usize % config.scales.len()].clone()
            };
            config.theorems.iter().map(move |&t| (seed, t, scale.clone()))
        })
        .collect();
    let mut rows: Vec<SweepRow> = jobs
        .into_par_iter()
        .map(|(seed, theorem, scale)| {
            let outcome = sweep_one(seed, theorem, &scale);
            SweepRow { seed, theorem, scale, outcome }
        })
        .collect();
    rows.sort_by_key(|r| (r.seed, theorem_stream(r.theorem)));
    SweepSummary { rows }
}

fn sweep_one(seed: u64, theorem: Theorem, scale: &ScaleSpec) -> Outcome {
    let inst = match random_instance(seed, theorem, scale) {
        Ok(i) => i,
        Err(e) => return Outcome::Error(e.to_string()),
    };
    let u = match synthesize_u_equality(&inst) {
        Ok(u) => u,
        Err(HarnessError::Overflow { .. }) => return Outcome::Skipped("overflow".into()),
        Err(e) => return Outcome::Error(e.to_string()),
    };
    match verify_domination(&inst, &u) {
        Ok(d) if d.pass() => Outcome::Pass { worst_margin: d.worst_margin, tightness: d.tightness },
        Ok(d) => Outcome::Fail { worst_margin: d.worst_margin, tightness: d.tightness, violations: d.violations },
        Err(e) => Outcome::Error(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub factor: usize,
    pub points: usize,
    /// bound values at the coarse points
    pub bounds: Vec<Option<f64>>,
    /// sup over shared in-domain coarse points of the change from the previous row
    pub sup_diff: Option<f64>,
    /// `log(previous diff / diff) / log(factor ratio)`
    pub order: Option<f64>,
    /// max relative gap between `p` and `exp(∫ f dt)` at the coarse points
    pub p_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub coarse_points: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
}

/// Recomputes the bound on successively refined scales and compares at the base points.
pub fn convergence_study(base: &ProblemSpec, factors: &[usize]) -> Result<ConvergenceTable, HarnessError> {
    let fields = [Some(&base.a), Some(&base.f), base.h.as_ref(), base.b.as_ref()];
    if fields.iter().flatten().any(|s| !s.is_refinable()) {
        return Err(HarnessError::NotRefinable("a problem with sampled values".into()));
    }
    let coarse = base.scale.build()?;
    if factors.is_empty() {
        return Ok(ConvergenceTable { coarse_points: coarse.points().to_vec(), rows: Vec::new() });
    }
    let FnSource::Expr(f_text) = &base.f else { unreachable!("checked refinable") };
    let f_expr = Expr::parse_for(f_text, Signature::Coefficient)
        .map_err(|source| BoundsError::Parse { field: "f", source })?;
    let f_at = |t: f64| f_expr.eval(&Env::t(t));
    let mut exact = Vec::with_capacity(coarse.len());
    for &t in coarse.points() {
        let integral = adaptive_simpson(&f_at, coarse.min(), t, QUAD_TOL, QUAD_MAX_DEPTH)
            .map_err(|fault| BoundsError::Eval { context: format!("f on [{}, {t}]", coarse.min()), fault })?;
        exact.push(integral.exp());
    }

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(factors.len());
    for &factor in factors {
        let spec = base.scale.refined(factor).map_err(|e| match e {
            ScaleError::NotRefinable(kind) => HarnessError::NotRefinable(kind.to_string()),
            other => other.into(),
        })?;
        let ts = Arc::new(spec.build()?);
        let inst = base.instantiate(ts.clone())?;
        let report = bound(&inst)?;
        let p = compute_p(inst.f());
        let mut bounds = Vec::with_capacity(coarse.len());
        let mut p_gap: f64 = 0.0;
        for (k, &t) in coarse.points().iter().enumerate() {
            let i = ts.index_of(t)?;
            bounds.push(report.points[i].bound);
            p_gap = p_gap.max((p.at(i) - exact[k]).abs() / exact[k]);
        }
        let (sup_diff, order) = match rows.last() {
            Some(prev) => {
                let d = bounds
                    .iter()
                    .zip(&prev.bounds)
                    .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).abs()))
                    .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
                let order = match (prev.sup_diff, d) {
                    (Some(dp), Some(d)) if d > 0.0 && dp > 0.0 => {
                        Some((dp / d).ln() / (factor as f64 / prev.factor as f64).ln())
                    }
                    _ => None,
                };
                (d, order)
            }
            None => (None, None),
        };
        rows.push(ConvergenceRow { factor, points: ts.len(), bounds, sup_diff, order, p_gap });
    }
    Ok(ConvergenceTable { coarse_points: coarse.points().to_vec(), rows })
}

impl ConvergenceTable {
    /// Columns `factor,points,sup_diff,order,p_gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("factor,points,sup_diff,order,p_gap\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.factor, r.points, num(r.sup_diff), num(r.order), r.p_gap);
        }
        out
    }
}

/// Shortest round-trip decimal; empty for `None`.
pub fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Per-point table with columns `t,u,bound,margin,in_domain`.
pub fn points_csv(report: &BoundReport, u: Option<&[f64]>) -> String {
    let mut out = String::from("t,u,bound,margin,in_domain\n");
    for (i, p) in report.points.iter().enumerate() {
        let ui = u.map(|u| u[i]);
        let margin = match (p.bound, ui) {
            (Some(b), Some(u)) => Some(b - u),
            _ => None,
        };
        let _ = writeln!(out, "{},{},{},{},{}", p.t, num(ui), num(p.bound), num(margin), p.in_domain);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_thm1() -> ProblemInstance {
        let mut p = ProblemSpec::new(Theorem::Thm1, ScaleSpec::Integer { a: 0, b: 3 });
        p.k = Some("1".into());
        p.build().unwrap()
    }

    #[test]
    fn equality_u_unrolled() {
        // u0 = 1, u1 = 1 + 1 + W(0) = 2, u2 = 1 + (1+2) + (0 + 1) = 5, u3 = 1 + 5 + (0 + 1 + 3) = 10 + 3
        let u = synthesize_u_equality(&unit_thm1()).unwrap();
        assert_eq!(u.values(), &[1.0, 2.0, 5.0, 13.0]);
    }

    #[test]
    fn equality_u_without_f_is_a() {
        let mut p = ProblemSpec::new(Theorem::Thm2, ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 12 });
        p.f = "0".into();
        p.a = "1+t".into();
        p.h = Some("1".into());
        p.b = Some("1".into());
        let inst = p.build().unwrap();
        let u = synthesize_u_equality(&inst).unwrap();
        assert_eq!(u.values(), inst.a().values());
        let rhs = check_hypothesis(&inst, &u).unwrap();
        assert_eq!(rhs, u.values());
    }

    #[test]
    fn bound_as_input_is_not_admissible() {
        let inst = unit_thm1();
        let b = bound(&inst).unwrap();
        let as_u = GridFunction::new(inst.scale().clone(), b.bounds().into_iter().map(Option::unwrap).collect()).unwrap();
        assert!(matches!(verify_domination(&inst, &as_u), Err(HarnessError::HypothesisViolated { .. })));
    }

    #[test]
    fn zero_u_is_dominated() {
        let inst = unit_thm1();
        let zero = GridFunction::constant(inst.scale().clone(), 0.0).unwrap();
        let d = verify_domination(&inst, &zero).unwrap();
        assert!(d.pass());
        assert_eq!(d.tightness, Some(0.0));
    }

    #[test]
    fn generator_is_deterministic() {
        for seed in 0..20 {
            let scale = random_scale(seed);
            assert_eq!(scale, random_scale(seed));
            for th in Theorem::ALL {
                let x = random_instance(seed, th, &scale).unwrap();
                let y = random_instance(seed, th, &scale).unwrap();
                assert_eq!(x.a(), y.a());
                assert_eq!(x.f(), y.f());
                assert_eq!(x.kernel().map(|k| k.source().to_string()), y.kernel().map(|k| k.source().to_string()));
                assert_eq!(x.phi().source(), y.phi().source());
            }
        }
    }

    #[test]
    fn small_sweep_passes_and_is_reproducible() {
        let cfg = SweepConfig { seed: 7, count: 12, theorems: all_theorems(), scales: vec![] };
        let s = run_sweep(&cfg);
        assert_eq!(s.rows.len(), 48);
        assert_eq!(s.failed(), 0, "{}", s.to_csv());
        assert_eq!(s.to_csv(), run_sweep(&cfg).to_csv());
    }

    #[test]
    fn integer_scale_is_not_refinable() {
        let mut p = ProblemSpec::new(Theorem::Thm1, ScaleSpec::Integer { a: 0, b: 3 });
        p.k = Some("1".into());
        assert!(matches!(convergence_study(&p, &[1, 2]), Err(HarnessError::NotRefinable(_))));
    }

    #[test]
    fn refinement_closes_the_p_gap() {
        let mut p = ProblemSpec::new(Theorem::Thm1, ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 4 });
        p.k = Some("1".into());
        p.f = "1+t".into();
        let table = convergence_study(&p, &[1, 10, 100]).unwrap();
        let gaps: Vec<f64> = table.rows.iter().map(|r| r.p_gap).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        assert!(table.rows[2].sup_diff.unwrap() < table.rows[1].sup_diff.unwrap());
    }

    #[test]
    fn csv_numbers_round_trip() {
        let inst = unit_thm1();
        let r = bound(&inst).unwrap();
        let csv = points_csv(&r, None);
        let last = csv.lines().last().unwrap();
        let b: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(Some(b), r.points[3].bound);
    }
}
