//! Scenario files and the `tsbounds` command line.
//!
//! Exit codes: `0` success, `1` a hypothesis, validation or domination
//! failure, `2` a usage, I/O or parse error. Every failure writes one line
//! `error[<tag>]: <message>` to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::bounds::{bound, BoundsError, FnSource, ProblemSpec, Theorem};
use crate::dynamics::{verify_application, DynamicsError, IvpSpec};
use crate::expr::{CertifyError, Property, ScalarMap, Status};
use crate::harness::{
    convergence_study, num, points_csv, run_sweep, synthesize_u_equality, verify_domination, HarnessError,
    SweepConfig,
};
use crate::timescale::{ScaleError, ScaleSpec};

/// Scenario format version understood by this build.
pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bound,
    Verify,
    Solve,
    Sweep,
    Converge,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    pub count: usize,
    #[serde(default)]
    pub theorems: Option<Vec<Theorem>>,
    #[serde(default)]
    pub scales: Vec<ScaleSpec>,
}

/// One JSON scenario document. See `docs/scenario.md`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub mode: Option<Mode>,
    pub scale: Option<ScaleSpec>,
    pub theorem: Option<Theorem>,
    #[serde(rename = "Phi")]
    pub phi: Option<String>,
    #[serde(rename = "W")]
    pub w: Option<String>,
    pub g: Option<String>,
    pub a: Option<FnSource>,
    pub f: Option<FnSource>,
    pub h: Option<FnSource>,
    pub b: Option<FnSource>,
    pub k: Option<String>,
    pub x0: Option<f64>,
    pub delta0: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    #[serde(rename = "F")]
    pub rhs: Option<String>,
    #[serde(rename = "K")]
    pub ivp_kernel: Option<String>,
    pub u_a: Option<f64>,
    pub sweep: Option<SweepSettings>,
    pub factors: Option<Vec<usize>>,
}

/// A failure with its exit code and stderr tag.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub tag: &'static str,
    pub message: String,
}

impl CliError {
    fn usage(tag: &'static str, message: impl Into<String>) -> CliError {
        CliError { code: 2, tag, message: message.into() }
    }

    fn failure(tag: &'static str, message: impl Into<String>) -> CliError {
        CliError { code: 1, tag, message: message.into() }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> CliError {
        let tag = match &e {
            BoundsError::Parse { .. } => return CliError::usage("parse", e.to_string()),
            BoundsError::MissingField(_) | BoundsError::UnexpectedField(_) => {
                return CliError::usage("scenario", e.to_string())
            }
            BoundsError::Scale(_) => "scale",
            BoundsError::Eval { .. } => "eval",
            BoundsError::Certify(_) | BoundsError::CertificateFailed { .. } => "certificate",
            BoundsError::Hypothesis(_) | BoundsError::NonpositiveZeta { .. } => "hypothesis",
            BoundsError::Transform(_) => "transform",
            BoundsError::WrongScaleKind { .. } | BoundsError::Unsupported(_) => "unsupported",
        };
        CliError::failure(tag, e.to_string())
    }
}

impl From<ScaleError> for CliError {
    fn from(e: ScaleError) -> CliError {
        CliError::failure("scale", e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> CliError {
        match e {
            HarnessError::Bounds(b) => b.into(),
            HarnessError::Scale(s) => s.into(),
            HarnessError::NotRefinable(_) => CliError::failure("not-refinable", e.to_string()),
            HarnessError::HypothesisViolated { .. } | HarnessError::InvalidU { .. } => {
                CliError::failure("hypothesis", e.to_string())
            }
            HarnessError::Overflow { .. } => CliError::failure("overflow", e.to_string()),
            HarnessError::GeneratorExhausted { .. } => CliError::failure("generator", e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> CliError {
        match e {
            DynamicsError::Parse { .. } => CliError::usage("parse", e.to_string()),
            DynamicsError::Bounds(b) => b.into(),
            DynamicsError::Scale(s) => s.into(),
            DynamicsError::Eval { .. } => CliError::failure("eval", e.to_string()),
            DynamicsError::Overflow { .. } => CliError::failure("overflow", e.to_string()),
            DynamicsError::EnvelopeViolated { .. } => CliError::failure("envelope", e.to_string()),
        }
    }
}

fn require<T: Clone>(v: &Option<T>, key: &str, mode: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::usage("scenario", format!("`{key}` is required for {mode}")))
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, CliError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| CliError::usage("json", e.to_string()))?;
        if s.version != SCENARIO_VERSION {
            return Err(CliError::usage(
                "version",
                format!("unsupported scenario version {} (expected {SCENARIO_VERSION})", s.version),
            ));
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            let tag = if e.kind() == std::io::ErrorKind::NotFound { "file-not-found" } else { "io" };
            CliError::usage(tag, format!("{}: {e}", path.display()))
        })?;
        Scenario::from_json(&text)
    }

    fn expect_mode(&self, mode: Mode) -> Result<(), CliError> {
        match self.mode {
            Some(m) if m != mode => Err(CliError::usage(
                "mode",
                format!("scenario declares mode {m:?} but the {mode:?} command was used"),
            )),
            _ => Ok(()),
        }
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec, CliError> {
        let mut p = ProblemSpec::new(require(&self.theorem, "theorem", "a bound")?, require(&self.scale, "scale", "a bound")?);
        if let Some(v) = &self.phi {
            p.phi = v.clone();
        }
        if let Some(v) = &self.w {
            p.w = v.clone();
        }
        if let Some(v) = &self.a {
            p.a = v.clone();
        }
        if let Some(v) = &self.f {
            p.f = v.clone();
        }
        p.g = self.g.clone();
        p.h = self.h.clone();
        p.b = self.b.clone();
        p.k = self.k.clone();
        p.x0 = self.x0.unwrap_or(1.0);
        p.delta0 = self.delta0.unwrap_or(1.0);
        Ok(p)
    }

    pub fn ivp_spec(&self) -> Result<IvpSpec, CliError> {
        let mut spec = IvpSpec::new(
            require(&self.scale, "scale", "solve")?,
            &require(&self.rhs, "F", "solve")?,
            &require(&self.ivp_kernel, "K", "solve")?,
            require(&self.u_a, "u_a", "solve")?,
        );
        if let Some(h) = &self.h {
            spec.h = h.clone();
        }
        if let Some(phi) = &self.phi {
            spec.phi = phi.clone();
        }
        Ok(spec)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig, CliError> {
        let s = require(&self.sweep, "sweep", "sweep")?;
        Ok(SweepConfig {
            seed: self.seed.unwrap_or(0),
            count: s.count,
            theorems: s.theorems.unwrap_or_else(|| Theorem::ALL.to_vec()),
            scales: s.scales,
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "tsbounds", version, about = "Gronwall-Bihari bounds on finite time scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the bound of a scenario and write the per-point CSV.
    Bound(FileArgs),
    /// Synthesize the extremal function and check that the bound dominates it.
    Verify(FileArgs),
    /// Solve the initial value problem and compare it against its estimate.
    Solve(FileArgs),
    /// Randomized extremal domination sweep.
    Sweep(FileArgs),
    /// Refinement study on a refinable scale.
    Converge(FileArgs),
    /// Sampled property certificates for a one-variable expression.
    CheckFn {
        expr: String,
        /// comma-separated subset of nondec,positive,sub,submul,classS
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, clap::Args)]
struct FileArgs {
    file: PathBuf,
    /// overrides the scenario's `output`
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// What a command produced: the CSV body and whether its checks passed.
#[derive(Debug)]
struct Produced {
    csv: String,
    ok: bool,
    summary: String,
}

fn emit(out: &Produced, target: Option<&Path>, stdout: &mut String) -> Result<(), CliError> {
    match target {
        Some(path) => {
            std::fs::write(path, &out.csv).map_err(|e| CliError::usage("io", format!("{}: {e}", path.display())))?;
            let _ = writeln!(stdout, "{} -> {}", out.summary, path.display());
        }
        None => stdout.push_str(&out.csv),
    }
    Ok(())
}

fn run_bound(s: &Scenario) -> Result<Produced, CliError> {
    s.expect_mode(Mode::Bound)?;
    let inst = s.problem_spec()?.build()?;
    let report = bound(&inst)?;
    Ok(Produced {
        csv: points_csv(&report, None),
        ok: true,
        summary: format!("{} = {}, {} of {} points in domain", report.constant_name, report.constant, report.in_domain_count(), report.points.len()),
    })
}

fn run_verify(s: &Scenario) -> Result<Produced, CliError> {
    s.expect_mode(Mode::Verify)?;
    let inst = s.problem_spec()?.build()?;
    let u = synthesize_u_equality(&inst)?;
    let d = verify_domination(&inst, &u)?;
    if !d.pass() {
        return Err(CliError::failure(
            "domination",
            format!("{} points where the extremal function exceeds the bound", d.violations),
        ));
    }
    Ok(Produced {
        csv: points_csv(&d.report, Some(&d.u)),
        ok: true,
        summary: format!("PASS worst_margin={} tightness={}", num(d.worst_margin), num(d.tightness)),
    })
}

fn run_solve(s: &Scenario) -> Result<Produced, CliError> {
    s.expect_mode(Mode::Solve)?;
    let spec = s.ivp_spec()?;
    let r = verify_application(&spec, s.x0.unwrap_or(1.0))?;
    let mut csv = String::from("t,u,bound,margin,in_domain\n");
    for ((p, &u), m) in r.bound.points.iter().zip(r.u.values()).zip(&r.margins) {
        let _ = writeln!(csv, "{},{},{},{},{}", p.t, u, num(p.bound), num(*m), p.in_domain);
    }
    let worst = num(r.worst_margin());
    if !r.pass {
        return Err(CliError::failure("domination", format!("|u| exceeds the estimate, worst margin {worst}")));
    }
    Ok(Produced { csv, ok: true, summary: format!("PASS residual={} worst_margin={worst}", r.residual) })
}

fn run_sweep_cmd(s: &Scenario) -> Result<Produced, CliError> {
    s.expect_mode(Mode::Sweep)?;
    let summary = run_sweep(&s.sweep_config()?);
    Ok(Produced {
        csv: summary.to_csv(),
        ok: summary.failed() == 0,
        summary: format!(
            "{} passed, {} skipped, {} failed",
            summary.passed(),
            summary.skipped(),
            summary.failed()
        ),
    })
}

fn run_converge(s: &Scenario) -> Result<Produced, CliError> {
    s.expect_mode(Mode::Converge)?;
    let factors = s.factors.clone().unwrap_or_else(|| vec![1, 10, 100]);
    let table = convergence_study(&s.problem_spec()?, &factors)?;
    Ok(Produced { csv: table.to_csv(), ok: true, summary: format!("{} refinement levels", table.rows.len()) })
}

fn run_check_fn(expr: &str, props: Option<Vec<String>>, hi: f64, samples: usize, seed: u64) -> Result<(String, bool), CliError> {
    let wanted: Vec<Property> = match props {
        None => Property::ALL.to_vec(),
        Some(list) => list
            .iter()
            .map(|p| p.trim().parse::<Property>().map_err(|e| CliError::usage("usage", e)))
            .collect::<Result<_, _>>()?,
    };
    let map = ScalarMap::parse(expr).map_err(|e| CliError::usage("parse", e.to_string()))?;
    let certs = map.check(hi, samples, seed).map_err(|e| match e {
        CertifyError::BadParameters => CliError::usage("usage", e.to_string()),
        other => CliError::failure("eval", other.to_string()),
    })?;
    let mut out = String::new();
    let mut ok = true;
    for p in wanted {
        let c = certs.get(p).expect("every property is checked");
        ok &= c.status == Status::Pass;
        let _ = writeln!(out, "{c}");
    }
    Ok((out, ok))
}

/// Runs the CLI on `argv` (including the program name), writing to the given sinks.
pub fn run_with<I, T>(argv: I, stdout: &mut String, stderr: &mut String) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                stdout.push_str(&e.to_string());
                return 0;
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let _ = writeln!(stderr, "error[usage]: {first}");
            return 2;
        }
    };
    let result = match cli.command {
        Command::CheckFn { expr, props, hi, samples, seed } => {
            run_check_fn(&expr, props, hi, samples, seed).map(|(text, ok)| {
                stdout.push_str(&text);
                ok
            })
        }
        Command::Bound(args) => file_command(&args, run_bound, stdout),
        Command::Verify(args) => file_command(&args, run_verify, stdout),
        Command::Solve(args) => file_command(&args, run_solve, stdout),
        Command::Sweep(args) => file_command(&args, run_sweep_cmd, stdout),
        Command::Converge(args) => file_command(&args, run_converge, stdout),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "error[check-failed]: at least one check failed");
            1
        }
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {}", e.tag, e.message.replace('\n', " "));
            e.code
        }
    }
}

fn file_command(
    args: &FileArgs,
    f: fn(&Scenario) -> Result<Produced, CliError>,
    stdout: &mut String,
) -> Result<bool, CliError> {
    let scenario = Scenario::load(&args.file)?;
    let produced = f(&scenario)?;
    let target = args.output.as_deref().or(scenario.output.as_deref());
    emit(&produced, target, stdout)?;
    Ok(produced.ok)
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (String::new(), String::new());
    let code = run_with(argv, &mut out, &mut err);
    print!("{out}");
    eprint!("{err}");
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (String::new(), String::new());
        let code = run_with(std::iter::once("tsbounds").chain(args.iter().copied()), &mut out, &mut err);
        (code, out, err)
    }

    #[test]
    fn check_fn_identity_passes() {
        let (code, out, _) = call(&["check-fn", "x", "--props", "sub,submul,nondec"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 3);
        assert!(out.lines().all(|l| l.contains("PASS")));
    }

    #[test]
    fn check_fn_square_fails_subadditivity() {
        let (code, out, err) = call(&["check-fn", "pow(x,2)", "--props", "sub"]);
        assert_eq!(code, 1);
        assert!(out.contains("FAIL") && out.contains("witness="));
        assert!(err.starts_with("error[check-failed]"));
    }

    #[test]
    fn missing_file_is_a_usage_error() {
        let (code, _, err) = call(&["bound", "definitely-missing.json"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error[file-not-found]"));
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn bad_arguments_exit_two() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["check-fn", "log(x"]).0, 2);
        assert_eq!(call(&["check-fn", "x", "--props", "convex"]).0, 2);
    }

    #[test]
    fn scenario_rejects_unknown_keys_and_versions() {
        let e = Scenario::from_json(r#"{"version":1,"colour":"red"}"#).unwrap_err();
        assert_eq!((e.code, e.tag), (2, "json"));
        assert!(e.message.contains("line 1"));
        let e = Scenario::from_json(r#"{"version":7}"#).unwrap_err();
        assert_eq!(e.tag, "version");
        assert_eq!(Scenario::from_json(r#"{"mode":"bound"}"#).unwrap_err().tag, "json");
    }

    #[test]
    fn scenario_maps_onto_problem_spec() {
        let s = Scenario::from_json(
            r#"{"version":1,"mode":"bound","scale":{"kind":"integer","a":0,"b":3},"theorem":"thm1","k":"1","Phi":"x"}"#,
        )
        .unwrap();
        let r = run_bound(&s).unwrap();
        assert!(r.csv.starts_with("t,u,bound,margin,in_domain\n0,,1,,true\n1,,8,,true\n"));
        assert_eq!(run_verify(&s).unwrap_err().tag, "mode");
    }
}
