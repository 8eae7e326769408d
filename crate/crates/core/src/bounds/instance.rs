use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BoundsError, Theorem};
use crate::expr::{Env, Expr, Property, ScalarMap, Signature};
use crate::timescale::{GridFunction, ScaleSpec, TimeScale};

/// Smallest admissible value of the forcing term `a(t)`.
pub const MIN_A: f64 = 1e-300;
/// Default number of samples for certificates computed at instance build.
pub const CERT_SAMPLES: usize = 1000;

pub const PHI_PROPS: [Property; 4] = [
    Property::Nondecreasing,
    Property::PositiveOnPositive,
    Property::Subadditive,
    Property::Submultiplicative,
];
pub const W_PROPS: [Property; 2] = [Property::Nondecreasing, Property::PositiveOnPositive];
pub const G_PROPS: [Property; 3] = [Property::Nondecreasing, Property::PositiveOnPositive, Property::ClassS];

/// A two-variable kernel `k(t, s)` sampled at every pair `s <= t` of a scale.
#[derive(Debug, Clone)]
pub struct KernelMap {
    source: String,
    expr: Arc<Expr>,
    scale: Arc<TimeScale>,
    /// Row-major lower triangle: `values[i(i+1)/2 + j] = k(t_i, t_j)`, `j <= i`.
    values: Vec<f64>,
}

fn tri(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

impl KernelMap {
    /// Sample and validate a kernel: `k >= 0`, `k^{Δ₁} >= 0` at every
    /// sampled pair, and `k` not identically zero on `T^κ × T^{κ²}`.
    pub fn new(text: &str, scale: Arc<TimeScale>) -> Result<KernelMap, BoundsError> {
        let expr = Expr::parse_for(text, Signature::Kernel).map_err(|source| BoundsError::Parse { field: "k", source })?;
        let n = scale.len();
        let pts = scale.points();
        let mut values = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                let v = expr
                    .eval(&Env::ts(pts[i], pts[j]))
                    .map_err(|fault| BoundsError::Eval { context: format!("k({}, {})", pts[i], pts[j]), fault })?;
                if v < 0.0 {
                    return Err(BoundsError::Hypothesis(format!("kernel negative: k({}, {}) = {v}", pts[i], pts[j])));
                }
                values.push(v);
            }
        }
        for i in 0..n - 1 {
            for j in 0..=i {
                let (now, next) = (values[tri(i, j)], values[tri(i + 1, j)]);
                if next < now - 1e-12 * now.abs() {
                    return Err(BoundsError::Hypothesis(format!(
                        "kernel first-argument delta derivative negative at t = {}, s = {}",
                        pts[i], pts[j]
                    )));
                }
            }
        }
        let nontrivial = (0..n - 1).any(|i| (0..=i.min(n - 3)).any(|j| values[tri(i, j)] > 0.0));
        if !nontrivial {
            return Err(BoundsError::Hypothesis("kernel is identically zero on T^κ × T^κ²".into()));
        }
        Ok(KernelMap { source: text.to_string(), expr: Arc::new(expr), scale, values })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn scale(&self) -> &Arc<TimeScale> {
        &self.scale
    }

    /// `k(t_i, t_j)` for `j <= i`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j <= i);
        self.values[tri(i, j)]
    }

    /// `k^{Δ₁}(t_i, t_j)` for `t_i ∈ T^κ`, `j <= i`.
    pub fn delta1(&self, i: usize, j: usize) -> f64 {
        (self.at(i + 1, j) - self.at(i, j)) / self.scale.mu_at(i)
    }
}

/// A coefficient function given either as an expression in `t` or as explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FnSource {
    Expr(String),
    Values(Vec<f64>),
}

impl FnSource {
    pub fn sample(&self, field: &'static str, scale: &Arc<TimeScale>) -> Result<GridFunction, BoundsError> {
        match self {
            FnSource::Expr(text) => {
                let e = Expr::parse_for(text, Signature::Coefficient).map_err(|source| BoundsError::Parse { field, source })?;
                let mut values = Vec::with_capacity(scale.len());
                for &t in scale.points() {
                    values.push(
                        e.eval(&Env::t(t))
                            .map_err(|fault| BoundsError::Eval { context: format!("{field}({t})"), fault })?,
                    );
                }
                Ok(GridFunction::new(scale.clone(), values)?)
            }
            FnSource::Values(v) => Ok(GridFunction::new(scale.clone(), v.clone())?),
        }
    }

    pub fn is_refinable(&self) -> bool {
        matches!(self, FnSource::Expr(_))
    }
}

impl From<&str> for FnSource {
    fn from(s: &str) -> Self {
        FnSource::Expr(s.to_string())
    }
}

impl From<Vec<f64>> for FnSource {
    fn from(v: Vec<f64>) -> Self {
        FnSource::Values(v)
    }
}

/// Everything a theorem needs, as text: the serializable counterpart of [`ProblemInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub theorem: Theorem,
    pub scale: ScaleSpec,
    pub phi: String,
    pub w: String,
    pub g: Option<String>,
    pub a: FnSource,
    pub f: FnSource,
    pub h: Option<FnSource>,
    pub b: Option<FnSource>,
    pub k: Option<String>,
    pub x0: f64,
    pub delta0: f64,
}

impl ProblemSpec {
    pub fn new(theorem: Theorem, scale: ScaleSpec) -> ProblemSpec {
        ProblemSpec {
            theorem,
            scale,
            phi: "x".into(),
            w: "x".into(),
            g: None,
            a: "1".into(),
            f: "1".into(),
            h: None,
            b: None,
            k: None,
            x0: 1.0,
            delta0: 1.0,
        }
    }

    pub fn build(&self) -> Result<ProblemInstance, BoundsError> {
        self.instantiate(Arc::new(self.scale.build()?))
    }

    pub fn instantiate(&self, scale: Arc<TimeScale>) -> Result<ProblemInstance, BoundsError> {
        let parse_map = |field: &'static str, text: &str| {
            ScalarMap::parse(text).map_err(|source| BoundsError::Parse { field, source })
        };
        let parts = InstanceParts {
            theorem: self.theorem,
            a: self.a.sample("a", &scale)?,
            f: self.f.sample("f", &scale)?,
            h: self.h.as_ref().map(|h| h.sample("h", &scale)).transpose()?,
            b: self.b.as_ref().map(|b| b.sample("b", &scale)).transpose()?,
            kernel: self.k.as_deref().map(|k| KernelMap::new(k, scale.clone())).transpose()?,
            phi: parse_map("Phi", &self.phi)?,
            w: parse_map("W", &self.w)?,
            g: self.g.as_deref().map(|g| parse_map("g", g)).transpose()?,
            x0: self.x0,
            delta0: self.delta0,
            scale,
        };
        ProblemInstance::new(parts)
    }
}

/// Raw ingredients of a [`ProblemInstance`], validated by [`ProblemInstance::new`].
#[derive(Debug, Clone)]
pub struct InstanceParts {
    pub theorem: Theorem,
    pub scale: Arc<TimeScale>,
    pub a: GridFunction,
    pub f: GridFunction,
    pub h: Option<GridFunction>,
    pub b: Option<GridFunction>,
    pub kernel: Option<KernelMap>,
    pub phi: ScalarMap,
    pub w: ScalarMap,
    pub g: Option<ScalarMap>,
    pub x0: f64,
    pub delta0: f64,
}

/// A complete, validated theorem input.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    parts: InstanceParts,
}

fn require_present<T>(v: &Option<T>, field: &'static str) -> Result<(), BoundsError> {
    v.as_ref().map(|_| ()).ok_or(BoundsError::MissingField(field))
}

fn require_absent<T>(v: &Option<T>, field: &'static str) -> Result<(), BoundsError> {
    match v {
        Some(_) => Err(BoundsError::UnexpectedField(field)),
        None => Ok(()),
    }
}

fn check_nonnegative(gf: &GridFunction, name: &str) -> Result<(), BoundsError> {
    match gf.values().iter().position(|&v| v < 0.0) {
        None => Ok(()),
        Some(i) => Err(BoundsError::Hypothesis(format!(
            "{name} must be nonnegative, {name}({}) = {}",
            gf.scale().point(i),
            gf.at(i)
        ))),
    }
}

/// Sample domain for certificates: `(0, 10 · max grid value]`.
fn default_domain_hi(parts: &InstanceParts) -> f64 {
    let mut hi: f64 = 1.0;
    for &t in parts.scale.points() {
        hi = hi.max(t.abs());
    }
    for gf in [Some(&parts.a), Some(&parts.f), parts.h.as_ref(), parts.b.as_ref()].into_iter().flatten() {
        for &v in gf.values() {
            hi = hi.max(v.abs());
        }
    }
    10.0 * hi
}

/// Attach certificates when missing and fail on any violated property.
fn ensure_certified(map: ScalarMap, name: &'static str, props: &[Property], hi: f64) -> Result<ScalarMap, BoundsError> {
    let map = if map.certificates().is_some() { map } else { map.certified(hi, CERT_SAMPLES, 0)? };
    let certs = map.certificates().expect("certified above");
    if let Some(c) = certs.first_failure(props) {
        return Err(BoundsError::CertificateFailed { map: name, certificate: Box::new(c.clone()) });
    }
    if !certs.defined_at_zero && name == "Phi" {
        // Φ is evaluated at ∫_a^a f = 0
        return Err(BoundsError::Hypothesis("Phi must be defined at 0".into()));
    }
    Ok(map)
}

impl ProblemInstance {
    pub fn new(mut parts: InstanceParts) -> Result<ProblemInstance, BoundsError> {
        let scale = parts.scale.clone();
        for gf in [Some(&parts.a), Some(&parts.f), parts.h.as_ref(), parts.b.as_ref()].into_iter().flatten() {
            if gf.scale().points() != scale.points() {
                return Err(crate::timescale::ScaleError::ScaleMismatch.into());
            }
        }
        if let Some(k) = &parts.kernel {
            if k.scale().points() != scale.points() {
                return Err(crate::timescale::ScaleError::ScaleMismatch.into());
            }
        }
        match parts.theorem {
            Theorem::Thm1 => {
                require_present(&parts.kernel, "k")?;
                require_absent(&parts.h, "h")?;
                require_absent(&parts.b, "b")?;
                require_absent(&parts.g, "g")?;
            }
            Theorem::Thm2 => {
                require_absent(&parts.kernel, "k")?;
                require_present(&parts.h, "h")?;
                require_present(&parts.b, "b")?;
                require_absent(&parts.g, "g")?;
            }
            Theorem::Thm3 => {
                require_present(&parts.kernel, "k")?;
                require_absent(&parts.h, "h")?;
                require_absent(&parts.b, "b")?;
                require_present(&parts.g, "g")?;
            }
            Theorem::Thm4 => {
                require_absent(&parts.kernel, "k")?;
                require_present(&parts.h, "h")?;
                require_present(&parts.b, "b")?;
                require_present(&parts.g, "g")?;
            }
        }
        if let Some(i) = parts.a.values().iter().position(|&v| v < MIN_A) {
            return Err(BoundsError::Hypothesis(format!(
                "a must be positive, a({}) = {}",
                scale.point(i),
                parts.a.at(i)
            )));
        }
        if !parts.a.is_nondecreasing() {
            return Err(BoundsError::Hypothesis("a must be nondecreasing".into()));
        }
        check_nonnegative(&parts.f, "f")?;
        if let Some(h) = &parts.h {
            check_nonnegative(h, "h")?;
        }
        if let Some(b) = &parts.b {
            check_nonnegative(b, "b")?;
            // not identically zero on T^{κ²}
            if b.values()[..scale.len() - 2].iter().all(|&v| v == 0.0) {
                return Err(BoundsError::Hypothesis("b is identically zero on T^κ²".into()));
            }
        }
        for (x, name) in [(parts.x0, "x0"), (parts.delta0, "delta0")] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(BoundsError::Hypothesis(format!("{name} must be positive, got {x}")));
            }
        }
        let hi = default_domain_hi(&parts);
        parts.phi = ensure_certified(parts.phi, "Phi", &PHI_PROPS, hi)?;
        parts.w = ensure_certified(parts.w, "W", &W_PROPS, hi)?;
        if let Some(g) = parts.g.take() {
            parts.g = Some(ensure_certified(g, "g", &G_PROPS, hi)?);
        }
        Ok(ProblemInstance { parts })
    }

    pub fn theorem(&self) -> Theorem {
        self.parts.theorem
    }

    pub fn scale(&self) -> &Arc<TimeScale> {
        &self.parts.scale
    }

    pub fn a(&self) -> &GridFunction {
        &self.parts.a
    }

    pub fn f(&self) -> &GridFunction {
        &self.parts.f
    }

    pub fn h(&self) -> Option<&GridFunction> {
        self.parts.h.as_ref()
    }

    pub fn b(&self) -> Option<&GridFunction> {
        self.parts.b.as_ref()
    }

    pub fn kernel(&self) -> Option<&KernelMap> {
        self.parts.kernel.as_ref()
    }

    pub fn phi(&self) -> &ScalarMap {
        &self.parts.phi
    }

    pub fn w(&self) -> &ScalarMap {
        &self.parts.w
    }

    pub fn g(&self) -> Option<&ScalarMap> {
        self.parts.g.as_ref()
    }

    pub fn x0(&self) -> f64 {
        self.parts.x0
    }

    pub fn delta0(&self) -> f64 {
        self.parts.delta0
    }

    pub fn parts(&self) -> &InstanceParts {
        &self.parts
    }

    /// Same instance with different transform base points.
    pub fn with_base_points(&self, x0: f64, delta0: f64) -> Result<ProblemInstance, BoundsError> {
        let mut parts = self.parts.clone();
        parts.x0 = x0;
        parts.delta0 = delta0;
        ProblemInstance::new(parts)
    }
}
