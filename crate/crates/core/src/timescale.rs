//! Finite time scales and the delta calculus on them.
//!
//! A [`TimeScale`] is a finite, strictly increasing set of reals. Every
//! point except the maximum is right-scattered, so delta integrals are exact
//! finite sums `Σ μ(τ) f(τ)` and delta derivatives are forward differences.
//! Continuous behaviour is studied by refining dense uniform segments.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance (times span) under which two explicit points count as duplicates.
const DUPLICATE_TOL: f64 = 1e-12;
/// Relative tolerance (times span) used when snapping a real to a scale point.
const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScaleError {
    #[error("time scale needs at least 3 points, got {0}")]
    EmptyScale(usize),
    #[error("points are not strictly increasing at index {index} ({prev} then {next})")]
    NonMonotone { index: usize, prev: f64, next: f64 },
    #[error("invalid scale parameters: {0}")]
    InvalidSpec(String),
    #[error("{0} is not a point of the time scale")]
    PointNotInScale(f64),
    #[error("integration range reversed: from {from} > to {to}")]
    ReversedRange { from: f64, to: f64 },
    #[error("{0} is the maximum point; the delta derivative is undefined there")]
    NotInKappa(f64),
    #[error("exponential not regressive: 1 + mu*f = 0 at t = {0}")]
    NotRegressive(f64),
    #[error("scale kind `{0}` cannot be refined")]
    NotRefinable(&'static str),
    #[error("grid function has {got} values, scale has {expected} points")]
    LengthMismatch { expected: usize, got: usize },
    #[error("grid function value at t = {t} is not finite ({value})")]
    NonFinite { t: f64, value: f64 },
    #[error("grid functions live on different time scales")]
    ScaleMismatch,
}

/// A dense uniform segment `[a, b]` split into `n` equal steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

/// Textual description of a time scale, as used in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScaleSpec {
    /// `n + 1` equally spaced points on `[a, b]` (sampling of an interval of ℝ).
    Uniform { a: f64, b: f64, n: usize },
    /// `{a, a+1, …, b}`.
    Integer { a: i64, b: i64 },
    /// `{a, a+h, …, b}`, an exact model of `hℤ ∩ [a, b]`.
    Hgrid { a: f64, b: f64, h: f64 },
    /// `{a, aq, aq², …}` with `count` points.
    Qgeometric { q: f64, a: f64, count: usize },
    Explicit { points: Vec<f64> },
    /// Union of dense uniform segments and isolated points.
    Hybrid {
        segments: Vec<Segment>,
        #[serde(default)]
        points: Vec<f64>,
    },
}

impl ScaleSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ScaleSpec::Uniform { .. } => "uniform",
            ScaleSpec::Integer { .. } => "integer",
            ScaleSpec::Hgrid { .. } => "hgrid",
            ScaleSpec::Qgeometric { .. } => "qgeometric",
            ScaleSpec::Explicit { .. } => "explicit",
            ScaleSpec::Hybrid { .. } => "hybrid",
        }
    }

    /// This scale description with every dense segment subdivided `factor` times.
    pub fn refined(&self, factor: usize) -> Result<ScaleSpec, ScaleError> {
        if factor == 0 {
            return Err(ScaleError::InvalidSpec("refinement factor must be positive".into()));
        }
        match self {
            ScaleSpec::Uniform { a, b, n } => Ok(ScaleSpec::Uniform { a: *a, b: *b, n: n * factor }),
            ScaleSpec::Hybrid { segments, points } => Ok(ScaleSpec::Hybrid {
                segments: segments
                    .iter()
                    .map(|s| Segment { a: s.a, b: s.b, n: s.n * factor })
                    .collect(),
                points: points.clone(),
            }),
            other => Err(ScaleError::NotRefinable(other.kind_name())),
        }
    }

    pub fn build(&self) -> Result<TimeScale, ScaleError> {
        TimeScale::build(self)
    }
}

impl fmt::Display for ScaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleSpec::Uniform { a, b, n } => write!(f, "uniform({a},{b},{n})"),
            ScaleSpec::Integer { a, b } => write!(f, "integer({a},{b})"),
            ScaleSpec::Hgrid { a, b, h } => write!(f, "hgrid({a},{b},{h})"),
            ScaleSpec::Qgeometric { q, a, count } => write!(f, "qgeometric({q},{a},{count})"),
            ScaleSpec::Explicit { points } => write!(f, "explicit[{}]", points.len()),
            ScaleSpec::Hybrid { segments, points } => {
                write!(f, "hybrid[")?;
                for s in segments {
                    write!(f, "({},{},{})", s.a, s.b, s.n)?;
                }
                write!(f, "+{}]", points.len())
            }
        }
    }
}

/// A finite time scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    points: Vec<f64>,
    spec: ScaleSpec,
}

fn check_finite(x: f64, what: &str) -> Result<(), ScaleError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(ScaleError::InvalidSpec(format!("{what} must be finite")))
    }
}

fn uniform_points(a: f64, b: f64, n: usize) -> Result<Vec<f64>, ScaleError> {
    check_finite(a, "a")?;
    check_finite(b, "b")?;
    if n == 0 || b <= a {
        return Err(ScaleError::InvalidSpec(format!("uniform segment needs a < b and n > 0 (a={a}, b={b}, n={n})")));
    }
    let step = (b - a) / n as f64;
    let mut pts: Vec<f64> = (0..n).map(|k| a + k as f64 * step).collect();
    pts.push(b);
    Ok(pts)
}

impl TimeScale {
    pub fn build(spec: &ScaleSpec) -> Result<TimeScale, ScaleError> {
        let points = match spec {
            ScaleSpec::Uniform { a, b, n } => uniform_points(*a, *b, *n)?,
            ScaleSpec::Integer { a, b } => {
                if b < a {
                    return Err(ScaleError::InvalidSpec(format!("integer scale needs a <= b (a={a}, b={b})")));
                }
                (*a..=*b).map(|k| k as f64).collect()
            }
            ScaleSpec::Hgrid { a, b, h } => {
                check_finite(*a, "a")?;
                check_finite(*b, "b")?;
                if !(h.is_finite() && *h > 0.0) {
                    return Err(ScaleError::InvalidSpec(format!("hgrid step must be positive, got {h}")));
                }
                let steps = (b - a) / h;
                let n = steps.round();
                if n < 0.0 || (steps - n).abs() > 1e-9 * n.max(1.0) {
                    return Err(ScaleError::InvalidSpec(format!(
                        "b - a = {} is not a nonnegative multiple of h = {h}",
                        b - a
                    )));
                }
                let n = n as usize;
                let mut pts: Vec<f64> = (0..n).map(|k| a + k as f64 * h).collect();
                pts.push(*b);
                pts
            }
            ScaleSpec::Qgeometric { q, a, count } => {
                if !(q.is_finite() && *q > 1.0 && a.is_finite() && *a > 0.0) {
                    return Err(ScaleError::InvalidSpec(format!("q-geometric scale needs q > 1 and a > 0 (q={q}, a={a})")));
                }
                (0..*count).map(|k| a * q.powi(k as i32)).collect()
            }
            ScaleSpec::Explicit { points } => {
                for &p in points {
                    check_finite(p, "explicit point")?;
                }
                points.clone()
            }
            ScaleSpec::Hybrid { segments, points } => {
                let mut all = Vec::new();
                for s in segments {
                    all.extend(uniform_points(s.a, s.b, s.n)?);
                }
                for &p in points {
                    check_finite(p, "isolated point")?;
                    all.push(p);
                }
                all.sort_by(f64::total_cmp);
                let span = all.last().copied().unwrap_or(0.0) - all.first().copied().unwrap_or(0.0);
                let tol = DUPLICATE_TOL * span.abs().max(f64::MIN_POSITIVE);
                all.dedup_by(|next, prev| (*next - *prev).abs() <= tol);
                all
            }
        };
        Self::from_points(points, spec.clone())
    }

    fn from_points(points: Vec<f64>, spec: ScaleSpec) -> Result<TimeScale, ScaleError> {
        if points.len() < 3 {
            return Err(ScaleError::EmptyScale(points.len()));
        }
        let span = points[points.len() - 1] - points[0];
        let tol = DUPLICATE_TOL * span.abs();
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1] - w[0] > tol) {
                return Err(ScaleError::NonMonotone { index: i + 1, prev: w[0], next: w[1] });
            }
        }
        Ok(TimeScale { points, spec })
    }

    pub fn integer(a: i64, b: i64) -> Result<TimeScale, ScaleError> {
        Self::build(&ScaleSpec::Integer { a, b })
    }

    pub fn hgrid(a: f64, b: f64, h: f64) -> Result<TimeScale, ScaleError> {
        Self::build(&ScaleSpec::Hgrid { a, b, h })
    }

    pub fn uniform(a: f64, b: f64, n: usize) -> Result<TimeScale, ScaleError> {
        Self::build(&ScaleSpec::Uniform { a, b, n })
    }

    pub fn explicit(points: Vec<f64>) -> Result<TimeScale, ScaleError> {
        Self::build(&ScaleSpec::Explicit { points })
    }

    pub fn spec(&self) -> &ScaleSpec {
        &self.spec
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn span(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    /// Index of the scale point nearest to `t`, if it lies within the snapping tolerance.
    pub fn index_of(&self, t: f64) -> Result<usize, ScaleError> {
        if !t.is_finite() {
            return Err(ScaleError::PointNotInScale(t));
        }
        let i = self.points.partition_point(|&p| p < t);
        let best = [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.points.len())
            .min_by(|&x, &y| (self.points[x] - t).abs().total_cmp(&(self.points[y] - t).abs()))
            .ok_or(ScaleError::PointNotInScale(t))?;
        if (self.points[best] - t).abs() <= SNAP_TOL * self.span() {
            Ok(best)
        } else {
            Err(ScaleError::PointNotInScale(t))
        }
    }

    /// Graininess at index `i`; zero at the maximum.
    pub fn mu_at(&self, i: usize) -> f64 {
        if i + 1 < self.points.len() {
            self.points[i + 1] - self.points[i]
        } else {
            0.0
        }
    }

    pub fn sigma_index(&self, i: usize) -> usize {
        (i + 1).min(self.points.len() - 1)
    }

    pub fn rho_index(&self, i: usize) -> usize {
        i.saturating_sub(1)
    }

    /// Forward jump: next point, with `σ(max) = max`.
    pub fn sigma(&self, t: f64) -> Result<f64, ScaleError> {
        Ok(self.points[self.sigma_index(self.index_of(t)?)])
    }

    /// Backward jump: previous point, with `ρ(min) = min`.
    pub fn rho(&self, t: f64) -> Result<f64, ScaleError> {
        Ok(self.points[self.rho_index(self.index_of(t)?)])
    }

    pub fn mu(&self, t: f64) -> Result<f64, ScaleError> {
        Ok(self.mu_at(self.index_of(t)?))
    }

    /// All graininess values, one per point (last is zero).
    pub fn graininess(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.mu_at(i)).collect()
    }

    pub fn refine(spec: &ScaleSpec, factor: usize) -> Result<TimeScale, ScaleError> {
        spec.refined(factor)?.build()
    }
}

impl fmt::Display for TimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec)
    }
}

/// Real values sampled at every point of a time scale.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    scale: Arc<TimeScale>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(scale: Arc<TimeScale>, values: Vec<f64>) -> Result<GridFunction, ScaleError> {
        if values.len() != scale.len() {
            return Err(ScaleError::LengthMismatch { expected: scale.len(), got: values.len() });
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(ScaleError::NonFinite { t: scale.point(i), value: v });
        }
        Ok(GridFunction { scale, values })
    }

    pub fn from_fn(scale: Arc<TimeScale>, f: impl Fn(f64) -> f64) -> Result<GridFunction, ScaleError> {
        let values = scale.points().iter().map(|&t| f(t)).collect();
        Self::new(scale, values)
    }

    pub fn constant(scale: Arc<TimeScale>, c: f64) -> Result<GridFunction, ScaleError> {
        Self::from_fn(scale, |_| c)
    }

    pub fn scale(&self) -> &Arc<TimeScale> {
        &self.scale
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn value(&self, t: f64) -> Result<f64, ScaleError> {
        Ok(self.values[self.scale.index_of(t)?])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction, ScaleError> {
        Self::new(self.scale.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn same_scale(&self, other: &GridFunction) -> bool {
        Arc::ptr_eq(&self.scale, &other.scale) || self.scale.points() == other.scale.points()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// `∫_from^to gf Δτ = Σ_{τ ∈ [from, to)} μ(τ) gf(τ)`.
    pub fn delta_integral(&self, from: f64, to: f64) -> Result<f64, ScaleError> {
        let i = self.scale.index_of(from)?;
        let j = self.scale.index_of(to)?;
        if i > j {
            return Err(ScaleError::ReversedRange { from, to });
        }
        Ok(self.integral_between(i, j))
    }

    /// Delta integral between two point indices, `i <= j`.
    pub fn integral_between(&self, i: usize, j: usize) -> f64 {
        (i..j).map(|k| self.scale.mu_at(k) * self.values[k]).sum()
    }

    /// Prefix integrals `F(t_i) = ∫_a^{t_i} gf Δτ` for every point.
    pub fn antiderivative(&self) -> GridFunction {
        let mut acc = 0.0;
        let values = (0..self.values.len())
            .map(|i| {
                let cur = acc;
                acc += self.scale.mu_at(i) * self.values[i];
                cur
            })
            .collect();
        GridFunction { scale: self.scale.clone(), values }
    }

    pub fn delta_derivative(&self, t: f64) -> Result<f64, ScaleError> {
        let i = self.scale.index_of(t)?;
        self.derivative_at(i)
    }

    pub fn derivative_at(&self, i: usize) -> Result<f64, ScaleError> {
        if i + 1 >= self.values.len() {
            return Err(ScaleError::NotInKappa(self.scale.point(i)));
        }
        Ok((self.values[i + 1] - self.values[i]) / self.scale.mu_at(i))
    }

    /// Time-scale exponential `e_f(t, s)`, with `f` this grid function.
    pub fn ts_exponential(&self, t: f64, s: f64) -> Result<f64, ScaleError> {
        let ti = self.scale.index_of(t)?;
        let si = self.scale.index_of(s)?;
        self.exponential_between(ti, si)
    }

    /// `e_f(t_i, t_j)`: product of `1 + μ f` over `[t_j, t_i)`, reciprocal when `j > i`.
    pub fn exponential_between(&self, i: usize, j: usize) -> Result<f64, ScaleError> {
        let (lo, hi) = if j <= i { (j, i) } else { (i, j) };
        let mut prod = 1.0;
        for k in lo..hi {
            let factor = 1.0 + self.scale.mu_at(k) * self.values[k];
            if factor == 0.0 {
                return Err(ScaleError::NotRegressive(self.scale.point(k)));
            }
            prod *= factor;
        }
        Ok(if j <= i { prod } else { 1.0 / prod })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(ts: TimeScale) -> Arc<TimeScale> {
        Arc::new(ts)
    }

    #[test]
    fn integer_and_hgrid_points() {
        assert_eq!(TimeScale::integer(0, 5).unwrap().points(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(TimeScale::hgrid(0.0, 1.0, 0.25).unwrap().points(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let u = TimeScale::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(u.len(), 5);
    }

    #[test]
    fn explicit_duplicate_rejected() {
        let err = TimeScale::explicit(vec![0.0, 1.0, 1.0, 2.0]).unwrap_err();
        assert!(matches!(err, ScaleError::NonMonotone { index: 2, .. }));
        assert!(matches!(TimeScale::explicit(vec![0.0, 1.0]), Err(ScaleError::EmptyScale(2))));
        assert!(matches!(TimeScale::integer(0, 1), Err(ScaleError::EmptyScale(2))));
    }

    #[test]
    fn hgrid_requires_multiple_of_step() {
        assert!(TimeScale::hgrid(0.0, 1.0, 0.3).is_err());
        assert!(TimeScale::hgrid(0.0, 1.0, 0.1).is_ok());
    }

    #[test]
    fn jump_operators() {
        let z = TimeScale::integer(0, 5).unwrap();
        assert_eq!(z.sigma(2.0).unwrap(), 3.0);
        assert_eq!(z.mu(2.0).unwrap(), 1.0);
        assert_eq!(z.sigma(5.0).unwrap(), 5.0);
        assert_eq!(z.mu(5.0).unwrap(), 0.0);
        assert_eq!(z.rho(0.0).unwrap(), 0.0);
        let h = TimeScale::hgrid(0.0, 1.0, 0.25).unwrap();
        assert_eq!(h.rho(1.0).unwrap(), 0.75);
        assert!(matches!(z.sigma(2.5), Err(ScaleError::PointNotInScale(_))));
        // snapping within tolerance
        assert_eq!(z.sigma(2.0 + 1e-12).unwrap(), 3.0);
    }

    #[test]
    fn integrals_on_integers() {
        let z = arc(TimeScale::integer(0, 5).unwrap());
        let one = GridFunction::constant(z.clone(), 1.0).unwrap();
        assert_eq!(one.delta_integral(0.0, 5.0).unwrap(), 5.0);
        assert_eq!(one.delta_integral(3.0, 3.0).unwrap(), 0.0);
        assert!(matches!(one.delta_integral(4.0, 1.0), Err(ScaleError::ReversedRange { .. })));
        let z4 = arc(TimeScale::integer(0, 4).unwrap());
        let id = GridFunction::from_fn(z4, |t| t).unwrap();
        assert_eq!(id.delta_integral(0.0, 4.0).unwrap(), 6.0);
    }

    #[test]
    fn constant_integral_on_hgrid_is_span() {
        for h in [0.5, 0.25, 0.1] {
            let s = arc(TimeScale::hgrid(0.0, 1.0, h).unwrap());
            let c = GridFunction::constant(s, 3.5).unwrap();
            assert!((c.delta_integral(0.0, 1.0).unwrap() - 3.5).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives() {
        let z = arc(TimeScale::integer(0, 5).unwrap());
        let sq = GridFunction::from_fn(z.clone(), |t| t * t).unwrap();
        assert_eq!(sq.delta_derivative(2.0).unwrap(), 5.0);
        assert!(matches!(sq.delta_derivative(5.0), Err(ScaleError::NotInKappa(_))));
        let q = arc(ScaleSpec::Qgeometric { q: 1.5, a: 1.0, count: 6 }.build().unwrap());
        let id = GridFunction::from_fn(q.clone(), |t| t).unwrap();
        let c = GridFunction::constant(q.clone(), 2.0).unwrap();
        for i in 0..q.len() - 1 {
            assert!((id.derivative_at(i).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(c.derivative_at(i).unwrap(), 0.0);
        }
    }

    #[test]
    fn exponential_values() {
        let z = arc(TimeScale::integer(0, 5).unwrap());
        let one = GridFunction::constant(z, 1.0).unwrap();
        assert_eq!(one.ts_exponential(5.0, 0.0).unwrap(), 32.0);
        assert_eq!(one.ts_exponential(3.0, 3.0).unwrap(), 1.0);
        assert_eq!(one.ts_exponential(0.0, 2.0).unwrap(), 0.25);
        let neg = GridFunction::from_fn(one.scale().clone(), |t| if t == 2.0 { -1.0 } else { 0.5 }).unwrap();
        assert!(matches!(neg.ts_exponential(4.0, 0.0), Err(ScaleError::NotRegressive(t)) if t == 2.0));
    }

    #[test]
    fn exponential_continuum_limit() {
        for n in [10usize, 100, 1000] {
            let s = arc(TimeScale::uniform(0.0, 1.0, n).unwrap());
            let one = GridFunction::constant(s, 1.0).unwrap();
            let e1 = one.ts_exponential(1.0, 0.0).unwrap();
            let oracle = (1.0 + 1.0 / n as f64).powi(n as i32);
            assert!((e1 - oracle).abs() < 1e-12 * oracle);
            assert!((std::f64::consts::E - e1).abs() < 2.0 / n as f64);
        }
    }

    #[test]
    fn refinement() {
        let u = ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 10 };
        assert_eq!(u.refined(2).unwrap(), ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 20 });
        let h = ScaleSpec::Hgrid { a: 0.0, b: 1.0, h: 0.25 };
        assert!(matches!(TimeScale::refine(&h, 2), Err(ScaleError::NotRefinable("hgrid"))));
        assert!(matches!(TimeScale::refine(&ScaleSpec::Integer { a: 0, b: 4 }, 2), Err(ScaleError::NotRefinable(_))));
        let hy = ScaleSpec::Hybrid { segments: vec![Segment { a: 0.0, b: 1.0, n: 10 }], points: vec![2.0, 3.0] };
        let coarse = hy.build().unwrap();
        assert_eq!(coarse.len(), 13);
        let fine = TimeScale::refine(&hy, 3).unwrap();
        assert_eq!(fine.len(), 33);
        assert_eq!(&fine.points()[31..], &[2.0, 3.0]);
    }

    #[test]
    fn hybrid_merges_shared_endpoints() {
        let hy = ScaleSpec::Hybrid {
            segments: vec![Segment { a: 0.0, b: 1.0, n: 2 }, Segment { a: 1.0, b: 2.0, n: 2 }],
            points: vec![],
        };
        assert_eq!(hy.build().unwrap().points(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn scale_spec_json_forms() {
        let s: ScaleSpec = serde_json::from_str(r#"{"kind":"integer","a":0,"b":10}"#).unwrap();
        assert_eq!(s, ScaleSpec::Integer { a: 0, b: 10 });
        let s: ScaleSpec = serde_json::from_str(r#"{"kind":"hgrid","a":0,"b":1,"h":0.25}"#).unwrap();
        assert_eq!(s.build().unwrap().len(), 5);
        let s: ScaleSpec = serde_json::from_str(r#"{"kind":"qgeometric","q":1.5,"a":1,"count":20}"#).unwrap();
        assert_eq!(s.build().unwrap().len(), 20);
        assert!(serde_json::from_str::<ScaleSpec>(r#"{"kind":"integer","a":0,"b":10,"c":1}"#).is_err());
    }

    #[test]
    fn grid_function_rejects_nan() {
        let z = arc(TimeScale::integer(0, 3).unwrap());
        assert!(matches!(GridFunction::new(z.clone(), vec![0.0, f64::NAN, 1.0, 2.0]), Err(ScaleError::NonFinite { .. })));
        assert!(matches!(GridFunction::new(z, vec![0.0]), Err(ScaleError::LengthMismatch { .. })));
    }
}
