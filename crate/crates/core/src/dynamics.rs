//! Integro-dynamic initial value problem
//! `u^Δ(t) = F(t, u(t), ∫_a^t K(t, u(s)) Δs)`, `u(a) = u_a`,
//! and its a-priori estimate through the separable Gronwall bound.
//!
//! On a finite scale the equation is a recursion, so [`solve_ivp`] is exact.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{bound_thm2, BoundReport, BoundsError, FnSource, ProblemSpec, Theorem};
use crate::expr::{Env, EvalFault, Expr, ParseError, ScalarMap, Signature};
use crate::timescale::{GridFunction, ScaleError, ScaleSpec, TimeScale};

/// Trajectories beyond this magnitude are reported as overflow.
pub const OVERFLOW: f64 = 1e150;

/// Relative slack for the along-trajectory envelope checks.
const ENVELOPE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error("cannot parse `{field}`: {source}")]
    Parse {
        field: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("evaluation of {what} failed at t = {t}: {fault}")]
    Eval { what: &'static str, t: f64, fault: EvalFault },
    #[error("solution overflowed at t = {t} (|u| = {value})")]
    Overflow { t: f64, value: f64 },
    #[error("envelope condition `{condition}` violated at t = {t}: {lhs} > {rhs}")]
    EnvelopeViolated { condition: &'static str, t: f64, lhs: f64, rhs: f64 },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Serializable description of the problem and of the envelope used for the estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IvpSpec {
    pub scale: ScaleSpec,
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "K")]
    pub k: String,
    pub u_a: f64,
    /// envelope `|K(t, u)| ≤ h(t) Φ(|u|)`
    #[serde(default = "default_h")]
    pub h: FnSource,
    #[serde(rename = "Phi", default = "default_phi")]
    pub phi: String,
}

fn default_h() -> FnSource {
    "1".into()
}

fn default_phi() -> String {
    "x".into()
}

impl IvpSpec {
    pub fn new(scale: ScaleSpec, f: &str, k: &str, u_a: f64) -> IvpSpec {
        IvpSpec { scale, f: f.into(), k: k.into(), u_a, h: default_h(), phi: default_phi() }
    }
}

struct Compiled {
    scale: Arc<TimeScale>,
    f: Expr,
    k: Expr,
}

fn compile(spec: &IvpSpec) -> Result<Compiled, DynamicsError> {
    Ok(Compiled {
        scale: Arc::new(spec.scale.build()?),
        f: Expr::parse_for(&spec.f, Signature::IvpRhs).map_err(|source| DynamicsError::Parse { field: "F", source })?,
        k: Expr::parse_for(&spec.k, Signature::IvpKernel).map_err(|source| DynamicsError::Parse { field: "K", source })?,
    })
}

impl Compiled {
    fn k(&self, i: usize, u: f64) -> Result<f64, DynamicsError> {
        let t = self.scale.point(i);
        self.k.eval(&Env::tuv(t, u, 0.0)).map_err(|fault| DynamicsError::Eval { what: "K", t, fault })
    }

    fn f(&self, i: usize, u: f64, v: f64) -> Result<f64, DynamicsError> {
        let t = self.scale.point(i);
        self.f.eval(&Env::tuv(t, u, v)).map_err(|fault| DynamicsError::Eval { what: "F", t, fault })
    }

    /// `V(t_i) = Σ_{j<i} μ_j K(t_i, u_j)`.
    fn memory(&self, i: usize, u: &[f64]) -> Result<f64, DynamicsError> {
        let mut v = 0.0;
        for (j, &uj) in u.iter().enumerate().take(i) {
            v += self.scale.mu_at(j) * self.k(i, uj)?;
        }
        Ok(v)
    }
}

/// Forward recursion `u(σ(t)) = u(t) + μ(t) F(t, u(t), V(t))`.
pub fn solve_ivp(spec: &IvpSpec) -> Result<GridFunction, DynamicsError> {
    let c = compile(spec)?;
    let n = c.scale.len();
    let mut u = Vec::with_capacity(n);
    u.push(spec.u_a);
    for i in 0..n - 1 {
        let v = c.memory(i, &u)?;
        let next = u[i] + c.scale.mu_at(i) * c.f(i, u[i], v)?;
        if !(next.abs() <= OVERFLOW) {
            return Err(DynamicsError::Overflow { t: c.scale.point(i + 1), value: next.abs() });
        }
        u.push(next);
    }
    Ok(GridFunction::new(c.scale, u)?)
}

/// `max_t |u(t) − u_a − ∫_a^t F(s, u(s), ∫_a^s K(s, u(τ)) Δτ) Δs|`, recomputed from scratch.
pub fn integral_residual(spec: &IvpSpec, u: &GridFunction) -> Result<f64, DynamicsError> {
    let c = compile(spec)?;
    let uv = u.values();
    let mut worst: f64 = 0.0;
    for i in 0..uv.len() {
        let mut rhs = spec.u_a;
        for s in 0..i {
            let mut v = 0.0;
            for tau in 0..s {
                v += c.scale.mu_at(tau) * c.k(s, uv[tau])?;
            }
            rhs += c.scale.mu_at(s) * c.f(s, uv[s], v)?;
        }
        worst = worst.max((uv[i] - rhs).abs());
    }
    Ok(worst)
}

/// Checks `|K(t, u(s))| ≤ h(t) Φ(|u(s)|)` for `s ≤ t` and `|F(t, u, V)| ≤ |u| + |V|` along `u`.
pub fn check_envelope(spec: &IvpSpec, u: &GridFunction) -> Result<(), DynamicsError> {
    let c = compile(spec)?;
    let h = spec.h.sample("h", &c.scale)?;
    let phi = ScalarMap::parse(&spec.phi).map_err(|source| DynamicsError::Parse { field: "Phi", source })?;
    let uv = u.values();
    for i in 0..uv.len() {
        let t = c.scale.point(i);
        for &uj in &uv[..=i] {
            let lhs = c.k(i, uj)?.abs();
            let rhs = h.at(i) * phi.eval(uj.abs()).map_err(|fault| DynamicsError::Eval { what: "Phi", t, fault })?;
            if lhs > rhs + ENVELOPE_TOL * rhs.abs().max(lhs) {
                return Err(DynamicsError::EnvelopeViolated { condition: "|K(t,u)| <= h(t) Phi(|u|)", t, lhs, rhs });
            }
        }
        let v = c.memory(i, uv)?;
        let lhs = c.f(i, uv[i], v)?.abs();
        let rhs = uv[i].abs() + v.abs();
        if lhs > rhs + ENVELOPE_TOL * rhs.max(lhs) {
            return Err(DynamicsError::EnvelopeViolated { condition: "|F(t,u,v)| <= |u| + |v|", t, lhs, rhs });
        }
    }
    Ok(())
}

/// The estimate for `|u∗|`: the separable bound with `a = |u_a|`, `f = b = 1`, `W = id`.
pub fn application_bound(spec: &IvpSpec, x0: f64) -> Result<BoundReport, DynamicsError> {
    let mut p = ProblemSpec::new(Theorem::Thm2, spec.scale.clone());
    p.a = FnSource::Values(vec![spec.u_a.abs(); spec.scale.build()?.len()]);
    p.f = "1".into();
    p.h = Some(spec.h.clone());
    p.b = Some("1".into());
    p.phi = spec.phi.clone();
    p.w = "x".into();
    p.x0 = x0;
    Ok(bound_thm2(&p.build()?)?)
}

#[derive(Debug, Clone)]
pub struct ApplicationReport {
    pub u: GridFunction,
    pub bound: BoundReport,
    /// `bound(t) − |u∗(t)|` at in-domain points
    pub margins: Vec<Option<f64>>,
    pub residual: f64,
    pub pass: bool,
}

impl ApplicationReport {
    pub fn worst_margin(&self) -> Option<f64> {
        self.margins.iter().flatten().copied().reduce(f64::min)
    }
}

/// Solve, check the envelope along the trajectory, and compare against the estimate.
pub fn verify_application(spec: &IvpSpec, x0: f64) -> Result<ApplicationReport, DynamicsError> {
    let u = solve_ivp(spec)?;
    let residual = integral_residual(spec, &u)?;
    check_envelope(spec, &u)?;
    let bound = application_bound(spec, x0)?;
    let mut pass = true;
    let margins = bound
        .points
        .iter()
        .zip(u.values())
        .map(|(p, &ui)| {
            p.bound.map(|b| {
                let m = b - ui.abs();
                if m < -1e-9 * b.abs() {
                    pass = false;
                }
                m
            })
        })
        .collect();
    Ok(ApplicationReport { u, bound, margins, residual, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rhs_is_constant() {
        let u = solve_ivp(&IvpSpec::new(ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 10 }, "0", "u", 2.5)).unwrap();
        assert!(u.values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn linear_growth_is_powers_of_two() {
        let u = solve_ivp(&IvpSpec::new(ScaleSpec::Integer { a: 0, b: 8 }, "u", "0", 1.0)).unwrap();
        for (t, &v) in u.values().iter().enumerate() {
            assert_eq!(v, 2f64.powi(t as i32));
        }
    }

    #[test]
    fn memory_driven_recursion() {
        // u1 = u0 + V0 = 1, u2 = u1 + (u0) = 2, u3 = u2 + (u0 + u1) = 4
        let u = solve_ivp(&IvpSpec::new(ScaleSpec::Integer { a: 0, b: 3 }, "v", "u", 1.0)).unwrap();
        assert_eq!(u.values(), &[1.0, 1.0, 2.0, 4.0]);
    }

    #[test]
    fn overflow_is_reported() {
        let r = solve_ivp(&IvpSpec::new(ScaleSpec::Integer { a: 0, b: 40 }, "u*u", "0", 10.0));
        assert!(matches!(r, Err(DynamicsError::Overflow { .. })));
    }

    #[test]
    fn zero_envelope_gives_exponential() {
        let mut spec = IvpSpec::new(ScaleSpec::Integer { a: 0, b: 6 }, "u", "0", -3.0);
        spec.h = "0".into();
        let r = application_bound(&spec, 1.0).unwrap();
        for (t, p) in r.points.iter().enumerate() {
            assert_eq!(p.bound.unwrap(), 3.0 * 2f64.powi(t as i32));
        }
    }

    #[test]
    fn zero_initial_value_is_rejected() {
        let spec = IvpSpec::new(ScaleSpec::Integer { a: 0, b: 4 }, "u", "u", 0.0);
        assert!(matches!(application_bound(&spec, 1.0), Err(DynamicsError::Bounds(BoundsError::Hypothesis(_)))));
    }

    #[test]
    fn quadratic_rhs_breaks_envelope() {
        let spec = IvpSpec::new(ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 20 }, "u*u", "u", 2.0);
        assert!(matches!(verify_application(&spec, 1.0), Err(DynamicsError::EnvelopeViolated { .. })));
    }

    #[test]
    fn stress_instance_is_dominated() {
        let spec = IvpSpec::new(ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 50 }, "u+v", "abs(u)*u/abs(u)", 1.0);
        let r = verify_application(&spec, 1.0).unwrap();
        assert!(r.pass);
        assert!(r.residual <= 1e-12 * r.u.values().iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = IvpSpec::new(ScaleSpec::Integer { a: 0, b: 5 }, "(u+v)/2", "u", 1.0);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"F\"") && text.contains("\"Phi\""));
        assert_eq!(serde_json::from_str::<IvpSpec>(&text).unwrap(), spec);
    }
}
