//! Closed-form summation versions of the bounds on `ℤ` and `hℤ`.
//!
//! Everything here is written with explicit index loops and the literal
//! step `h`, never through [`GridFunction::delta_integral`] or the
//! generic engine, so the two can be compared as independent routes.
//!
//! [`GridFunction::delta_integral`]: crate::timescale::GridFunction::delta_integral

use super::engine::{BoundPoint, BoundReport};
use super::instance::ProblemInstance;
use super::transform::{MonotoneTransform, TransformError};
use super::BoundsError;
use crate::expr::{Env, ScalarMap};
use crate::timescale::ScaleSpec;

fn phi(m: &ScalarMap, x: f64) -> Result<f64, BoundsError> {
    m.eval(x).map_err(|fault| BoundsError::Eval { context: format!("{}({x})", m.source()), fault })
}

/// Bound of the instance's theorem on `T = ℤ`, by the corollary sums.
pub fn bound_corollary_z(inst: &ProblemInstance) -> Result<BoundReport, BoundsError> {
    match inst.scale().spec() {
        ScaleSpec::Integer { a, .. } => discrete_bound(inst, *a as f64, 1.0),
        other => Err(BoundsError::WrongScaleKind { expected: "integer", got: other.kind_name() }),
    }
}

/// Bound of the instance's theorem on `T = hℤ`, by the corollary sums.
pub fn bound_corollary_hz(inst: &ProblemInstance) -> Result<BoundReport, BoundsError> {
    match inst.scale().spec() {
        ScaleSpec::Hgrid { a, h, .. } => discrete_bound(inst, *a, *h),
        other => Err(BoundsError::WrongScaleKind { expected: "hgrid", got: other.kind_name() }),
    }
}

fn discrete_bound(inst: &ProblemInstance, start: f64, h: f64) -> Result<BoundReport, BoundsError> {
    let theorem = inst.theorem();
    let n = inst.scale().len();
    let a = inst.a().values();
    let f = inst.f().values();
    let (weight, bvals): (Vec<f64>, Option<&[f64]>) = if theorem.separable() {
        let hv = inst.h().ok_or(BoundsError::MissingField("h"))?.values();
        let bv = inst.b().ok_or(BoundsError::MissingField("b"))?.values();
        ((0..n).map(|k| f[k] * hv[k]).collect(), Some(bv))
    } else {
        (f.to_vec(), None)
    };
    let kernel = |s: usize, tau: usize| -> Result<f64, BoundsError> {
        match bvals {
            Some(b) => Ok(b[tau]),
            None => {
                let k = inst.kernel().ok_or(BoundsError::MissingField("k"))?;
                let (ts, tt) = (start + s as f64 * h, start + tau as f64 * h);
                k.expr()
                    .eval(&Env::ts(ts, tt))
                    .map_err(|fault| BoundsError::Eval { context: format!("k({ts}, {tt})"), fault })
            }
        }
    };

    // multiplier: p(t) = 1 + Σ_{s<t} f(s) e_f(t, s+h) h, or q(t) = G⁻¹(G(1) + Σ_{τ<t} f(τ) h)
    let mut mult: Vec<Option<f64>> = Vec::with_capacity(n);
    if theorem.uses_g() {
        let g = inst.g().ok_or(BoundsError::MissingField("g"))?;
        let gt = MonotoneTransform::g(g, inst.delta0())?;
        let g1 = gt.value(1.0)?;
        for t in 0..n {
            let mut sum = 0.0;
            for tau in 0..t {
                sum += f[tau] * h;
            }
            mult.push(match gt.inverse_from(1.0, g1, g1 + sum) {
                Ok(q) => Some(q),
                Err(TransformError::DomainExceeded { .. }) => None,
                Err(e) => return Err(e.into()),
            });
        }
    } else {
        for t in 0..n {
            let mut sum = 0.0;
            for s in 0..t {
                let mut e = 1.0;
                for m in s + 1..t {
                    e *= 1.0 + f[m] * h;
                }
                sum += f[s] * e * h;
            }
            mult.push(Some(1.0 + sum));
        }
    }
    let base: Vec<f64> = if theorem.uses_g() { a.iter().map(|&v| v.max(1.0)).collect() } else { a.to_vec() };

    // the constant: Σ_{s ∈ [a, b-2h]} k(b-h, s) Φ(m(s) base(s)) h
    let last = n - 2;
    let mut constant = 0.0;
    for s in 0..last {
        let m = mult[s].ok_or_else(|| BoundsError::Hypothesis("multiplier undefined below ρ(b)".into()))?;
        constant += kernel(last, s)? * phi(inst.phi(), m * base[s])? * h;
    }
    if !(constant > 0.0) {
        return Err(BoundsError::NonpositiveZeta { name: theorem.constant_name(), value: constant });
    }

    let psi = MonotoneTransform::psi(inst.phi(), inst.w(), inst.x0())?;
    let psi_c = psi.value(constant)?;

    // W(Ψ⁻¹(Ψ(C) + Σ_{τ<s} k(s,τ) Φ(m(τ)) Φ(Σ_{θ<τ} w(θ) h) h)) for s <= ρ(b)
    let mut w_terms: Vec<Option<f64>> = Vec::with_capacity(n - 1);
    for s in 0..n - 1 {
        let mut inner = 0.0;
        let mut defined = true;
        for tau in 0..s {
            let mut wsum = 0.0;
            for theta in 0..tau {
                wsum += weight[theta] * h;
            }
            let Some(m) = mult[tau] else {
                defined = false;
                break;
            };
            inner += kernel(s, tau)? * phi(inst.phi(), m)? * phi(inst.phi(), wsum)? * h;
        }
        if !defined {
            w_terms.push(None);
            continue;
        }
        w_terms.push(match psi.inverse_from(constant, psi_c, psi_c + inner) {
            Ok(r) => inst.w().eval(r).ok(),
            Err(TransformError::DomainExceeded { .. }) => None,
            Err(e) => return Err(e.into()),
        });
    }

    let mut points = Vec::with_capacity(n);
    for t in 0..n {
        let mut outer = Some(0.0);
        for s in 0..t {
            outer = match (outer, w_terms[s]) {
                (Some(acc), Some(w)) => Some(acc + weight[s] * w * h),
                _ => None,
            };
        }
        let bound = match (mult[t], outer) {
            (Some(m), Some(o)) => Some(m * (base[t] + o)).filter(|b| b.is_finite()),
            _ => None,
        };
        let psi_condition = t == 0 || w_terms[t - 1].is_some();
        points.push(BoundPoint {
            t: inst.scale().point(t),
            bound,
            in_domain: bound.is_some(),
            psi_condition,
            g_condition: mult[t].is_some(),
        });
    }
    Ok(BoundReport {
        theorem,
        constant_name: theorem.constant_name(),
        constant,
        multiplier: mult,
        psi_limit: None,
        points,
    })
}
