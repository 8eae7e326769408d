//! The comparison functional behind every bound:
//! `G(r(t)) ≤ G(r(a)) + ∫_a^t r^Δ(τ) / g(r(τ)) Δτ` for positive
//! nondecreasing `r` and positive nondecreasing `g`.

use super::transform::MonotoneTransform;
use super::BoundsError;
use crate::expr::{Property, ScalarMap};
use crate::timescale::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaPoint {
    pub t: f64,
    /// `G(r(t))`
    pub lhs: f64,
    /// `G(r(a)) + ∫_a^t r^Δ / g(r) Δτ`
    pub rhs: f64,
}

impl LemmaPoint {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Both sides of the comparison inequality at every point, the endpoint included.
pub fn lemma1_check(r: &GridFunction, g: &ScalarMap, x0: f64) -> Result<Vec<LemmaPoint>, BoundsError> {
    if let Some(i) = r.values().iter().position(|&v| !(v > 0.0)) {
        return Err(BoundsError::Hypothesis(format!("r must be positive, r({}) = {}", r.scale().point(i), r.at(i))));
    }
    if !r.is_nondecreasing() {
        return Err(BoundsError::Hypothesis("r must be nondecreasing".into()));
    }
    let g = if g.certificates().is_some() {
        g.clone()
    } else {
        let hi = 10.0 * r.values().iter().fold(1.0f64, |m, &v| m.max(v));
        g.clone().certified(hi, 1000, 0)?
    };
    if let Some(c) = g.certificates().and_then(|c| c.first_failure(&[Property::Nondecreasing, Property::PositiveOnPositive])) {
        return Err(BoundsError::CertificateFailed { map: "g", certificate: Box::new(c.clone()) });
    }
    let transform = MonotoneTransform::g(&g, x0)?;
    let scale = r.scale();
    let g_at = |x: f64| {
        g.eval(x).map_err(|fault| BoundsError::Eval { context: format!("g({x})"), fault })
    };

    let mut out = Vec::with_capacity(r.values().len());
    let mut lhs = transform.value(r.at(0))?;
    let mut rhs = lhs;
    for i in 0..r.values().len() {
        if i > 0 {
            lhs += transform.integrate(r.at(i - 1), r.at(i))?;
            rhs += scale.mu_at(i - 1) * r.derivative_at(i - 1)? / g_at(r.at(i - 1))?;
        }
        out.push(LemmaPoint { t: scale.point(i), lhs, rhs });
    }
    Ok(out)
}
