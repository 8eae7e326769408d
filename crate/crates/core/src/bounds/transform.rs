//! The monotone transforms `Ψ(x) = ∫_{x0}^x ds / Φ(W(s))` and
//! `G(x) = ∫_δ^x ds / g(s)`, and their inverses.
//!
//! Values come from adaptive Simpson quadrature. Inverses bracket by
//! doubling from an anchor and then bisect. A transform whose range has a
//! finite supremum (the Bihari blow-up case) reports
//! [`TransformError::DomainExceeded`] for targets beyond it.

use thiserror::Error;

use crate::expr::{EvalFault, ScalarMap};

/// Relative tolerance of the quadrature.
pub const QUAD_TOL: f64 = 1e-12;
/// Maximum bisection depth of the adaptive quadrature.
pub const QUAD_MAX_DEPTH: u32 = 60;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    /// `bound` is the last transform value reached before the probe stalled.
    #[error("target {target} lies {side:?} the numerically detected range (limit ~ {bound})")]
    DomainExceeded { target: f64, bound: f64, side: Side },
    #[error("transform argument must be positive, got {0}")]
    NonpositiveInput(f64),
    #[error("integrand fault at s = {at}: {reason}")]
    IntegrandFault { at: f64, reason: String },
}

/// Parameters of the range-supremum probe used while bracketing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeProbe {
    /// Growth per doubling below which a step counts as stalled.
    pub stall_increment: f64,
    /// Consecutive stalled doublings that declare the range exhausted.
    pub stall_count: usize,
    pub max_x: f64,
    pub min_x: f64,
}

impl Default for RangeProbe {
    fn default() -> Self {
        RangeProbe { stall_increment: 1e-13, stall_count: 8, max_x: 1e300, min_x: 1e-300 }
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` with relative tolerance `tol`.
pub fn adaptive_simpson<E>(f: &impl Fn(f64) -> Result<f64, E>, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64, E> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let eps = (tol * whole.abs()).max(f64::MIN_POSITIVE);
    simpson_step(f, a, b, fa, fm, fb, whole, eps, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<E>(
    f: &impl Fn(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64, E> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps || m <= a || m >= b {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?)
}

#[derive(Debug, Clone)]
enum Integrand {
    /// `1 / Φ(W(s))`
    Composite { phi: ScalarMap, w: ScalarMap },
    /// `1 / g(s)`
    Reciprocal(ScalarMap),
}

/// A strictly increasing transform `x ↦ ∫_base^x ds / h(s)` with `h > 0`.
#[derive(Debug, Clone)]
pub struct MonotoneTransform {
    integrand: Integrand,
    base: f64,
    probe: RangeProbe,
}

fn fault(at: f64, e: EvalFault) -> TransformError {
    TransformError::IntegrandFault { at, reason: e.to_string() }
}

impl MonotoneTransform {
    /// `Ψ` with base point `x0`.
    pub fn psi(phi: &ScalarMap, w: &ScalarMap, x0: f64) -> Result<MonotoneTransform, TransformError> {
        Self::with_integrand(Integrand::Composite { phi: phi.clone(), w: w.clone() }, x0)
    }

    /// `G` with base point `δ`.
    pub fn g(g: &ScalarMap, delta: f64) -> Result<MonotoneTransform, TransformError> {
        Self::with_integrand(Integrand::Reciprocal(g.clone()), delta)
    }

    fn with_integrand(integrand: Integrand, base: f64) -> Result<MonotoneTransform, TransformError> {
        if !(base > 0.0 && base.is_finite()) {
            return Err(TransformError::NonpositiveInput(base));
        }
        Ok(MonotoneTransform { integrand, base, probe: RangeProbe::default() })
    }

    pub fn with_probe(mut self, probe: RangeProbe) -> MonotoneTransform {
        self.probe = probe;
        self
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// The integrand `1 / h(s)`, which is also the derivative of the transform.
    pub fn integrand(&self, s: f64) -> Result<f64, TransformError> {
        let h = match &self.integrand {
            Integrand::Composite { phi, w } => {
                let ws = w.eval(s).map_err(|e| fault(s, e))?;
                phi.eval(ws).map_err(|e| fault(s, e))?
            }
            Integrand::Reciprocal(g) => g.eval(s).map_err(|e| fault(s, e))?,
        };
        if h > 0.0 && h.is_finite() {
            Ok(1.0 / h)
        } else {
            Err(TransformError::IntegrandFault { at: s, reason: format!("denominator {h} is not positive") })
        }
    }

    /// `∫_lo^hi` of the integrand, split at doublings so each quadrature
    /// piece spans at most a factor of two.
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64, TransformError> {
        for x in [lo, hi] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(TransformError::NonpositiveInput(x));
            }
        }
        if hi < lo {
            return Ok(-self.integrate(hi, lo)?);
        }
        let f = |s: f64| self.integrand(s);
        let mut total = 0.0;
        let mut a = lo;
        while a < hi {
            let b = (2.0 * a).min(hi);
            total += adaptive_simpson(&f, a, b, QUAD_TOL, QUAD_MAX_DEPTH)?;
            a = b;
        }
        Ok(total)
    }

    pub fn value(&self, x: f64) -> Result<f64, TransformError> {
        self.integrate(self.base, x)
    }

    /// Inverse transform, bracketing from the base point.
    pub fn inverse(&self, y: f64) -> Result<f64, TransformError> {
        self.inverse_from(self.base, 0.0, y)
    }

    /// Inverse transform, bracketing from a known pair `(x, value(x))`.
    pub fn inverse_from(&self, anchor_x: f64, anchor_value: f64, y: f64) -> Result<f64, TransformError> {
        if !(anchor_x > 0.0 && anchor_x.is_finite()) {
            return Err(TransformError::NonpositiveInput(anchor_x));
        }
        if !y.is_finite() {
            return Err(TransformError::DomainExceeded {
                target: y,
                bound: anchor_value,
                side: if y > 0.0 { Side::Above } else { Side::Below },
            });
        }
        if y == anchor_value {
            return Ok(anchor_x);
        }
        let (mut lo, mut hi) = if y > anchor_value {
            self.bracket_up(anchor_x, anchor_value, y)?
        } else {
            self.bracket_down(anchor_x, anchor_value, y)?
        };
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo.0 + hi.0);
            if mid <= lo.0 || mid >= hi.0 {
                break;
            }
            let mv = lo.1 + self.integrate(lo.0, mid)?;
            if mv < y {
                lo = (mid, mv);
            } else {
                hi = (mid, mv);
            }
        }
        let span = hi.1 - lo.1;
        if span > 0.0 {
            Ok(lo.0 + (hi.0 - lo.0) * ((y - lo.1) / span).clamp(0.0, 1.0))
        } else {
            Ok(0.5 * (lo.0 + hi.0))
        }
    }

    fn bracket_up(&self, x: f64, v: f64, y: f64) -> Result<((f64, f64), (f64, f64)), TransformError> {
        let mut lo = (x, v);
        let mut stalled = 0;
        loop {
            let next = 2.0 * lo.0;
            if next > self.probe.max_x {
                return Err(TransformError::DomainExceeded { target: y, bound: lo.1, side: Side::Above });
            }
            let inc = self.integrate(lo.0, next)?;
            let hi = (next, lo.1 + inc);
            if hi.1 >= y {
                return Ok((lo, hi));
            }
            if inc < self.probe.stall_increment {
                stalled += 1;
                if stalled >= self.probe.stall_count {
                    return Err(TransformError::DomainExceeded { target: y, bound: hi.1, side: Side::Above });
                }
            } else {
                stalled = 0;
            }
            lo = hi;
        }
    }

    fn bracket_down(&self, x: f64, v: f64, y: f64) -> Result<((f64, f64), (f64, f64)), TransformError> {
        let mut hi = (x, v);
        let mut stalled = 0;
        loop {
            let next = 0.5 * hi.0;
            if next < self.probe.min_x {
                return Err(TransformError::DomainExceeded { target: y, bound: hi.1, side: Side::Below });
            }
            let dec = self.integrate(next, hi.0)?;
            let lo = (next, hi.1 - dec);
            if lo.1 <= y {
                return Ok((lo, hi));
            }
            if dec < self.probe.stall_increment {
                stalled += 1;
                if stalled >= self.probe.stall_count {
                    return Err(TransformError::DomainExceeded { target: y, bound: lo.1, side: Side::Below });
                }
            } else {
                stalled = 0;
            }
            hi = lo;
        }
    }
}
