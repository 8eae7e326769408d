//! Explicit Gronwall–Bihari type bounds on finite time scales.
//!
//! Four bounds are provided, one per hypothesis family:
//!
//! | selector | hypothesis on `u`                                                   | multiplier |
//! |----------|---------------------------------------------------------------------|------------|
//! | `Thm1`   | `u ≤ a + ∫ f u + ∫ f W(∫ k(s,τ) Φ(u(τ)) Δτ) Δs`                       | `p`        |
//! | `Thm2`   | `u ≤ a + ∫ f u + ∫ f h W(∫ b(τ) Φ(u(τ)) Δτ) Δs`                       | `p`        |
//! | `Thm3`   | `u ≤ a + ∫ f g(u) + ∫ f W(∫ k(s,τ) Φ(u(τ)) Δτ) Δs`, `g` in class S    | `q`        |
//! | `Thm4`   | `u ≤ a + ∫ f g(u) + ∫ f h W(∫ b(τ) Φ(u(τ)) Δτ) Δs`, `g` in class S    | `q`        |
//!
//! with `p(t) = 1 + ∫_a^t f(s) e_f(t, σ(s)) Δs` and
//! `q(t) = G⁻¹(G(1) + ∫_a^t f Δτ)`. The closed-form sums of
//! [`corollary`] re-implement the same bounds on `ℤ` and `hℤ` with explicit
//! index loops and serve as oracles for the generic engine.

pub mod corollary;
mod engine;
mod instance;
pub mod lemma;
pub mod transform;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Certificate, CertifyError, EvalFault, ParseError};
use crate::timescale::ScaleError;

pub use corollary::{bound_corollary_hz, bound_corollary_z};
pub use engine::{
    bound, bound_thm1, bound_thm2, bound_thm3, bound_thm4, compute_p, compute_q, xi, xi_bar, zeta, zeta_bar,
    BoundPoint, BoundReport,
};
pub use instance::{FnSource, InstanceParts, KernelMap, ProblemInstance, ProblemSpec, CERT_SAMPLES, G_PROPS, PHI_PROPS, W_PROPS};
pub use lemma::{lemma1_check, LemmaPoint};
pub use transform::{MonotoneTransform, RangeProbe, Side, TransformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "thm1", alias = "THM1")]
    Thm1,
    #[serde(rename = "thm2", alias = "THM2")]
    Thm2,
    #[serde(rename = "thm3", alias = "THM3")]
    Thm3,
    #[serde(rename = "thm4", alias = "THM4")]
    Thm4,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::Thm1, Theorem::Thm2, Theorem::Thm3, Theorem::Thm4];

    /// Whether the bound uses `q` and `max{a, 1}` (the class-S families).
    pub fn uses_g(self) -> bool {
        matches!(self, Theorem::Thm3 | Theorem::Thm4)
    }

    /// Whether the inner integral has the separable form `h(s) b(τ)`.
    pub fn separable(self) -> bool {
        matches!(self, Theorem::Thm2 | Theorem::Thm4)
    }

    pub fn constant_name(self) -> &'static str {
        match self {
            Theorem::Thm1 => "zeta",
            Theorem::Thm2 => "xi",
            Theorem::Thm3 => "zeta_bar",
            Theorem::Thm4 => "xi_bar",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Thm1 => "thm1",
            Theorem::Thm2 => "thm2",
            Theorem::Thm3 => "thm3",
            Theorem::Thm4 => "thm4",
        })
    }
}

impl FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "thm1" => Ok(Theorem::Thm1),
            "thm2" => Ok(Theorem::Thm2),
            "thm3" => Ok(Theorem::Thm3),
            "thm4" => Ok(Theorem::Thm4),
            _ => Err(format!("unknown theorem `{s}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error(transparent)]
    Scale(#[from] ScaleError),
    #[error("cannot parse `{field}`: {source}")]
    Parse {
        field: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("evaluation of {context} failed: {fault}")]
    Eval { context: String, fault: EvalFault },
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("hypothesis certificate failed for {map}: {certificate}")]
    CertificateFailed { map: &'static str, certificate: Box<Certificate> },
    #[error("theorem requires `{0}`")]
    MissingField(&'static str),
    #[error("`{0}` is not used by the selected theorem")]
    UnexpectedField(&'static str),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("constant {name} = {value} is not positive")]
    NonpositiveZeta { name: &'static str, value: f64 },
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("wrong scale kind: expected {expected}, got {got}")]
    WrongScaleKind { expected: &'static str, got: &'static str },
    #[error("{0} is not supported by this oracle")]
    Unsupported(String),
}
