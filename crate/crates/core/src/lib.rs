//! Explicit Gronwall–Bihari type bounds on finite time scales.
//!
//! The crate is organised bottom-up:
//!
//! - [`timescale`]: finite time scales, grid functions and the delta calculus.
//! - [`expr`]: the expression language for nonlinearities and coefficients,
//!   with sampled property certificates.
//! - [`bounds`]: the bound formulas, their ingredients and closed-form oracles.
//! - [`dynamics`]: an exact solver for the integro-dynamic initial value
//!   problem and its a-priori estimate.
//! - [`harness`]: extremal instance synthesis, domination checks, sweeps and
//!   refinement studies.
//! - [`cli`]: scenario files, CSV output and the command-line front end.

pub mod bounds;
pub mod cli;
pub mod dynamics;
pub mod expr;
pub mod harness;
pub mod timescale;

pub use bounds::{BoundReport, BoundsError, ProblemInstance, ProblemSpec, Theorem};
pub use expr::{Expr, ScalarMap};
pub use timescale::{GridFunction, ScaleSpec, TimeScale};
