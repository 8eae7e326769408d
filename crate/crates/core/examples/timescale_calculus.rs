//! Delta calculus on a few finite time scales.

use std::sync::Arc;

use tsbounds::timescale::{GridFunction, ScaleSpec, TimeScale};

fn main() {
    let specs = [
        ScaleSpec::Integer { a: 0, b: 5 },
        ScaleSpec::Hgrid { a: 0.0, b: 2.0, h: 0.5 },
        ScaleSpec::Qgeometric { q: 2.0, a: 1.0, count: 6 },
        ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 1000 },
    ];
    for spec in specs {
        let s = Arc::new(TimeScale::build(&spec).unwrap());
        let one = GridFunction::constant(s.clone(), 1.0).unwrap();
        let t2 = GridFunction::from_fn(s.clone(), |t| t * t).unwrap();
        let (a, b) = (s.min(), s.max());
        println!("{spec}: {} points, μ(a) = {}, ρ(b) = {}", s.len(), s.mu_at(0), s.rho(b).unwrap());
        println!("  ∫_a^b t² Δt   = {}", t2.delta_integral(a, b).unwrap());
        println!("  (t²)^Δ at a  = {}", t2.delta_derivative(a).unwrap());
        println!("  e_1(b, a)     = {}", one.ts_exponential(b, a).unwrap());
        println!("  e_1(a, b)     = {}", one.ts_exponential(a, b).unwrap());
    }
}
