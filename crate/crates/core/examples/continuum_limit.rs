//! Refining a uniform scale towards [0, 1]: the time-scale exponential tends to
//! `exp`, and the bound settles at first order.

use std::sync::Arc;

use tsbounds::bounds::{ProblemSpec, Theorem};
use tsbounds::harness::convergence_study;
use tsbounds::timescale::{GridFunction, ScaleSpec, TimeScale};

fn main() {
    for n in [10, 100, 1000, 10000] {
        let s = Arc::new(TimeScale::uniform(0.0, 1.0, n).unwrap());
        let e1 = GridFunction::constant(s, 1.0).unwrap().ts_exponential(1.0, 0.0).unwrap();
        println!("n = {n:>5}: e_1(1, 0) = {e1:.8}, e - e_1 = {:.3e}", std::f64::consts::E - e1);
    }

    let mut spec = ProblemSpec::new(Theorem::Thm1, ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 10 });
    spec.k = Some("1".into());
    spec.phi = "sqrt(x)".into();
    spec.f = "1 + t".into();
    let table = convergence_study(&spec, &[1, 10, 20, 40, 80, 160]).unwrap();
    print!("{}", table.to_csv());
}
