//! Bound for a linear-plus-nonlinear integral inequality with a general kernel.

use tsbounds::bounds::{bound_thm1, zeta, ProblemSpec, Theorem};
use tsbounds::harness::{synthesize_u_equality, verify_domination};
use tsbounds::timescale::ScaleSpec;

fn main() {
    let mut spec = ProblemSpec::new(Theorem::Thm1, ScaleSpec::Integer { a: 0, b: 10 });
    spec.phi = "sqrt(x)".into();
    spec.w = "x".into();
    spec.a = "1 + 0.1*t".into();
    spec.f = "0.2".into();
    spec.k = Some("0.3*exp(0.05*(t - s))".into());
    let inst = spec.build().expect("hypotheses hold");

    println!("zeta = {}", zeta(&inst).unwrap());
    let report = bound_thm1(&inst).unwrap();
    let u = synthesize_u_equality(&inst).unwrap();
    let dom = verify_domination(&inst, &u).unwrap();
    println!("{:>4} {:>14} {:>14} {:>8}", "t", "extremal u", "bound", "u/bound");
    for (p, ui) in report.points.iter().zip(u.values()) {
        let b = p.bound.unwrap();
        println!("{:>4} {:>14.6} {:>14.6} {:>8.4}", p.t, ui, b, ui / b);
    }
    println!("dominated: {}", dom.pass());
}
