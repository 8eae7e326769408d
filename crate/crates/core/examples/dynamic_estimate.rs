//! Solve `u^Δ = F(t, u, ∫ K(t, u(s)) Δs)` exactly and compare `|u|` with its a-priori estimate.

use tsbounds::dynamics::{verify_application, IvpSpec};
use tsbounds::timescale::ScaleSpec;

fn main() {
    for (rhs, label) in [("(u+v)/2", "half"), ("u+v", "extreme"), ("-u+v/3", "damped")] {
        let spec = IvpSpec::new(ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 100 }, rhs, "u", 1.0);
        let r = verify_application(&spec, 1.0).unwrap();
        let last = r.u.values().len() - 1;
        println!(
            "{label:>8}: u(1) = {:.6}, estimate = {:.6}, worst margin = {:.3e}, residual = {:e}, pass = {}",
            r.u.at(last),
            r.bound.points[last].bound.unwrap(),
            r.worst_margin().unwrap(),
            r.residual,
            r.pass
        );
    }
}
