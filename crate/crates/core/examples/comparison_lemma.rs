use std::sync::Arc;

use tsbounds::bounds::lemma1_check;
use tsbounds::expr::ScalarMap;
use tsbounds::timescale::{GridFunction, TimeScale};

/// Both sides of the comparison inequality for `r(t) = 2^t` and `g(x) = x` on `{0, …, 6}`,
/// then for the same `r` sampled on a fine uniform grid, where the slack vanishes.
fn main() {
    let g = ScalarMap::parse("x").unwrap();
    let z = Arc::new(TimeScale::integer(0, 6).unwrap());
    let r = GridFunction::from_fn(z, |t| 2f64.powf(t)).unwrap();
    for p in lemma1_check(&r, &g, 1.0).unwrap() {
        println!("t = {}: G(r) = {:.6} <= {:.6} (slack {:.6})", p.t, p.lhs, p.rhs, p.slack());
    }
    for n in [10, 100, 1000] {
        let s = Arc::new(TimeScale::uniform(0.0, 6.0, n).unwrap());
        let r = GridFunction::from_fn(s, |t| 2f64.powf(t)).unwrap();
        let last = *lemma1_check(&r, &g, 1.0).unwrap().last().unwrap();
        println!("uniform n = {n:>4}: slack at t = 6 is {:.3e}", last.slack());
    }
}
