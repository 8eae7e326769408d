//! Bihari-type bounds, where the linear term is replaced by `f g(u)` with `g` in class S.
//!
//! The multiplier becomes `q(t) = G⁻¹(G(1) + ∫ f)`; when the argument leaves
//! the range of `G` or `Ψ`, the point is reported out of domain rather than
//! given a number.

use tsbounds::bounds::{bound, ProblemSpec, Theorem};
use tsbounds::timescale::ScaleSpec;

fn show(title: &str, spec: &ProblemSpec) {
    let r = bound(&spec.build().unwrap()).unwrap();
    println!("{title}: {} = {:.6}", r.constant_name, r.constant);
    for (p, q) in r.points.iter().zip(&r.multiplier) {
        match p.bound {
            Some(b) => println!("  t = {:<6} q = {:<12.6} bound = {b:.6}", p.t, q.unwrap()),
            None => println!("  t = {:<6} out of domain (G: {}, Ψ: {})", p.t, p.g_condition, p.psi_condition),
        }
    }
}

fn main() {
    let mut general = ProblemSpec::new(Theorem::Thm3, ScaleSpec::Hgrid { a: 0.0, b: 2.0, h: 0.25 });
    general.g = Some("sqrt(x)".into());
    general.phi = "pow(x,0.75)".into();
    general.w = "x/(1+x)".into();
    general.a = "0.5 + t".into();
    general.f = "0.4".into();
    general.k = Some("exp(0.2*(t - s))".into());
    show("general kernel, g = sqrt(x)", &general);

    let mut separable = ProblemSpec::new(Theorem::Thm4, ScaleSpec::Uniform { a: 0.0, b: 3.0, n: 12 });
    separable.g = Some("x".into());
    separable.w = "pow(x,2)".into();
    separable.f = "0.5".into();
    separable.h = Some("1".into());
    separable.b = Some("0.5".into());
    show("separable kernel, W = x², g = x", &separable);
}
