//! Sampled property certificates for candidate nonlinearities.
//!
//! A nonlinearity `Φ` must be nondecreasing, positive on `(0, ∞)`,
//! subadditive and submultiplicative; `g` must belong to class S.
//! Failing checks come with the inputs that broke them.

use tsbounds::expr::{check_properties, ScalarMap};

fn main() {
    for text in ["x", "sqrt(x)", "2*sqrt(x)", "pow(x,2)", "x/(1+x)", "1+x", "exp(x)-1"] {
        let m = ScalarMap::parse(text).unwrap();
        let certs = check_properties(&m, 10.0, 2000, 7).unwrap();
        println!("{text}");
        for c in &certs.items {
            println!("  {c}");
        }
    }
}
