//! The generic engine against the closed-form sums on ℤ and hℤ.

use tsbounds::bounds::Theorem;
use tsbounds::harness::{oracle_gap, random_instance};
use tsbounds::timescale::ScaleSpec;

fn main() {
    let scales = [ScaleSpec::Integer { a: 0, b: 12 }, ScaleSpec::Hgrid { a: 0.0, b: 6.0, h: 0.5 }];
    for scale in &scales {
        for th in Theorem::ALL {
            let worst = (0..20)
                .map(|seed| oracle_gap(&random_instance(seed, th, scale).unwrap()).unwrap().unwrap())
                .fold(0.0f64, f64::max);
            println!("{scale} {th}: max relative gap {worst:.2e}");
        }
    }
}
