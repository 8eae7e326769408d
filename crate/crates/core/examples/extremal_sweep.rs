//! Randomized domination sweep over all four bound families.

use tsbounds::bounds::Theorem;
use tsbounds::harness::{run_sweep, SweepConfig};

fn main() {
    let count = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50);
    let summary = run_sweep(&SweepConfig { seed: 1, count, theorems: Theorem::ALL.to_vec(), scales: vec![] });
    print!("{}", summary.to_csv());
    eprintln!("{} passed, {} skipped, {} failed", summary.passed(), summary.skipped(), summary.failed());
}
