//! Connected four-point ratio of the ground-state magnetization.

use fluctmon::experiments::{wick_check, ExperimentConfig};

fn main() -> fluctmon::error::Result<()> {
    let sizes = [4, 6, 8, 10, 12, 14];
    for j in [0.0, 2.0 / 3.0, 1.0] {
        let rows = wick_check(&ExperimentConfig { j, ..Default::default() }, &sizes)?;
        println!("J = {j:.4}");
        for r in rows {
            println!("  L={:>2}: <q^2> = {:.5}, ratio = {:+.6} {}", r.sites, r.q2, r.ratio, r.oracle.map_or(String::new(), |o| format!("(-2/L = {o:+.6})")));
        }
    }
    Ok(())
}
