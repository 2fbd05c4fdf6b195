//! Mean |delta| over Haar random initial states shrinks with the chain size.

use fluctmon::experiments::{haar_average, ExperimentConfig};

fn main() -> fluctmon::error::Result<()> {
    let cfg = ExperimentConfig { shots: 20_000, ..Default::default() };
    let res = haar_average(&cfg, &[6, 8, 10], 16)?;
    for row in &res.rows {
        println!(
            "L={:>2}: mean |delta| = {:.4} +- {:.4} (exact {:.4})",
            row.sites,
            row.mean_abs.value,
            row.mean_abs.se,
            row.exact_mean_abs.unwrap_or(f64::NAN)
        );
    }
    println!("decrease in standard errors: {:.2?}", res.decrease_z());
    let c = &res.control;
    println!("ground-state control at L={}: delta = {:.4} +- {:.4}", c.sites, c.delta.value, c.delta.se);
    Ok(())
}
