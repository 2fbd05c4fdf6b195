//! Outcome covariance of three measurements against the Gaussian law.

use fluctmon::experiments::{validate_covariance, ExperimentConfig};

fn main() -> fluctmon::error::Result<()> {
    for (label, j) in [("decoupled", 0.0), ("coupled", 2.0 / 3.0)] {
        let cfg = ExperimentConfig {
            sites: 10,
            j,
            times: vec![0.0, 1.0, 2.0],
            gammas: vec![0.8],
            shots: 20_000,
            ..Default::default()
        };
        let r = validate_covariance(&cfg)?;
        println!("{label} chain:");
        println!("  empirical {:.4}", r.run.summary.covariance);
        println!("  Gaussian  {:.4}", r.run.gaussian_covariance);
        println!("  max |z| vs Gaussian {:.2}, vs exact {:.2}", r.max_z_gaussian, r.max_z_exact.unwrap_or(f64::NAN));
    }
    Ok(())
}
