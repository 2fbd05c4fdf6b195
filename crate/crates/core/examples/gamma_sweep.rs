//! Backreaction `delta` as a function of the measurement strength.

use fluctmon::experiments::{gamma_sweep, ExperimentConfig};

fn main() -> fluctmon::error::Result<()> {
    let cfg = ExperimentConfig { shots: 50_000, ..Default::default() };
    let res = gamma_sweep(&cfg, &[0.4, 0.5, 0.6, 0.8, 1.0], &[8, 12])?;
    println!("{:>3} {:>6} {:>10} {:>10} {:>10} {:>10}", "L", "gamma", "delta", "se", "gamma^4", "exact");
    for r in &res.rows {
        println!(
            "{:>3} {:>6.2} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            r.sites,
            r.gamma,
            r.delta.value,
            r.delta.se,
            r.prediction,
            r.exact.unwrap_or(f64::NAN)
        );
    }
    for f in &res.fits {
        println!(
            "L={}: fit window {:?}, slope {:.3}, exact slope {:.3}, prefactor {:.4} +- {:.4} vs chi^2/2 = {:.4}",
            f.sites,
            f.window,
            f.fit.as_ref().map_or(f64::NAN, |l| l.slope),
            f.exact_slope.unwrap_or(f64::NAN),
            f.prefactor.value,
            f.prefactor.se,
            f.predicted_prefactor
        );
    }
    Ok(())
}
