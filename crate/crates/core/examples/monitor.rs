//! Two-time monitoring of a ground state: measured variances against the
//! Gaussian prediction and the exact finite-size value.
//!
//! cargo run --release --example monitor -- 16 8000

use fluctmon::experiments::{two_time_experiment, ExperimentConfig};

fn main() -> fluctmon::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let sites = args.next().map_or(12, |s| s.parse().expect("sites"));
    let shots = args.next().map_or(8000, |s| s.parse().expect("shots"));
    let r = two_time_experiment(&ExperimentConfig::two_time(sites, shots))?;
    let rep = r.report();
    println!("engine: {}, shots: {}", r.run.engine, r.run.records.len());
    println!("C(0,0) = {:.6}, C(1,1) = {:.6}, C(1,0) = {:.6}, chi(1,0) = {:.6}", rep.c00, rep.ctt, rep.c0t, rep.chi_t0);
    println!("Var x0 = {:.4} +- {:.4}  (Gaussian {:.4})", rep.var0.value, rep.var0.se, rep.predicted_var0);
    println!("Var x1 = {:.4} +- {:.4}  (Gaussian {:.4})", rep.vart.value, rep.vart.se, rep.predicted_vart);
    println!(
        "delta  = {:.4} +- {:.4}  (Gaussian {:.4}, exact {:.4})",
        rep.delta.value,
        rep.delta.se,
        rep.predicted_delta,
        rep.exact_delta.unwrap_or(f64::NAN)
    );
    if let Some(j) = &r.run.summary.joint {
        println!("joint histogram: {} x {} bins", j.counts.len(), j.counts.len());
    }
    Ok(())
}
