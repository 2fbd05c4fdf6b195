//! Gaussian ancilla covariance built from correlation data, and the
//! predicted outcome statistics of a two-time measurement.

use fluctmon::gaussian::{build_covariance_blocks, outcome_covariance, two_time_prediction, CorrelationData};
use nalgebra::dmatrix;

fn main() -> fluctmon::error::Result<()> {
    let t: f64 = 1.0;
    let corr = CorrelationData::new(
        vec![0.0, t],
        vec![1.0, 1.0],
        dmatrix![1.0, (2.0 * t).cos(); (2.0 * t).cos(), 1.0],
        dmatrix![0.0, 0.0; -2.0 * (2.0 * t).sin(), 0.0],
    )?;
    let blocks = build_covariance_blocks(&corr)?;
    println!("G_xx = {:.6}", blocks.gxx);
    println!("G_xp = {:.6}", blocks.gxp);
    println!("uncertainty margin = {:.3e}", blocks.uncertainty_margin());

    let v = outcome_covariance(&corr);
    println!("outcome covariance = {v:.6}");
    let p = two_time_prediction(1.0, 1.0, 1.0, 1.0, (2.0 * t).cos(), -2.0 * (2.0 * t).sin());
    println!("Var x0 = {:.6}, Var x1 = {:.6}, delta = {:.6} (2 sin^2 2 = {:.6})", p.var0, p.vart, p.delta(), 2.0 * (2.0 * t).sin().powi(2));

    let text = serde_json::to_string_pretty(&corr).expect("serializable");
    println!("correlation file:\n{text}");
    Ok(())
}
