//! One weak measurement of the magnetization: outcome law and state update.

use fluctmon::measurement::{measure_weak, outcome_density};
use fluctmon::spin::{ground_state, magnetization_observable, GroundStateOptions, IsingChain};

fn main() -> fluctmon::error::Result<()> {
    let sites = 8;
    let chain = IsingChain::periodic(sites, -1.0)?;
    let psi = ground_state(&chain, &GroundStateOptions::default())?.state;
    let obs = magnetization_observable(sites, 0.5, &psi)?;
    let mut rng = fluctmon::rng::stream(1, "example", 0);

    for gamma in [0.5, 2.0, 6.0] {
        println!("gamma = {gamma}");
        for m in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            println!("  p({m:+.1}) = {:.5}", outcome_density(&psi, &obs, gamma, m));
        }
        let out = measure_weak(&psi, &obs, gamma, &mut rng)?;
        let before = obs.sector_weights(&psi);
        let after = obs.sector_weights(&out.post);
        println!("  drew m = {:+.4}", out.m);
        println!("  sector weights before {before:.3?}");
        println!("  sector weights after  {after:.3?}");
    }
    Ok(())
}
