//! Lowest eigenpair and gap of the periodic Ising chain.
//!
//! cargo run --release --example ground_state -- 14 0.6667

use fluctmon::spin::{ground_state, GroundStateOptions, IsingChain};

fn main() -> fluctmon::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let sites: usize = args.next().map_or(12, |s| s.parse().expect("sites"));
    let j: f64 = args.next().map_or(2.0 / 3.0, |s| s.parse().expect("coupling"));

    for coupling in [-j, j] {
        let chain = IsingChain::periodic(sites, coupling)?;
        let gs = ground_state(&chain, &GroundStateOptions::default())?;
        println!(
            "L={sites} J={coupling:+.4}: E0 = {:.12}, E0/L = {:.8}, gap = {:.6}, residual = {:.1e}, restarts = {}",
            gs.energy,
            gs.energy / sites as f64,
            gs.gap().unwrap_or(f64::NAN),
            gs.residual,
            gs.restarts
        );
        if gs.near_degenerate() {
            println!("  nearly degenerate ground state");
        }
    }
    Ok(())
}
