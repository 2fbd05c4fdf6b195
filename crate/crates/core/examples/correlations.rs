//! Exact Keldysh and response functions of the magnetization.
//!
//! For decoupled spins in their ground state `C(t,0) = cos 2t` and
//! `|chi(t,0)| = 2 |sin 2t|` at every size.

use fluctmon::spin::{ground_state, magnetization_observable, two_point_functions, GroundStateOptions, IsingChain, Propagator};

fn table(coupling: f64, sites: usize) -> fluctmon::error::Result<()> {
    let chain = IsingChain::periodic(sites, coupling)?;
    let psi = ground_state(&chain, &GroundStateOptions::default())?.state;
    let obs = magnetization_observable(sites, 0.5, &psi)?;
    let prop = Propagator::new(&chain, 1e-12)?;
    let times: Vec<f64> = (0..6).map(|k| 0.5 * k as f64).collect();
    let f = two_point_functions(&psi, &prop, &obs, &times)?;
    println!("J = {coupling}, L = {sites}");
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "C(t,0)", "chi(t,0)", "cos 2t");
    for (k, t) in times.iter().enumerate() {
        println!("{t:6.2} {:12.8} {:12.8} {:12.8}", f.keldysh[(k, 0)], f.response[(k, 0)], (2.0 * t).cos());
    }
    Ok(())
}

fn main() -> fluctmon::error::Result<()> {
    table(0.0, 8)?;
    table(-2.0 / 3.0, 12)
}
