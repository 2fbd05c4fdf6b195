//! Krylov propagation against exact diagonalization, and its cost at larger sizes.

use std::time::Instant;

use fluctmon::spin::{haar_random_state, IsingChain, Propagator};

fn main() -> fluctmon::error::Result<()> {
    let chain = IsingChain::periodic(10, -1.0)?;
    let psi = haar_random_state(10, 7)?;
    let krylov = Propagator::new(&chain, 1e-12)?;
    let dense = Propagator::dense(&chain)?;
    for t in [0.5, 2.0, 8.0] {
        let a = krylov.evolve_state(&psi, t)?;
        let b = dense.evolve_state(&psi, t)?;
        println!("t = {t:4}: 1 - |<krylov|dense>| = {:.2e}", 1.0 - a.overlap(&b).norm());
    }

    for sites in [14, 16, 18] {
        let chain = IsingChain::periodic(sites, -2.0 / 3.0)?;
        let psi = haar_random_state(sites, 1)?;
        let prop = Propagator::new(&chain, 1e-10)?;
        let start = Instant::now();
        let out = prop.evolve_state(&psi, 1.0)?;
        println!(
            "L={sites}: evolved to t=1 in {:.2?}, |<psi(0)|psi(1)>| = {:.6}",
            start.elapsed(),
            psi.overlap(&out).norm()
        );
    }
    Ok(())
}
