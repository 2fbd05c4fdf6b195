//! Entropies of the ancilla state, computed from `C` alone and from the
//! full covariance, plus the canonical transform.

use fluctmon::gaussian::entropy::{entropy, symplectic_eigenvalues};
use fluctmon::gaussian::random::random_physical;
use fluctmon::gaussian::{build_covariance_blocks, canonical_transform, entropy_from_full_covariance, EntropyKind};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() -> fluctmon::error::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let corr = random_physical(&mut rng, 3);
    let c = corr.scaled_keldysh();
    let blocks = build_covariance_blocks(&corr)?;
    println!("symplectic eigenvalues: {:.6?}", symplectic_eigenvalues(&blocks.assemble())?);
    for kind in [EntropyKind::Renyi(2), EntropyKind::Renyi(3), EntropyKind::VonNeumann] {
        println!(
            "{kind:?}: from C = {:.9}, from full covariance = {:.9}",
            entropy(&c, kind)?,
            entropy_from_full_covariance(&blocks, kind)?
        );
    }

    let t = canonical_transform(&c, &corr.scaled_response())?;
    println!("eigenvalues of C: {:.6?}", t.lambdas);
    println!("reduction residual = {:.2e}", t.reduction_residual(&blocks)?);
    println!("symplectic defect  = {:.2e}", t.symplectic_defect());
    Ok(())
}
