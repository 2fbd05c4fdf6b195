use fluctmon::gaussian::entropy::{
    canonical_transform, entropy, entropy_from_full_covariance, renyi2_log_det, symplectic_eigenvalues, EntropyKind,
};
use fluctmon::gaussian::random::random_physical;
use fluctmon::gaussian::{build_covariance_blocks, outcome_covariance, CorrelationData};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn sample(seed: u64, n: usize) -> CorrelationData {
    random_physical(&mut ChaCha12Rng::seed_from_u64(seed), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn physical_data_satisfies_uncertainty(seed in any::<u64>(), n in 1usize..6) {
        let blocks = build_covariance_blocks(&sample(seed, n)).unwrap();
        prop_assert!(blocks.uncertainty_margin() > -1e-9);
        for nu in symplectic_eigenvalues(&blocks.assemble()).unwrap() {
            prop_assert!(nu >= 0.5 - 1e-9);
        }
    }

    #[test]
    fn renyi2_agrees_everywhere_and_ignores_response(seed in any::<u64>(), n in 1usize..5) {
        let corr = sample(seed, n);
        let c = corr.scaled_keldysh();
        let s2 = entropy(&c, EntropyKind::Renyi(2)).unwrap();
        let tol = 1e-9 * (1.0 + s2.abs());
        prop_assert!((s2 - renyi2_log_det(&c).unwrap()).abs() < tol);
        let blocks = build_covariance_blocks(&corr).unwrap();
        prop_assert!((entropy_from_full_covariance(&blocks, EntropyKind::Renyi(2)).unwrap() - s2).abs() < tol);
        let still = CorrelationData::new(
            corr.times().to_vec(),
            corr.gammas().to_vec(),
            corr.keldysh().clone(),
            DMatrix::zeros(n, n),
        )
        .unwrap();
        let b0 = build_covariance_blocks(&still).unwrap();
        prop_assert!((entropy_from_full_covariance(&b0, EntropyKind::Renyi(2)).unwrap() - s2).abs() < tol);
    }

    #[test]
    fn entropies_are_ordered(seed in any::<u64>(), n in 1usize..5) {
        let c = sample(seed, n).scaled_keldysh();
        let vn = entropy(&c, EntropyKind::VonNeumann).unwrap();
        let s2 = entropy(&c, EntropyKind::Renyi(2)).unwrap();
        let s3 = entropy(&c, EntropyKind::Renyi(3)).unwrap();
        prop_assert!(vn + 1e-12 >= s2);
        prop_assert!(s2 + 1e-12 >= s3);
        prop_assert!(s3 >= -1e-12);
    }

    #[test]
    fn canonical_transform_reduces_covariance(seed in any::<u64>(), n in 1usize..5) {
        let corr = sample(seed, n);
        let blocks = build_covariance_blocks(&corr).unwrap();
        let t = canonical_transform(&corr.scaled_keldysh(), &corr.scaled_response()).unwrap();
        prop_assert!(t.reduction_residual(&blocks).unwrap() < 1e-9);
    }

    #[test]
    fn outcome_covariance_is_symmetric_and_positive(seed in any::<u64>(), n in 1usize..6) {
        let v = outcome_covariance(&sample(seed, n));
        prop_assert!((&v - v.transpose()).abs().max() < 1e-12);
        let min = v.symmetric_eigenvalues().min();
        prop_assert!(min > 0.0);
    }
}
