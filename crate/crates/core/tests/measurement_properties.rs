use fluctmon::measurement::{kraus_apply, measure_weak, outcome_cdf, outcome_density};
use fluctmon::spin::state::norm;
use fluctmon::spin::{haar_random_state, magnetization_observable, ALPHA_GAUSSIAN};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn outcome_density_is_normalized(sites in 2usize..7, gamma in 0.2f64..3.0, seed: u64) {
        let psi = haar_random_state(sites, seed).unwrap();
        let obs = magnetization_observable(sites, ALPHA_GAUSSIAN, &psi).unwrap();
        let (lo, hi, n) = (-40.0 / gamma, 40.0 / gamma, 40_000);
        let h = (hi - lo) / n as f64;
        let total: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * outcome_density(&psi, &obs, gamma, lo + i as f64 * h)
            })
            .sum::<f64>()
            * h;
        prop_assert!((total - 1.0).abs() < 1e-8);
        prop_assert!((outcome_cdf(&psi, &obs, gamma, hi) - 1.0).abs() < 1e-12);
        prop_assert!(outcome_cdf(&psi, &obs, gamma, lo) < 1e-12);
    }

    #[test]
    fn kraus_update_is_bayesian(sites in 2usize..7, gamma in 0.2f64..3.0, m in -3.0f64..3.0, seed: u64) {
        let psi = haar_random_state(sites, seed).unwrap();
        let obs = magnetization_observable(sites, ALPHA_GAUSSIAN, &psi).unwrap();
        let post = kraus_apply(psi.amplitudes(), &obs.values(), gamma, m).unwrap();
        prop_assert!((norm(&post) - 1.0).abs() < 1e-10);
        let p = psi.probabilities();
        let q: Vec<f64> = post.iter().map(|a| a.norm_sqr()).collect();
        let values = obs.values();
        let like = |v: f64| (-gamma * gamma * (m - v).powi(2)).exp();
        let z: f64 = p.iter().zip(&values).map(|(p, v)| p * like(*v)).sum();
        for i in 0..p.len() {
            prop_assert!((q[i] - p[i] * like(values[i]) / z).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_post_states_are_normalized(sites in 2usize..7, gamma in 0.2f64..3.0, seed: u64) {
        let psi = haar_random_state(sites, seed).unwrap();
        let obs = magnetization_observable(sites, ALPHA_GAUSSIAN, &psi).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let out = measure_weak(&psi, &obs, gamma, &mut rng).unwrap();
        prop_assert!(out.m.is_finite());
        prop_assert!((norm(out.post.amplitudes()) - 1.0).abs() < 1e-10);
    }
}
