use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::spin::{DiagonalObservable, StateVector};

/// `p(m) = sum_z |psi_z|^2 (gamma/sqrt(pi)) exp(-gamma^2 (m - q_z)^2)`.
pub fn outcome_density(psi: &StateVector, obs: &DiagonalObservable, gamma: f64, m: f64) -> f64 {
    let sectors = obs.sector_weights(psi);
    let norm = gamma / PI.sqrt();
    sectors
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let d = m - obs.sector_value(k);
            w * norm * (-gamma * gamma * d * d).exp()
        })
        .sum()
}

/// Cumulative distribution of the outcome.
pub fn outcome_cdf(psi: &StateVector, obs: &DiagonalObservable, gamma: f64, m: f64) -> f64 {
    obs.sector_weights(psi)
        .iter()
        .enumerate()
        .map(|(k, w)| w * 0.5 * erfc(-gamma * (m - obs.sector_value(k))))
        .sum()
}

/// `K_m psi / ||K_m psi||`. Factors are taken relative to the most likely
/// occupied eigenvalue so that the normalization does not underflow.
pub fn kraus_apply(psi: &[Complex64], values: &[f64], gamma: f64, m: f64) -> Result<Vec<Complex64>> {
    let dmin = psi
        .iter()
        .zip(values)
        .filter(|(a, _)| a.norm_sqr() > 0.0)
        .map(|(_, q)| (m - q) * (m - q))
        .fold(f64::INFINITY, f64::min);
    let mut out: Vec<Complex64> = psi
        .iter()
        .zip(values)
        .map(|(a, q)| a * (-0.5 * gamma * gamma * ((m - q) * (m - q) - dmin)).exp())
        .collect();
    let n = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::numeric(format!(
            "post-measurement state could not be renormalized (norm {n:e}, outcome {m})"
        )));
    }
    out.iter_mut().for_each(|a| *a /= n);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct WeakOutcome {
    pub m: f64,
    pub post: StateVector,
}

/// Draw a basis label with probability `|psi_z|^2`, then `m ~ N(q_z, 1/(2 gamma^2))`.
pub fn sample_outcome<R: Rng + ?Sized>(psi: &[Complex64], values: &[f64], gamma: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut pick = psi.len() - 1;
    let total: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    for (z, a) in psi.iter().enumerate() {
        acc += a.norm_sqr() / total;
        if u < acc {
            pick = z;
            break;
        }
    }
    let n: f64 = rng.sample(StandardNormal);
    values[pick] + n / (std::f64::consts::SQRT_2 * gamma)
}

pub fn measure_weak<R: Rng + ?Sized>(
    psi: &StateVector,
    obs: &DiagonalObservable,
    gamma: f64,
    rng: &mut R,
) -> Result<WeakOutcome> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid(format!("measurement strength {gamma} must be positive")));
    }
    let values = obs.values();
    let m = sample_outcome(psi.amplitudes(), &values, gamma, rng);
    let post = StateVector::new(psi.sites(), kraus_apply(psi.amplitudes(), &values, gamma, m)?)?;
    Ok(WeakOutcome { m, post })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{haar_random_state, magnetization_observable};
    use rand::SeedableRng;

    fn superposition() -> StateVector {
        // Equal weight on all-up (q = 2) and all-down (q = -2) for L = 4.
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0] = Complex64::new(1.0, 0.0);
        amps[15] = Complex64::new(0.0, 1.0);
        StateVector::normalized(4, amps).unwrap()
    }

    #[test]
    fn eigenstate_density_and_post_state() {
        let psi = StateVector::basis(4, 0b0011).unwrap();
        let obs = DiagonalObservable::magnetization(4, 0.5).unwrap();
        let gamma = 1.7;
        let var = 1.0 / (2.0 * gamma * gamma);
        for m in [-1.0f64, 0.0, 0.4] {
            let normal = (-(m * m) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
            assert!((outcome_density(&psi, &obs, gamma, m) - normal).abs() < 1e-14);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let out = measure_weak(&psi, &obs, gamma, &mut rng).unwrap();
        assert!((out.post.overlap(&psi).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bimodal_mixture_and_projective_limit() {
        let psi = superposition();
        let obs = DiagonalObservable::magnetization(4, 0.5).unwrap();
        let p = |m| outcome_density(&psi, &obs, 5.0, m);
        assert!((p(2.0) - p(-2.0)).abs() < 1e-14);
        assert!(p(0.0) < 1e-12 * p(2.0));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut up = 0;
        for _ in 0..2000 {
            let out = measure_weak(&psi, &obs, 30.0, &mut rng).unwrap();
            let w = out.post.probabilities();
            assert!(w[0] > 1.0 - 1e-12 || w[15] > 1.0 - 1e-12);
            up += usize::from(w[0] > 0.5);
        }
        assert!((up as f64 - 1000.0).abs() < 4.0 * 22.4);
    }

    #[test]
    fn density_integrates_to_one() {
        let psi = haar_random_state(4, 5).unwrap();
        let obs = magnetization_observable(4, 0.5, &psi).unwrap();
        let (a, b, n) = (-12.0, 12.0, 24_001);
        let h = (b - a) / (n - 1) as f64;
        let total: f64 = (0..n)
            .map(|i| {
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                w * outcome_density(&psi, &obs, 0.8, a + h * i as f64)
            })
            .sum::<f64>()
            * h;
        assert!((total - 1.0).abs() < 1e-8);
        assert!((outcome_cdf(&psi, &obs, 0.8, 30.0) - 1.0).abs() < 1e-15);
        assert!(outcome_cdf(&psi, &obs, 0.8, -30.0) < 1e-15);
    }

    #[test]
    fn global_phase_does_not_matter() {
        let psi = haar_random_state(3, 8).unwrap();
        let rotated = StateVector::new(
            3,
            psi.amplitudes().iter().map(|a| a * Complex64::from_polar(1.0, 0.7)).collect(),
        )
        .unwrap();
        let obs = DiagonalObservable::magnetization(3, 0.5).unwrap();
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = measure_weak(&psi, &obs, 1.0, &mut r1).unwrap();
            let b = measure_weak(&rotated, &obs, 1.0, &mut r2).unwrap();
            assert!((a.m - b.m).abs() < 1e-12);
        }
    }

    #[test]
    fn far_tail_outcome_still_normalizes() {
        let psi = superposition();
        let values = DiagonalObservable::magnetization(4, 0.5).unwrap().values();
        let post = kraus_apply(psi.amplitudes(), &values, 3.0, 400.0).unwrap();
        assert!((post[0].norm() - 1.0).abs() < 1e-12);
    }
}
