use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng;

/// Accepted deviation of the norm from one.
pub const NORM_TOL: f64 = 1e-10;

/// Normalized pure state over the `2^L` computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    sites: usize,
    amps: Vec<Complex64>,
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl StateVector {
    pub fn new(sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << sites {
            return Err(Error::invalid(format!(
                "{} amplitudes for {sites} sites",
                amps.len()
            )));
        }
        let n = norm(&amps);
        if !((n - 1.0).abs() <= NORM_TOL) {
            return Err(Error::invalid(format!("state norm {n} differs from 1")));
        }
        Ok(StateVector { sites, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(sites: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amps);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::numeric(format!("cannot normalize a vector of norm {n}")));
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Self::new(sites, amps)
    }

    pub fn from_real(sites: usize, amps: &[f64]) -> Result<Self> {
        Self::normalized(sites, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn basis(sites: usize, z: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << sites];
        *amps
            .get_mut(z)
            .ok_or_else(|| Error::invalid(format!("basis index {z} out of range")))? = Complex64::new(1.0, 0.0);
        Self::new(sites, amps)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// `<psi| D |psi>` for a diagonal operator.
    pub fn expect_diagonal(&self, values: &[f64]) -> f64 {
        self.amps.iter().zip(values).map(|(a, v)| a.norm_sqr() * v).sum()
    }
}

/// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
pub fn haar_random_state(sites: usize, seed: u64) -> Result<StateVector> {
    haar_random_state_with(sites, &mut rng::stream(seed, "haar-state", 0))
}

pub fn haar_random_state_with<R: Rng + ?Sized>(sites: usize, rng: &mut R) -> Result<StateVector> {
    if sites > crate::spin::MAX_SITES {
        return Err(Error::Resource(format!("{sites} sites is too many")));
    }
    let amps = (0..1usize << sites)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(sites, amps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        let amps = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(StateVector::new(1, amps.clone()).is_err());
        let s = StateVector::normalized(1, amps).unwrap();
        assert!((norm(s.amplitudes()) - 1.0).abs() < 1e-15);
        assert!(StateVector::new(2, vec![Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn haar_is_normalized_and_reproducible() {
        let a = haar_random_state(6, 11).unwrap();
        assert!((norm(a.amplitudes()) - 1.0).abs() < 1e-12);
        assert_eq!(a, haar_random_state(6, 11).unwrap());
        assert_ne!(a, haar_random_state(6, 12).unwrap());
    }

    #[test]
    fn basis_state_expectation() {
        let s = StateVector::basis(3, 5).unwrap();
        let values: Vec<f64> = (0..8).map(|z| z as f64).collect();
        assert_eq!(s.expect_diagonal(&values), 5.0);
    }
}
