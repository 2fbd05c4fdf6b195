use crate::error::{Error, Result};
use crate::spin::state::StateVector;

/// Rescaled magnetization `q = sum_j Z_j / L^alpha - offset`, diagonal in the
/// computational basis. Its value depends on a basis state only through the
/// number of down spins `k = popcount(z)`, which labels the sector.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalObservable {
    sites: usize,
    alpha: f64,
    mean_offset: f64,
    raw: Vec<f64>,
}

/// Default exponent for short-range correlated states.
pub const ALPHA_GAUSSIAN: f64 = 0.5;
/// Exponent for the critical chain at `J = 1`.
pub const ALPHA_CRITICAL: f64 = 15.0 / 16.0;

impl DiagonalObservable {
    pub fn magnetization(sites: usize, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid(format!("exponent {alpha} is not finite")));
        }
        if sites > crate::spin::MAX_SITES {
            return Err(Error::Resource(format!("{sites} sites is too many")));
        }
        let scale = (sites as f64).powf(alpha);
        let raw = (0..1usize << sites)
            .map(|z| (sites as f64 - 2.0 * f64::from(z.count_ones())) / scale)
            .collect();
        Ok(DiagonalObservable { sites, alpha, mean_offset: 0.0, raw })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mean_offset(&self) -> f64 {
        self.mean_offset
    }

    pub fn dim(&self) -> usize {
        self.raw.len()
    }

    pub fn with_offset(&self, mean_offset: f64) -> Self {
        DiagonalObservable { mean_offset, ..self.clone() }
    }

    /// Uncentered eigenvalues `sum_j Z_j / L^alpha`.
    pub fn raw_values(&self) -> &[f64] {
        &self.raw
    }

    pub fn value(&self, z: usize) -> f64 {
        self.raw[z] - self.mean_offset
    }

    pub fn values(&self) -> Vec<f64> {
        self.raw.iter().map(|v| v - self.mean_offset).collect()
    }

    pub fn sectors(&self) -> usize {
        self.sites + 1
    }

    pub fn sector_of(z: usize) -> usize {
        z.count_ones() as usize
    }

    /// Centered value in sector `k`.
    pub fn sector_value(&self, k: usize) -> f64 {
        (self.sites as f64 - 2.0 * k as f64) / (self.sites as f64).powf(self.alpha) - self.mean_offset
    }

    pub fn sector_values(&self) -> Vec<f64> {
        (0..self.sectors()).map(|k| self.sector_value(k)).collect()
    }

    /// `<psi| sum Z / L^alpha |psi>` without the offset.
    pub fn raw_mean(&self, psi: &StateVector) -> f64 {
        psi.expect_diagonal(&self.raw)
    }

    /// Weight of each sector in `psi`.
    pub fn sector_weights(&self, psi: &StateVector) -> Vec<f64> {
        let mut w = vec![0.0; self.sectors()];
        for (z, a) in psi.amplitudes().iter().enumerate() {
            w[Self::sector_of(z)] += a.norm_sqr();
        }
        w
    }
}

/// Magnetization observable centered on `psi0`.
pub fn magnetization_observable(sites: usize, alpha: f64, psi0: &StateVector) -> Result<DiagonalObservable> {
    if psi0.sites() != sites {
        return Err(Error::invalid(format!(
            "state has {} sites, observable {sites}",
            psi0.sites()
        )));
    }
    let obs = DiagonalObservable::magnetization(sites, alpha)?;
    let mu = obs.raw_mean(psi0);
    Ok(obs.with_offset(mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn popcount_rule() {
        let obs = DiagonalObservable::magnetization(4, 0.5).unwrap();
        assert_eq!(obs.value(0), 2.0);
        assert_eq!(obs.value(0b1111), -2.0);
        assert_eq!(obs.value(0b0101), 0.0);
        assert_eq!(obs.sector_value(1), 1.0);
    }

    #[test]
    fn all_up_state_is_centered() {
        let up = StateVector::basis(9, 0).unwrap();
        let obs = magnetization_observable(9, 0.5, &up).unwrap();
        assert_eq!(obs.mean_offset(), 3.0);
        assert_eq!(obs.value(0), 0.0);
        assert!((obs.value(1) + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn critical_bound() {
        let obs = DiagonalObservable::magnetization(16, ALPHA_CRITICAL).unwrap();
        let bound = 16f64.powf(1.0 / 16.0);
        assert!(obs.raw_values().iter().all(|v| v.abs() <= bound + 1e-12));
        assert!((obs.value(0) - bound).abs() < 1e-12);
    }
}
