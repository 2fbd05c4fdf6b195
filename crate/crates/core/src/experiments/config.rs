use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::MeasurementSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    Ground,
    Haar,
}

/// Trajectory sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Branch engine when it fits in memory, otherwise direct.
    Auto,
    Branch,
    Direct,
}

/// One monitoring run. The chain Hamiltonian is `sum X + J_eff sum Z Z` with
/// `J_eff = -j` when `ferromagnetic` is set and `J_eff = j` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub sites: usize,
    pub j: f64,
    pub ferromagnetic: bool,
    pub alpha: f64,
    pub initial: InitialState,
    /// Which Haar state of the seed family to use.
    pub haar_index: u64,
    pub times: Vec<f64>,
    /// One strength per event, or a single value for all events.
    pub gammas: Vec<f64>,
    pub shots: usize,
    pub seed: u64,
    /// Histogram bin width; Freedman-Diaconis when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    /// Krylov propagation tolerance.
    pub tol: f64,
    pub engine: Engine,
    pub jackknife_blocks: usize,
}

pub const DEFAULT_SEED: u64 = 20_240_917;

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sites: 12,
            j: 2.0 / 3.0,
            ferromagnetic: true,
            alpha: 0.5,
            initial: InitialState::Ground,
            haar_index: 0,
            times: vec![0.0, 1.0],
            gammas: vec![1.0],
            shots: 4000,
            seed: DEFAULT_SEED,
            bin_width: None,
            tol: 1e-10,
            engine: Engine::Auto,
            jackknife_blocks: 100,
        }
    }
}

impl ExperimentConfig {
    pub fn coupling(&self) -> f64 {
        if self.ferromagnetic {
            -self.j
        } else {
            self.j
        }
    }

    pub fn schedule(&self) -> Result<MeasurementSchedule> {
        match self.gammas.len() {
            1 => MeasurementSchedule::uniform(&self.times, self.gammas[0]),
            n if n == self.times.len() => MeasurementSchedule::from_pairs(&self.times, &self.gammas),
            n => Err(Error::invalid(format!(
                "{n} strengths given for {} measurement times",
                self.times.len()
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots < 2 {
            return Err(Error::invalid("shots must be at least 2"));
        }
        if let Some(w) = self.bin_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("bin width {w} must be positive")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if !self.j.is_finite() || !self.alpha.is_finite() {
            return Err(Error::invalid("coupling and exponent must be finite"));
        }
        if self.jackknife_blocks < 2 {
            return Err(Error::invalid("jackknife needs at least two blocks"));
        }
        if !(crate::spin::hamiltonian::MIN_SITES..=crate::spin::MAX_SITES).contains(&self.sites) {
            return Err(Error::Resource(format!("{} sites is outside the supported range", self.sites)));
        }
        self.schedule().map(|_| ())
    }

    /// Two-time ground-state run with the default coupling.
    pub fn two_time(sites: usize, shots: usize) -> Self {
        ExperimentConfig { sites, shots, ..Default::default() }
    }

    /// Critical chain with the anomalous rescaling.
    pub fn critical(sites: usize, shots: usize) -> Self {
        ExperimentConfig {
            sites,
            shots,
            j: 1.0,
            alpha: crate::spin::ALPHA_CRITICAL,
            gammas: vec![2.0],
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig { bin_width: Some(0.1), ..Default::default() };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(toml::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
        let plain = ExperimentConfig::default();
        assert_eq!(toml::from_str::<ExperimentConfig>(&toml::to_string(&plain).unwrap()).unwrap(), plain);
    }

    #[test]
    fn partial_files_use_defaults() {
        let cfg: ExperimentConfig = toml::from_str("sites = 8\nj = 0.0\n").unwrap();
        assert_eq!(cfg.sites, 8);
        assert_eq!(cfg.shots, ExperimentConfig::default().shots);
        assert!(toml::from_str::<ExperimentConfig>("colour = 1").is_err());
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = ExperimentConfig { gammas: vec![1.0, 2.0, 3.0], ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig { shots: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let big = ExperimentConfig { sites: 30, ..Default::default() };
        assert!(matches!(big.validate(), Err(Error::Resource(_))));
        assert_eq!(ExperimentConfig::default().coupling(), -2.0 / 3.0);
    }
}
