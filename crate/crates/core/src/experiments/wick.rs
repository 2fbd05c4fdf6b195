//! Equal-time Gaussianity of the rescaled magnetization.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::System;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct WickRow {
    pub sites: usize,
    pub q2: f64,
    pub q4: f64,
    /// `(<q^4> - 3 <q^2>^2) / <q^2>^2` for centered `q`.
    pub ratio: f64,
    /// `-2/L`, for the free chain with `alpha = 1/2`.
    pub oracle: Option<f64>,
}

/// Connected four-point ratio from the sector weights of each ground state.
pub fn wick_check(cfg: &ExperimentConfig, sites: &[usize]) -> Result<Vec<WickRow>> {
    if sites.is_empty() {
        return Err(Error::invalid("no chain sizes given"));
    }
    sites
        .iter()
        .map(|&l| {
            let cfg_l = ExperimentConfig { sites: l, ..cfg.clone() };
            let system = System::prepare(&cfg_l)?;
            let w = system.obs.sector_weights(&system.psi0);
            let q = system.obs.sector_values();
            let moment = |p: i32| w.iter().zip(&q).map(|(w, q)| w * q.powi(p)).sum::<f64>();
            let (q2, q4) = (moment(2), moment(4));
            let oracle = (cfg.j == 0.0 && cfg.alpha == 0.5).then(|| -2.0 / l as f64);
            Ok(WickRow { sites: l, q2, q4, ratio: (q4 - 3.0 * q2 * q2) / (q2 * q2), oracle })
        })
        .collect()
}

/// Same ratio estimated from samples (centered by their mean).
pub fn connected_ratio(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let m = samples.iter().sum::<f64>() / n;
    let c2 = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let c4 = samples.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    (c4 - 3.0 * c2 * c2) / (c2 * c2)
}
