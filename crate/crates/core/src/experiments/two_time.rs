//! Two-time monitoring, the critical-chain comparison and multi-time covariance validation.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{monitor, MonitorRun};
use super::stats::{bimodality, ks_two_sample, Bimodality, Estimate, KsTest, BIMODAL_FRACTION};
use crate::error::{Error, Result};
use crate::gaussian::{two_time_prediction, TwoTimePrediction};

#[derive(Debug, Clone)]
pub struct TwoTimeResult {
    pub run: MonitorRun,
    /// `Var(x_t) - Var(x_0)`.
    pub delta: Estimate,
    pub prediction: TwoTimePrediction,
    /// Exact finite-size `delta` (branch engine only).
    pub exact_delta: Option<f64>,
    /// `(Var_k - predicted) / se` for both events.
    pub variance_z: [f64; 2],
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwoTimeReport {
    pub delta: Estimate,
    pub predicted_delta: f64,
    pub exact_delta: Option<f64>,
    pub var0: Estimate,
    pub vart: Estimate,
    pub predicted_var0: f64,
    pub predicted_vart: f64,
    pub c00: f64,
    pub ctt: f64,
    pub c0t: f64,
    pub chi_t0: f64,
    pub variance_z: [f64; 2],
}

impl TwoTimeResult {
    pub fn report(&self) -> TwoTimeReport {
        let c = self.run.correlation.keldysh();
        TwoTimeReport {
            delta: self.delta,
            predicted_delta: self.prediction.delta(),
            exact_delta: self.exact_delta,
            var0: self.run.summary.variances[0],
            vart: self.run.summary.variances[1],
            predicted_var0: self.prediction.var0,
            predicted_vart: self.prediction.vart,
            c00: c[(0, 0)],
            ctt: c[(1, 1)],
            c0t: c[(1, 0)],
            chi_t0: self.run.correlation.response()[(1, 0)],
            variance_z: self.variance_z,
        }
    }

    /// `delta / se`.
    pub fn significance(&self) -> f64 {
        self.delta.value / self.delta.se
    }
}

pub fn two_time_from_run(run: MonitorRun) -> Result<TwoTimeResult> {
    if run.schedule.len() != 2 {
        return Err(Error::invalid("a two-time experiment needs exactly two events"));
    }
    let g = run.schedule.gammas();
    let c = run.correlation.keldysh();
    let chi = run.correlation.response()[(1, 0)];
    let prediction = two_time_prediction(g[0], g[1], c[(0, 0)], c[(1, 1)], c[(1, 0)], chi);
    let delta = run.jackknife.variance_gap(0, 1);
    let exact_delta = run.exact_covariance.as_ref().map(|e| e[(1, 1)] - e[(0, 0)]);
    let v = &run.summary.variances;
    let variance_z = [v[0].z(prediction.var0), v[1].z(prediction.vart)];
    Ok(TwoTimeResult { run, delta, prediction, exact_delta, variance_z })
}

pub fn two_time_experiment(cfg: &ExperimentConfig) -> Result<TwoTimeResult> {
    if cfg.times.len() != 2 {
        return Err(Error::invalid("a two-time experiment needs exactly two times"));
    }
    two_time_from_run(monitor(cfg)?)
}

#[derive(Debug, Clone)]
pub struct CriticalResult {
    pub two_time: TwoTimeResult,
    /// Two-sample test between the `x_0` and `x_1` marginals.
    pub ks: KsTest,
    pub modes: Vec<Option<Bimodality>>,
    pub bimodal: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalReport {
    pub ks: KsTest,
    pub ks_rejects_at_01: bool,
    pub modes: Vec<Option<Bimodality>>,
    pub bimodal: Vec<bool>,
    pub two_time: TwoTimeReport,
}

impl CriticalResult {
    pub fn report(&self) -> CriticalReport {
        CriticalReport {
            ks: self.ks,
            ks_rejects_at_01: self.ks.rejects_at_01(),
            modes: self.modes.clone(),
            bimodal: self.bimodal.clone(),
            two_time: self.two_time.report(),
        }
    }
}

/// Marginal comparison between the two events: KS test plus bimodality of each histogram.
pub fn critical_experiment(cfg: &ExperimentConfig) -> Result<CriticalResult> {
    let two_time = two_time_experiment(cfg)?;
    let xs = &two_time.run.outcomes_x;
    let x0: Vec<f64> = xs.iter().map(|r| r[0]).collect();
    let x1: Vec<f64> = xs.iter().map(|r| r[1]).collect();
    let ks = ks_two_sample(&x0, &x1);
    let modes: Vec<Option<Bimodality>> =
        two_time.run.summary.marginals.iter().map(|h| bimodality(&h.counts)).collect();
    let bimodal = modes.iter().map(|m| m.is_some_and(|b| b.is_bimodal(BIMODAL_FRACTION))).collect();
    Ok(CriticalResult { two_time, ks, modes, bimodal })
}

#[derive(Debug, Clone)]
pub struct CovarianceValidation {
    pub run: MonitorRun,
    /// Largest `|empirical - gaussian| / se` over all entries.
    pub max_z_gaussian: f64,
    pub max_z_exact: Option<f64>,
    /// `mean_k / se` per event.
    pub mean_z: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub max_z_gaussian: f64,
    pub max_z_exact: Option<f64>,
    pub mean_z: Vec<f64>,
    pub empirical: Vec<Vec<f64>>,
    pub standard_error: Vec<Vec<f64>>,
    pub gaussian: Vec<Vec<f64>>,
    pub exact: Option<Vec<Vec<f64>>>,
}

impl CovarianceValidation {
    pub fn report(&self) -> CovarianceReport {
        use crate::gaussian::correlation::matrix_to_rows;
        CovarianceReport {
            max_z_gaussian: self.max_z_gaussian,
            max_z_exact: self.max_z_exact,
            mean_z: self.mean_z.clone(),
            empirical: matrix_to_rows(&self.run.summary.covariance),
            standard_error: matrix_to_rows(&self.run.summary.covariance_se),
            gaussian: matrix_to_rows(&self.run.gaussian_covariance),
            exact: self.run.exact_covariance.as_ref().map(matrix_to_rows),
        }
    }
}

/// Empirical outcome covariance against the Gaussian law with exact `C`, `chi`.
pub fn validate_covariance(cfg: &ExperimentConfig) -> Result<CovarianceValidation> {
    if cfg.times.len() < 3 {
        return Err(Error::invalid("covariance validation needs at least three events"));
    }
    let run = monitor(cfg)?;
    let s = &run.summary;
    let max_z = |reference: &nalgebra::DMatrix<f64>| {
        let mut worst: f64 = 0.0;
        for a in 0..reference.nrows() {
            for b in 0..reference.ncols() {
                worst = worst.max(((s.covariance[(a, b)] - reference[(a, b)]) / s.covariance_se[(a, b)]).abs());
            }
        }
        worst
    };
    let max_z_gaussian = max_z(&run.gaussian_covariance);
    let max_z_exact = run.exact_covariance.as_ref().map(max_z);
    let mean_z = s.means.iter().map(|m| m.z(0.0)).collect();
    Ok(CovarianceValidation { run, max_z_gaussian, max_z_exact, mean_z })
}
