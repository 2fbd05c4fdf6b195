//! Strength sweeps of the variance gap and Haar-state averages.

use serde::Serialize;

use super::config::{Engine, ExperimentConfig, InitialState};
use super::run::{monitor, scaled_outcomes, Sampler, System};
use super::stats::{log_log_fit, mean, variance, Estimate, Jackknife, LineFit};
use super::two_time::two_time_experiment;
use crate::error::{Error, Result};
use crate::measurement::branch::{BranchEngine, DEFAULT_MEMORY_LIMIT};
use crate::measurement::{MeasurementSchedule, TrajectoryRunner};
use crate::rng;

/// Deviation (in standard errors) that marks the breakdown of the quartic law.
pub const BREAKDOWN_Z: f64 = 5.0;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub sites: usize,
    pub gamma: f64,
    pub delta: Estimate,
    /// `gamma^4 chi(t,0)^2 / 2`.
    pub prediction: f64,
    pub exact: Option<f64>,
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFit {
    pub sites: usize,
    pub chi: f64,
    /// First strength where the measurement departs from the prediction.
    pub gamma_star: Option<f64>,
    pub window: Vec<f64>,
    /// Fewer than two strengths lay below `gamma_star`; the two smallest were used.
    pub fallback: bool,
    pub fit: Option<LineFit>,
    /// Weighted mean of `delta / gamma^4` over the window.
    pub prefactor: Estimate,
    pub predicted_prefactor: f64,
    pub exact_slope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fits: Vec<SweepFit>,
}

impl SweepResult {
    /// `(prefactor_a - prefactor_b) / combined se` for every pair of sizes.
    pub fn prefactor_z(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, a) in self.fits.iter().enumerate() {
            for b in &self.fits[i + 1..] {
                let se = (a.prefactor.se.powi(2) + b.prefactor.se.powi(2)).sqrt();
                out.push((a.sites, b.sites, (a.prefactor.value - b.prefactor.value) / se));
            }
        }
        out
    }
}

/// Ordered strengths below the breakdown point, or the two smallest.
pub fn breakdown_window(rows: &[&SweepRow]) -> (Option<f64>, Vec<usize>, bool) {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].gamma.total_cmp(&rows[b].gamma));
    let star = order.iter().position(|&i| rows[i].z.abs() > BREAKDOWN_Z);
    let below: Vec<usize> = order[..star.unwrap_or(order.len())].to_vec();
    let gamma_star = star.map(|k| rows[order[k]].gamma);
    if below.len() >= 2 {
        (gamma_star, below, false)
    } else {
        (gamma_star, order.into_iter().take(2).collect(), true)
    }
}

pub fn gamma_sweep(cfg: &ExperimentConfig, gammas: &[f64], sites: &[usize]) -> Result<SweepResult> {
    if cfg.times.len() != 2 {
        return Err(Error::invalid("the sweep uses a two-time schedule"));
    }
    if gammas.len() < 2 || gammas.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
        return Err(Error::invalid("the sweep needs at least two positive strengths"));
    }
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &l in sites {
        let cfg_l = ExperimentConfig { sites: l, gammas: vec![gammas[0]], ..cfg.clone() };
        cfg_l.validate()?;
        let system = System::prepare(&cfg_l)?;
        let prop = system.propagator(&cfg_l)?;
        let base = cfg_l.schedule()?;
        let corr = system.correlations(&prop, &base)?;
        let chi = corr.response()[(1, 0)];
        let use_branch = cfg.engine != Engine::Direct && BranchEngine::fits(l, 2, DEFAULT_MEMORY_LIMIT);
        let engine = if use_branch { Some(BranchEngine::new(&system.psi0, &prop, &system.obs, &base)?) } else { None };
        let first = rows.len();
        for (gi, &g) in gammas.iter().enumerate() {
            let schedule = MeasurementSchedule::uniform(&cfg.times, g)?;
            let sampler = match &engine {
                Some(e) => Sampler::Branch(e.with_gammas(&[g, g])?),
                None => Sampler::Direct(TrajectoryRunner::new(&system.psi0, &prop, &system.obs, &schedule)?),
            };
            let seed = rng::derive_seed(cfg.seed, "sweep", (l as u64) << 32 | gi as u64);
            let records = sampler.sample(seed, cfg.shots)?;
            let xs = scaled_outcomes(&records, &schedule);
            let delta = Jackknife::new(&xs, cfg.jackknife_blocks)?.variance_gap(0, 1);
            let prediction = g.powi(4) * chi * chi / 2.0;
            let exact = sampler.exact_covariance_x(&schedule).map(|e| e[(1, 1)] - e[(0, 0)]);
            rows.push(SweepRow { sites: l, gamma: g, delta, prediction, exact, z: delta.z(prediction) });
        }
        let mine: Vec<&SweepRow> = rows[first..].iter().collect();
        let (gamma_star, window, fallback) = breakdown_window(&mine);
        let wg: Vec<f64> = window.iter().map(|&i| mine[i].gamma).collect();
        let wd: Vec<Estimate> = window.iter().map(|&i| mine[i].delta).collect();
        let fit = log_log_fit(&wg, &wd).ok();
        let exact_slope = window
            .iter()
            .map(|&i| mine[i].exact.map(|e| Estimate { value: e, se: 1.0 }))
            .collect::<Option<Vec<_>>>()
            .and_then(|ex| log_log_fit(&wg, &ex).ok())
            .map(|f| f.slope);
        let (mut num, mut den) = (0.0, 0.0);
        for &i in &window {
            let g4 = mine[i].gamma.powi(4);
            let w = (g4 / mine[i].delta.se).powi(2);
            num += w * mine[i].delta.value / g4;
            den += w;
        }
        fits.push(SweepFit {
            sites: l,
            chi,
            gamma_star,
            window: wg,
            fallback,
            fit,
            prefactor: Estimate { value: num / den, se: den.sqrt().recip() },
            predicted_prefactor: chi * chi / 2.0,
            exact_slope,
        });
    }
    Ok(SweepResult { rows, fits })
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarState {
    pub index: u64,
    pub seed: u64,
    pub delta: Estimate,
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarRow {
    pub sites: usize,
    pub states: Vec<HaarState>,
    /// Mean of `|delta|` over states, with the across-state standard error.
    pub mean_abs: Estimate,
    pub exact_mean_abs: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarControl {
    pub sites: usize,
    pub delta: Estimate,
    pub predicted: f64,
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarResult {
    pub rows: Vec<HaarRow>,
    /// Same schedule on the ground state of the first size.
    pub control: HaarControl,
}

impl HaarResult {
    /// `(mean_abs(L_k) - mean_abs(L_{k+1})) / combined se` for consecutive sizes.
    pub fn decrease_z(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| {
                let se = (w[0].mean_abs.se.powi(2) + w[1].mean_abs.se.powi(2)).sqrt();
                (w[0].mean_abs.value - w[1].mean_abs.value) / se
            })
            .collect()
    }
}

pub fn haar_average(cfg: &ExperimentConfig, sites: &[usize], n_states: usize) -> Result<HaarResult> {
    if n_states < 2 {
        return Err(Error::invalid("Haar averages need at least two states"));
    }
    if sites.is_empty() {
        return Err(Error::invalid("no chain sizes given"));
    }
    let mut rows = Vec::new();
    for &l in sites {
        let mut states = Vec::with_capacity(n_states);
        for s in 0..n_states as u64 {
            let seed = rng::derive_seed(cfg.seed, "haar", (l as u64) << 32 | s);
            let run_cfg = ExperimentConfig {
                sites: l,
                initial: InitialState::Haar,
                haar_index: s,
                seed,
                ..cfg.clone()
            };
            let run = monitor(&run_cfg)?;
            let delta = run.jackknife.variance_gap(0, 1);
            let exact = run.exact_covariance.as_ref().map(|e| e[(1, 1)] - e[(0, 0)]);
            states.push(HaarState { index: s, seed, delta, exact });
        }
        let abs: Vec<f64> = states.iter().map(|s| s.delta.value.abs()).collect();
        let mean_abs = Estimate { value: mean(&abs), se: (variance(&abs) / abs.len() as f64).sqrt() };
        let exact_mean_abs = states
            .iter()
            .map(|s| s.exact.map(f64::abs))
            .collect::<Option<Vec<_>>>()
            .map(|v| mean(&v));
        rows.push(HaarRow { sites: l, states, mean_abs, exact_mean_abs });
    }
    let control_cfg = ExperimentConfig { sites: sites[0], initial: InitialState::Ground, ..cfg.clone() };
    let control = two_time_experiment(&control_cfg)?;
    Ok(HaarResult {
        rows,
        control: HaarControl {
            sites: sites[0],
            delta: control.delta,
            predicted: control.prediction.delta(),
            exact: control.exact_delta,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(gamma: f64, z: f64) -> SweepRow {
        SweepRow { sites: 8, gamma, delta: Estimate { value: 1.0, se: 0.1 }, prediction: 1.0, exact: None, z }
    }

    #[test]
    fn breakdown_window_rules() {
        let rows = [row(0.8, 9.0), row(0.2, 0.5), row(0.4, -1.0), row(0.6, 6.0)];
        let refs: Vec<&SweepRow> = rows.iter().collect();
        let (star, window, fallback) = breakdown_window(&refs);
        assert_eq!(star, Some(0.6));
        assert_eq!(window, vec![1, 2]);
        assert!(!fallback);
        let rows = [row(0.2, 7.0), row(0.4, 1.0)];
        let refs: Vec<&SweepRow> = rows.iter().collect();
        let (star, window, fallback) = breakdown_window(&refs);
        assert_eq!(star, Some(0.2));
        assert_eq!(window, vec![0, 1]);
        assert!(fallback);
    }

    #[test]
    fn quartic_prediction_scales_by_sixteen() {
        let cfg = ExperimentConfig { shots: 200, ..Default::default() };
        let r = gamma_sweep(&cfg, &[0.3, 0.6], &[6]).unwrap();
        assert!((r.rows[1].prediction / r.rows[0].prediction - 16.0).abs() < 1e-9);
        assert_eq!(r.fits.len(), 1);
    }

    #[test]
    fn haar_runs_are_reproducible() {
        let cfg = ExperimentConfig { shots: 400, ..Default::default() };
        let a = haar_average(&cfg, &[4, 6], 3).unwrap();
        let b = haar_average(&cfg, &[4, 6], 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.rows[1].states.len(), 3);
        assert!(haar_average(&cfg, &[4], 1).is_err());
    }
}
