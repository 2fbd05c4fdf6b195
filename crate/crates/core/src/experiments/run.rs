//! Shared plumbing: prepare the chain and initial state, sample trajectories,
//! summarize outcomes.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Engine, ExperimentConfig, InitialState};
use super::stats::{Estimate, Histogram, Histogram2D, Jackknife};
use crate::error::{Error, Result};
use crate::gaussian::{outcome_covariance, CorrelationData};
use crate::measurement::branch::{BranchEngine, DEFAULT_MEMORY_LIMIT};
use crate::measurement::{MeasurementSchedule, TrajectoryRecord, TrajectoryRunner};
use crate::rng;
use crate::spin::state::haar_random_state_with;
use crate::spin::{
    ground_state, magnetization_observable, two_point_functions, DiagonalObservable, GroundStateOptions, IsingChain,
    Propagator, StateVector,
};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GroundInfo {
    pub energy: f64,
    pub residual: f64,
    pub gap: Option<f64>,
    pub near_degenerate: bool,
}

/// Chain, initial state and centered observable for a configuration.
#[derive(Debug, Clone)]
pub struct System {
    pub chain: IsingChain,
    pub psi0: StateVector,
    pub obs: DiagonalObservable,
    pub ground: Option<GroundInfo>,
}

/// Random-stream label of the Haar initial states.
pub const HAAR_STREAM: &str = "haar-state";

impl System {
    pub fn prepare(cfg: &ExperimentConfig) -> Result<Self> {
        let chain = IsingChain::periodic(cfg.sites, cfg.coupling())?;
        let (psi0, ground) = match cfg.initial {
            InitialState::Ground => {
                let opts = GroundStateOptions { seed: cfg.seed, ..Default::default() };
                let gs = ground_state(&chain, &opts)?;
                let info = GroundInfo {
                    energy: gs.energy,
                    residual: gs.residual,
                    gap: gs.gap(),
                    near_degenerate: gs.near_degenerate(),
                };
                (gs.state, Some(info))
            }
            InitialState::Haar => {
                let mut r = rng::stream(cfg.seed, HAAR_STREAM, (cfg.sites as u64) << 32 | cfg.haar_index);
                (haar_random_state_with(cfg.sites, &mut r)?, None)
            }
        };
        let obs = magnetization_observable(cfg.sites, cfg.alpha, &psi0)?;
        Ok(System { chain, psi0, obs, ground })
    }

    pub fn propagator(&self, cfg: &ExperimentConfig) -> Result<Propagator<'_>> {
        Propagator::new(&self.chain, cfg.tol)
    }

    /// Exact `C` and `chi` on the schedule times, with the schedule strengths.
    pub fn correlations(&self, prop: &Propagator, schedule: &MeasurementSchedule) -> Result<CorrelationData> {
        two_point_functions(&self.psi0, prop, &self.obs, &schedule.times())?.into_correlation_data(schedule.gammas())
    }
}

pub enum Sampler<'a> {
    Branch(BranchEngine),
    Direct(TrajectoryRunner<'a>),
}

impl<'a> Sampler<'a> {
    pub fn new(
        engine: Engine,
        system: &'a System,
        prop: &'a Propagator<'a>,
        schedule: &'a MeasurementSchedule,
    ) -> Result<Self> {
        let fits = BranchEngine::fits(system.chain.sites(), schedule.len(), DEFAULT_MEMORY_LIMIT);
        match engine {
            Engine::Branch | Engine::Auto if fits => {
                Ok(Sampler::Branch(BranchEngine::new(&system.psi0, prop, &system.obs, schedule)?))
            }
            Engine::Branch => Err(Error::Resource("schedule too long for the branch engine".into())),
            _ => Ok(Sampler::Direct(TrajectoryRunner::new(&system.psi0, prop, &system.obs, schedule)?)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Sampler::Branch(_) => "branch",
            Sampler::Direct(_) => "direct",
        }
    }

    pub fn run(&self, seed: u64, index: u64) -> Result<TrajectoryRecord> {
        match self {
            Sampler::Branch(e) => Ok(e.run(seed, index)),
            Sampler::Direct(r) => r.run(seed, index),
        }
    }

    pub fn offsets(&self) -> &[f64] {
        match self {
            Sampler::Branch(e) => e.offsets(),
            Sampler::Direct(r) => r.offsets(),
        }
    }

    /// Exact outcome covariance in `x` units, when the branch engine is in use.
    pub fn exact_covariance_x(&self, schedule: &MeasurementSchedule) -> Option<DMatrix<f64>> {
        match self {
            Sampler::Branch(e) => Some(e.exact_moments().covariance_x(&schedule.gammas())),
            Sampler::Direct(_) => None,
        }
    }

    /// Trajectories `0..shots`, in index order whatever the thread count.
    pub fn sample(&self, seed: u64, shots: usize) -> Result<Vec<TrajectoryRecord>> {
        (0..shots as u64).into_par_iter().map(|i| self.run(seed, i)).collect()
    }
}

/// Per-event statistics of `x = gamma m` plus histograms.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryStats {
    pub shots: usize,
    pub times: Vec<f64>,
    pub gammas: Vec<f64>,
    pub means: Vec<Estimate>,
    pub variances: Vec<Estimate>,
    #[serde(serialize_with = "crate::experiments::output::serialize_matrix")]
    pub covariance: DMatrix<f64>,
    #[serde(serialize_with = "crate::experiments::output::serialize_matrix")]
    pub covariance_se: DMatrix<f64>,
    /// One per event, all on the same edges.
    pub marginals: Vec<Histogram>,
    /// First two events.
    pub joint: Option<Histogram2D>,
}

pub fn scaled_outcomes(records: &[TrajectoryRecord], schedule: &MeasurementSchedule) -> Vec<Vec<f64>> {
    records.iter().map(|r| r.scaled(schedule)).collect()
}

pub fn summarize(
    xs: &[Vec<f64>],
    schedule: &MeasurementSchedule,
    bin_width: Option<f64>,
    blocks: usize,
) -> Result<(SummaryStats, Jackknife)> {
    let n = schedule.len();
    let jk = Jackknife::new(xs, blocks)?;
    let means = (0..n).map(|a| jk.mean(a)).collect();
    let variances = (0..n).map(|a| jk.covariance(a, a)).collect();
    let mut covariance = DMatrix::zeros(n, n);
    let mut covariance_se = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let e = jk.covariance(a, b);
            covariance[(a, b)] = e.value;
            covariance_se[(a, b)] = e.se;
        }
    }
    let columns: Vec<Vec<f64>> = (0..n).map(|a| xs.iter().map(|r| r[a]).collect()).collect();
    let (marginals, joint) = if n >= 2 {
        let joint = Histogram2D::new(&columns[0], &columns[1], bin_width)?;
        let pooled: Vec<f64> = columns.iter().flatten().copied().collect();
        let edges = match n {
            2 => joint.edges.clone(),
            _ => super::stats::uniform_edges(&pooled, bin_width)?,
        };
        let marginals = columns.iter().map(|c| Histogram::with_edges(c, edges.clone())).collect();
        (marginals, Some(joint))
    } else {
        (vec![Histogram::new(&columns[0], bin_width)?], None)
    };
    Ok((
        SummaryStats {
            shots: xs.len(),
            times: schedule.times(),
            gammas: schedule.gammas(),
            means,
            variances,
            covariance,
            covariance_se,
            marginals,
            joint,
        },
        jk,
    ))
}

/// Everything a monitoring run produces.
#[derive(Debug, Clone)]
pub struct MonitorRun {
    pub config: ExperimentConfig,
    pub schedule: MeasurementSchedule,
    pub engine: &'static str,
    pub ground: Option<GroundInfo>,
    pub offsets: Vec<f64>,
    pub correlation: CorrelationData,
    /// Gaussian prediction of the `x` covariance.
    pub gaussian_covariance: DMatrix<f64>,
    /// Exact finite-size `x` covariance (branch engine only).
    pub exact_covariance: Option<DMatrix<f64>>,
    pub records: Vec<TrajectoryRecord>,
    pub outcomes_x: Vec<Vec<f64>>,
    pub summary: SummaryStats,
    pub jackknife: Jackknife,
}

pub fn monitor(cfg: &ExperimentConfig) -> Result<MonitorRun> {
    cfg.validate()?;
    let schedule = cfg.schedule()?;
    let system = System::prepare(cfg)?;
    let prop = system.propagator(cfg)?;
    let correlation = system.correlations(&prop, &schedule)?;
    let gaussian_covariance = outcome_covariance(&correlation);
    let sampler = Sampler::new(cfg.engine, &system, &prop, &schedule)?;
    let exact_covariance = sampler.exact_covariance_x(&schedule);
    let records = sampler.sample(cfg.seed, cfg.shots)?;
    let outcomes_x = scaled_outcomes(&records, &schedule);
    let (summary, jackknife) = summarize(&outcomes_x, &schedule, cfg.bin_width, cfg.jackknife_blocks)?;
    Ok(MonitorRun {
        config: cfg.clone(),
        engine: sampler.name(),
        offsets: sampler.offsets().to_vec(),
        schedule,
        ground: system.ground,
        correlation,
        gaussian_covariance,
        exact_covariance,
        records,
        outcomes_x,
        summary,
        jackknife,
    })
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
