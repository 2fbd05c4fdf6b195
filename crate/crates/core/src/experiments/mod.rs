//! Monitoring experiments on the Ising chain and their comparison with the
//! Gaussian theory.

pub mod config;
pub mod output;
pub mod run;
pub mod stats;
pub mod sweep;
pub mod two_time;
pub mod wick;

pub use config::{Engine, ExperimentConfig, InitialState};
pub use run::{monitor, with_threads, MonitorRun, SummaryStats, System};
pub use stats::Estimate;
pub use sweep::{gamma_sweep, haar_average, HaarResult, SweepResult};
pub use two_time::{critical_experiment, two_time_experiment, validate_covariance, CriticalResult, TwoTimeResult};
pub use wick::{wick_check, WickRow};
