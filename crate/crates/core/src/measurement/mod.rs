//! Gaussian-ancilla weak measurement of the rescaled magnetization.
//!
//! The ancilla is never represented. A readout `m` with strength `gamma` acts
//! on the system through the diagonal Kraus operator
//! `(K_m psi)_z = (gamma^2/pi)^{1/4} exp(-gamma^2 (m - q_z)^2 / 2) psi_z`,
//! and is sampled exactly by drawing `z` with probability `|psi_z|^2` and then
//! `m ~ N(q_z, 1/(2 gamma^2))`.

pub mod branch;
pub mod kraus;
pub mod schedule;
pub mod trajectory;

pub use branch::{BranchEngine, ExactMoments};
pub use kraus::{kraus_apply, measure_weak, outcome_cdf, outcome_density, WeakOutcome};
pub use schedule::{MeasurementEvent, MeasurementSchedule, TrajectoryRecord};
pub use trajectory::{run_trajectory, TrajectoryRunner};
