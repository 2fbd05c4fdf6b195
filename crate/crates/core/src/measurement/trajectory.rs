//! Direct state-vector simulation of a measured trajectory.

use rand::Rng;

use super::kraus::{kraus_apply, sample_outcome};
use super::schedule::{MeasurementSchedule, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::rng;
use crate::spin::correlations::mean_trajectory;
use crate::spin::{DiagonalObservable, Propagator, StateVector};

/// Label of the per-trajectory random streams.
pub const TRAJECTORY_STREAM: &str = "trajectory";

/// Runs trajectories for a fixed initial state and schedule. The offsets
/// `mu(t_k)` come from the unmeasured evolution and are computed once.
pub struct TrajectoryRunner<'a> {
    psi0: &'a StateVector,
    prop: &'a Propagator<'a>,
    obs: &'a DiagonalObservable,
    schedule: &'a MeasurementSchedule,
    centered: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

impl<'a> TrajectoryRunner<'a> {
    pub fn new(
        psi0: &'a StateVector,
        prop: &'a Propagator<'a>,
        obs: &'a DiagonalObservable,
        schedule: &'a MeasurementSchedule,
    ) -> Result<Self> {
        if obs.dim() != psi0.dim() {
            return Err(Error::invalid("observable and state dimensions differ"));
        }
        let offsets = mean_trajectory(psi0, prop, obs, &schedule.times())?;
        let centered = offsets.iter().map(|mu| obs.with_offset(*mu).values()).collect();
        Ok(TrajectoryRunner { psi0, prop, obs, schedule, centered, offsets })
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn observable(&self) -> &DiagonalObservable {
        self.obs
    }

    pub fn run_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let mut psi = self.psi0.amplitudes().to_vec();
        let mut now = 0.0;
        let mut outcomes = Vec::with_capacity(self.schedule.len());
        for (event, values) in self.schedule.events().iter().zip(&self.centered) {
            psi = self.prop.evolve(&psi, event.time - now)?;
            now = event.time;
            let m = sample_outcome(&psi, values, event.gamma, rng);
            psi = kraus_apply(&psi, values, event.gamma, m)?;
            outcomes.push(m);
        }
        Ok(outcomes)
    }

    /// Trajectory `index` of the run with master seed `seed`.
    pub fn run(&self, seed: u64, index: u64) -> Result<TrajectoryRecord> {
        let mut r = rng::stream(seed, TRAJECTORY_STREAM, index);
        Ok(TrajectoryRecord { seed, index, outcomes: self.run_with(&mut r)? })
    }
}

/// One trajectory: evolve to each event time, then measure.
pub fn run_trajectory<R: Rng + ?Sized>(
    psi0: &StateVector,
    prop: &Propagator,
    obs: &DiagonalObservable,
    schedule: &MeasurementSchedule,
    rng: &mut R,
) -> Result<Vec<f64>> {
    TrajectoryRunner::new(psi0, prop, obs, schedule)?.run_with(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{ground_state, GroundStateOptions, IsingChain};

    #[test]
    fn reproducible_records() {
        let h = IsingChain::periodic(6, -0.5).unwrap();
        let gs = ground_state(&h, &GroundStateOptions::default()).unwrap();
        let obs = DiagonalObservable::magnetization(6, 0.5).unwrap();
        let prop = Propagator::new(&h, 1e-10).unwrap();
        let sched = MeasurementSchedule::uniform(&[0.0, 1.0, 1.5], 0.9).unwrap();
        let runner = TrajectoryRunner::new(&gs.state, &prop, &obs, &sched).unwrap();
        let a = runner.run(7, 3).unwrap();
        assert_eq!(a, runner.run(7, 3).unwrap());
        assert_ne!(a.outcomes, runner.run(7, 4).unwrap().outcomes);
        assert_eq!(a.outcomes.len(), 3);
        assert!(runner.offsets().iter().all(|mu| mu.abs() < 1e-10));
    }

    #[test]
    fn single_event_variance_on_free_chain() {
        let h = IsingChain::periodic(6, 0.0).unwrap();
        let gs = ground_state(&h, &GroundStateOptions::default()).unwrap();
        let obs = DiagonalObservable::magnetization(6, 0.5).unwrap();
        let prop = Propagator::new(&h, 1e-10).unwrap();
        let sched = MeasurementSchedule::uniform(&[0.0], 1.0).unwrap();
        let runner = TrajectoryRunner::new(&gs.state, &prop, &obs, &sched).unwrap();
        let n = 20_000;
        let ms: Vec<f64> = (0..n).map(|i| runner.run(1, i).unwrap().outcomes[0]).collect();
        let mean = ms.iter().sum::<f64>() / n as f64;
        let var = ms.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (n - 1) as f64;
        // Var(m) = C(0,0) + 1/(2 gamma^2).
        assert!((var - 1.5).abs() < 0.06, "{var}");
    }
}
