use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementEvent {
    pub time: f64,
    pub gamma: f64,
}

/// Measurement times (strictly ascending) with their strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MeasurementEvent>", into = "Vec<MeasurementEvent>")]
pub struct MeasurementSchedule {
    events: Vec<MeasurementEvent>,
}

impl TryFrom<Vec<MeasurementEvent>> for MeasurementSchedule {
    type Error = Error;

    fn try_from(events: Vec<MeasurementEvent>) -> Result<Self> {
        MeasurementSchedule::new(events)
    }
}

impl From<MeasurementSchedule> for Vec<MeasurementEvent> {
    fn from(s: MeasurementSchedule) -> Self {
        s.events
    }
}

impl MeasurementSchedule {
    pub fn new(events: Vec<MeasurementEvent>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::invalid("measurement schedule is empty"));
        }
        if events.iter().any(|e| !e.time.is_finite()) || events.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::invalid("measurement times must be finite and strictly ascending"));
        }
        if let Some(e) = events.iter().find(|e| !(e.gamma.is_finite() && e.gamma > 0.0)) {
            return Err(Error::invalid(format!("measurement strength {} must be positive", e.gamma)));
        }
        Ok(MeasurementSchedule { events })
    }

    pub fn from_pairs(times: &[f64], gammas: &[f64]) -> Result<Self> {
        if times.len() != gammas.len() {
            return Err(Error::invalid("times and strengths differ in length"));
        }
        Self::new(times.iter().zip(gammas).map(|(&time, &gamma)| MeasurementEvent { time, gamma }).collect())
    }

    /// Same strength at every time.
    pub fn uniform(times: &[f64], gamma: f64) -> Result<Self> {
        Self::from_pairs(times, &vec![gamma; times.len()])
    }

    pub fn events(&self) -> &[MeasurementEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.gamma).collect()
    }
}

/// Outcomes `m` of one trajectory, in schedule order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    /// Master seed of the run.
    pub seed: u64,
    /// Index of the random stream derived from the master seed.
    pub index: u64,
    pub outcomes: Vec<f64>,
}

impl TrajectoryRecord {
    /// Outcomes converted to `x = gamma m`.
    pub fn scaled(&self, schedule: &MeasurementSchedule) -> Vec<f64> {
        self.outcomes.iter().zip(schedule.events()).map(|(m, e)| m * e.gamma).collect()
    }
}
