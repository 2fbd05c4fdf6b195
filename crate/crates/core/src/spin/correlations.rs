//! Exact two-time functions of the rescaled magnetization.
//!
//! With `G(t,s) = <psi0| q(t) q(s) |psi0>` (Heisenberg picture),
//! `C(t,s) = Re G(t,s) - mu(t) mu(s)` and `chi(t,s) = 2 Im G(t,s)` for `t > s`,
//! which equals `<i[q(s), q(t)]>`. For the free chain in its ground state this
//! gives `C(t,0) = cos 2t` and `chi(t,0) = -2 sin 2t`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::CorrelationData;
use crate::spin::krylov::Propagator;
use crate::spin::observable::DiagonalObservable;
use crate::spin::state::{inner, StateVector};

#[derive(Debug, Clone)]
pub struct TwoPointFunctions {
    pub times: Vec<f64>,
    pub keldysh: DMatrix<f64>,
    pub response: DMatrix<f64>,
    /// `mu(t) = <q(t)>` without the observable's offset.
    pub means: Vec<f64>,
}

impl TwoPointFunctions {
    pub fn into_correlation_data(self, gammas: Vec<f64>) -> Result<CorrelationData> {
        CorrelationData::new(self.times, gammas, self.keldysh, self.response)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn apply_diag(values: &[f64], v: &[Complex64]) -> Vec<Complex64> {
    v.iter().zip(values).map(|(a, q)| a * *q).collect()
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time grid must be finite and strictly ascending"));
    }
    Ok(())
}

/// States `psi0(t)` on the grid, propagated sequentially from `t = 0`.
pub fn trajectory_states(psi0: &StateVector, prop: &Propagator, times: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let mut out = Vec::with_capacity(times.len());
    let mut v = psi0.amplitudes().to_vec();
    let mut now = 0.0;
    for &t in times {
        v = prop.evolve(&v, t - now)?;
        now = t;
        out.push(v.clone());
    }
    Ok(out)
}

/// Unperturbed means `<q(t)>` (raw, without the offset) on the grid.
pub fn mean_trajectory(
    psi0: &StateVector,
    prop: &Propagator,
    obs: &DiagonalObservable,
    times: &[f64],
) -> Result<Vec<f64>> {
    check_times(times)?;
    Ok(trajectory_states(psi0, prop, times)?
        .iter()
        .map(|v| v.iter().zip(obs.raw_values()).map(|(a, q)| a.norm_sqr() * q).sum())
        .collect())
}

pub fn two_point_functions(
    psi0: &StateVector,
    prop: &Propagator,
    obs: &DiagonalObservable,
    times: &[f64],
) -> Result<TwoPointFunctions> {
    check_times(times)?;
    if obs.dim() != psi0.dim() {
        return Err(Error::invalid("observable and state dimensions differ"));
    }
    let q = obs.raw_values();
    let n = times.len();
    let states = trajectory_states(psi0, prop, times)?;
    let means: Vec<f64> = states
        .iter()
        .map(|v| v.iter().zip(q).map(|(a, q)| a.norm_sqr() * q).sum())
        .collect();
    let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for s in 0..n {
        let mut w = apply_diag(q, &states[s]);
        g[(s, s)] = inner(&states[s], &apply_diag(q, &w));
        for t in s + 1..n {
            w = prop.evolve(&w, times[t] - times[t - 1])?;
            g[(t, s)] = inner(&states[t], &apply_diag(q, &w));
            g[(s, t)] = g[(t, s)].conj();
        }
    }
    let keldysh = DMatrix::from_fn(n, n, |t, s| g[(t, s)].re - means[t] * means[s]);
    let response = DMatrix::from_fn(n, n, |t, s| if t > s { 2.0 * g[(t, s)].im } else { 0.0 });
    Ok(TwoPointFunctions { times: times.to_vec(), keldysh, response, means })
}

/// `G(t,s)` for any ordering of `t` and `s`, by direct propagation
/// (backwards when `t < s`). Used as an independent check.
pub fn ordered_correlator(
    psi0: &StateVector,
    prop: &Propagator,
    obs: &DiagonalObservable,
    t: f64,
    s: f64,
) -> Result<Complex64> {
    let q = obs.raw_values();
    let phi_s = prop.evolve(psi0.amplitudes(), s)?;
    let phi_t = prop.evolve(psi0.amplitudes(), t)?;
    let w = prop.evolve(&apply_diag(q, &phi_s), t - s)?;
    Ok(inner(&phi_t, &apply_diag(q, &w)))
}
