//! Exact trajectory sampling through magnetization-sector branches.
//!
//! The Kraus operators depend on a basis state only through its sector
//! `k = popcount(z)`, so `K_m = sum_k f_k(m) P_k`. Before event `e` the
//! conditional state is a real combination `sum_b c_b u_b` of fixed branch
//! vectors `u_(k_0..k_{e-1}) = U P_{k_{e-1}} ... U P_{k_0} U psi0`. The Gram
//! matrices `M_e[j] = Re <u_b| P_j |u_b'>` then give every sector probability
//! of every trajectory without touching a state vector. The branch count at
//! event `e` is `(L + 1)^e`, so this is meant for a handful of events.

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::schedule::{MeasurementSchedule, TrajectoryRecord};
use super::trajectory::TRAJECTORY_STREAM;
use crate::error::{Error, Result};
use crate::rng;
use crate::spin::{DiagonalObservable, Propagator, StateVector};

/// Default cap on the memory held by branch vectors.
pub const DEFAULT_MEMORY_LIMIT: usize = 1 << 30;

pub struct BranchEngine {
    schedule: MeasurementSchedule,
    sectors: usize,
    /// Centered sector values per event.
    q: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    /// `gram[e][j]`, each `B_e x B_e`.
    gram: Vec<Vec<DMatrix<f64>>>,
}

/// Exact first and second moments of the outcomes `m`.
#[derive(Debug, Clone)]
pub struct ExactMoments {
    pub means: Vec<f64>,
    /// `E[m_a m_b]`.
    pub second: DMatrix<f64>,
}

impl ExactMoments {
    pub fn covariance_m(&self) -> DMatrix<f64> {
        let n = self.means.len();
        DMatrix::from_fn(n, n, |a, b| self.second[(a, b)] - self.means[a] * self.means[b])
    }

    /// Covariance of `x = gamma m`.
    pub fn covariance_x(&self, gammas: &[f64]) -> DMatrix<f64> {
        let c = self.covariance_m();
        DMatrix::from_fn(c.nrows(), c.ncols(), |a, b| gammas[a] * gammas[b] * c[(a, b)])
    }
}

fn sector_gram(vectors: &[Option<Vec<Complex64>>], sector: &[u8], sectors: usize) -> Vec<DMatrix<f64>> {
    let nb = vectors.len();
    let mut gram = vec![DMatrix::zeros(nb, nb); sectors];
    let mut acc = vec![0.0; sectors];
    for b in 0..nb {
        let Some(u) = &vectors[b] else { continue };
        for b2 in b..nb {
            let Some(v) = &vectors[b2] else { continue };
            acc.iter_mut().for_each(|a| *a = 0.0);
            for ((x, y), &k) in u.iter().zip(v).zip(sector) {
                acc[k as usize] += x.re * y.re + x.im * y.im;
            }
            for (j, a) in acc.iter().enumerate() {
                gram[j][(b, b2)] = *a;
                gram[j][(b2, b)] = *a;
            }
        }
    }
    gram
}

fn quad(m: &DMatrix<f64>, c: &[f64]) -> f64 {
    let n = c.len();
    let mut total = 0.0;
    for b in 0..n {
        if c[b] == 0.0 {
            continue;
        }
        let row: f64 = (0..n).map(|b2| m[(b, b2)] * c[b2]).sum();
        total += c[b] * row;
    }
    total
}

impl BranchEngine {
    pub fn new(
        psi0: &StateVector,
        prop: &Propagator,
        obs: &DiagonalObservable,
        schedule: &MeasurementSchedule,
    ) -> Result<Self> {
        Self::with_memory_limit(psi0, prop, obs, schedule, DEFAULT_MEMORY_LIMIT)
    }

    /// Number of branch vectors needed at the last event.
    pub fn branch_count(sites: usize, events: usize) -> Option<usize> {
        (sites + 1).checked_pow(u32::try_from(events.saturating_sub(1)).ok()?)
    }

    /// Whether the engine fits in `limit` bytes.
    pub fn fits(sites: usize, events: usize, limit: usize) -> bool {
        let Some(last) = Self::branch_count(sites, events) else {
            return false;
        };
        let prev = last / (sites + 1);
        let bytes = (last + prev).saturating_mul(16usize << sites);
        let gram_bytes = last.saturating_mul(last).saturating_mul((sites + 1) * 8);
        bytes <= limit && gram_bytes <= limit
    }

    pub fn with_memory_limit(
        psi0: &StateVector,
        prop: &Propagator,
        obs: &DiagonalObservable,
        schedule: &MeasurementSchedule,
        limit: usize,
    ) -> Result<Self> {
        let sites = psi0.sites();
        if obs.sites() != sites {
            return Err(Error::invalid("observable and state sizes differ"));
        }
        if !Self::fits(sites, schedule.len(), limit) {
            return Err(Error::Resource(format!(
                "{} events on {sites} sites need too many branch vectors",
                schedule.len()
            )));
        }
        let sectors = sites + 1;
        let sector: Vec<u8> = (0..psi0.dim()).map(|z| z.count_ones() as u8).collect();
        let raw: Vec<f64> = (0..sectors).map(|k| obs.with_offset(0.0).sector_value(k)).collect();
        let events = schedule.events();
        let mut level: Vec<Option<Vec<Complex64>>> = vec![Some(prop.evolve(psi0.amplitudes(), events[0].time)?)];
        let mut gram = Vec::with_capacity(events.len());
        for e in 0..events.len() {
            if e > 0 {
                let dt = events[e].time - events[e - 1].time;
                let mut next = Vec::with_capacity(level.len() * sectors);
                for u in &level {
                    for k in 0..sectors {
                        next.push(match u {
                            Some(u) => {
                                let projected: Vec<Complex64> = u
                                    .iter()
                                    .zip(&sector)
                                    .map(|(a, &s)| if s as usize == k { *a } else { Complex64::new(0.0, 0.0) })
                                    .collect();
                                if projected.iter().all(|a| a.norm_sqr() == 0.0) {
                                    None
                                } else {
                                    Some(prop.evolve(&projected, dt)?)
                                }
                            }
                            None => None,
                        });
                    }
                }
                level = next;
            }
            gram.push(sector_gram(&level, &sector, sectors));
        }
        let offsets: Vec<f64> = gram
            .iter()
            .map(|g| {
                let ones = vec![1.0; g[0].nrows()];
                g.iter().zip(&raw).map(|(m, q)| q * quad(m, &ones)).sum()
            })
            .collect();
        let q = offsets.iter().map(|mu| raw.iter().map(|r| r - mu).collect()).collect();
        Ok(BranchEngine { schedule: schedule.clone(), sectors, q, offsets, gram })
    }

    /// Same times and branches with new strengths.
    pub fn with_gammas(&self, gammas: &[f64]) -> Result<Self> {
        Ok(BranchEngine {
            schedule: MeasurementSchedule::from_pairs(&self.schedule.times(), gammas)?,
            sectors: self.sectors,
            q: self.q.clone(),
            offsets: self.offsets.clone(),
            gram: self.gram.clone(),
        })
    }

    pub fn schedule(&self) -> &MeasurementSchedule {
        &self.schedule
    }

    /// `mu(t_e)` of the unmeasured evolution.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn sector_values(&self, event: usize) -> &[f64] {
        &self.q[event]
    }

    /// Sector probabilities at `event` for branch coefficients `c` (normalized to sum 1).
    pub fn sector_probabilities(&self, event: usize, c: &[f64]) -> Vec<f64> {
        let mut p: Vec<f64> = self.gram[event].iter().map(|m| quad(m, c).max(0.0)).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        p
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut c = vec![1.0];
        let mut outcomes = Vec::with_capacity(self.schedule.len());
        for (e, event) in self.schedule.events().iter().enumerate() {
            let p = self.sector_probabilities(e, &c);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = self.sectors - 1;
            for (j, pj) in p.iter().enumerate() {
                acc += pj;
                if u < acc {
                    pick = j;
                    break;
                }
            }
            let n: f64 = rng.sample(StandardNormal);
            let m = self.q[e][pick] + n / (SQRT_2 * event.gamma);
            outcomes.push(m);
            if e + 1 < self.schedule.len() {
                let g2 = event.gamma * event.gamma;
                let dmin = self.q[e]
                    .iter()
                    .zip(&p)
                    .filter(|(_, pj)| **pj > 0.0)
                    .map(|(q, _)| (m - q) * (m - q))
                    .fold(f64::INFINITY, f64::min);
                let f: Vec<f64> = self.q[e]
                    .iter()
                    .map(|q| (-0.5 * g2 * ((m - q) * (m - q) - dmin)).exp())
                    .collect();
                c = c.iter().flat_map(|cb| f.iter().map(move |fk| cb * fk)).collect();
            }
        }
        outcomes
    }

    pub fn run(&self, seed: u64, index: u64) -> TrajectoryRecord {
        let mut r = rng::stream(seed, TRAJECTORY_STREAM, index);
        TrajectoryRecord { seed, index, outcomes: self.sample_with(&mut r) }
    }

    /// `E[prod_e m_e^{powers[e]}]` for powers in `{0, 1, 2}`.
    pub fn moment(&self, powers: &[u8]) -> f64 {
        let n = self.schedule.len();
        assert_eq!(powers.len(), n);
        let last = n - 1;
        let s = self.sectors;
        // Per-event pair weights after integrating out m_e.
        let weights: Vec<DMatrix<f64>> = (0..last)
            .map(|e| {
                let g = self.schedule.events()[e].gamma;
                let q = &self.q[e];
                DMatrix::from_fn(s, s, |k, k2| {
                    let d = q[k] - q[k2];
                    let mean = 0.5 * (q[k] + q[k2]);
                    let g0 = (-0.25 * g * g * d * d).exp();
                    match powers[e] {
                        0 => g0,
                        1 => mean * g0,
                        _ => (mean * mean + 0.5 / (g * g)) * g0,
                    }
                })
            })
            .collect();
        let g_last = self.schedule.events()[last].gamma;
        let h: Vec<f64> = self.q[last]
            .iter()
            .map(|q| match powers[last] {
                0 => 1.0,
                1 => *q,
                _ => q * q + 0.5 / (g_last * g_last),
            })
            .collect();
        let mut combined = DMatrix::zeros(self.gram[last][0].nrows(), self.gram[last][0].ncols());
        for (m, hj) in self.gram[last].iter().zip(&h) {
            combined += m * *hj;
        }
        let nb = combined.nrows();
        let digits = |mut b: usize| {
            let mut d = vec![0usize; last];
            for e in (0..last).rev() {
                d[e] = b % s;
                b /= s;
            }
            d
        };
        let all_digits: Vec<Vec<usize>> = (0..nb).map(digits).collect();
        let mut total = 0.0;
        for b in 0..nb {
            for b2 in 0..nb {
                let m = combined[(b, b2)];
                if m == 0.0 {
                    continue;
                }
                let w: f64 = (0..last).map(|e| weights[e][(all_digits[b][e], all_digits[b2][e])]).product();
                total += w * m;
            }
        }
        total
    }

    pub fn exact_moments(&self) -> ExactMoments {
        let n = self.schedule.len();
        let unit = |a: usize, b: usize| {
            let mut p = vec![0u8; n];
            p[a] += 1;
            p[b] += 1;
            p
        };
        let means = (0..n)
            .map(|a| {
                let mut p = vec![0u8; n];
                p[a] = 1;
                self.moment(&p)
            })
            .collect();
        let mut second = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let v = self.moment(&unit(a, b));
                second[(a, b)] = v;
                second[(b, a)] = v;
            }
        }
        ExactMoments { means, second }
    }

    /// Normalization `E[1]`; equals one up to round-off.
    pub fn total_probability(&self) -> f64 {
        self.moment(&vec![0; self.schedule.len()])
    }
}
