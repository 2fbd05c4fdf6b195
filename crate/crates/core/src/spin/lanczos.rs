//! Restarted Lanczos for the lowest eigenpairs of the real Hamiltonian.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::spin::hamiltonian::IsingChain;
use crate::spin::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundStateOptions {
    /// Target residual `||H psi - E psi||`.
    pub tol: f64,
    pub seed: u64,
    pub basis_size: usize,
    pub max_restarts: usize,
    /// Also converge the first excited level to report the gap.
    pub compute_gap: bool,
    /// Gaps below this are reported as near-degenerate.
    pub gap_threshold: f64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        GroundStateOptions {
            tol: 1e-10,
            seed: 0x5eed,
            basis_size: 60,
            max_restarts: 500,
            compute_gap: true,
            gap_threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    pub residual: f64,
    pub restarts: usize,
    pub first_excited: Option<f64>,
    pub gap_threshold: f64,
}

impl GroundState {
    pub fn gap(&self) -> Option<f64> {
        self.first_excited.map(|e1| e1 - self.energy)
    }

    pub fn near_degenerate(&self) -> bool {
        self.gap().is_some_and(|g| g < self.gap_threshold)
    }
}

struct Eigenpair {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
    restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn project_out(v: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

fn lowest_eigenpair(
    h: &IsingChain,
    start: Vec<f64>,
    deflate: &[Vec<f64>],
    opts: &GroundStateOptions,
) -> Result<Eigenpair> {
    let dim = h.dim();
    let m_max = opts.basis_size.clamp(2, dim.saturating_sub(deflate.len()).max(1));
    let mut v = start;
    project_out(&mut v, deflate);
    if normalize(&mut v) == 0.0 {
        return Err(Error::numeric("Lanczos start vector vanished after deflation"));
    }
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;
    for restart in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![v.clone()];
        let mut alpha = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        loop {
            let k = basis.len() - 1;
            h.apply(&basis[k], &mut w);
            project_out(&mut w, deflate);
            alpha.push(dot(&basis[k], &w));
            project_out(&mut w, &basis);
            let b = dot(&w, &w).sqrt();
            if basis.len() == m_max || b < 1e-13 * alpha.iter().fold(1.0f64, |m, a| m.max(a.abs())) {
                beta.push(b);
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let imin = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[imin];
        let y = eig.eigenvectors.column(imin);
        v = vec![0.0; dim];
        for (q, c) in basis.iter().zip(y.iter()) {
            axpy(*c, q, &mut v);
        }
        project_out(&mut v, deflate);
        normalize(&mut v);
        h.apply(&v, &mut w);
        project_out(&mut w, deflate);
        axpy(-theta, &v, &mut w);
        let residual = dot(&w, &w).sqrt();
        last_residual = residual;
        if residual <= opts.tol {
            return Ok(Eigenpair { value: dot_h(h, &v, deflate), vector: v, residual, restarts: restart });
        }
    }
    Err(Error::numeric(format!(
        "Lanczos did not converge after {} restarts: residual {last_residual:.3e}",
        opts.max_restarts
    )))
}

/// Rayleigh quotient of the (deflated) operator.
fn dot_h(h: &IsingChain, v: &[f64], deflate: &[Vec<f64>]) -> f64 {
    let mut w = vec![0.0; v.len()];
    h.apply(v, &mut w);
    project_out(&mut w, deflate);
    dot(v, &w)
}

fn start_vector(dim: usize, seed: u64, label: &str) -> Vec<f64> {
    let mut r = rng::stream(seed, label, 0);
    (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// Lowest eigenpair. The global sign is fixed so that the largest amplitude is positive.
pub fn ground_state(h: &IsingChain, opts: &GroundStateOptions) -> Result<GroundState> {
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("Lanczos tolerance must be positive"));
    }
    let dim = h.dim();
    let gs = lowest_eigenpair(h, start_vector(dim, opts.seed, "lanczos-start"), &[], opts)?;
    let first_excited = if opts.compute_gap {
        let deflate = vec![gs.vector.clone()];
        let ex = lowest_eigenpair(h, start_vector(dim, opts.seed, "lanczos-excited"), &deflate, opts)?;
        Some(ex.value)
    } else {
        None
    };
    let mut v = gs.vector;
    let imax = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if v[imax] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let state = StateVector::normalized(h.sites(), v.iter().map(|&x| Complex64::new(x, 0.0)).collect())?;
    Ok(GroundState {
        energy: gs.value,
        state,
        residual: gs.residual,
        restarts: gs.restarts,
        first_excited,
        gap_threshold: opts.gap_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_low(h: &IsingChain) -> (f64, f64) {
        let mut ev: Vec<f64> = h.dense().unwrap().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        (ev[0], ev[1])
    }

    #[test]
    fn free_chain() {
        let h = IsingChain::periodic(6, 0.0).unwrap();
        let gs = ground_state(&h, &GroundStateOptions::default()).unwrap();
        assert!((gs.energy + 6.0).abs() < 1e-10);
        // Product of |-> states: every amplitude has modulus 2^{-L/2}.
        for a in gs.state.amplitudes() {
            assert!((a.norm() - 0.125).abs() < 1e-8);
        }
        assert!((gs.gap().unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn matches_dense_oracle() {
        for j in [2.0 / 3.0, -2.0 / 3.0, 1.0] {
            let h = IsingChain::periodic(6, j).unwrap();
            let gs = ground_state(&h, &GroundStateOptions::default()).unwrap();
            let (e0, e1) = dense_low(&h);
            assert!((gs.energy - e0).abs() < 1e-9, "J={j}");
            assert!((gs.first_excited.unwrap() - e1).abs() < 1e-8, "J={j}");
            assert!(gs.residual <= 1e-10);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let h = IsingChain::periodic(8, 0.5).unwrap();
        let a = ground_state(&h, &GroundStateOptions::default()).unwrap();
        let b = ground_state(&h, &GroundStateOptions::default()).unwrap();
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn degeneracy_guard() {
        let opts = GroundStateOptions { gap_threshold: 1e-2, ..Default::default() };
        let ordered = ground_state(&IsingChain::periodic(8, -3.0).unwrap(), &opts).unwrap();
        let (e0, e1) = dense_low(&IsingChain::periodic(8, -3.0).unwrap());
        assert!((ordered.gap().unwrap() - (e1 - e0)).abs() < 1e-7);
        assert!(ordered.near_degenerate());
        let disordered = ground_state(&IsingChain::periodic(8, -0.5).unwrap(), &opts).unwrap();
        assert!(!disordered.near_degenerate());
    }
}
