//! Real-time propagation `psi(t) = exp(-i H t) psi`.
//!
//! The Krylov propagator builds a Lanczos basis of up to `max_dim` vectors and
//! exponentiates the projected tridiagonal matrix. The a-posteriori error of a
//! step of length `tau` is estimated by `beta_m |[exp(-i T tau)]_{m,1}|`;
//! steps are halved until the estimate meets the per-step share of `tol`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::hamiltonian::IsingChain;
use crate::spin::state::{inner, norm, StateVector};

/// Chains up to this size may fall back to dense diagonalization.
pub const DENSE_FALLBACK_SITES: usize = 10;
pub const MAX_KRYLOV_DIM: usize = 64;
const MIN_STEP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Krylov,
    Dense,
}

/// Dense spectral decomposition `H = V diag(E) V^T`.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    pub energies: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl DenseSpectrum {
    pub fn new(h: &IsingChain) -> Result<Self> {
        let eig = SymmetricEigen::new(h.dense()?);
        Ok(DenseSpectrum {
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        let v = &self.vectors;
        let n = psi.len();
        let coeffs: Vec<Complex64> = (0..n)
            .map(|k| {
                let c: Complex64 = v.column(k).iter().zip(psi).map(|(a, p)| p * *a).sum();
                c * Complex64::from_polar(1.0, -self.energies[k] * t)
            })
            .collect();
        (0..n)
            .map(|z| (0..n).map(|k| coeffs[k] * v[(z, k)]).sum())
            .collect()
    }
}

pub struct Propagator<'a> {
    h: &'a IsingChain,
    tol: f64,
    max_dim: usize,
    dense: Option<DenseSpectrum>,
}

/// Single-call convenience wrapper.
pub fn evolve(psi: &StateVector, h: &IsingChain, t: f64, tol: f64) -> Result<StateVector> {
    Propagator::new(h, tol)?.evolve_state(psi, t)
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a IsingChain, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::invalid("propagation tolerance must be positive"));
        }
        Ok(Propagator { h, tol, max_dim: MAX_KRYLOV_DIM, dense: None })
    }

    /// Propagate with a precomputed dense spectrum instead of Krylov.
    pub fn dense(h: &'a IsingChain) -> Result<Self> {
        Ok(Propagator { h, tol: 1e-12, max_dim: MAX_KRYLOV_DIM, dense: Some(DenseSpectrum::new(h)?) })
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim.clamp(2, MAX_KRYLOV_DIM);
        self
    }

    pub fn method(&self) -> Method {
        if self.dense.is_some() {
            Method::Dense
        } else {
            Method::Krylov
        }
    }

    pub fn hamiltonian(&self) -> &IsingChain {
        self.h
    }

    pub fn evolve_state(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let out = self.evolve(psi.amplitudes(), t)?;
        StateVector::normalized(psi.sites(), out)
    }

    /// Propagates an arbitrary (not necessarily normalized) vector.
    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        if !t.is_finite() {
            return Err(Error::invalid(format!("evolution time {t} is not finite")));
        }
        if t == 0.0 {
            return Ok(psi.to_vec());
        }
        if let Some(d) = &self.dense {
            return Ok(d.evolve(psi, t));
        }
        match self.krylov(psi, t) {
            Ok(v) => Ok(v),
            Err(e) if self.h.sites() <= DENSE_FALLBACK_SITES => {
                let _ = e;
                Ok(DenseSpectrum::new(self.h)?.evolve(psi, t))
            }
            Err(e) => Err(e),
        }
    }

    fn krylov(&self, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let dim = psi.len();
        let mut v = psi.to_vec();
        let total = t.abs();
        let sign = t.signum();
        let mut done = 0.0;
        let mut tau = total;
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        while done < total {
            tau = tau.min(total - done);
            let beta0 = norm(&v);
            if beta0 == 0.0 {
                return Ok(v);
            }
            // Lanczos basis.
            let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|x| x / beta0).collect()];
            let mut alpha = Vec::new();
            let mut beta = Vec::new();
            let accepted = loop {
                let k = basis.len() - 1;
                self.h.apply(&basis[k], &mut w);
                let a = inner(&basis[k], &w).re;
                alpha.push(a);
                for _ in 0..2 {
                    for q in &basis {
                        let c = inner(q, &w);
                        w.iter_mut().zip(q).for_each(|(x, q)| *x -= c * q);
                    }
                }
                let b = norm(&w);
                beta.push(b);
                let m = alpha.len();
                let breakdown = b <= 1e-12 * (1.0 + a.abs());
                let full = m >= self.max_dim.min(dim);
                if breakdown || full || m % 4 == 0 {
                    let (te, tv) = tridiagonal_eigen(&alpha, &beta[..m - 1]);
                    let estimate = |step: f64| {
                        let s = exp_column(&te, &tv, sign * step);
                        let err = if breakdown { 0.0 } else { b * s[m - 1].norm() * beta0 };
                        (err, s)
                    };
                    let (err, s) = estimate(tau);
                    if err <= self.tol * tau / total {
                        break (tau, s);
                    }
                    if full {
                        let mut step = tau;
                        loop {
                            step *= 0.5;
                            if step < MIN_STEP * total.max(1.0) {
                                return Err(Error::numeric(format!(
                                    "Krylov propagation failed to reach tolerance {:.1e} (estimate {err:.3e})",
                                    self.tol
                                )));
                            }
                            if estimate(step).0 <= self.tol * step / total {
                                break;
                            }
                        }
                        let (_, s) = estimate(step);
                        break (step, s);
                    }
                }
                basis.push(w.iter().map(|x| x / b).collect());
            };
            let (step, s) = accepted;
            v.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            for (q, c) in basis.iter().zip(&s) {
                let c = c * beta0;
                v.iter_mut().zip(q).for_each(|(x, q)| *x += c * q);
            }
            done += step;
            // Let the next step try to grow again.
            tau = (2.0 * step).min(total);
        }
        Ok(v)
    }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
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
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `exp(-i T tau) e_1`.
fn exp_column(te: &[f64], tv: &DMatrix<f64>, tau: f64) -> Vec<Complex64> {
    let m = te.len();
    let c: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(tv[(0, k)], -te[k] * tau))
        .collect();
    (0..m).map(|i| (0..m).map(|k| c[k] * tv[(i, k)]).sum()).collect()
}
