//! Transverse-field Ising chain `H = sum_j X_j + J sum_j Z_j Z_{j+1}`.
//!
//! Basis convention: bit `b_j = 0` means `Z_j = +1`, and site 0 is the least
//! significant bit of the basis index.

use std::ops::{Add, Mul};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 20;
/// Largest chain for which `dense()` is allowed.
pub const MAX_DENSE_SITES: usize = 12;

#[derive(Debug, Clone)]
pub struct IsingChain {
    sites: usize,
    coupling: f64,
    periodic: bool,
    diagonal: Vec<f64>,
}

impl IsingChain {
    pub fn new(sites: usize, coupling: f64, periodic: bool) -> Result<Self> {
        if !(MIN_SITES..=MAX_SITES).contains(&sites) {
            return Err(Error::Resource(format!(
                "chain length {sites} outside the supported range {MIN_SITES}..={MAX_SITES}"
            )));
        }
        if !coupling.is_finite() {
            return Err(Error::invalid(format!("coupling {coupling} is not finite")));
        }
        let bonds: Vec<(usize, usize)> = if periodic {
            (0..sites).map(|j| (j, (j + 1) % sites)).collect()
        } else {
            (0..sites - 1).map(|j| (j, j + 1)).collect()
        };
        let diagonal = (0..1usize << sites)
            .map(|z| {
                let aligned = bonds
                    .iter()
                    .map(|&(a, b)| if (z >> a ^ z >> b) & 1 == 0 { 1.0 } else { -1.0 })
                    .sum::<f64>();
                coupling * aligned
            })
            .collect();
        Ok(IsingChain { sites, coupling, periodic, diagonal })
    }

    pub fn periodic(sites: usize, coupling: f64) -> Result<Self> {
        Self::new(sites, coupling, true)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// `J sum Z_j Z_{j+1}` per basis state.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// `y = H x`. Works for real and complex amplitudes.
    pub fn apply<T>(&self, x: &[T], y: &mut [T])
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (z, out) in y.iter_mut().enumerate() {
            let mut acc = x[z] * self.diagonal[z];
            for j in 0..self.sites {
                acc = acc + x[z ^ (1 << j)];
            }
            *out = acc;
        }
    }

    /// Dense matrix, for oracles on small chains.
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        if self.sites > MAX_DENSE_SITES {
            return Err(Error::Resource(format!(
                "dense Hamiltonian refused for {} sites (limit {MAX_DENSE_SITES})",
                self.sites
            )));
        }
        let n = self.dim();
        let mut h = DMatrix::zeros(n, n);
        for z in 0..n {
            h[(z, z)] = self.diagonal[z];
            for j in 0..self.sites {
                h[(z ^ (1 << j), z)] += 1.0;
            }
        }
        Ok(h)
    }

    /// Nonzero entries in row `z`: the diagonal plus one per site.
    pub fn row_nonzeros(&self, z: usize) -> usize {
        usize::from(self.diagonal[z] != 0.0) + self.sites
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn two_site_diagonal() {
        let j = 0.7;
        let h = IsingChain::periodic(2, j).unwrap();
        assert_eq!(h.diagonal(), &[2.0 * j, -2.0 * j, -2.0 * j, 2.0 * j]);
        let d = h.dense().unwrap();
        assert_eq!(d[(0, 1)], 1.0);
        assert_eq!(d[(0, 2)], 1.0);
        assert_eq!(d[(0, 3)], 0.0);
    }

    #[test]
    fn free_spectrum() {
        let h = IsingChain::periodic(3, 0.0).unwrap();
        let mut ev: Vec<f64> = h.dense().unwrap().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let expected = [-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn matvec_matches_dense() {
        for (l, periodic) in [(2, true), (4, true), (5, false), (6, true)] {
            let h = IsingChain::new(l, 2.0 / 3.0, periodic).unwrap();
            let d = h.dense().unwrap();
            assert!((&d - d.transpose()).abs().max() == 0.0);
            let x: Vec<Complex64> = (0..h.dim())
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let mut y = vec![Complex64::new(0.0, 0.0); h.dim()];
            h.apply(&x, &mut y);
            for r in 0..h.dim() {
                let expected: Complex64 = (0..h.dim()).map(|c| x[c] * d[(r, c)]).sum();
                assert!((y[r] - expected).norm() < 1e-12);
                assert_eq!(d.row(r).iter().filter(|v| **v != 0.0).count(), h.row_nonzeros(r));
            }
        }
    }

    #[test]
    fn size_limits() {
        assert!(matches!(IsingChain::periodic(1, 1.0), Err(Error::Resource(_))));
        assert!(matches!(IsingChain::periodic(21, 1.0), Err(Error::Resource(_))));
        assert!(IsingChain::periodic(13, 1.0).unwrap().dense().is_err());
    }
}
