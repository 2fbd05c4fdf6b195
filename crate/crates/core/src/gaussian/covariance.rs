//! Ancilla covariance after the register has interacted with the system.
//!
//! With `C = [g_t C(t,s) g_s]` and `R = [g_t chi(t,s) g_s]` the ancilla
//! quadratures after the interaction are `x~ = x + g q + R p`, `p~ = p`, so
//!
//! ```text
//! G^xx = I/2 + C + R R^T / 2      G^xp = R / 2      G^pp = I / 2
//! ```
//!
//! The x-p block carries the vacuum momentum variance `<p^2> = 1/2`. Written
//! as `R` instead, the assembled matrix violates the uncertainty relation as
//! soon as any `|R_ts| > 1/sqrt(3)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::correlation::{matrix_to_rows, CorrelationData};
use crate::error::Result;
use crate::linalg::{block2, symplectic_form, SymEigen};

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBlocks {
    pub gxx: DMatrix<f64>,
    pub gxp: DMatrix<f64>,
    pub gpp: DMatrix<f64>,
}

impl CovarianceBlocks {
    pub fn len(&self) -> usize {
        self.gxx.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.gxx.is_empty()
    }

    /// `[[G^xx, G^xp], [G^xp^T, G^pp]]`.
    pub fn assemble(&self) -> DMatrix<f64> {
        block2(&self.gxx, &self.gxp, &self.gxp.transpose(), &self.gpp)
    }

    /// Smallest eigenvalue of `G + (i/2) Omega`; non-negative for a physical state.
    pub fn uncertainty_margin(&self) -> f64 {
        let g = self.assemble();
        let omega = symplectic_form(self.len());
        let m = DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| {
            Complex64::new(g[(i, j)], 0.5 * omega[(i, j)])
        });
        nalgebra::SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_report(&self) -> BlocksReport {
        BlocksReport {
            gxx: matrix_to_rows(&self.gxx),
            gxp: matrix_to_rows(&self.gxp),
            gpp: matrix_to_rows(&self.gpp),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlocksReport {
    pub gxx: Vec<Vec<f64>>,
    pub gxp: Vec<Vec<f64>>,
    pub gpp: Vec<Vec<f64>>,
}

pub fn build_covariance_blocks(corr: &CorrelationData) -> Result<CovarianceBlocks> {
    let n = corr.len();
    let c = corr.scaled_keldysh();
    SymEigen::new_psd(&c, "scaled keldysh matrix")?;
    let r = corr.scaled_response();
    let half = DMatrix::<f64>::identity(n, n) * 0.5;
    let gxx = &half + &c + (&r * r.transpose()) * 0.5;
    Ok(CovarianceBlocks {
        gxx: (&gxx + gxx.transpose()) * 0.5,
        gxp: r * 0.5,
        gpp: half,
    })
}

/// `<x~_t x~_s> = delta_ts/2 + g_t g_s [C(t,s) + sum_u (g_u^2/2) chi(t,u) chi(s,u)]`,
/// evaluated entry by entry.
pub fn outcome_covariance(corr: &CorrelationData) -> DMatrix<f64> {
    let n = corr.len();
    let g = corr.gammas();
    let k = corr.keldysh();
    let x = corr.response();
    DMatrix::from_fn(n, n, |t, s| {
        let backreaction: f64 = (0..n).map(|u| 0.5 * g[u] * g[u] * x[(t, u)] * x[(s, u)]).sum();
        let noise = if t == s { 0.5 } else { 0.0 };
        noise + g[t] * g[s] * (k[(t, s)] + backreaction)
    })
}

/// `<{x~_t, p~_s}>/2 = g_t g_s chi(t,s) / 2`.
pub fn cross_block(corr: &CorrelationData) -> DMatrix<f64> {
    corr.scaled_response() * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoTimePrediction {
    /// `<x~_0^2>`
    pub var0: f64,
    /// `<x~_t^2>`
    pub vart: f64,
    /// `<x~_t x~_0>`
    pub cov: f64,
}

impl TwoTimePrediction {
    /// Variance gap `<x~_t^2> - <x~_0^2>`.
    pub fn delta(&self) -> f64 {
        self.vart - self.var0
    }
}

pub fn two_time_prediction(
    gamma0: f64,
    gammat: f64,
    c00: f64,
    ctt: f64,
    c0t: f64,
    chi_t0: f64,
) -> TwoTimePrediction {
    TwoTimePrediction {
        var0: 0.5 + gamma0 * gamma0 * c00,
        vart: 0.5 + gammat * gammat * (ctt + 0.5 * gamma0 * gamma0 * chi_t0 * chi_t0),
        cov: gammat * gamma0 * c0t,
    }
}
