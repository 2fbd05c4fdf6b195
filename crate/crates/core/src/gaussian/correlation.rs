use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymEigen;

/// Keldysh tolerance for symmetry and positive semi-definiteness.
const KELDYSH_TOL: f64 = 1e-10;

/// Two-time correlation data of the monitored fluctuation on a time grid.
///
/// `keldysh[(t, s)]` is the symmetrized correlator `<{q_t, q_s}>/2` and
/// `response[(t, s)]` the causal susceptibility `theta(t - s) <i[q_s, q_t]>`,
/// so `response` is strictly lower triangular. `gammas` are the measurement
/// strengths attached to each time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorrelationFile", into = "CorrelationFile")]
pub struct CorrelationData {
    times: Vec<f64>,
    gammas: Vec<f64>,
    keldysh: DMatrix<f64>,
    response: DMatrix<f64>,
}

/// On-disk layout: matrices as arrays of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationFile {
    pub times: Vec<f64>,
    pub gammas: Vec<f64>,
    pub keldysh: Vec<Vec<f64>>,
    pub response: Vec<Vec<f64>>,
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid(format!("{what} must be a {n}x{n} matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl TryFrom<CorrelationFile> for CorrelationData {
    type Error = Error;

    fn try_from(f: CorrelationFile) -> Result<Self> {
        let n = f.times.len();
        let keldysh = matrix_from_rows(&f.keldysh, n, "keldysh")?;
        let response = matrix_from_rows(&f.response, n, "response")?;
        CorrelationData::new(f.times, f.gammas, keldysh, response)
    }
}

impl From<CorrelationData> for CorrelationFile {
    fn from(c: CorrelationData) -> Self {
        CorrelationFile {
            keldysh: matrix_to_rows(&c.keldysh),
            response: matrix_to_rows(&c.response),
            times: c.times,
            gammas: c.gammas,
        }
    }
}

impl CorrelationData {
    pub fn new(
        times: Vec<f64>,
        gammas: Vec<f64>,
        keldysh: DMatrix<f64>,
        response: DMatrix<f64>,
    ) -> Result<Self> {
        let n = times.len();
        if n == 0 {
            return Err(Error::invalid("correlation data needs at least one time"));
        }
        if gammas.len() != n {
            return Err(Error::invalid(format!(
                "expected {n} measurement strengths, got {}",
                gammas.len()
            )));
        }
        if keldysh.shape() != (n, n) || response.shape() != (n, n) {
            return Err(Error::invalid(format!("correlation matrices must be {n}x{n}")));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times must be finite and strictly ascending"));
        }
        if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::invalid(format!("measurement strength {g} is not positive")));
        }
        if keldysh.iter().chain(response.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("correlation matrices contain non-finite entries"));
        }
        let scale = keldysh.amax().max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (keldysh[(i, j)] - keldysh[(j, i)]).abs() > KELDYSH_TOL * scale {
                    return Err(Error::invalid(format!(
                        "keldysh matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                if response[(i, j)] != 0.0 {
                    return Err(Error::invalid(format!(
                        "response must vanish for t <= s, found {} at ({i}, {j})",
                        response[(i, j)]
                    )));
                }
            }
        }
        let eig = SymEigen::new(&keldysh);
        if eig.min_value() < -KELDYSH_TOL * scale {
            return Err(Error::invalid(format!(
                "keldysh matrix is not positive semi-definite: eigenvalue {:.6e}",
                eig.min_value()
            )));
        }
        let keldysh = (&keldysh + keldysh.transpose()) * 0.5;
        Ok(CorrelationData {
            times,
            gammas,
            keldysh,
            response,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn keldysh(&self) -> &DMatrix<f64> {
        &self.keldysh
    }

    pub fn response(&self) -> &DMatrix<f64> {
        &self.response
    }

    /// Same correlations with different measurement strengths.
    pub fn with_gammas(&self, gammas: Vec<f64>) -> Result<Self> {
        CorrelationData::new(
            self.times.clone(),
            gammas,
            self.keldysh.clone(),
            self.response.clone(),
        )
    }

    fn scaled(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let g = &self.gammas;
        DMatrix::from_fn(self.len(), self.len(), |i, j| g[i] * m[(i, j)] * g[j])
    }

    /// `C = [gamma_t C(t,s) gamma_s]`.
    pub fn scaled_keldysh(&self) -> DMatrix<f64> {
        self.scaled(&self.keldysh)
    }

    /// `R = [gamma_t chi(t,s) gamma_s]`.
    pub fn scaled_response(&self) -> DMatrix<f64> {
        self.scaled(&self.response)
    }

    /// Smallest eigenvalue of the Hermitian matrix `W = K + (i/2)(X - X^T)` where
    /// `K` is the Keldysh matrix and `X` the response. `W_ts = <q_t q_s>` for any
    /// genuine quantum state, so a negative value means the pair `(C, chi)` cannot
    /// come from one.
    pub fn positivity_margin(&self) -> f64 {
        let n = self.len();
        let w = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let anti = self.response[(i, j)] - self.response[(j, i)];
            num_complex::Complex64::new(self.keldysh[(i, j)], 0.5 * anti)
        });
        nalgebra::SymmetricEigen::new(w)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}
