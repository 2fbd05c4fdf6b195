//! Dense symmetric linear algebra shared by the Gaussian theory.
//!
//! All matrix functions go through a symmetric eigendecomposition whose
//! eigenvalues are sorted in descending order, so that eigenvector bases
//! (and anything built from them) are deterministic up to column signs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as round-off and set to zero.
pub const PSD_CLAMP: f64 = 1e-12;

/// Symmetric eigendecomposition `A = U diag(values) U^T`, values descending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let sym = (a + a.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            // Fix the sign: largest-magnitude component positive.
            let imax = col.iamax();
            if col[imax] < 0.0 {
                col.neg_mut();
            }
            vectors.set_column(dst, &col);
        }
        SymEigen { values, vectors }
    }

    /// Same decomposition, with tiny negative eigenvalues clamped to zero.
    /// Fails if an eigenvalue lies below `-PSD_CLAMP` (scaled by the matrix norm).
    pub fn new_psd(a: &DMatrix<f64>, what: &str) -> Result<Self> {
        let mut eig = Self::new(a);
        let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for v in eig.values.iter_mut() {
            if *v < 0.0 {
                if *v < -PSD_CLAMP * scale {
                    return Err(Error::invalid(format!(
                        "{what} is not positive semi-definite: eigenvalue {v:.6e}"
                    )));
                }
                *v = 0.0;
            }
        }
        Ok(eig)
    }

    /// `U f(Λ) U^T`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> DMatrix<f64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            scaled.column_mut(j).scale_mut(fj);
        }
        scaled * self.vectors.transpose()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Standard symplectic form `[[0, I], [-I, 0]]` in `(x..., p...)` ordering.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega[(i, n + i)] = 1.0;
        omega[(n + i, i)] = -1.0;
    }
    omega
}

/// Assemble `[[a, b], [c, d]]` from four `n x n` blocks.
pub fn block2(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

/// `sum_i ln(d_i)` of the Cholesky factor squared, i.e. `ln det a` for SPD `a`.
pub fn ln_det_spd(a: &DMatrix<f64>) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(a.clone())
        .ok_or_else(|| Error::numeric("matrix is not positive definite"))?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}
