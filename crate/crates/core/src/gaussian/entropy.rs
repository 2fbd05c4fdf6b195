//! Entropies of the ancilla register.
//!
//! Two independent routes are provided. The closed forms take only the
//! scaled Keldysh matrix `C`: every eigenvalue `lambda` of `C` is a single
//! oscillator of mean energy `eps = sqrt(1 + 2 lambda)/2`. The full-covariance
//! route computes the symplectic eigenvalues of the assembled `2n x 2n`
//! covariance instead.
//!
//! The two routes agree for the second Renyi entropy for any response matrix
//! (`det(2G) = det(I + 2C)`). For other orders they agree when the response
//! vanishes; with a nonzero response the symplectic spectrum of the ancillas
//! differs from `sqrt(1 + 2 lambda)/2` and only the full-covariance route gives
//! the ancilla entropy.

use nalgebra::DMatrix;
use serde::Serialize;

use super::covariance::CovarianceBlocks;
use crate::error::{Error, Result};
use crate::linalg::{block2, ln_det_spd, max_abs_diff, symplectic_form, SymEigen};

/// Tolerance below 1/2 accepted for a symplectic eigenvalue.
pub const SYMPLECTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    Renyi(u32),
    VonNeumann,
}

impl std::str::FromStr for EntropyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vn" | "von-neumann" => Ok(EntropyKind::VonNeumann),
            other => {
                let m: u32 = other
                    .parse()
                    .map_err(|_| Error::invalid(format!("unknown entropy order {other:?}")))?;
                if m < 2 {
                    return Err(Error::invalid("Renyi order must be at least 2"));
                }
                Ok(EntropyKind::Renyi(m))
            }
        }
    }
}

/// Entropy of one thermal oscillator with mean energy `eps >= 1/2`
/// (in units of its frequency). `order == 1` is the von Neumann entropy;
/// other positive orders use the analytic continuation
/// `ln(l+^m - l-^m)/(m - 1)` with `l+- = eps +- 1/2`.
pub fn oscillator_entropy(eps: f64, order: f64) -> f64 {
    let lp = eps + 0.5;
    let lm = (eps - 0.5).max(0.0);
    if order == 1.0 {
        let xlnx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
        return xlnx(lp) - xlnx(lm);
    }
    let ratio = lm / lp;
    (order * lp.ln() + (-ratio.powf(order)).ln_1p()) / (order - 1.0)
}

fn oscillator_energies(c_scaled: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymEigen::new_psd(c_scaled, "scaled keldysh matrix")?;
    Ok(eig.values.iter().map(|l| 0.5 * (1.0 + 2.0 * l).sqrt()).collect())
}

/// `S_m = (m-1)^{-1} tr ln[C_+^m - C_-^m]`, `C_+- = (I + 2C)^{1/2}/2 +- I/2`.
pub fn renyi_entropy(c_scaled: &DMatrix<f64>, m: u32) -> Result<f64> {
    if m < 2 {
        return Err(Error::invalid("Renyi order must be at least 2"));
    }
    Ok(oscillator_energies(c_scaled)?
        .into_iter()
        .map(|e| oscillator_entropy(e, f64::from(m)))
        .sum())
}

/// `S_2 = (1/2) ln det(I + 2C)`, computed from a Cholesky factor.
pub fn renyi2_log_det(c_scaled: &DMatrix<f64>) -> Result<f64> {
    let n = c_scaled.nrows();
    let a = DMatrix::identity(n, n) + c_scaled * 2.0;
    Ok(0.5 * ln_det_spd(&a)?)
}

/// `S = tr[C_+ ln C_+ - C_- ln C_-]` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(c_scaled: &DMatrix<f64>) -> Result<f64> {
    Ok(oscillator_energies(c_scaled)?
        .into_iter()
        .map(|e| oscillator_entropy(e, 1.0))
        .sum())
}

pub fn entropy(c_scaled: &DMatrix<f64>, kind: EntropyKind) -> Result<f64> {
    match kind {
        EntropyKind::Renyi(m) => renyi_entropy(c_scaled, m),
        EntropyKind::VonNeumann => von_neumann_entropy(c_scaled),
    }
}

/// Symplectic eigenvalues of a positive-definite `2n x 2n` covariance in
/// `(x, p)` ordering, ascending.
///
/// Uses `G^{1/2} Omega^T G Omega G^{1/2}`, which is symmetric and has every
/// `nu_k^2` twice.
pub fn symplectic_eigenvalues(g: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = g.nrows();
    if dim % 2 != 0 || g.ncols() != dim {
        return Err(Error::invalid("covariance must be 2n x 2n"));
    }
    let eig = SymEigen::new(g);
    if eig.min_value() <= 0.0 {
        return Err(Error::invalid(format!(
            "covariance is not positive definite: eigenvalue {:.6e}",
            eig.min_value()
        )));
    }
    let root = eig.apply(f64::sqrt);
    let omega = symplectic_form(dim / 2);
    let m = &root * omega.transpose() * g * &omega * &root;
    let mut squares: Vec<f64> = SymEigen::new(&m).values.iter().copied().collect();
    squares.sort_by(f64::total_cmp);
    Ok(squares
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

/// Entropy of the ancilla Gaussian state from its full covariance.
pub fn entropy_from_full_covariance(blocks: &CovarianceBlocks, kind: EntropyKind) -> Result<f64> {
    let nus = symplectic_eigenvalues(&blocks.assemble())?;
    if let Some(nu) = nus.iter().find(|nu| **nu < 0.5 - SYMPLECTIC_TOL) {
        return Err(Error::invalid(format!(
            "symplectic eigenvalue {nu:.12} below 1/2: not a quantum state"
        )));
    }
    let order = match kind {
        EntropyKind::Renyi(m) if m >= 2 => f64::from(m),
        EntropyKind::Renyi(_) => return Err(Error::invalid("Renyi order must be at least 2")),
        EntropyKind::VonNeumann => 1.0,
    };
    Ok(nus.into_iter().map(|nu| oscillator_entropy(nu.max(0.5), order)).sum())
}

/// Congruence bringing the ancilla covariance to `n` uncoupled oscillators.
///
/// With `C = U Lambda U^T` (descending) and `E = (I + 2 Lambda)^{1/2}`,
///
/// ```text
/// A = [[(I + 2C)^{1/4} U, R (I + 2C)^{-1/4} U],
///      [0,                (I + 2C)^{-1/4} U ]]
/// G = A diag(E, E) A^T / 2
/// ```
///
/// The diagonal part is symplectic; the `R` shear is symplectic only when
/// `R = R^T`, so for a causal (strictly lower triangular) response the whole
/// map is canonical exactly when `R = 0`. [`CanonicalTransform::symplectic_defect`]
/// reports the deviation, which equals `max |R - R^T|`.
#[derive(Debug, Clone)]
pub struct CanonicalTransform {
    pub matrix: DMatrix<f64>,
    /// Eigenvalues of `C`, descending.
    pub lambdas: Vec<f64>,
}

pub fn canonical_transform(c_scaled: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<CanonicalTransform> {
    let n = c_scaled.nrows();
    if r.shape() != (n, n) {
        return Err(Error::invalid("response block has the wrong shape"));
    }
    let eig = SymEigen::new_psd(c_scaled, "scaled keldysh matrix")?;
    let mut up = eig.vectors.clone();
    let mut down = eig.vectors.clone();
    for (j, l) in eig.values.iter().enumerate() {
        let q = (1.0 + 2.0 * l).powf(0.25);
        up.column_mut(j).scale_mut(q);
        down.column_mut(j).scale_mut(1.0 / q);
    }
    let shear = r * &down;
    let matrix = block2(&up, &shear, &DMatrix::zeros(n, n), &down);
    Ok(CanonicalTransform {
        matrix,
        lambdas: eig.values.iter().copied().collect(),
    })
}

impl CanonicalTransform {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `diag(E, E)/2` with `E = (I + 2 Lambda)^{1/2}`.
    pub fn standard_form(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut d = DMatrix::zeros(2 * n, 2 * n);
        for (k, l) in self.lambdas.iter().enumerate() {
            let e = 0.5 * (1.0 + 2.0 * l).sqrt();
            d[(k, k)] = e;
            d[(n + k, n + k)] = e;
        }
        d
    }

    /// `max |A Omega A^T - Omega|`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.len());
        max_abs_diff(&(&self.matrix * &omega * self.matrix.transpose()), &omega)
    }

    /// `max |A^{-1} G A^{-T} - diag(E, E)/2|`.
    pub fn reduction_residual(&self, blocks: &CovarianceBlocks) -> Result<f64> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::numeric("canonical transform is singular"))?;
        let reduced = &inv * blocks.assemble() * inv.transpose();
        Ok(max_abs_diff(&reduced, &self.standard_form()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::covariance::build_covariance_blocks;
    use crate::gaussian::correlation::CorrelationData;
    use crate::gaussian::random::random_physical;
    use rand::SeedableRng;

    fn scalar(l: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, l)
    }

    #[test]
    fn vacuum_has_no_entropy() {
        let z = DMatrix::zeros(3, 3);
        for m in 2..6 {
            assert_eq!(renyi_entropy(&z, m).unwrap(), 0.0);
        }
        assert_eq!(von_neumann_entropy(&z).unwrap(), 0.0);
        assert_eq!(renyi2_log_det(&z).unwrap(), 0.0);
    }

    #[test]
    fn single_oscillator_values() {
        let c = scalar(4.0);
        assert!((renyi_entropy(&c, 2).unwrap() - 3.0f64.ln()).abs() < 1e-14);
        assert!((renyi_entropy(&c, 3).unwrap() - 0.5 * 7.0f64.ln()).abs() < 1e-14);
        assert!((von_neumann_entropy(&c).unwrap() - 2.0 * 2.0f64.ln()).abs() < 1e-14);
    }

    /// Thermal-oscillator oracle: `e^{(m-1) s_m} = Z_beta^m / Z_{m beta}` with
    /// `Z_beta^{-1} = y - 1/y`, `y = e^{beta/2}` and `coth(beta/2) = 2 eps`.
    #[test]
    fn partition_function_oracle() {
        for lambda in [0.3, 1.0, 4.0, 17.0] {
            let eps = 0.5 * (1.0f64 + 2.0 * lambda).sqrt();
            let beta = 2.0 * ((2.0 * eps + 1.0) / (2.0 * eps - 1.0)).ln() / 2.0;
            let z = |b: f64| 1.0 / ((b / 2.0).exp() - (-b / 2.0).exp());
            for m in 2..=5u32 {
                let mf = f64::from(m);
                let oracle = (z(beta).powf(mf) / z(mf * beta)).ln() / (mf - 1.0);
                let got = renyi_entropy(&scalar(lambda), m).unwrap();
                assert!((got - oracle).abs() < 1e-11, "lambda={lambda} m={m}");
            }
        }
    }

    #[test]
    fn renyi_tends_to_von_neumann() {
        for lambda in [0.1, 2.0, 9.0] {
            let eps = 0.5 * (1.0f64 + 2.0 * lambda).sqrt();
            let s1 = oscillator_entropy(eps, 1.0);
            let lp: f64 = eps + 0.5;
            let lm: f64 = eps - 0.5;
            assert!((s1 - (lp * lp.ln() - lm * lm.ln())).abs() < 1e-14);
            for d in [1e-4, 1e-6] {
                assert!((oscillator_entropy(eps, 1.0 + d) - s1).abs() < 20.0 * d * (1.0 + s1));
                assert!((oscillator_entropy(eps, 1.0 - d) - s1).abs() < 20.0 * d * (1.0 + s1));
            }
        }
    }

    #[test]
    fn renyi_orders_are_monotone_and_second_matches_log_det() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            let c = random_physical(&mut rng, n).scaled_keldysh();
            let s2 = renyi_entropy(&c, 2).unwrap();
            assert!((s2 - renyi2_log_det(&c).unwrap()).abs() < 1e-10);
            let mut prev = von_neumann_entropy(&c).unwrap();
            for m in 2..8 {
                let s = renyi_entropy(&c, m).unwrap();
                assert!(s <= prev + 1e-12);
                prev = s;
            }
        }
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.1]);
        assert!(renyi_entropy(&c, 2).is_err());
        assert!(von_neumann_entropy(&c).is_err());
    }

    #[test]
    fn full_covariance_route_without_response() {
        let c = DMatrix::from_row_slice(2, 2, &[0.7, 0.0, 0.0, 2.5]);
        let corr = CorrelationData::new(vec![0.0, 1.0], vec![1.0, 1.0], c.clone(), DMatrix::zeros(2, 2))
            .unwrap();
        let blocks = build_covariance_blocks(&corr).unwrap();
        let nus = symplectic_eigenvalues(&blocks.assemble()).unwrap();
        assert!((nus[0] - 0.5 * (1.0f64 + 1.4).sqrt()).abs() < 1e-12);
        assert!((nus[1] - 0.5 * (1.0f64 + 5.0).sqrt()).abs() < 1e-12);
        for kind in [EntropyKind::Renyi(2), EntropyKind::Renyi(3), EntropyKind::VonNeumann] {
            let a = entropy_from_full_covariance(&blocks, kind).unwrap();
            let b = entropy(&c, kind).unwrap();
            assert!((a - b).abs() < 1e-10, "{kind:?}");
        }
    }

    #[test]
    fn second_renyi_is_blind_to_the_response() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for n in 2..=4 {
            let corr = random_physical(&mut rng, n);
            let quiet = CorrelationData::new(
                corr.times().to_vec(),
                corr.gammas().to_vec(),
                corr.keldysh().clone(),
                DMatrix::zeros(n, n),
            )
            .unwrap();
            let a = entropy_from_full_covariance(&build_covariance_blocks(&corr).unwrap(), EntropyKind::Renyi(2)).unwrap();
            let b = entropy_from_full_covariance(&build_covariance_blocks(&quiet).unwrap(), EntropyKind::Renyi(2)).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn unphysical_covariance_is_rejected() {
        // A response with no fluctuations behind it violates the uncertainty relation.
        let corr = CorrelationData::new(
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            DMatrix::zeros(2, 2),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]),
        )
        .unwrap();
        let blocks = build_covariance_blocks(&corr).unwrap();
        assert!(blocks.uncertainty_margin() < -1e-3);
        assert!(entropy_from_full_covariance(&blocks, EntropyKind::VonNeumann).is_err());
        assert!(entropy_from_full_covariance(&blocks, EntropyKind::Renyi(2)).is_err());
    }

    #[test]
    fn canonical_transform_scalar_and_identity() {
        let a = canonical_transform(&DMatrix::zeros(2, 2), &DMatrix::zeros(2, 2)).unwrap();
        assert!(max_abs_diff(&a.matrix, &DMatrix::identity(4, 4)) < 1e-15);
        let a = canonical_transform(&scalar(4.0), &DMatrix::zeros(1, 1)).unwrap();
        let s3 = 3.0f64.sqrt();
        let expected = DMatrix::from_row_slice(2, 2, &[s3, 0.0, 0.0, 1.0 / s3]);
        assert!(max_abs_diff(&a.matrix, &expected) < 1e-14);
        assert!((a.matrix.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn canonical_transform_reduces_and_reports_defect() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for n in 1..=4 {
            let corr = random_physical(&mut rng, n);
            let blocks = build_covariance_blocks(&corr).unwrap();
            let r = corr.scaled_response();
            let t = canonical_transform(&corr.scaled_keldysh(), &r).unwrap();
            assert!(t.reduction_residual(&blocks).unwrap() < 1e-10);
            let asym = (&r - r.transpose()).abs().max();
            assert!((t.symplectic_defect() - asym).abs() < 1e-10);
        }
    }
}
