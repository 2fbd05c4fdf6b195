//! Continuum entropy-growth and purification rates from spectral data.
//!
//! Integrals are composite trapezoid sums on the caller's frequency grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fourier-space Keldysh and response functions on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralFile", into = "SpectralFile")]
pub struct SpectralFunctions {
    omegas: Vec<f64>,
    c_omega: Vec<f64>,
    chi_omega: Vec<Complex64>,
    beta: f64,
}

/// On-disk layout; `chi_omega` entries are `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralFile {
    omegas: Vec<f64>,
    c_omega: Vec<f64>,
    chi_omega: Vec<[f64; 2]>,
    beta: f64,
}

impl TryFrom<SpectralFile> for SpectralFunctions {
    type Error = Error;

    fn try_from(f: SpectralFile) -> Result<Self> {
        let chi = f.chi_omega.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        SpectralFunctions::new(f.omegas, f.c_omega, chi, f.beta)
    }
}

impl From<SpectralFunctions> for SpectralFile {
    fn from(s: SpectralFunctions) -> Self {
        SpectralFile {
            omegas: s.omegas,
            c_omega: s.c_omega,
            chi_omega: s.chi_omega.iter().map(|z| [z.re, z.im]).collect(),
            beta: s.beta,
        }
    }
}

impl SpectralFunctions {
    pub fn new(omegas: Vec<f64>, c_omega: Vec<f64>, chi_omega: Vec<Complex64>, beta: f64) -> Result<Self> {
        let n = omegas.len();
        if n < 2 {
            return Err(Error::invalid("frequency grid needs at least two points"));
        }
        if c_omega.len() != n || chi_omega.len() != n {
            return Err(Error::invalid(format!(
                "grid has {n} points but c_omega has {} and chi_omega {}",
                c_omega.len(),
                chi_omega.len()
            )));
        }
        if omegas.iter().any(|w| !w.is_finite()) || omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("frequency grid must be finite and strictly ascending"));
        }
        if let Some((i, c)) = c_omega.iter().enumerate().find(|(_, c)| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::invalid(format!("c_omega[{i}] = {c} is not a nonnegative number")));
        }
        if chi_omega.iter().any(|z| !z.is_finite()) {
            return Err(Error::invalid("chi_omega has non-finite entries"));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::invalid(format!("beta = {beta} must be finite and nonnegative")));
        }
        Ok(SpectralFunctions { omegas, c_omega, chi_omega, beta })
    }

    /// Samples `c(omega)` and `chi(omega)` on `omegas`.
    pub fn from_fn(
        omegas: Vec<f64>,
        c: impl Fn(f64) -> f64,
        chi: impl Fn(f64) -> Complex64,
        beta: f64,
    ) -> Result<Self> {
        let c_omega = omegas.iter().map(|&w| c(w)).collect();
        let chi_omega = omegas.iter().map(|&w| chi(w)).collect();
        Self::new(omegas, c_omega, chi_omega, beta)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn c_omega(&self) -> &[f64] {
        &self.c_omega
    }

    pub fn chi_omega(&self) -> &[Complex64] {
        &self.chi_omega
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.omegas.clone(), self.c_omega.clone(), self.chi_omega.clone(), beta)
    }

    fn trapezoid(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.omegas
            .windows(2)
            .enumerate()
            .map(|(i, w)| 0.5 * (w[1] - w[0]) * (f(i) + f(i + 1)))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PurificationKind {
    Vn,
    Renyi2,
}

impl std::str::FromStr for PurificationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vn" => Ok(PurificationKind::Vn),
            "renyi2" => Ok(PurificationKind::Renyi2),
            other => Err(Error::invalid(format!("unknown purification kind {other:?}"))),
        }
    }
}

impl PurificationKind {
    /// Thermal weight as a function of `x = beta * omega`.
    pub fn weight(self, x: f64) -> f64 {
        match self {
            PurificationKind::Vn => {
                if x.abs() < 1e-4 {
                    1.0 - x * x / 6.0
                } else if x.abs() > 700.0 {
                    0.0
                } else {
                    x / x.sinh()
                }
            }
            PurificationKind::Renyi2 => {
                let c = (0.5 * x).cosh();
                1.0 / (c * c)
            }
        }
    }
}

/// `int domega/(2 pi) (1/2) ln(1 + C(omega))`.
pub fn s2_rate(spec: &SpectralFunctions) -> f64 {
    spec.trapezoid(|i| 0.5 * spec.c_omega[i].ln_1p()) / (2.0 * std::f64::consts::PI)
}

/// `int domega/(4 pi) w(beta omega) C / (1 + C + |chi|^2/4)`.
pub fn purification_rate(spec: &SpectralFunctions, kind: PurificationKind) -> f64 {
    spec.trapezoid(|i| {
        let c = spec.c_omega[i];
        let w = kind.weight(spec.beta * spec.omegas[i]);
        w * c / (1.0 + c + 0.25 * spec.chi_omega[i].norm_sqr())
    }) / (4.0 * std::f64::consts::PI)
}
