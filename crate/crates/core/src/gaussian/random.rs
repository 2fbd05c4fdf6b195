//! Random correlation data that is realizable by a quantum state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::correlation::CorrelationData;

/// Draw `W = Z Z^dagger / n` with Gaussian `Z` and read off
/// `C(t,s) = Re W_ts`, `chi(t,s) = 2 Im W_ts` for `t > s`.
///
/// Any positive semi-definite Hermitian `W` is the two-point matrix
/// `<q_t q_s>` of linear bosonic observables, so the resulting data
/// describes a genuine Gaussian state. Strengths are uniform in `[0.5, 1.5]`.
pub fn random_physical<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CorrelationData {
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let w = (&z * z.adjoint()).unscale(n as f64);
    let keldysh = DMatrix::from_fn(n, n, |i, j| 0.5 * (w[(i, j)].re + w[(j, i)].re));
    let response = DMatrix::from_fn(n, n, |i, j| if i > j { 2.0 * w[(i, j)].im } else { 0.0 });
    let mut times = Vec::with_capacity(n);
    let mut t = 0.0;
    for _ in 0..n {
        times.push(t);
        t += rng.random_range(0.2..1.5);
    }
    let gammas = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    CorrelationData::new(times, gammas, keldysh, response)
        .expect("random Gram matrices are valid correlation data")
}
