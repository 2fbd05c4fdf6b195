//! Entropy-growth and purification rates from spectral functions.

use fluctmon::gaussian::{purification_rate, s2_rate, PurificationKind, SpectralFunctions};
use num_complex::Complex64;

fn spectrum(beta: f64) -> fluctmon::error::Result<SpectralFunctions> {
    let n = 200_001;
    let omegas = (0..n).map(|i| -12.0 + 24.0 * i as f64 / (n - 1) as f64).collect();
    SpectralFunctions::from_fn(omegas, |w| 2.0 * (-w * w / 2.0).exp(), |w| Complex64::new(0.0, w * (-w * w / 2.0).exp()), beta)
}

fn main() -> fluctmon::error::Result<()> {
    println!("{:>8} {:>12} {:>12} {:>12}", "beta", "S2 rate", "vn", "renyi2");
    for beta in [0.0, 1.0, 10.0, 50.0, 100.0, 200.0] {
        let s = spectrum(beta)?;
        println!(
            "{beta:8} {:12.8} {:12.8} {:12.8}",
            s2_rate(&s),
            purification_rate(&s, PurificationKind::Vn),
            purification_rate(&s, PurificationKind::Renyi2)
        );
    }
    Ok(())
}
