//! Statistics used by the experiment drivers.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Value with a standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `(value - target) / se`.
    pub fn z(&self, target: f64) -> f64 {
        (self.value - target) / self.se
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// First and second sample moments of multivariate rows.
#[derive(Debug, Clone)]
pub struct Moments {
    pub count: f64,
    pub sum: Vec<f64>,
    pub cross: DMatrix<f64>,
}

impl Moments {
    fn zeros(n: usize) -> Self {
        Moments { count: 0.0, sum: vec![0.0; n], cross: DMatrix::zeros(n, n) }
    }

    fn add(&mut self, row: &[f64]) {
        self.count += 1.0;
        for (a, x) in row.iter().enumerate() {
            self.sum[a] += x;
            for (b, y) in row.iter().enumerate() {
                self.cross[(a, b)] += x * y;
            }
        }
    }

    fn minus(&self, other: &Moments) -> Moments {
        Moments {
            count: self.count - other.count,
            sum: self.sum.iter().zip(&other.sum).map(|(a, b)| a - b).collect(),
            cross: &self.cross - &other.cross,
        }
    }

    pub fn means(&self) -> Vec<f64> {
        self.sum.iter().map(|s| s / self.count).collect()
    }

    /// Unbiased covariance matrix.
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.sum.len();
        let c = self.count;
        DMatrix::from_fn(n, n, |a, b| (self.cross[(a, b)] - self.sum[a] * self.sum[b] / c) / (c - 1.0))
    }
}

/// Delete-one-block jackknife for smooth functions of the first two moments.
#[derive(Debug, Clone)]
pub struct Jackknife {
    total: Moments,
    leave_out: Vec<Moments>,
}

pub const DEFAULT_BLOCKS: usize = 100;

impl Jackknife {
    /// `rows` are split into `blocks` contiguous blocks in their given order.
    pub fn new(rows: &[Vec<f64>], blocks: usize) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.len() < 4 {
            return Err(Error::invalid("jackknife needs at least four samples"));
        }
        let blocks = blocks.clamp(2, rows.len());
        let mut per_block = vec![Moments::zeros(n); blocks];
        let mut total = Moments::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            per_block[i * blocks / rows.len()].add(row);
            total.add(row);
        }
        let leave_out = per_block.iter().map(|b| total.minus(b)).collect();
        Ok(Jackknife { total, leave_out })
    }

    pub fn moments(&self) -> &Moments {
        &self.total
    }

    pub fn estimate(&self, f: impl Fn(&Moments) -> f64) -> Estimate {
        let b = self.leave_out.len() as f64;
        let reps: Vec<f64> = self.leave_out.iter().map(&f).collect();
        let m = mean(&reps);
        let var = (b - 1.0) / b * reps.iter().map(|r| (r - m) * (r - m)).sum::<f64>();
        Estimate { value: f(&self.total), se: var.sqrt() }
    }

    pub fn mean(&self, a: usize) -> Estimate {
        self.estimate(|m| m.sum[a] / m.count)
    }

    pub fn covariance(&self, a: usize, b: usize) -> Estimate {
        self.estimate(|m| (m.cross[(a, b)] - m.sum[a] * m.sum[b] / m.count) / (m.count - 1.0))
    }

    /// `Var(b) - Var(a)`.
    pub fn variance_gap(&self, a: usize, b: usize) -> Estimate {
        self.estimate(|m| {
            let var = |k: usize| (m.cross[(k, k)] - m.sum[k] * m.sum[k] / m.count) / (m.count - 1.0);
            var(b) - var(a)
        })
    }
}

/// Freedman-Diaconis width `2 IQR n^{-1/3}`.
pub fn freedman_diaconis_width(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (s.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
    };
    let iqr = q(0.75) - q(0.25);
    2.0 * iqr / (s.len() as f64).cbrt()
}

/// Histogram with uniform edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Uniform edges covering `data`, with the given width or Freedman-Diaconis.
pub fn uniform_edges(data: &[f64], width: Option<f64>) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::invalid("cannot bin an empty sample"));
    }
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w = width.unwrap_or_else(|| freedman_diaconis_width(data));
    if let Some(w) = width {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::invalid(format!("bin width {w} must be positive")));
        }
    }
    if !(w > 0.0) || hi == lo {
        w = (hi - lo).max(1.0);
    }
    let bins = (((hi - lo) / w).ceil() as usize).clamp(1, 100_000);
    Ok((0..=bins).map(|i| lo + w * i as f64).collect())
}

fn bin_index(edges: &[f64], x: f64) -> Option<usize> {
    let n = edges.len() - 1;
    if x < edges[0] || x > edges[n] {
        return None;
    }
    let w = edges[1] - edges[0];
    Some((((x - edges[0]) / w) as usize).min(n - 1))
}

impl Histogram {
    pub fn with_edges(data: &[f64], edges: Vec<f64>) -> Self {
        let mut counts = vec![0u64; edges.len() - 1];
        for &x in data {
            if let Some(i) = bin_index(&edges, x) {
                counts[i] += 1;
            }
        }
        Histogram { edges, counts }
    }

    pub fn new(data: &[f64], width: Option<f64>) -> Result<Self> {
        Ok(Self::with_edges(data, uniform_edges(data, width)?))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Joint histogram with the same edges on both axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram2D {
    pub edges: Vec<f64>,
    /// `counts[i][j]`: first variable in bin `i`, second in bin `j`.
    pub counts: Vec<Vec<u64>>,
}

impl Histogram2D {
    pub fn new(x: &[f64], y: &[f64], width: Option<f64>) -> Result<Self> {
        let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
        let edges = uniform_edges(&pooled, width)?;
        let n = edges.len() - 1;
        let mut counts = vec![vec![0u64; n]; n];
        for (a, b) in x.iter().zip(y) {
            if let (Some(i), Some(j)) = (bin_index(&edges, *a), bin_index(&edges, *b)) {
                counts[i][j] += 1;
            }
        }
        Ok(Histogram2D { edges, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Asymptotic Kolmogorov survival function `Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `c(alpha) = sqrt(-ln(alpha/2)/2)`, 1.6276 at `alpha = 0.01`.
pub fn ks_critical_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub effective_n: f64,
    /// Critical value of the statistic at `alpha = 0.01`.
    pub critical_01: f64,
    pub p_value: f64,
}

impl KsTest {
    fn from_statistic(d: f64, ne: f64) -> Self {
        let sq = ne.sqrt();
        KsTest {
            statistic: d,
            effective_n: ne,
            critical_01: ks_critical_coefficient(0.01) / sq,
            p_value: kolmogorov_q((sq + 0.12 + 0.11 / sq) * d),
        }
    }

    pub fn rejects_at_01(&self) -> bool {
        self.statistic > self.critical_01
    }
}

/// One-sample test of `data` against the distribution function `cdf`.
pub fn ks_one_sample(data: &[f64], cdf: impl Fn(f64) -> f64) -> KsTest {
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let d = s
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    KsTest::from_statistic(d, n)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    KsTest::from_statistic(d, n * m / (n + m))
}

/// Two most prominent modes of a histogram and the minimum between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bimodality {
    pub left_peak: u64,
    pub right_peak: u64,
    pub valley: u64,
    pub left_index: usize,
    pub right_index: usize,
    /// `valley / min(peaks)`.
    pub dip_ratio: f64,
}

impl Bimodality {
    /// Interior minimum below `fraction` of both peaks.
    pub fn is_bimodal(&self, fraction: f64) -> bool {
        (self.valley as f64) < fraction * self.left_peak as f64 && (self.valley as f64) < fraction * self.right_peak as f64
    }
}

pub const BIMODAL_FRACTION: f64 = 0.8;

/// Picks the pair of local maxima with the largest prominence
/// `min(peak_i, peak_j) - min(counts between)`.
pub fn bimodality(counts: &[u64]) -> Option<Bimodality> {
    let n = counts.len();
    let peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let left = if i == 0 { 0 } else { counts[i - 1] };
            let right = if i + 1 == n { 0 } else { counts[i + 1] };
            counts[i] > 0 && counts[i] >= left && counts[i] >= right
        })
        .collect();
    let mut best: Option<(i64, Bimodality)> = None;
    for (a, &i) in peaks.iter().enumerate() {
        for &j in &peaks[a + 1..] {
            if j <= i + 1 {
                continue;
            }
            let valley = *counts[i + 1..j].iter().min().unwrap();
            let low = counts[i].min(counts[j]);
            let prominence = low as i64 - valley as i64;
            if best.as_ref().is_none_or(|(p, _)| prominence > *p) {
                best = Some((
                    prominence,
                    Bimodality {
                        left_peak: counts[i],
                        right_peak: counts[j],
                        valley,
                        left_index: i,
                        right_index: j,
                        dip_ratio: valley as f64 / low as f64,
                    },
                ));
            }
        }
    }
    best.map(|(_, b)| b)
}

/// Weighted least-squares line `y = a + s x` with weights `1/sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

pub fn weighted_line_fit(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<LineFit> {
    if x.len() < 2 || x.len() != y.len() || x.len() != sigma.len() {
        return Err(Error::invalid("line fit needs at least two matching points"));
    }
    let w: Vec<f64> = sigma.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    if !(det > 0.0 && det.is_finite()) {
        return Err(Error::numeric("degenerate line fit"));
    }
    Ok(LineFit {
        slope: (sw * sxy - sx * sy) / det,
        intercept: (sxx * sy - sx * sxy) / det,
        slope_se: (sw / det).sqrt(),
        intercept_se: (sxx / det).sqrt(),
    })
}

/// Fit `ln delta = a + s ln gamma`; `se(ln delta) = se(delta)/delta`.
pub fn log_log_fit(gammas: &[f64], deltas: &[Estimate]) -> Result<LineFit> {
    if deltas.iter().any(|d| !(d.value > 0.0)) {
        return Err(Error::numeric("log-log fit needs positive values"));
    }
    let x: Vec<f64> = gammas.iter().map(|g| g.ln()).collect();
    let y: Vec<f64> = deltas.iter().map(|d| d.value.ln()).collect();
    let s: Vec<f64> = deltas.iter().map(|d| d.se / d.value).collect();
    weighted_line_fit(&x, &y, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn jackknife_of_mean_matches_classic_error() {
        let rows: Vec<Vec<f64>> = (0..1000).map(|i| vec![(i as f64 * 0.618).fract()]).collect();
        let jk = Jackknife::new(&rows, 1000).unwrap();
        let x: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let est = jk.mean(0);
        assert!((est.value - mean(&x)).abs() < 1e-12);
        assert!((est.se - (variance(&x) / 1000.0).sqrt()).abs() < 1e-10);
        assert!((jk.covariance(0, 0).value - variance(&x)).abs() < 1e-12);
    }

    #[test]
    fn variance_gap_error_is_calibrated() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let d = Normal::new(0.0, 1.0).unwrap();
        let reps: Vec<Estimate> = (0..200)
            .map(|_| {
                let rows: Vec<Vec<f64>> = (0..500).map(|_| vec![d.sample(&mut rng), d.sample(&mut rng)]).collect();
                Jackknife::new(&rows, 50).unwrap().variance_gap(0, 1)
            })
            .collect();
        let values: Vec<f64> = reps.iter().map(|e| e.value).collect();
        let se_mean = mean(&reps.iter().map(|e| e.se).collect::<Vec<_>>());
        // True sd of Var(b) - Var(a) is sqrt(4/n).
        assert!((se_mean - (4.0f64 / 500.0).sqrt()).abs() < 0.01);
        assert!((variance(&values).sqrt() / se_mean - 1.0).abs() < 0.2);
    }

    #[test]
    fn histograms_hold_every_sample() {
        let x: Vec<f64> = (0..777).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let y: Vec<f64> = x.iter().map(|v| -v * 0.5).collect();
        assert_eq!(Histogram::new(&x, None).unwrap().total(), 777);
        assert_eq!(Histogram::new(&x, Some(0.3)).unwrap().total(), 777);
        let j = Histogram2D::new(&x, &y, None).unwrap();
        assert_eq!(j.total(), 777);
        assert!(Histogram::new(&x, Some(-1.0)).is_err());
        assert_eq!(Histogram::new(&[2.0; 5], None).unwrap().total(), 5);
    }

    #[test]
    fn kolmogorov_tail() {
        assert!((ks_critical_coefficient(0.01) - 1.6276).abs() < 1e-4);
        assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-4);
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn ks_tests() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let d = Normal::new(0.0, 1.0).unwrap();
        let a: Vec<f64> = (0..5000).map(|_| d.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..5000).map(|_| d.sample(&mut rng)).collect();
        let c: Vec<f64> = b.iter().map(|x| x * 1.2).collect();
        let phi = |x: f64| 0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2);
        assert!(!ks_one_sample(&a, phi).rejects_at_01());
        assert!(!ks_two_sample(&a, &b).rejects_at_01());
        assert!(ks_two_sample(&a, &c).rejects_at_01());
        let same = ks_two_sample(&a, &a);
        assert_eq!(same.statistic, 0.0);
    }

    #[test]
    fn bimodality_detection() {
        let two = [1, 5, 20, 9, 3, 8, 25, 6, 1];
        let b = bimodality(&two).unwrap();
        assert_eq!((b.left_peak, b.right_peak, b.valley), (20, 25, 3));
        assert!(b.is_bimodal(BIMODAL_FRACTION));
        let one = [1, 4, 10, 30, 29, 30, 12, 3, 2, 3, 1];
        let b = bimodality(&one).unwrap();
        assert!(!b.is_bimodal(BIMODAL_FRACTION));
        assert!(bimodality(&[0, 3, 0]).is_none());
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, 3.0, 5.0];
        let f = weighted_line_fit(&x, &y, &[1.0, 1.0, 1.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        let g = [0.2, 0.4, 0.8];
        let deltas: Vec<Estimate> = g.iter().map(|g: &f64| Estimate { value: 3.0 * g.powi(4), se: 0.01 }).collect();
        assert!((log_log_fit(&g, &deltas).unwrap().slope - 4.0).abs() < 1e-12);
    }
}
