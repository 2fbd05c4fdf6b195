//! Outcome distributions of the critical chain: bimodal marginals that
//! barely change between the two measurements.

use fluctmon::experiments::{critical_experiment, ExperimentConfig};

fn bar(count: u64, max: u64) -> String {
    "#".repeat((60 * count / max.max(1)) as usize)
}

fn main() -> fluctmon::error::Result<()> {
    let sites = std::env::args().nth(1).map_or(14, |s| s.parse().expect("sites"));
    let r = critical_experiment(&ExperimentConfig::critical(sites, 8000))?;
    for (k, h) in r.two_time.run.summary.marginals.iter().enumerate() {
        println!("event {k} (bimodal: {}):", r.bimodal[k]);
        let max = *h.counts.iter().max().unwrap_or(&1);
        for (i, c) in h.counts.iter().enumerate() {
            println!("{:>8.3} {}", 0.5 * (h.edges[i] + h.edges[i + 1]), bar(*c, max));
        }
    }
    println!("two-sample KS: {:.4} (1% critical {:.4})", r.ks.statistic, r.ks.critical_01);
    Ok(())
}
