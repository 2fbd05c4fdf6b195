//! Configuration files and the CSV tables written by the command line tool.

use fluctmon::cli::config::{defaults, overlay, RunConfig};
use fluctmon::experiments::{monitor, output};

fn main() -> fluctmon::error::Result<()> {
    let doc = toml::from_str("sites = 6\nshots = 4\ngammas = [0.5, 1.5]\n").expect("valid TOML");
    let cfg: RunConfig = overlay(&defaults("monitor"), doc)?;
    println!("resolved configuration:\n{}", cfg.to_toml()?);

    let run = monitor(&cfg.experiment)?;
    let show = |name: &str, bytes: Vec<u8>| println!("{name}:\n{}", String::from_utf8_lossy(&bytes));
    show("trajectories.csv", output::trajectories_csv(&run)?);
    show("summary.csv", output::summary_csv(&run.summary, &run.gaussian_covariance, run.exact_covariance.as_ref())?);
    Ok(())
}
