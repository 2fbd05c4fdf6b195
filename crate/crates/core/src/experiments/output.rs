//! CSV tables and atomic file output.
//!
//! Reals are written with 17 significant digits (`{:.16e}`) so that every
//! value round-trips exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Serializer;

use super::run::{MonitorRun, SummaryStats};
use super::sweep::{HaarResult, SweepResult};
use super::wick::WickRow;
use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: [&str; 6] = ["trajectory_index", "event_index", "time", "gamma", "outcome_m", "outcome_x"];
pub const SUMMARY_HEADER: [&str; 9] = [
    "event_index",
    "time",
    "gamma",
    "mean_x",
    "mean_x_se",
    "var_x",
    "var_x_se",
    "predicted_var_x",
    "exact_var_x",
];
pub const HISTOGRAM_HEADER: [&str; 4] = ["event_index", "bin_left", "bin_right", "count"];
pub const JOINT_HEADER: [&str; 3] = ["bin_0", "bin_1", "count"];
pub const SWEEP_HEADER: [&str; 7] = ["sites", "gamma", "delta", "delta_se", "prediction", "exact_delta", "z"];
pub const HAAR_HEADER: [&str; 6] = ["sites", "state_index", "seed", "delta", "delta_se", "exact_delta"];
pub const HAAR_SUMMARY_HEADER: [&str; 4] = ["sites", "mean_abs_delta", "mean_abs_delta_se", "exact_mean_abs_delta"];
pub const WICK_HEADER: [&str; 5] = ["sites", "q2", "q4", "ratio", "oracle"];

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(crate::gaussian::correlation::matrix_to_rows(m))
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path.file_name().ok_or_else(|| Error::invalid(format!("{} is not a file path", path.display())))?;
    let tmp: PathBuf = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let bad = |e: csv::Error| Error::Parse { what: "csv".into(), message: e.to_string() };
    w.write_record(header).map_err(bad)?;
    for row in rows {
        w.write_record(&row).map_err(bad)?;
    }
    w.into_inner().map_err(|e| Error::Parse { what: "csv".into(), message: e.to_string() })
}

pub fn trajectories_csv(run: &MonitorRun) -> Result<Vec<u8>> {
    let events = run.schedule.events();
    table(
        &TRAJECTORY_HEADER,
        run.records.iter().flat_map(|r| {
            r.outcomes.iter().zip(events).enumerate().map(move |(k, (m, e))| {
                vec![r.index.to_string(), k.to_string(), real(e.time), real(e.gamma), real(*m), real(m * e.gamma)]
            })
        }),
    )
}

pub fn summary_csv(summary: &SummaryStats, predicted: &DMatrix<f64>, exact: Option<&DMatrix<f64>>) -> Result<Vec<u8>> {
    table(
        &SUMMARY_HEADER,
        (0..summary.times.len()).map(|k| {
            vec![
                k.to_string(),
                real(summary.times[k]),
                real(summary.gammas[k]),
                real(summary.means[k].value),
                real(summary.means[k].se),
                real(summary.variances[k].value),
                real(summary.variances[k].se),
                real(predicted[(k, k)]),
                opt(exact.map(|e| e[(k, k)])),
            ]
        }),
    )
}

pub fn histograms_csv(summary: &SummaryStats) -> Result<Vec<u8>> {
    table(
        &HISTOGRAM_HEADER,
        summary.marginals.iter().enumerate().flat_map(|(k, h)| {
            h.counts.iter().enumerate().map(move |(i, c)| {
                vec![k.to_string(), real(h.edges[i]), real(h.edges[i + 1]), c.to_string()]
            })
        }),
    )
}

pub fn joint_csv(summary: &SummaryStats) -> Result<Option<Vec<u8>>> {
    let Some(j) = &summary.joint else { return Ok(None) };
    table(
        &JOINT_HEADER,
        j.counts.iter().enumerate().flat_map(|(a, row)| {
            row.iter().enumerate().map(move |(b, c)| vec![a.to_string(), b.to_string(), c.to_string()])
        }),
    )
    .map(Some)
}

pub fn sweep_csv(result: &SweepResult) -> Result<Vec<u8>> {
    table(
        &SWEEP_HEADER,
        result.rows.iter().map(|r| {
            vec![
                r.sites.to_string(),
                real(r.gamma),
                real(r.delta.value),
                real(r.delta.se),
                real(r.prediction),
                opt(r.exact),
                real(r.z),
            ]
        }),
    )
}

pub fn haar_csv(result: &HaarResult) -> Result<Vec<u8>> {
    table(
        &HAAR_HEADER,
        result.rows.iter().flat_map(|row| {
            row.states.iter().map(move |s| {
                vec![
                    row.sites.to_string(),
                    s.index.to_string(),
                    s.seed.to_string(),
                    real(s.delta.value),
                    real(s.delta.se),
                    opt(s.exact),
                ]
            })
        }),
    )
}

pub fn haar_summary_csv(result: &HaarResult) -> Result<Vec<u8>> {
    table(
        &HAAR_SUMMARY_HEADER,
        result.rows.iter().map(|r| {
            vec![r.sites.to_string(), real(r.mean_abs.value), real(r.mean_abs.se), opt(r.exact_mean_abs)]
        }),
    )
}

pub fn wick_csv(rows: &[WickRow]) -> Result<Vec<u8>> {
    table(
        &WICK_HEADER,
        rows.iter().map(|r| vec![r.sites.to_string(), real(r.q2), real(r.q4), real(r.ratio), opt(r.oracle)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, b"a").unwrap();
        write_atomic(&p, b"b").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"b");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
