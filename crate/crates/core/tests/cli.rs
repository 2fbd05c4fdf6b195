use std::path::Path;
use std::process::{Command, Output};

use fluctmon::cli::config::{defaults, parse_document, RunConfig};
use fluctmon::cli::manifest::RunManifest;
use fluctmon::experiments::output::{HISTOGRAM_HEADER, SUMMARY_HEADER, TRAJECTORY_HEADER};

fn fluctmon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluctmon")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn monitor(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["monitor", "--sites", "6", "--shots", "500", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    fluctmon(&args)
}

#[test]
fn monitor_writes_schema_conforming_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let out = monitor(&dir, &["--gammas", "0.7,1.3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let (header, rows) = read_csv(&dir.join("trajectories.csv"));
    assert_eq!(header, TRAJECTORY_HEADER);
    assert_eq!(rows.len(), 1000);
    let mut sums = [0.0; 2];
    for (i, row) in rows.iter().enumerate() {
        let v: Vec<f64> = row.iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[0] as usize, i / 2);
        assert_eq!(v[1] as usize, i % 2);
        assert_eq!(v[3], [0.7, 1.3][i % 2]);
        assert!((v[5] - v[3] * v[4]).abs() <= 1e-15 * v[5].abs().max(1.0));
        for s in &row[2..] {
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.len(), 18, "17 significant digits in {s}");
        }
        sums[i % 2] += v[5];
    }

    let (header, summary) = read_csv(&dir.join("summary.csv"));
    assert_eq!(header, SUMMARY_HEADER);
    for (k, row) in summary.iter().enumerate() {
        let mean: f64 = row[3].parse().unwrap();
        assert!((mean - sums[k] / 500.0).abs() < 1e-12);
    }

    let (header, hist) = read_csv(&dir.join("histograms.csv"));
    assert_eq!(header, HISTOGRAM_HEADER);
    for k in 0..2 {
        let total: u64 = hist.iter().filter(|r| r[0] == k.to_string()).map(|r| r[3].parse::<u64>().unwrap()).sum();
        assert_eq!(total, 500);
    }
    let (_, joint) = read_csv(&dir.join("joint.csv"));
    assert_eq!(joint.iter().map(|r| r[2].parse::<u64>().unwrap()).sum::<u64>(), 500);
}

#[test]
fn outputs_are_byte_identical_across_threads_and_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    assert_eq!(code(&monitor(&a, &["--threads", "1"])), 0);
    assert_eq!(code(&monitor(&b, &["--threads", "3"])), 0);
    let manifest = a.join("manifest.json");
    let out = fluctmon(&["monitor", "--config", manifest.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for f in ["trajectories.csv", "summary.csv", "histograms.csv", "joint.csv", "report.json"] {
        let reference = std::fs::read(a.join(f)).unwrap();
        assert_eq!(reference, std::fs::read(b.join(f)).unwrap(), "{f} differs across thread counts");
        assert_eq!(reference, std::fs::read(c.join(f)).unwrap(), "{f} differs on rerun");
    }
}

#[test]
fn manifest_round_trips_the_resolved_config() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("w");
    let out = fluctmon(&["wick", "--sizes", "4,6", "--j", "0.5", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let m = RunManifest::read(&dir.join("manifest.json")).unwrap();
    assert_eq!(m.subcommand, "wick");
    assert_eq!(m.seed, m.config.experiment.seed);
    assert_eq!(m.outputs, vec!["wick.csv"]);
    assert_eq!(m.config.experiment.j, 0.5);
    assert_eq!(m.config.scan.as_ref().unwrap().sizes, Some(vec![4, 6]));
    let text = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<RunManifest>(&text).unwrap(), m);
    assert!(m.started <= m.finished);
}

#[test]
fn dump_config_prints_defaults() {
    for cmd in ["monitor", "critical", "validate-cov", "sweep-gamma", "haar", "wick"] {
        let out = fluctmon(&[cmd, "--dump-config"]);
        assert_eq!(code(&out), 0);
        let cfg: RunConfig = parse_document(&String::from_utf8(out.stdout).unwrap(), true, "config").unwrap();
        assert_eq!(cfg, defaults(cmd), "{cmd}");
    }
    let out = fluctmon(&["monitor", "--full-scale", "--dump-config"]);
    let cfg: RunConfig = parse_document(&String::from_utf8(out.stdout).unwrap(), true, "config").unwrap();
    assert_eq!((cfg.experiment.sites, cfg.experiment.shots), (16, 8000));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&fluctmon(&["--help"])), 0);
    assert_eq!(code(&fluctmon(&["monitor", "--no-such-flag"])), 1);
    assert_eq!(code(&fluctmon(&["no-such-command"])), 1);

    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "sites = \"many\"\n").unwrap();
    assert_eq!(code(&fluctmon(&["monitor", "--config", bad.to_str().unwrap(), "--dump-config"])), 1);
    std::fs::write(&bad, "shot = 4\n").unwrap();
    assert_eq!(code(&fluctmon(&["monitor", "--config", bad.to_str().unwrap(), "--dump-config"])), 1);
    assert_eq!(code(&fluctmon(&["monitor", "--sites", "40", "--dump-config"])), 1);

    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let res = fluctmon(&["wick", "--sizes", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 1);
    assert!(!String::from_utf8_lossy(&res.stderr).is_empty());

    let res = fluctmon(&["correlations", "--sites", "11", "--tol", "1e-300", "--out", tmp.path().join("n").to_str().unwrap()]);
    assert_eq!(code(&res), 2);
    assert!(!tmp.path().join("n/manifest.json").exists());
}

#[test]
fn correlations_feed_theory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("c");
    let out = fluctmon(&["correlations", "--sites", "6", "--times", "0,0.5,1", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let file = dir.join("correlations.json");
    let report_file = tmp.path().join("theory.json");
    let out = fluctmon(&["theory", file.to_str().unwrap(), "--orders", "2,3,vn", "--out", report_file.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, serde_json::from_slice::<serde_json::Value>(&std::fs::read(report_file).unwrap()).unwrap());
    assert_eq!(v["blocks"]["gxx"].as_array().unwrap().len(), 3);
    let s2 = &v["entropies"]["renyi2"];
    assert!((s2["from_keldysh"].as_f64().unwrap() - s2["from_full_covariance"].as_f64().unwrap()).abs() < 1e-9);
    assert!(v["entropies"]["vn"]["from_keldysh"].as_f64().unwrap() > s2["from_keldysh"].as_f64().unwrap());

    let out = fluctmon(&["entropy", file.to_str().unwrap(), "--kind", "vn"]);
    assert_eq!(code(&out), 0);
    let e: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(e["from_keldysh"], v["entropies"]["vn"]["from_keldysh"]);
}

#[test]
fn rates_at_infinite_temperature_coincide() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("spectral.toml");
    let omegas: Vec<f64> = (0..401).map(|i| -8.0 + 0.04 * i as f64).collect();
    let c: Vec<f64> = omegas.iter().map(|w| 2.0 * (-w * w / 2.0f64).exp()).collect();
    let chi: Vec<[f64; 2]> = omegas.iter().map(|w| [0.0, w * (-w * w / 2.0f64).exp()]).collect();
    let doc = toml::to_string(&serde_json::json!({ "omegas": omegas, "c_omega": c, "chi_omega": chi, "beta": 5.0 })).unwrap();
    std::fs::write(&file, doc).unwrap();
    let out = fluctmon(&["rates", file.to_str().unwrap(), "--beta", "0"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let (a, b) = (v["purification_vn"].as_f64().unwrap(), v["purification_renyi2"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-12);
    assert!(a > 0.0);
    let out = fluctmon(&["rates", file.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["beta"].as_f64(), Some(5.0));
}
