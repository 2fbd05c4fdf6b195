//! The `fluctmon` command line tool.
//!
//! Experiment subcommands resolve their configuration in layers: built-in
//! defaults, then `--full-scale`, then `--config FILE` (TOML, JSON, or a
//! previous run manifest), then individual flags. Outputs go to `--out DIR`
//! together with a `manifest.json` written last.

pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::experiments::{self, output, Engine, InitialState, MonitorRun};
use crate::gaussian::entropy::{
    canonical_transform, entropy, entropy_from_full_covariance, symplectic_eigenvalues, EntropyKind,
};
use crate::gaussian::{
    build_covariance_blocks, purification_rate, s2_rate, CorrelationData, PurificationKind, SpectralFunctions,
};
use crate::spin::{ground_state, two_point_functions, GroundStateOptions};
use config::{defaults, overlay, read_document, RunConfig};
use manifest::{streams_for, timestamp, Outputs, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "fluctmon", version, about = "Weak monitoring of quantum fluctuations in Ising chains")]
pub struct Cli {
    /// Worker threads for trajectory sampling (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground state energy, residual and gap.
    GroundState(RunArgs),
    /// Exact Keldysh and response matrices on the schedule times.
    Correlations(RunArgs),
    /// Sample measurement records and compare with the Gaussian prediction.
    Monitor(RunArgs),
    /// Two-time backreaction versus measurement strength.
    SweepGamma(RunArgs),
    /// Backreaction averaged over Haar random initial states.
    Haar(RunArgs),
    /// Outcome distributions of the critical chain.
    Critical(RunArgs),
    /// Multi-time outcome covariance against the Gaussian theory.
    ValidateCov(RunArgs),
    /// Connected four-point ratio of ground states.
    Wick(RunArgs),
    /// Covariance blocks and entropies of correlation data.
    Theory(TheoryArgs),
    /// One entropy of correlation data.
    Entropy(EntropyArgs),
    /// Entropy-growth and purification rates of spectral data.
    Rates(RatesArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Configuration file (TOML, JSON, or a run manifest).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// Output directory (default: `fluctmon-out/<subcommand>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// 16 sites and 8000 shots.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long)]
    pub sites: Option<usize>,
    /// Coupling magnitude.
    #[arg(long)]
    pub j: Option<f64>,
    /// Sign of the coupling: true gives `-j sum Z Z`.
    #[arg(long)]
    pub ferromagnetic: Option<bool>,
    /// Magnetization scaling exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = ["ground", "haar"])]
    pub initial: Option<String>,
    #[arg(long)]
    pub haar_index: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// One strength, or one per time.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_parser = ["auto", "branch", "direct"])]
    pub engine: Option<String>,
    #[arg(long)]
    pub jackknife_blocks: Option<usize>,
    /// Chain sizes of sweep-gamma, haar and wick.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Strength grid of sweep-gamma.
    #[arg(long, value_delimiter = ',')]
    pub sweep_gammas: Option<Vec<f64>>,
    /// Haar states per size.
    #[arg(long)]
    pub states: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Correlation data (JSON or TOML).
    pub input: PathBuf,
    /// Entropy orders: integers >= 2 or `vn`.
    #[arg(long, value_delimiter = ',', default_value = "2,vn")]
    pub orders: Vec<String>,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    pub input: PathBuf,
    /// Integer order >= 2 or `vn`.
    #[arg(long, default_value = "2")]
    pub kind: String,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Spectral functions (JSON or TOML).
    pub input: PathBuf,
    /// Replaces the inverse temperature stored in the file.
    #[arg(long)]
    pub beta: Option<f64>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GroundState(_) => "ground-state",
            Command::Correlations(_) => "correlations",
            Command::Monitor(_) => "monitor",
            Command::SweepGamma(_) => "sweep-gamma",
            Command::Haar(_) => "haar",
            Command::Critical(_) => "critical",
            Command::ValidateCov(_) => "validate-cov",
            Command::Wick(_) => "wick",
            Command::Theory(_) => "theory",
            Command::Entropy(_) => "entropy",
            Command::Rates(_) => "rates",
        }
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Applies the layers described in the module docs.
pub fn resolve(subcommand: &str, args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = defaults(subcommand);
    if args.full_scale {
        cfg.experiment.sites = 16;
        cfg.experiment.shots = 8000;
    }
    if let Some(path) = &args.config {
        let doc: Map<String, Value> = read_document(path, "config")?;
        cfg = overlay(&cfg, doc)?;
    }
    let e = &mut cfg.experiment;
    set(&mut e.sites, args.sites);
    set(&mut e.j, args.j);
    set(&mut e.ferromagnetic, args.ferromagnetic);
    set(&mut e.alpha, args.alpha);
    set(&mut e.haar_index, args.haar_index);
    set(&mut e.times, args.times.clone());
    set(&mut e.gammas, args.gammas.clone());
    set(&mut e.shots, args.shots);
    set(&mut e.seed, args.seed);
    set(&mut e.tol, args.tol);
    set(&mut e.jackknife_blocks, args.jackknife_blocks);
    if args.bin_width.is_some() {
        e.bin_width = args.bin_width;
    }
    if let Some(s) = &args.initial {
        e.initial = if s == "haar" { InitialState::Haar } else { InitialState::Ground };
    }
    if let Some(s) = &args.engine {
        e.engine = match s.as_str() {
            "branch" => Engine::Branch,
            "direct" => Engine::Direct,
            _ => Engine::Auto,
        };
    }
    if args.sizes.is_some() || args.sweep_gammas.is_some() || args.states.is_some() {
        let mut scan = cfg.scan();
        if args.sizes.is_some() {
            scan.sizes = args.sizes.clone();
        }
        if args.sweep_gammas.is_some() {
            scan.gammas = args.sweep_gammas.clone();
        }
        if args.states.is_some() {
            scan.states = args.states;
        }
        cfg.scan = Some(scan);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::numeric(e.to_string()))
}

fn required<T: Clone>(v: &Option<T>, what: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::invalid(format!("scan.{what} is required")))
}

fn write_records(out: &mut Outputs, run: &MonitorRun) -> Result<()> {
    out.write("trajectories.csv", &output::trajectories_csv(run)?)?;
    out.write(
        "summary.csv",
        &output::summary_csv(&run.summary, &run.gaussian_covariance, run.exact_covariance.as_ref())?,
    )?;
    out.write("histograms.csv", &output::histograms_csv(&run.summary)?)?;
    if let Some(joint) = output::joint_csv(&run.summary)? {
        out.write("joint.csv", &joint)?;
    }
    Ok(())
}

fn run_report(run: &MonitorRun) -> Value {
    json!({
        "engine": run.engine,
        "ground": run.ground,
        "offsets": run.offsets,
        "correlation": run.correlation,
        "gaussian_covariance": output_rows(&run.gaussian_covariance),
        "exact_covariance": run.exact_covariance.as_ref().map(output_rows),
        "summary": run.summary,
    })
}

fn output_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Runs an experiment subcommand and returns a one-line summary for stdout.
fn experiment(name: &str, cfg: &RunConfig, out: &mut Outputs) -> Result<String> {
    let e = &cfg.experiment;
    let scan = cfg.scan();
    match name {
        "ground-state" => {
            let chain = crate::spin::IsingChain::periodic(e.sites, e.coupling())?;
            let gs = ground_state(&chain, &GroundStateOptions { seed: e.seed, ..Default::default() })?;
            let report = json!({
                "sites": e.sites,
                "coupling": e.coupling(),
                "energy": gs.energy,
                "residual": gs.residual,
                "restarts": gs.restarts,
                "gap": gs.gap(),
                "near_degenerate": gs.near_degenerate(),
            });
            out.write_json("ground_state.json", &report)?;
            if gs.near_degenerate() {
                eprintln!("warning: ground state is nearly degenerate (gap {:?})", gs.gap());
            }
            Ok(format!("energy {:.12} gap {:?}", gs.energy, gs.gap()))
        }
        "correlations" => {
            let schedule = e.schedule()?;
            let system = experiments::System::prepare(e)?;
            let prop = system.propagator(e)?;
            let tp = two_point_functions(&system.psi0, &prop, &system.obs, &schedule.times())?;
            let rows = tp.times.iter().zip(&tp.means).map(|(t, m)| vec![output::real(*t), output::real(*m)]);
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Parse { what: "csv".into(), message: e.to_string() };
            w.write_record(["time", "mean_q"]).map_err(csv_err)?;
            for r in rows {
                w.write_record(&r).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse { what: "csv".into(), message: e.to_string() })?;
            out.write("means.csv", &bytes)?;
            let corr = tp.into_correlation_data(schedule.gammas())?;
            out.write_json("correlations.json", &corr)?;
            Ok(format!("{} times written", corr.len()))
        }
        "monitor" => {
            let run = experiments::monitor(e)?;
            write_records(out, &run)?;
            let mut report = run_report(&run);
            let mut line = format!("{} trajectories ({} engine)", run.records.len(), run.engine);
            if run.schedule.events().len() == 2 {
                let tt = experiments::two_time::two_time_from_run(run)?;
                let r = tt.report();
                line = format!("{line}; delta {:.6} +- {:.6}, predicted {:.6}", r.delta.value, r.delta.se, r.predicted_delta);
                report["two_time"] = serde_json::to_value(r).map_err(|e| Error::numeric(e.to_string()))?;
            }
            out.write_json("report.json", &report)?;
            Ok(line)
        }
        "critical" => {
            let res = experiments::critical_experiment(e)?;
            write_records(out, &res.two_time.run)?;
            let r = res.report();
            out.write_json("critical.json", &r)?;
            Ok(format!("KS statistic {:.4} (1% critical {:.4}), bimodal {:?}", r.ks.statistic, r.ks.critical_01, r.bimodal))
        }
        "validate-cov" => {
            let res = experiments::validate_covariance(e)?;
            write_records(out, &res.run)?;
            let r = res.report();
            out.write_json("covariance.json", &r)?;
            Ok(format!("max |z| against Gaussian theory {:.3}", r.max_z_gaussian))
        }
        "sweep-gamma" => {
            let res = experiments::gamma_sweep(e, &required(&scan.gammas, "gammas")?, &required(&scan.sizes, "sizes")?)?;
            out.write("sweep.csv", &output::sweep_csv(&res)?)?;
            out.write_json("sweep.json", &json!({ "result": res, "prefactor_z": res.prefactor_z() }))?;
            let slopes: Vec<_> = res.fits.iter().map(|f| (f.sites, f.fit.as_ref().map(|l| l.slope))).collect();
            Ok(format!("slopes {slopes:?}"))
        }
        "haar" => {
            let res = experiments::haar_average(e, &required(&scan.sizes, "sizes")?, required(&scan.states, "states")?)?;
            out.write("haar.csv", &output::haar_csv(&res)?)?;
            out.write("haar_summary.csv", &output::haar_summary_csv(&res)?)?;
            out.write_json("haar.json", &json!({ "result": res, "decrease_z": res.decrease_z() }))?;
            let means: Vec<_> = res.rows.iter().map(|r| (r.sites, r.mean_abs.value)).collect();
            Ok(format!("mean |delta| {means:?}"))
        }
        "wick" => {
            let rows = experiments::wick_check(e, &required(&scan.sizes, "sizes")?)?;
            out.write("wick.csv", &output::wick_csv(&rows)?)?;
            let ratios: Vec<_> = rows.iter().map(|r| (r.sites, r.ratio)).collect();
            Ok(format!("ratios {ratios:?}"))
        }
        other => Err(Error::invalid(format!("{other} is not an experiment"))),
    }
}

fn run_experiment(name: &str, args: &RunArgs, threads: Option<usize>) -> Result<()> {
    let cfg = resolve(name, args)?;
    if args.dump_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("fluctmon-out").join(name));
    let mut out = Outputs::new(&dir);
    let line = experiments::with_threads(threads, || experiment(name, &cfg, &mut out))??;
    let manifest = RunManifest {
        subcommand: name.into(),
        seed: cfg.experiment.seed,
        streams: streams_for(name, &cfg),
        config: cfg,
        version: env!("CARGO_PKG_VERSION").into(),
        started: timestamp(started),
        finished: timestamp(chrono::Utc::now()),
        wall_seconds: clock.elapsed().as_secs_f64(),
        threads,
        outputs: out.files,
    };
    let path = manifest.write(&dir)?;
    println!("{name}: {line}");
    println!("manifest: {}", path.display());
    Ok(())
}

fn theory(args: &TheoryArgs) -> Result<Value> {
    let corr: CorrelationData = read_document(&args.input, "correlation data")?;
    let kinds = args.orders.iter().map(|s| s.parse::<EntropyKind>()).collect::<Result<Vec<_>>>()?;
    let blocks = build_covariance_blocks(&corr)?;
    let c = corr.scaled_keldysh();
    let mut entropies = Map::new();
    for k in kinds {
        let key = match k {
            EntropyKind::Renyi(m) => format!("renyi{m}"),
            EntropyKind::VonNeumann => "vn".into(),
        };
        entropies.insert(
            key,
            json!({
                "from_keldysh": entropy(&c, k)?,
                "from_full_covariance": entropy_from_full_covariance(&blocks, k)?,
            }),
        );
    }
    let transform = canonical_transform(&c, &corr.scaled_response())?;
    Ok(json!({
        "blocks": blocks.to_report(),
        "uncertainty_margin": blocks.uncertainty_margin(),
        "symplectic_eigenvalues": symplectic_eigenvalues(&blocks.assemble())?,
        "entropies": entropies,
        "canonical_transform": {
            "matrix": output_rows(&transform.matrix),
            "keldysh_eigenvalues": transform.lambdas,
            "symplectic_defect": transform.symplectic_defect(),
            "reduction_residual": transform.reduction_residual(&blocks)?,
        },
    }))
}

fn entropy_cmd(args: &EntropyArgs) -> Result<Value> {
    let corr: CorrelationData = read_document(&args.input, "correlation data")?;
    let kind: EntropyKind = args.kind.parse()?;
    let blocks = build_covariance_blocks(&corr)?;
    Ok(json!({
        "kind": kind,
        "from_keldysh": entropy(&corr.scaled_keldysh(), kind)?,
        "from_full_covariance": entropy_from_full_covariance(&blocks, kind)?,
    }))
}

fn rates(args: &RatesArgs) -> Result<Value> {
    let mut spec: SpectralFunctions = read_document(&args.input, "spectral functions")?;
    if let Some(b) = args.beta {
        spec = spec.with_beta(b)?;
    }
    Ok(json!({
        "beta": spec.beta(),
        "s2_rate": s2_rate(&spec),
        "purification_vn": purification_rate(&spec, PurificationKind::Vn),
        "purification_renyi2": purification_rate(&spec, PurificationKind::Renyi2),
    }))
}

fn dispatch(cli: &Cli) -> Result<()> {
    let name = cli.command.name();
    let report = match &cli.command {
        Command::Theory(a) => theory(a).and_then(|v| {
            if let Some(path) = &a.out {
                output::write_atomic(path, format!("{}\n", print_json(&v)?).as_bytes())?;
            }
            Ok(v)
        })?,
        Command::Entropy(a) => entropy_cmd(a)?,
        Command::Rates(a) => rates(a)?,
        Command::GroundState(a)
        | Command::Correlations(a)
        | Command::Monitor(a)
        | Command::SweepGamma(a)
        | Command::Haar(a)
        | Command::Critical(a)
        | Command::ValidateCov(a)
        | Command::Wick(a) => return run_experiment(name, a, cli.threads),
    };
    println!("{}", print_json(&report)?);
    Ok(())
}

/// Parses `argv` and runs the command. Returns 0 on success, 1 for bad input
/// and 2 for numeric failures.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
