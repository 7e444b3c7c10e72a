//! `echosim`: command-line front end for the photon-echo simulator.
//!
//! Exit codes: 0 success, 1 configuration or input-data error, 2 numerical
//! abort during propagation, 3 I/O failure.

mod artifacts;
mod config;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use echosim_core::analysis::{
    detect_echoes, fit_three_pulse_decay, fit_two_pulse_decay, sweep_delay_vs_efficiency,
};
use echosim_core::error::{ConfigError, DetectionError, FitError, PropagationError, RunError};
use echosim_core::medium::{group_delay, susceptibility};
use echosim_core::presets;
use echosim_core::propagation::propagate;

use artifacts::CsvFormatError;
use config::{ResolvedRun, RunConfig};

#[derive(Parser)]
#[command(name = "echosim", version, about = "Photon-echo simulator for hole-burned two-level media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one pulse sequence and report echo efficiency.
    Run(RunArgs),
    /// Scan background density and tabulate echo efficiency against group delay.
    Sweep(RunArgs),
    /// Fit an exponential decay to a CSV of echo intensities.
    Fit(FitArgs),
    /// List the bundled presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Bundled preset name (see `echosim presets`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Write the artifact set into this directory (created if missing).
    /// Without it only the paths named in the config are written.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for the parallel parts; defaults to all cores.
    #[arg(long, value_name = "N", env = "ECHOSIM_THREADS")]
    jobs: Option<usize>,

    /// Force deterministic_reduction on, regardless of the config.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct FitArgs {
    /// CSV file with t_us and intensity columns.
    csv: PathBuf,

    /// Decay model, i.e. how tau relates to the fitted log-slope.
    #[arg(long, value_enum)]
    model: FitModel,

    /// Write fit.json into this directory (created if missing).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitModel {
    /// I(t) = I0 exp(-2 t / tau), t the data-to-echo delay.
    #[value(name = "two_pulse")]
    TwoPulse,
    /// I(t) = I0 exp(-t / tau), t the storage wait.
    #[value(name = "three_pulse")]
    ThreePulse,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Presets => cmd_presets(),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

/// Maps the deepest recognizable cause onto the documented exit codes.
fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(run) = cause.downcast_ref::<RunError>() {
            return match run {
                RunError::Config(_) => 1,
                RunError::Propagation(_) => 2,
            };
        }
        if cause.downcast_ref::<PropagationError>().is_some() {
            return 2;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
        if cause.downcast_ref::<ConfigError>().is_some()
            || cause.downcast_ref::<DetectionError>().is_some()
            || cause.downcast_ref::<FitError>().is_some()
            || cause.downcast_ref::<CsvFormatError>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
        {
            return 1;
        }
    }
    1
}

/// Loads the config file (empty config when none) and merges the preset flag.
fn resolve(args: &RunArgs) -> anyhow::Result<ResolvedRun> {
    let (cfg, label) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let cfg: RunConfig = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".to_owned());
            (cfg, label)
        }
        None => (RunConfig::default(), "run".to_owned()),
    };
    let mut run = cfg.resolve(args.preset.as_deref(), &label)?;
    run.deterministic_reduction |= args.deterministic;
    Ok(run)
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            if n == 0 {
                return Err(ConfigError::new("jobs", "must be at least 1").into());
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building the worker pool")?;
            Ok(pool.install(f))
        }
    }
}

/// Joins a config-supplied path onto --out (absolute paths stay put), or
/// falls back to a default name inside --out.
fn artifact_path(out: Option<&Path>, configured: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    match (out, configured) {
        (Some(dir), Some(p)) => Some(if p.is_absolute() { p.to_owned() } else { dir.join(p) }),
        (Some(dir), None) => Some(dir.join(default_name)),
        (None, Some(p)) => Some(p.to_owned()),
        (None, None) => None,
    }
}

fn ensure_out_dir(out: Option<&Path>) -> anyhow::Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let run = resolve(&args)?;
    ensure_out_dir(args.out.as_deref())?;

    let pop = presets::population_for(&run.sequence, &run.medium)?;
    let probe_mhz = run.sequence.hole.as_ref().map_or(0.0, |h| h.center_mhz);
    let delay_us = group_delay(&pop, &run.medium, probe_mhz)?;

    let result = in_pool(args.jobs, || propagate(&run.medium, &pop, &run.sequence, &run.grid))??;
    let echo = detect_echoes(&result.input, &result.output, &run.sequence.windows, &run.settings)?;

    let out = args.out.as_deref();
    if let Some(path) = artifact_path(out, run.outputs.trace_csv.as_deref(), "trace.csv") {
        fs::write(&path, artifacts::trace_csv(&result.output))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = artifact_path(out, run.outputs.spectra_csv.as_deref(), "spectra.csv") {
        let sus = susceptibility(&pop, &run.medium)?;
        if let Some(warning) = &sus.tail_warning {
            log::warn!("{warning}");
        }
        fs::write(&path, artifacts::spectra_csv(&sus))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = artifact_path(out, run.outputs.report_json.as_deref(), "report.json") {
        let report = artifacts::RunReport {
            label: &run.label,
            group_delay_us: delay_us,
            deterministic_reduction: run.deterministic_reduction,
            echo: &echo,
        };
        artifacts::to_json_file(&path, &report)?;
    }

    println!(
        "run {}: group delay {:.4} us, efficiency_first {:.4e}, transmission {:.4}",
        run.label, delay_us, echo.efficiency_first, echo.transmission_total
    );
    Ok(())
}

fn cmd_sweep(args: RunArgs) -> anyhow::Result<()> {
    let run = resolve(&args)?;
    ensure_out_dir(args.out.as_deref())?;
    let sweep = run.sweep.as_ref().ok_or_else(|| {
        ConfigError::new("sweep", "the sweep command needs a `sweep` section or a preset that bundles one")
    })?;

    let rows = in_pool(args.jobs, || {
        sweep_delay_vs_efficiency(&run.medium, &run.sequence, &run.grid, sweep, &run.settings)
    })??;
    let csv = artifacts::sweep_csv(&rows);

    match &args.out {
        Some(dir) => {
            let path = dir.join("sweep.csv");
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            println!("sweep {}: {} points -> {}", run.label, rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> anyhow::Result<()> {
    let points = artifacts::read_decay_csv(&args.csv)?;
    let (name, fit) = match args.model {
        FitModel::TwoPulse => ("two_pulse", fit_two_pulse_decay(&points)?),
        FitModel::ThreePulse => ("three_pulse", fit_three_pulse_decay(&points)?),
    };
    if let Some(dir) = &args.out {
        ensure_out_dir(Some(dir))?;
        artifacts::to_json_file(&dir.join("fit.json"), &fit)?;
    }
    println!(
        "fit {}: tau {:.6} us, i0 {:.6e}, rms log-residual {:.3e} ({} points)",
        name, fit.tau_us, fit.i0, fit.rms_residual, fit.n_points
    );
    Ok(())
}

fn cmd_presets() -> anyhow::Result<()> {
    for name in presets::PRESET_NAMES {
        let setup = presets::setup(name)?;
        println!("{name:<20} {}", setup.description);
    }
    Ok(())
}
