//! `agassi`: runs the fidelity, survival, correlation, phase-sweep and
//! gate-compilation experiments and writes CSV plus a JSON run manifest.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use agassi_core::experiments::{self, ExperimentConfig, ExperimentKind};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Overrides;

#[derive(Debug, Parser)]
#[command(name = "agassi", version, about = "Exact and Trotterized dynamics of the Agassi model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Exact-vs-Trotter fidelity along a time grid
    FidelityTime,
    /// Exact-vs-Trotter fidelity at the final time for n_T = 1..nt
    FidelitySteps,
    /// Survival probability of the initial state
    Survival,
    /// σz(12) correlation, exact and Trotterized
    Correlation,
    /// Correlation amplitude and phase label along g = V
    PhaseSweep,
    /// Compile the Trotter circuit to ion gates and estimate its error
    CompileReport,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::FidelityTime => ExperimentKind::FidelityVsTime,
            Command::FidelitySteps => ExperimentKind::FidelityVsSteps,
            Command::Survival => ExperimentKind::Survival,
            Command::Correlation => ExperimentKind::Correlation,
            Command::PhaseSweep => ExperimentKind::PhaseSweep,
            Command::CompileReport => ExperimentKind::CompileReport,
        }
    }

    fn default_output(self) -> &'static str {
        match self {
            Command::FidelityTime => "fidelity-time.csv",
            Command::FidelitySteps => "fidelity-steps.csv",
            Command::Survival => "survival.csv",
            Command::Correlation => "correlation.csv",
            Command::PhaseSweep => "phase-sweep.csv",
            Command::CompileReport => "compile-report.gates",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config::resolve(cli.command.kind(), &cli.overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    out.with_file_name(format!("{stem}.manifest.json"))
}

fn min_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

fn run(command: Command, cfg: &ExperimentConfig) -> Result<()> {
    let started = Instant::now();
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from(command.default_output()));

    let summary: Value = match command {
        Command::FidelityTime => {
            let rows = experiments::fidelity_vs_time(cfg)?;
            write_csv(&out, &rows)?;
            json!({ "min_fidelity": min_of(rows.iter().map(|r| r.fidelity)) })
        }
        Command::FidelitySteps => {
            let rows = experiments::fidelity_vs_steps(cfg)?;
            write_csv(&out, &rows)?;
            json!({ "final_fidelity": rows.last().map(|r| r.fidelity) })
        }
        Command::Survival => {
            let rows = experiments::survival_series(cfg)?;
            write_csv(&out, &rows)?;
            json!({ "min_survival_on_grid": min_of(rows.iter().map(|r| r.survival)) })
        }
        Command::Correlation => {
            let rows = experiments::correlation_rows(cfg)?;
            write_csv(&out, &rows)?;
            let deviation = rows
                .iter()
                .filter_map(|r| r.corr_trotter.map(|c| (c - r.corr_exact).abs()))
                .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
            json!({
                "amplitude_exact": experiments::amplitude(cfg)?,
                "max_trotter_deviation": deviation,
            })
        }
        Command::PhaseSweep => {
            let sweep = experiments::phase_sweep(cfg)?;
            write_csv(&out, &sweep.points)?;
            let first_bsp =
                sweep.points.iter().find(|p| p.phase == agassi_core::model::Phase::BrokenSymmetry).map(|p| p.g_eq_v);
            json!({ "points": sweep.points.len(), "first_broken_symmetry_point": first_bsp })
        }
        Command::CompileReport => {
            let report = experiments::compile_report(cfg)?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let text = report.sequence.as_ref().map(|s| s.to_string()).unwrap_or_default();
            fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
            let per = report.counts.per_trotter_step;
            println!(
                "per step: {} single-qubit, {} two-qubit-equivalent ({} collective MS)",
                per.single_qubit, per.two_qubit_equivalent, per.collective_ms
            );
            println!("n_T = {}: E_G = {}", report.steps, report.budget.total);
            serde_json::to_value(&report)?
        }
    };

    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": format!("{command:?}"),
        "config": cfg,
        "resolved": {
            "n_t": cfg.resolved_n_t(),
            "stepping": cfg.resolved_stepping(),
            "trotter": cfg.resolved_trotter(),
            "t_final": cfg.resolved_t_final().ok(),
            "initial_state": cfg.initial_state,
        },
        "output": out,
        "summary": summary,
        "started_unix": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
            - started.elapsed().as_secs_f64(),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    let mpath = manifest_path(&out);
    fs::write(&mpath, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("writing {}", mpath.display()))?;
    println!("wrote {} and {}", out.display(), mpath.display());
    Ok(())
}
