use std::fs;
use std::path::{Path, PathBuf};

use agassi_core::experiments::{ExperimentConfig, ExperimentKind, SteppingMode, SweepGrid, TimeScale};
use anyhow::{Context, Result};
use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepArg {
    Total,
    PerUnitTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    /// final time given on the (g+V)t axis
    Gvt,
    /// final time given in units of 1/ε
    T,
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML file with experiment settings
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub g: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v: Option<f64>,

    /// Trotter steps (total, or per unit time with --stepping per-unit-time)
    #[arg(long = "nt", global = true)]
    pub n_t: Option<usize>,

    #[arg(long, global = true, value_enum)]
    pub stepping: Option<StepArg>,

    /// final time, measured according to --time-scale
    #[arg(long = "tf", global = true)]
    pub t_final: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub time_scale: Option<ScaleArg>,

    /// number of time samples
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// initial spin pattern such as ddUU or ↓↓↑↑
    #[arg(long = "init", global = true)]
    pub initial_state: Option<String>,

    /// output file; a .manifest.json is written next to it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// also run Trotterized dynamics
    #[arg(long, global = true, conflicts_with = "exact_only")]
    pub trotter: bool,

    /// exact dynamics only
    #[arg(long, global = true)]
    pub exact_only: bool,

    #[arg(long, global = true)]
    pub e1: Option<f64>,

    #[arg(long, global = true)]
    pub e2: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sweep_start: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sweep_stop: Option<f64>,

    #[arg(long, global = true)]
    pub sweep_points: Option<usize>,
}

pub fn load_file(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Config file (if any) with the subcommand's experiment and all given flags applied.
pub fn resolve(kind: ExperimentKind, o: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match &o.config {
        Some(path) => load_file(path)?,
        None => ExperimentConfig::new(kind),
    };
    cfg.experiment = kind;
    apply(&mut cfg, o);
    Ok(cfg)
}

pub fn apply(cfg: &mut ExperimentConfig, o: &Overrides) {
    if let Some(x) = o.epsilon {
        cfg.params.epsilon = x;
    }
    if let Some(x) = o.g {
        cfg.params.g = x;
    }
    if let Some(x) = o.v {
        cfg.params.v = x;
    }
    if o.n_t.is_some() {
        cfg.n_t = o.n_t;
    }
    if let Some(s) = o.stepping {
        cfg.stepping = Some(match s {
            StepArg::Total => SteppingMode::Total,
            StepArg::PerUnitTime => SteppingMode::PerUnitTime,
        });
    }
    if o.t_final.is_some() {
        cfg.t_final = o.t_final;
    }
    if let Some(s) = o.time_scale {
        cfg.time_scale = match s {
            ScaleArg::Gvt => TimeScale::Coupling,
            ScaleArg::T => TimeScale::Physical,
        };
    }
    if let Some(n) = o.samples {
        cfg.samples = n;
    }
    if let Some(s) = &o.initial_state {
        cfg.initial_state = s.clone();
    }
    if o.out.is_some() {
        cfg.output = o.out.clone();
    }
    if o.trotter {
        cfg.trotter = Some(true);
    }
    if o.exact_only {
        cfg.trotter = Some(false);
    }
    if let Some(e) = o.e1 {
        cfg.e1 = e;
    }
    if let Some(e) = o.e2 {
        cfg.e2 = e;
    }
    let SweepGrid { start, stop, points } = cfg.sweep;
    cfg.sweep = SweepGrid {
        start: o.sweep_start.unwrap_or(start),
        stop: o.sweep_stop.unwrap_or(stop),
        points: o.sweep_points.unwrap_or(points),
    };
}
