//! Fidelity, survival and correlation experiments, and the amplitude
//! sweep over `g = V` that separates the two phases.
//!
//! Results come back as plain rows whose field names match the CSV
//! headers written by the command-line runner.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ion::{compile_schedule, count_gates, error_budget, ErrorBudget, GateCounts, GateSequence};
use crate::model::{build_hamiltonian, ModelParams, Phase};
use crate::state::{fidelity, parse_spins, time_grid, Propagator, StateVector, TimeSeries};
use crate::trotter::{build_schedule, trotter_evolve, Stepping};

/// Amplitudes this close to 1 count as saturated (broken-symmetry phase).
pub const SATURATION_TOLERANCE: f64 = 1e-9;

/// Grid density used when searching for extrema over Rabi periods.
pub const SAMPLES_PER_PERIOD: usize = 200;

/// Number of Rabi periods covered by the extremum search.
pub const SEARCH_PERIODS: usize = 2;

const GOLDEN_ITERATIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "fidelity_vs_time")]
    FidelityVsTime,
    #[serde(rename = "fidelity_vs_nT")]
    FidelityVsSteps,
    #[serde(rename = "survival")]
    Survival,
    #[serde(rename = "correlation")]
    Correlation,
    #[serde(rename = "phase_sweep")]
    PhaseSweep,
    #[serde(rename = "compile_report")]
    CompileReport,
}

/// Axis on which `t_final` is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TimeScale {
    /// `(g+V)·t`, the abscissa of the fidelity and survival plots.
    #[default]
    #[serde(rename = "gvt")]
    Coupling,
    /// Plain `t` in units of `1/ε`.
    #[serde(rename = "t")]
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteppingMode {
    /// `n_T` steps in total at every time.
    Total,
    /// `n_T` steps per unit time.
    PerUnitTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: 1.0, points: 101 }
    }
}

impl SweepGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self.points {
            0 => Err(Error::InvalidArgument("sweep needs at least one point".into())),
            1 => Ok(vec![self.start]),
            n => {
                let h = (self.stop - self.start) / (n - 1) as f64;
                Ok((0..n).map(|i| if i == n - 1 { self.stop } else { self.start + i as f64 * h }).collect())
            }
        }
    }
}

/// Everything an experiment run needs. Optional fields fall back to
/// per-experiment defaults (see the `resolved_*` accessors).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub params: ModelParams,
    pub n_t: Option<usize>,
    pub stepping: Option<SteppingMode>,
    pub t_final: Option<f64>,
    pub time_scale: TimeScale,
    pub samples: usize,
    pub initial_state: String,
    pub trotter: Option<bool>,
    pub sweep: SweepGrid,
    pub e1: f64,
    pub e2: f64,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::new(ExperimentKind::Correlation)
    }
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            params: ModelParams::new(1.0, 1.0, 1.0),
            n_t: None,
            stepping: None,
            t_final: None,
            time_scale: TimeScale::Coupling,
            samples: 201,
            initial_state: "ddUU".into(),
            trotter: None,
            sweep: SweepGrid::default(),
            e1: 1e-4,
            e2: 1e-3,
            output: None,
        }
    }

    pub fn resolved_n_t(&self) -> usize {
        self.n_t.unwrap_or(match self.experiment {
            ExperimentKind::FidelityVsTime => 10,
            ExperimentKind::FidelityVsSteps => 30,
            _ => 5,
        })
    }

    pub fn resolved_stepping_mode(&self) -> SteppingMode {
        self.stepping.unwrap_or(match self.experiment {
            ExperimentKind::FidelityVsTime | ExperimentKind::FidelityVsSteps | ExperimentKind::CompileReport => {
                SteppingMode::Total
            }
            _ => SteppingMode::PerUnitTime,
        })
    }

    pub fn resolved_stepping(&self) -> Stepping {
        match self.resolved_stepping_mode() {
            SteppingMode::Total => Stepping::Total(self.resolved_n_t()),
            SteppingMode::PerUnitTime => Stepping::PerUnitTime(self.resolved_n_t()),
        }
    }

    pub fn resolved_trotter(&self) -> bool {
        self.trotter.unwrap_or(!matches!(self.experiment, ExperimentKind::Survival | ExperimentKind::PhaseSweep))
    }

    /// Final time in units of `1/ε`.
    pub fn resolved_t_final(&self) -> Result<f64> {
        let g = self.params.coupling();
        let Some(tf) = self.t_final else {
            return match self.experiment {
                ExperimentKind::Correlation => Ok(SEARCH_PERIODS as f64 * rabi_period(&self.params)),
                ExperimentKind::FidelityVsSteps => self.scale_time(2.0, g),
                ExperimentKind::CompileReport => Ok(1.0),
                _ => self.scale_time(10.0, g),
            };
        };
        self.scale_time(tf, g)
    }

    fn scale_time(&self, tf: f64, g: f64) -> Result<f64> {
        match self.time_scale {
            TimeScale::Physical => Ok(tf),
            TimeScale::Coupling if g == 0.0 => {
                Err(Error::InvalidParams("the (g+V)t axis is degenerate for g+V = 0; measure time in t instead".into()))
            }
            TimeScale::Coupling => Ok(tf / g.abs()),
        }
    }

    pub fn initial(&self) -> Result<StateVector> {
        let spins = parse_spins(&self.initial_state)?;
        if spins.len() != self.params.num_qubits() {
            return Err(Error::InvalidArgument(format!(
                "initial state {:?} has {} spins but the model has {} qubits",
                self.initial_state,
                spins.len(),
                self.params.num_qubits()
            )));
        }
        StateVector::from_spins(&spins)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.samples < 2 {
            return Err(Error::InvalidArgument(format!("samples must be ≥ 2, got {}", self.samples)));
        }
        if self.resolved_n_t() == 0 {
            return Err(Error::InvalidArgument("n_T must be positive".into()));
        }
        if let Some(tf) = self.t_final {
            if tf <= 0.0 || !tf.is_finite() {
                return Err(Error::InvalidArgument(format!("t_final must be positive, got {tf}")));
            }
        }
        if self.experiment != ExperimentKind::PhaseSweep {
            self.resolved_t_final()?;
            self.initial()?;
        } else {
            self.sweep.values()?;
        }
        for (name, e) in [("e1", self.e1), ("e2", self.e2)] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidArgument(format!("{name} = {e} is not a probability")));
            }
        }
        Ok(())
    }
}

/// `T_R = π/√(ε² + (g+V)²)`, the period of the two-level transfer probability.
pub fn rabi_period(p: &ModelParams) -> f64 {
    std::f64::consts::PI / (p.epsilon * p.epsilon + p.coupling() * p.coupling()).sqrt()
}

/// Closed-form transfer amplitude `(g+V)²/((g+V)² + ε²)` out of `|↓↓↑↑>`.
pub fn transfer_amplitude(p: &ModelParams) -> f64 {
    let g2 = p.coupling() * p.coupling();
    g2 / (g2 + p.epsilon * p.epsilon)
}

/// Phase read off a correlation amplitude.
pub fn classify_amplitude(amplitude: f64) -> Phase {
    if amplitude >= 1.0 - SATURATION_TOLERANCE {
        Phase::BrokenSymmetry
    } else {
        Phase::Symmetric
    }
}

fn z_sign(k: usize, n: usize, q: usize) -> f64 {
    if (k >> (n - q)) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `<σ_1^z σ_2^z> − <σ_1^z><σ_2^z>`
pub fn correlation_12(psi: &StateVector) -> f64 {
    let n = psi.num_qubits();
    let (mut z1, mut z2, mut zz) = (0.0, 0.0, 0.0);
    for k in 0..psi.dim() {
        let w = psi.probability(k);
        let (a, b) = (z_sign(k, n, 1), z_sign(k, n, 2));
        z1 += a * w;
        z2 += b * w;
        zz += a * b * w;
    }
    zz - z1 * z2
}

/// Exact or Trotterized evolution of a fixed initial state.
pub struct Dynamics {
    params: ModelParams,
    psi0: StateVector,
    exact: Propagator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evolution {
    Exact,
    Trotter(Stepping),
}

impl Dynamics {
    pub fn new(params: &ModelParams, psi0: &StateVector) -> Result<Self> {
        params.validate()?;
        let exact = Propagator::new(&build_hamiltonian(params)?)?;
        if psi0.num_qubits() != params.num_qubits() {
            return Err(Error::QubitMismatch { left: psi0.num_qubits(), right: params.num_qubits() });
        }
        Ok(Self { params: *params, psi0: psi0.clone(), exact })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn initial(&self) -> &StateVector {
        &self.psi0
    }

    pub fn state(&self, t: f64, evolution: Evolution) -> Result<StateVector> {
        match evolution {
            Evolution::Exact if t == 0.0 => Ok(self.psi0.clone()),
            Evolution::Exact => self.exact.evolve(&self.psi0, t),
            Evolution::Trotter(s) => trotter_evolve(&self.psi0, &self.params, t, s.steps_for(t)),
        }
    }

    pub fn survival(&self, t: f64, evolution: Evolution) -> Result<f64> {
        fidelity(&self.psi0, &self.state(t, evolution)?)
    }

    pub fn correlation(&self, t: f64, evolution: Evolution) -> Result<f64> {
        Ok(correlation_12(&self.state(t, evolution)?))
    }

    /// `|<ψ_exact(t)|ψ_trotter(t)>|²` with `steps` Trotter steps.
    pub fn trotter_fidelity(&self, t: f64, steps: usize) -> Result<f64> {
        let exact = self.exact.evolve(&self.psi0, t)?;
        fidelity(&exact, &trotter_evolve(&self.psi0, &self.params, t, steps)?)
    }
}

/// Samples `f` on `samples` points of `[0, t_end]`, then narrows the bracket
/// around the best sample by golden-section search. Returns the best
/// `(t, f(t))` actually evaluated.
pub fn refine_extremum<F>(f: F, t_end: f64, samples: usize, maximize: bool) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let grid = time_grid(t_end, samples)?;
    let values: Vec<f64> = grid.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut i_best = 0;
    for (i, &v) in values.iter().enumerate() {
        if better(v, values[i_best]) {
            i_best = i;
        }
    }
    let mut best = (grid[i_best], values[i_best]);
    let (mut a, mut b) = (grid[i_best.saturating_sub(1)], grid[(i_best + 1).min(samples - 1)]);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_ITERATIONS {
        for (t, v) in [(c, fc), (d, fd)] {
            if better(v, best.1) {
                best = (t, v);
            }
        }
        if better(fc, fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(best)
}

fn search_window(p: &ModelParams) -> (f64, usize) {
    (SEARCH_PERIODS as f64 * rabi_period(p), SEARCH_PERIODS * SAMPLES_PER_PERIOD + 1)
}

/// Maximum of `σ_z(12)` over two Rabi periods. Zero when `g + V = 0`,
/// since the reference state is then stationary.
pub fn correlation_amplitude(dynamics: &Dynamics, evolution: Evolution) -> Result<f64> {
    if dynamics.params().coupling() == 0.0 {
        return Ok(0.0);
    }
    let (t_end, samples) = search_window(dynamics.params());
    Ok(refine_extremum(|t| dynamics.correlation(t, evolution), t_end, samples, true)?.1)
}

/// Minimum survival probability over two Rabi periods of exact evolution.
pub fn survival_minimum(dynamics: &Dynamics) -> Result<f64> {
    let (t_end, samples) = search_window(dynamics.params());
    Ok(refine_extremum(|t| dynamics.survival(t, Evolution::Exact), t_end, samples, false)?.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityTimeRow {
    pub t: f64,
    pub gvt: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityStepsRow {
    #[serde(rename = "n_T")]
    pub n_t: usize,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub t: f64,
    pub gvt: f64,
    pub survival: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub t: f64,
    pub gvt: f64,
    pub corr_exact: f64,
    pub corr_trotter: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub g_eq_v: f64,
    pub amplitude: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn amplitudes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.amplitude).collect()
    }

    pub fn phases(&self) -> Vec<Phase> {
        self.points.iter().map(|p| p.phase).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub steps: usize,
    pub t_final: f64,
    pub counts: GateCounts,
    pub budget: ErrorBudget,
    #[serde(skip)]
    pub sequence: Option<GateSequence>,
}

fn dynamics_for(cfg: &ExperimentConfig) -> Result<Dynamics> {
    cfg.validate()?;
    Dynamics::new(&cfg.params, &cfg.initial()?)
}

fn sample_times(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    time_grid(cfg.resolved_t_final()?, cfg.samples)
}

/// Exact-vs-Trotter fidelity on the time grid.
pub fn fidelity_vs_time(cfg: &ExperimentConfig) -> Result<Vec<FidelityTimeRow>> {
    let dynamics = dynamics_for(cfg)?;
    let stepping = cfg.resolved_stepping();
    let g = cfg.params.coupling();
    sample_times(cfg)?
        .par_iter()
        .map(|&t| Ok(FidelityTimeRow { t, gvt: g * t, fidelity: dynamics.trotter_fidelity(t, stepping.steps_for(t))? }))
        .collect()
}

/// Exact-vs-Trotter fidelity at `t_final` for `n_T = 1..=n_t` total steps.
pub fn fidelity_vs_steps(cfg: &ExperimentConfig) -> Result<Vec<FidelityStepsRow>> {
    let dynamics = dynamics_for(cfg)?;
    let tf = cfg.resolved_t_final()?;
    let stepping = cfg.resolved_stepping_mode();
    (1..=cfg.resolved_n_t())
        .into_par_iter()
        .map(|n| {
            let steps = match stepping {
                SteppingMode::Total => n,
                SteppingMode::PerUnitTime => Stepping::PerUnitTime(n).steps_for(tf),
            };
            Ok(FidelityStepsRow { n_t: n, fidelity: dynamics.trotter_fidelity(tf, steps)? })
        })
        .collect()
}

/// `|<ψ0|ψ(t)>|²` on the time grid, exact unless Trotter evolution is requested.
pub fn survival_series(cfg: &ExperimentConfig) -> Result<Vec<SurvivalRow>> {
    let dynamics = dynamics_for(cfg)?;
    let evolution = if cfg.resolved_trotter() { Evolution::Trotter(cfg.resolved_stepping()) } else { Evolution::Exact };
    let g = cfg.params.coupling();
    sample_times(cfg)?
        .par_iter()
        .map(|&t| Ok(SurvivalRow { t, gvt: g * t, survival: dynamics.survival(t, evolution)? }))
        .collect()
}

/// `σ_z(12)` on the time grid: the exact series and, when enabled, the
/// Trotterized one.
pub fn correlation_series(cfg: &ExperimentConfig) -> Result<(TimeSeries, Option<TimeSeries>)> {
    let rows = correlation_rows(cfg)?;
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let exact = TimeSeries::new(times.clone(), rows.iter().map(|r| r.corr_exact).collect())?;
    let trotter = if cfg.resolved_trotter() {
        Some(TimeSeries::new(times, rows.iter().map(|r| r.corr_trotter.unwrap_or(f64::NAN)).collect())?)
    } else {
        None
    };
    Ok((exact, trotter))
}

pub fn correlation_rows(cfg: &ExperimentConfig) -> Result<Vec<CorrelationRow>> {
    let dynamics = dynamics_for(cfg)?;
    let trotter = cfg.resolved_trotter().then(|| Evolution::Trotter(cfg.resolved_stepping()));
    let g = cfg.params.coupling();
    sample_times(cfg)?
        .par_iter()
        .map(|&t| {
            Ok(CorrelationRow {
                t,
                gvt: g * t,
                corr_exact: dynamics.correlation(t, Evolution::Exact)?,
                corr_trotter: trotter.map(|e| dynamics.correlation(t, e)).transpose()?,
            })
        })
        .collect()
}

/// Exact correlation amplitude for the configured parameters.
pub fn amplitude(cfg: &ExperimentConfig) -> Result<f64> {
    correlation_amplitude(&dynamics_for(cfg)?, Evolution::Exact)
}

/// Amplitude and phase label along `g = V` (`ε` and the initial state from
/// `cfg`), from exact dynamics or, when enabled, Trotterized dynamics.
pub fn phase_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let psi0 = cfg.initial()?;
    let evolution = if cfg.resolved_trotter() { Evolution::Trotter(cfg.resolved_stepping()) } else { Evolution::Exact };
    let points = cfg
        .sweep
        .values()?
        .par_iter()
        .map(|&x| {
            let p = ModelParams { g: x, v: x, ..cfg.params };
            let amplitude = correlation_amplitude(&Dynamics::new(&p, &psi0)?, evolution)?;
            Ok(SweepPoint { g_eq_v: x, amplitude, phase: classify_amplitude(amplitude) })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult { points })
}

/// Compiles `n_T` Trotter steps up to `t_final` and applies the linear
/// error budget.
pub fn compile_report(cfg: &ExperimentConfig) -> Result<CompileReport> {
    cfg.validate()?;
    let steps = cfg.resolved_n_t();
    let tf = cfg.resolved_t_final()?;
    let schedule = build_schedule(&cfg.params, tf, steps)?;
    let sequence = compile_schedule(&schedule)?;
    let counts = count_gates(&sequence, steps);
    let budget = error_budget(&counts.per_trotter_step, cfg.e1, cfg.e2, steps)?;
    Ok(CompileReport { steps, t_final: tf, counts, budget, sequence: Some(sequence) })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::pauli::{PauliString, PauliSum};
    use crate::state::{basis_state, expectation};

    fn reference() -> StateVector {
        basis_state("ddUU").unwrap()
    }

    #[test]
    fn correlation_matches_expectation_values() {
        let psi =
            StateVector::normalized((0..16).map(|k| Complex64::new((k % 5) as f64 - 1.5, 0.3 * k as f64)).collect())
                .unwrap();
        let one = Complex64::new(1.0, 0.0);
        let e = |s: &str| expectation(&psi, &PauliSum::from(PauliString::parse(one, s).unwrap())).unwrap();
        let want = e("ZZII") - e("ZIII") * e("IZII");
        assert!((correlation_12(&psi) - want).abs() < 1e-14);
        assert_eq!(correlation_12(&reference()), 0.0);
    }

    #[test]
    fn degenerate_coupling_has_zero_amplitude() {
        let d = Dynamics::new(&ModelParams::new(1.0, 0.3, -0.3), &reference()).unwrap();
        assert_eq!(correlation_amplitude(&d, Evolution::Exact).unwrap(), 0.0);
    }

    #[test]
    fn refine_finds_smooth_peak() {
        let (t, v) = refine_extremum(|t| Ok(-(t - 0.3137).powi(2)), 1.0, 11, true).unwrap();
        assert!((t - 0.3137).abs() < 1e-7);
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn sweep_grid_values() {
        let v = SweepGrid::default().values().unwrap();
        assert_eq!(v.len(), 101);
        assert_eq!(v[50], 0.5);
        assert_eq!(v[100], 1.0);
        assert!(SweepGrid { start: 0.0, stop: 1.0, points: 0 }.values().is_err());
    }

    #[test]
    fn time_scale_conversion() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::FidelityVsSteps);
        assert_eq!(cfg.resolved_t_final().unwrap(), 1.0);
        cfg.time_scale = TimeScale::Physical;
        assert_eq!(cfg.resolved_t_final().unwrap(), 2.0);
        cfg.time_scale = TimeScale::Coupling;
        cfg.params = ModelParams::new(1.0, 0.5, -0.5);
        assert!(matches!(cfg.resolved_t_final(), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Survival);
        assert!(cfg.validate().is_ok());
        cfg.samples = 1;
        assert!(cfg.validate().is_err());
        cfg.samples = 10;
        cfg.initial_state = "ddU".into();
        assert!(cfg.validate().is_err());
        cfg.initial_state = "ddUU".into();
        cfg.t_final = Some(-1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn defaults_per_experiment() {
        let c = ExperimentConfig::new(ExperimentKind::Correlation);
        assert_eq!(c.resolved_stepping(), Stepping::PerUnitTime(5));
        assert!(c.resolved_trotter());
        let f = ExperimentConfig::new(ExperimentKind::FidelityVsTime);
        assert_eq!(f.resolved_stepping(), Stepping::Total(10));
        assert!(!ExperimentConfig::new(ExperimentKind::PhaseSweep).resolved_trotter());
    }
}
