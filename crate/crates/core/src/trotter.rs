//! First-order Trotterization of the `j = 1` Hamiltonian.
//!
//! One step of length `δ = t / n` applies the interaction layer
//! `Π_k exp(−i c_k δ P_k)` (listing order) and then the diagonal block
//! `exp(−i (h1 + h2) δ)` exactly as per-basis-state phases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_split_j1, ModelParams};
use crate::pauli::{PauliString, PauliSum};
use crate::state::{exact_evolve, fidelity, Propagator, StateVector};

/// One factor `exp(−i rate·δ·P)` of the interaction layer; `string` has unit coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTerm {
    pub string: PauliString,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterSchedule {
    params: ModelParams,
    diagonal_block: PauliSum,
    diagonal_energies: Vec<f64>,
    interaction_layer: Vec<LayerTerm>,
    steps: usize,
    time: f64,
}

impl TrotterSchedule {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn diagonal_block(&self) -> &PauliSum {
        &self.diagonal_block
    }

    pub fn interaction_layer(&self) -> &[LayerTerm] {
        &self.interaction_layer
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn step_duration(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.time / self.steps as f64
        }
    }

    /// Interaction layer followed by the diagonal block, for one step.
    pub fn apply_step(&self, psi: &mut StateVector) -> Result<()> {
        let delta = self.step_duration();
        for term in &self.interaction_layer {
            psi.apply_pauli_exponential(&term.string, term.rate * delta)?;
        }
        psi.apply_diagonal_evolution(&self.diagonal_energies, delta)
    }

    pub fn evolve(&self, psi0: &StateVector) -> Result<StateVector> {
        let mut psi = psi0.clone();
        for _ in 0..self.steps {
            self.apply_step(&mut psi)?;
        }
        Ok(psi)
    }
}

/// Schedule for evolving to time `t` in `steps` equal steps. `steps = 0`
/// is allowed only at `t = 0`.
pub fn build_schedule(p: &ModelParams, t: f64, steps: usize) -> Result<TrotterSchedule> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("evolution time must be ≥ 0, got {t}")));
    }
    if steps == 0 && t > 0.0 {
        return Err(Error::InvalidArgument("at least one Trotter step is needed for t > 0".into()));
    }
    let split = build_split_j1(p)?;
    let diagonal_block = split.diagonal_block()?;
    let diagonal_energies = diagonal_block.diagonal()?;
    let one = Complex64::new(1.0, 0.0);
    let interaction_layer = crate::model::interaction_terms(p)?
        .into_iter()
        .map(|s| LayerTerm { rate: s.coefficient().re, string: s.with_coefficient(one) })
        .collect();
    Ok(TrotterSchedule { params: *p, diagonal_block, diagonal_energies, interaction_layer, steps, time: t })
}

/// `n` first-order Trotter steps from `psi0` up to time `t`.
pub fn trotter_evolve(psi0: &StateVector, p: &ModelParams, t: f64, steps: usize) -> Result<StateVector> {
    build_schedule(p, t, steps)?.evolve(psi0)
}

/// `1 − |<ψ_exact(t)|ψ_trotter(t)>|²`
pub fn digital_error(psi0: &StateVector, p: &ModelParams, t: f64, steps: usize) -> Result<f64> {
    let exact = exact_evolve(psi0, &build_split_j1(p)?.total()?, t)?;
    let trotter = trotter_evolve(psi0, p, t, steps)?;
    Ok(1.0 - fidelity(&exact, &trotter)?)
}

/// Same as [`digital_error`] with a prebuilt exact propagator.
pub fn digital_error_with(prop: &Propagator, psi0: &StateVector, p: &ModelParams, t: f64, steps: usize) -> Result<f64> {
    let exact = prop.evolve(psi0, t)?;
    let trotter = trotter_evolve(psi0, p, t, steps)?;
    Ok(1.0 - fidelity(&exact, &trotter)?)
}

/// How many Trotter steps to spend on evolving to a given time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "n")]
pub enum Stepping {
    /// The same total number of steps at every time.
    Total(usize),
    /// `ceil(rate·t)` steps, i.e. a fixed step density per unit time.
    PerUnitTime(usize),
}

impl Stepping {
    pub fn steps_for(&self, t: f64) -> usize {
        match *self {
            Stepping::Total(n) => {
                if t == 0.0 {
                    0
                } else {
                    n
                }
            }
            Stepping::PerUnitTime(rate) => {
                let x = rate as f64 * t;
                // absorb round-off so that e.g. 5·0.6 is 3 steps, not 4
                (x - 1e-9).ceil().max(0.0) as usize
            }
        }
    }

    pub fn rate(&self) -> usize {
        match *self {
            Stepping::Total(n) | Stepping::PerUnitTime(n) => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rate() == 0 {
            return Err(Error::InvalidArgument("Trotter step count must be positive".into()));
        }
        Ok(())
    }
}
