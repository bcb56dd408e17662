//! The Agassi Hamiltonian.
//!
//! Two independent constructions are provided. [`build_hamiltonian`] works
//! for any `j` by summing Jordan-Wigner images of the fermionic collective
//! operators. [`build_split_j1`] writes down the four-qubit (`j = 1`) form
//! directly as `H1 + H2 + H3` in Pauli strings. The two agree up to the
//! constant `-g/2` that the pairing term contributes for `j = 1`, which
//! the split form leaves out (see [`SplitHamiltonian::offset`]).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{jw_map, FermionWord, Pauli, PauliString, PauliSum};

/// Parameters `(ε, g, V, j)`. The qubit count is `4j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub epsilon: f64,
    pub g: f64,
    pub v: f64,
    pub j: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { epsilon: 1.0, g: 0.0, v: 0.0, j: 1 }
    }
}

impl ModelParams {
    /// `j = 1` parameters.
    pub fn new(epsilon: f64, g: f64, v: f64) -> Self {
        Self { epsilon, g, v, j: 1 }
    }

    pub fn with_j(self, j: usize) -> Self {
        Self { j, ..self }
    }

    pub fn num_qubits(&self) -> usize {
        4 * self.j
    }

    /// The single control parameter `g + V` of the four-body term.
    pub fn coupling(&self) -> f64 {
        self.g + self.v
    }

    pub fn validate(&self) -> Result<()> {
        if self.j == 0 {
            return Err(Error::InvalidParams("j must be at least 1".into()));
        }
        if 4 * self.j > crate::pauli::MAX_QUBITS {
            return Err(Error::Capacity { n: 4 * self.j, max: crate::pauli::MAX_QUBITS });
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParams(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !self.g.is_finite() || !self.v.is_finite() {
            return Err(Error::InvalidParams("g and V must be finite".into()));
        }
        Ok(())
    }

    fn require_j1(&self) -> Result<()> {
        self.validate()?;
        if self.j != 1 {
            return Err(Error::Unsupported(format!("closed split form exists only for j = 1, got j = {}", self.j)));
        }
        Ok(())
    }
}

/// Level label `σ = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Upper,
    Lower,
}

/// Qubit (mode) index of the single-particle state `(σ, m)`.
///
/// The upper level occupies modes `1..=2j`, the lower level `2j+1..=4j`.
/// Within a level the order is `m = 1, -1, 2, -2, …`, so each time-reversed
/// pair sits on adjacent qubits. For `j = 1` this gives
/// `(+,1)→1, (+,-1)→2, (-,1)→3, (-,-1)→4`.
pub fn mode_index(j: usize, level: Level, m: i64) -> Result<usize> {
    let am = m.unsigned_abs() as usize;
    if m == 0 || am > j {
        return Err(Error::InvalidParams(format!("magnetic quantum number {m} outside ±1..=±{j}")));
    }
    let base = match level {
        Level::Upper => 0,
        Level::Lower => 2 * j,
    };
    Ok(base + 2 * (am - 1) + usize::from(m < 0) + 1)
}

/// Collective quasi-spin, pairing and number operators as qubit operators.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveOps {
    pub j_plus: PauliSum,
    pub j_zero: PauliSum,
    pub j_minus: PauliSum,
    /// `A†₁`, pairs in the upper level.
    pub a1_dag: PauliSum,
    pub a1: PauliSum,
    /// `A†₋₁`, pairs in the lower level.
    pub am1_dag: PauliSum,
    pub am1: PauliSum,
    pub number: PauliSum,
}

fn sum_words<I>(words: I, n: usize) -> Result<PauliSum>
where
    I: IntoIterator<Item = FermionWord>,
{
    let mut acc = PauliSum::zero(n)?;
    for w in words {
        acc = acc.add(&jw_map(&w, n)?)?;
    }
    Ok(acc)
}

pub fn build_collective_ops(j: usize) -> Result<CollectiveOps> {
    ModelParams::default().with_j(j).validate()?;
    let n = 4 * j;
    let ms: Vec<i64> = (1..=j as i64).flat_map(|m| [m, -m]).collect();

    let mut raise = Vec::new();
    for &m in &ms {
        let up = mode_index(j, Level::Upper, m)?;
        let down = mode_index(j, Level::Lower, m)?;
        raise.push(FermionWord::create(up).then_annihilate(down));
    }
    let j_plus = sum_words(raise, n)?;
    let j_minus = j_plus.adjoint();

    let number_of = |level: Level| -> Result<PauliSum> {
        let words = ms
            .iter()
            .map(|&m| mode_index(j, level, m).map(|k| FermionWord::create(k).then_annihilate(k)))
            .collect::<Result<Vec<_>>>()?;
        sum_words(words, n)
    };
    let n_up = number_of(Level::Upper)?;
    let n_down = number_of(Level::Lower)?;
    let j_zero = n_up.sub(&n_down)?.scale_real(0.5);
    let number = n_up.add(&n_down)?;

    let pair_dag = |level: Level| -> Result<PauliSum> {
        let words = (1..=j as i64)
            .map(|m| -> Result<FermionWord> {
                Ok(FermionWord::create(mode_index(j, level, m)?).then_create(mode_index(j, level, -m)?))
            })
            .collect::<Result<Vec<_>>>()?;
        sum_words(words, n)
    };
    let a1_dag = pair_dag(Level::Upper)?;
    let am1_dag = pair_dag(Level::Lower)?;

    Ok(CollectiveOps { a1: a1_dag.adjoint(), am1: am1_dag.adjoint(), j_plus, j_zero, j_minus, a1_dag, am1_dag, number })
}

/// `H = ε J⁰ − g Σ_{σσ'} A†_σ A_σ' − (V/2)(J₊² + J₋²)` on `4j` qubits.
pub fn build_hamiltonian(p: &ModelParams) -> Result<PauliSum> {
    p.validate()?;
    let ops = build_collective_ops(p.j)?;
    let a_dag = ops.a1_dag.add(&ops.am1_dag)?;
    let a = ops.a1.add(&ops.am1)?;
    let pairing = a_dag.mul(&a)?;
    let monopole = ops.j_plus.mul(&ops.j_plus)?.add(&ops.j_minus.mul(&ops.j_minus)?)?;
    ops.j_zero.scale_real(p.epsilon).sub(&pairing.scale_real(p.g))?.sub(&monopole.scale_real(p.v / 2.0))
}

/// The eight four-body strings of the interaction term with their signs,
/// in the fixed listing order used by the Trotter layer and the compiler.
pub const INTERACTION_STRINGS: [(&str, f64); 8] = [
    ("XXXX", 1.0),
    ("XYXY", 1.0),
    ("XYYX", 1.0),
    ("YXXY", 1.0),
    ("YXYX", 1.0),
    ("YYYY", 1.0),
    ("YYXX", -1.0),
    ("XXYY", -1.0),
];

/// `H3 = Σ_k c_k P_k` with `c_k = −s_k (g+V)/8`, in listing order.
pub fn interaction_terms(p: &ModelParams) -> Result<Vec<PauliString>> {
    p.require_j1()?;
    let scale = -p.coupling() / 8.0;
    INTERACTION_STRINGS
        .iter()
        .map(|&(letters, sign)| PauliString::parse(Complex64::new(sign * scale, 0.0), letters))
        .collect()
}

/// `H = h1 + h2 + h3 + offset·I` for `j = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitHamiltonian {
    /// `((ε−g)/4)(Z₁+Z₂) − ((ε+g)/4)(Z₃+Z₄)`
    pub h1: PauliSum,
    /// `−(g/4)(Z₁Z₂ + Z₃Z₄)`
    pub h2: PauliSum,
    /// `−(g+V)(σ₁⁺σ₂⁺σ₃⁻σ₄⁻ + h.c.)` expanded into eight strings.
    pub h3: PauliSum,
    /// Identity coefficient `−g/2` dropped from the split form.
    pub offset: f64,
}

impl SplitHamiltonian {
    pub fn diagonal_block(&self) -> Result<PauliSum> {
        self.h1.add(&self.h2)
    }

    pub fn total(&self) -> Result<PauliSum> {
        self.h1.add(&self.h2)?.add(&self.h3)
    }

    /// `h1 + h2 + h3 + offset·I`, equal to [`build_hamiltonian`].
    pub fn total_with_offset(&self) -> Result<PauliSum> {
        self.total()?.add(&PauliSum::identity(4)?.scale_real(self.offset))
    }
}

pub fn build_split_j1(p: &ModelParams) -> Result<SplitHamiltonian> {
    p.require_j1()?;
    let z = |q: usize| -> Result<PauliSum> { Ok(PauliString::single(4, q, Pauli::Z)?.into()) };
    let zz = |letters: &str| -> Result<PauliSum> { Ok(PauliString::parse(Complex64::new(1.0, 0.0), letters)?.into()) };

    let upper = z(1)?.add(&z(2)?)?;
    let lower = z(3)?.add(&z(4)?)?;
    let h1 = upper.scale_real((p.epsilon - p.g) / 4.0).sub(&lower.scale_real((p.epsilon + p.g) / 4.0))?;
    let h2 = zz("ZZII")?.add(&zz("IIZZ")?)?.scale_real(-p.g / 4.0);
    let h3 = PauliSum::from_terms(4, interaction_terms(p)?)?;
    Ok(SplitHamiltonian { h1, h2, h3, offset: -p.g / 2.0 })
}

/// Ground-state phase for `j = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "SP")]
    Symmetric,
    #[serde(rename = "BSP")]
    BrokenSymmetry,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Symmetric => "SP",
            Phase::BrokenSymmetry => "BSP",
        })
    }
}

/// `SP` when `(g+V)/ε < 1`, `BSP` otherwise (the critical line is `BSP`).
pub fn critical_line(p: &ModelParams) -> Result<Phase> {
    p.require_j1()?;
    Ok(if p.coupling() / p.epsilon < 1.0 { Phase::Symmetric } else { Phase::BrokenSymmetry })
}
