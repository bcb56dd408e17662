//! Compilation of Trotter schedules to trapped-ion native gates.
//!
//! Gate conventions (angles in radians, qubits numbered from 1):
//!
//! * `R a θ q` is `exp(−iθ/2 σ_a)` on qubit `q`.
//! * `MS θ a S` is `exp(−iθ/4 (Σ_{q∈S} σ_a^q)²)`.
//! * `PHASE φ` multiplies the state by `e^{iφ}`.
//!
//! A four-body block `MS(π/2) · Rz(α)₁ · MS(−π/2)` on all four ions equals
//! `exp(iα/2 Y₁X₂X₃X₄)`. Other X/Y strings are reached by `Rz(±π/2)`
//! basis changes: on qubits 2–4 for each `Y`, on qubit 1 when the string
//! has an `X` there.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::build_split_j1;
use crate::pauli::{Pauli, PauliString};
use crate::state::StateVector;
use crate::trotter::TrotterSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(format!("unknown axis {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NativeGate {
    Rotation { axis: Axis, angle: f64, qubit: usize },
    Ms { angle: f64, axis: Axis, qubits: Vec<usize> },
    GlobalPhase { angle: f64 },
}

impl NativeGate {
    pub fn rz(angle: f64, qubit: usize) -> Self {
        NativeGate::Rotation { axis: Axis::Z, angle, qubit }
    }

    pub fn ry(angle: f64, qubit: usize) -> Self {
        NativeGate::Rotation { axis: Axis::Y, angle, qubit }
    }

    pub fn ms_x(angle: f64, qubits: &[usize]) -> Self {
        NativeGate::Ms { angle, axis: Axis::X, qubits: qubits.to_vec() }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let check = |q: usize| {
            if q == 0 || q > n {
                Err(Error::QubitOutOfRange { qubit: q, n })
            } else {
                Ok(())
            }
        };
        match self {
            NativeGate::Rotation { qubit, .. } => check(*qubit),
            NativeGate::Ms { qubits, .. } => {
                if qubits.len() < 2 {
                    return Err(Error::InvalidArgument("MS gate needs at least two qubits".into()));
                }
                for (i, &q) in qubits.iter().enumerate() {
                    check(q)?;
                    if qubits[..i].contains(&q) {
                        return Err(Error::InvalidArgument(format!("qubit {q} repeated in MS gate")));
                    }
                }
                Ok(())
            }
            NativeGate::GlobalPhase { .. } => Ok(()),
        }
    }

    /// Applies the gate's defining unitary in place.
    pub fn apply(&self, psi: &mut StateVector) -> Result<()> {
        let n = psi.num_qubits();
        self.validate(n)?;
        match self {
            NativeGate::Rotation { axis, angle, qubit } => {
                psi.apply_pauli_exponential(&PauliString::single(n, *qubit, axis.pauli())?, angle / 2.0)
            }
            NativeGate::Ms { angle, axis, qubits } => {
                // (Σσ)² = |S|·I + 2 Σ_{i<j} σ_i σ_j, all terms commuting
                psi.apply_global_phase(-angle * qubits.len() as f64 / 4.0);
                let mut letters = vec![Pauli::I; n];
                for (i, &a) in qubits.iter().enumerate() {
                    for &b in &qubits[i + 1..] {
                        letters[a - 1] = axis.pauli();
                        letters[b - 1] = axis.pauli();
                        let pair = PauliString::new(Complex64::new(1.0, 0.0), &letters)?;
                        psi.apply_pauli_exponential(&pair, angle / 2.0)?;
                        letters[a - 1] = Pauli::I;
                        letters[b - 1] = Pauli::I;
                    }
                }
                Ok(())
            }
            NativeGate::GlobalPhase { angle } => {
                psi.apply_global_phase(*angle);
                Ok(())
            }
        }
    }
}

impl fmt::Display for NativeGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NativeGate::Rotation { axis, angle, qubit } => write!(f, "R {axis} {angle:?} {qubit}"),
            NativeGate::Ms { angle, axis, qubits } => {
                let qs: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
                write!(f, "MS {angle:?} {axis} {}", qs.join(","))
            }
            NativeGate::GlobalPhase { angle } => write!(f, "PHASE {angle:?}"),
        }
    }
}

fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("invalid angle {s:?}"))?;
    if a.is_finite() {
        Ok(a)
    } else {
        Err(format!("angle {s:?} is not finite"))
    }
}

fn parse_qubit(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("invalid qubit index {s:?}"))
}

impl FromStr for NativeGate {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["R", axis, angle, qubit] => {
                Ok(NativeGate::Rotation { axis: axis.parse()?, angle: parse_angle(angle)?, qubit: parse_qubit(qubit)? })
            }
            ["MS", angle, axis, qubits] => Ok(NativeGate::Ms {
                angle: parse_angle(angle)?,
                axis: axis.parse()?,
                qubits: qubits.split(',').map(parse_qubit).collect::<std::result::Result<_, _>>()?,
            }),
            ["PHASE", angle] => Ok(NativeGate::GlobalPhase { angle: parse_angle(angle)? }),
            _ => Err(format!("unrecognised gate {line:?}")),
        }
    }
}

/// A gate list on `n` qubits, in time order.
///
/// The text form is one gate per line, preceded by a `# qubits n` header.
/// Blank lines and other `#` lines are ignored when parsing; without a
/// header the qubit count is the largest index used.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSequence {
    n: usize,
    gates: Vec<NativeGate>,
}

impl GateSequence {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<NativeGate>) -> Result<Self> {
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Self { n, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[NativeGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: NativeGate) -> Result<()> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &GateSequence) -> Result<()> {
        if other.n != self.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Parses the text form; errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(count) = comment.trim().strip_prefix("qubits") {
                    let count = count
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad qubit count in {line:?}") })?;
                    n = Some(count);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let gate: NativeGate = line.parse().map_err(|msg| Error::Parse { line: i + 1, msg })?;
            gates.push((i + 1, gate));
        }
        let max_used = gates
            .iter()
            .flat_map(|(_, g)| match g {
                NativeGate::Rotation { qubit, .. } => vec![*qubit],
                NativeGate::Ms { qubits, .. } => qubits.clone(),
                NativeGate::GlobalPhase { .. } => vec![],
            })
            .max()
            .unwrap_or(0);
        let n = n.unwrap_or(max_used);
        let mut seq = GateSequence::new(n);
        for (line, g) in gates {
            seq.push(g).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        }
        Ok(seq)
    }
}

impl fmt::Display for GateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# qubits {}", self.n)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for GateSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateSequence::parse(s)
    }
}

/// Runs every gate of `seq` on a copy of `psi`.
pub fn simulate_sequence(psi: &StateVector, seq: &GateSequence) -> Result<StateVector> {
    if psi.num_qubits() != seq.n {
        return Err(Error::QubitMismatch { left: psi.num_qubits(), right: seq.n });
    }
    let mut out = psi.clone();
    for g in &seq.gates {
        g.apply(&mut out)?;
    }
    Ok(out)
}

/// Gates for `exp(−iφ Z_a Z_b)`: a two-ion MS in the x basis between
/// `Ry(±π/2)` basis changes, plus the MS global phase.
pub fn compile_zz(a: usize, b: usize, phi: f64) -> Vec<NativeGate> {
    vec![
        NativeGate::ry(FRAC_PI_2, a),
        NativeGate::ry(FRAC_PI_2, b),
        NativeGate::ms_x(2.0 * phi, &[a, b]),
        NativeGate::ry(-FRAC_PI_2, a),
        NativeGate::ry(-FRAC_PI_2, b),
        NativeGate::GlobalPhase { angle: phi },
    ]
}

/// Gates for `exp(−iφ P)` with `P` a four-qubit string of X and Y letters
/// (unit coefficient, sign folded into `φ`).
pub fn compile_four_body(p: &PauliString, phi: f64) -> Result<Vec<NativeGate>> {
    let c = p.coefficient();
    if c.im != 0.0 || c.re.abs() != 1.0 {
        return Err(Error::NonUnitCoefficient(c));
    }
    let phi = phi * c.re;
    if p.num_qubits() != 4 || p.weight() != 4 {
        return Err(Error::Compile(format!("only weight-4 strings on 4 qubits are supported, got {p}")));
    }
    let letters = p.letters();
    if letters.contains(&Pauli::Z) {
        return Err(Error::Compile(format!("string {p} contains Z")));
    }
    // qubits needing a Rz(π/2)-type basis change, with the sign that maps
    // the native letter (Y on qubit 1, X elsewhere) onto the target letter
    let mut changes: Vec<(usize, f64)> = Vec::new();
    if letters[0] == Pauli::X {
        changes.push((1, -FRAC_PI_2));
    }
    for (i, l) in letters.iter().enumerate().skip(1) {
        if *l == Pauli::Y {
            changes.push((i + 1, FRAC_PI_2));
        }
    }
    let all = [1, 2, 3, 4];
    let mut gates: Vec<NativeGate> = changes.iter().map(|&(q, a)| NativeGate::rz(-a, q)).collect();
    gates.push(NativeGate::ms_x(FRAC_PI_2, &all));
    gates.push(NativeGate::rz(-2.0 * phi, 1));
    gates.push(NativeGate::ms_x(-FRAC_PI_2, &all));
    gates.extend(changes.iter().map(|&(q, a)| NativeGate::rz(a, q)));
    Ok(gates)
}

/// One Trotter step: the interaction layer in listing order, then the
/// diagonal block (four `Rz` for h1, two ZZ gates for h2).
pub fn compile_step(s: &TrotterSchedule) -> Result<GateSequence> {
    let p = s.params();
    let split = build_split_j1(p)?;
    let delta = s.step_duration();
    let mut seq = GateSequence::new(4);

    if p.coupling() != 0.0 {
        for term in s.interaction_layer() {
            for g in compile_four_body(&term.string, term.rate * delta)? {
                seq.push(g)?;
            }
        }
    }

    let one = Complex64::new(1.0, 0.0);
    let diag = s.diagonal_block();
    let mut used = 0;
    for q in 1..=4 {
        let z = PauliString::single(4, q, Pauli::Z)?;
        let c = split.h1.coefficient_of(&z).re;
        used += usize::from(diag.coefficient_of(&z).norm() > 0.0);
        seq.push(NativeGate::rz(2.0 * c * delta, q))?;
    }
    for (a, b, letters) in [(1, 2, "ZZII"), (3, 4, "IIZZ")] {
        let zz = PauliString::parse(one, letters)?;
        let c = split.h2.coefficient_of(&zz).re;
        used += usize::from(diag.coefficient_of(&zz).norm() > 0.0);
        for g in compile_zz(a, b, c * delta) {
            seq.push(g)?;
        }
    }
    if used != diag.len() {
        return Err(Error::Compile(format!("diagonal block has terms beyond single Z and ZZ pairs: {diag}")));
    }
    Ok(seq)
}

/// The whole schedule as `steps` repetitions of [`compile_step`].
pub fn compile_schedule(s: &TrotterSchedule) -> Result<GateSequence> {
    let mut seq = GateSequence::new(4);
    if s.steps() == 0 {
        return Ok(seq);
    }
    let step = compile_step(s)?;
    for _ in 0..s.steps() {
        seq.extend(&step)?;
    }
    Ok(seq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepCounts {
    pub single_qubit: usize,
    pub two_qubit_equivalent: usize,
    pub collective_ms: usize,
}

/// Gate totals under the usual bookkeeping: an MS gate on `k ≥ 3` ions
/// counts as `k − 1` two-qubit gates (three for four ions). Global phases
/// are free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub single_qubit: usize,
    pub two_qubit_equivalent: usize,
    pub collective_ms: usize,
    pub native_two_qubit: usize,
    pub steps: usize,
    pub per_trotter_step: StepCounts,
}

pub fn count_gates(seq: &GateSequence, steps: usize) -> GateCounts {
    let mut c = GateCounts { steps, ..GateCounts::default() };
    for g in seq.gates() {
        match g {
            NativeGate::Rotation { .. } => c.single_qubit += 1,
            NativeGate::Ms { qubits, .. } if qubits.len() == 2 => {
                c.native_two_qubit += 1;
                c.two_qubit_equivalent += 1;
            }
            NativeGate::Ms { qubits, .. } => {
                c.collective_ms += 1;
                c.two_qubit_equivalent += qubits.len() - 1;
            }
            NativeGate::GlobalPhase { .. } => {}
        }
    }
    let per = |total: usize| total.checked_div(steps).unwrap_or(0);
    c.per_trotter_step = StepCounts {
        single_qubit: per(c.single_qubit),
        two_qubit_equivalent: per(c.two_qubit_equivalent),
        collective_ms: per(c.collective_ms),
    };
    c
}

/// Linear gate-error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub e1: f64,
    pub e2: f64,
    pub steps: usize,
    pub total: f64,
    /// `1 − total`, when that is positive.
    pub fidelity: Option<f64>,
}

/// `total = steps × (single·e1 + two_qubit_equivalent·e2)` from per-step counts.
pub fn error_budget(per_step: &StepCounts, e1: f64, e2: f64, steps: usize) -> Result<ErrorBudget> {
    for (name, e) in [("e1", e1), ("e2", e2)] {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::InvalidArgument(format!("{name} = {e} is not a probability")));
        }
    }
    let total = steps as f64 * (per_step.single_qubit as f64 * e1 + per_step.two_qubit_equivalent as f64 * e2);
    Ok(ErrorBudget { e1, e2, steps, total, fidelity: (total < 1.0).then_some(1.0 - total) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::state::{apply_pauli_exponential, basis_state, fidelity};
    use crate::trotter::build_schedule;

    fn ps(letters: &str) -> PauliString {
        PauliString::parse(Complex64::new(1.0, 0.0), letters).unwrap()
    }

    fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() < tol)
    }

    fn probe_state() -> StateVector {
        StateVector::normalized((0..16).map(|k| Complex64::new(1.0 + k as f64, (k * k) as f64 * 0.1 - 2.0)).collect())
            .unwrap()
    }

    #[test]
    fn rotation_convention() {
        let mut psi = basis_state("u").unwrap();
        NativeGate::Rotation { axis: Axis::X, angle: std::f64::consts::PI, qubit: 1 }.apply(&mut psi).unwrap();
        // exp(−iπ/2 X)|↑> = −i|↓>
        assert!((psi.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn two_ion_ms_convention() {
        let theta = 0.7;
        let psi = probe_state();
        let mut a = psi.clone();
        NativeGate::ms_x(theta, &[2, 3]).apply(&mut a).unwrap();
        let mut b = apply_pauli_exponential(&psi, &ps("IXXI"), theta / 2.0).unwrap();
        b.apply_global_phase(-theta / 2.0);
        assert!(close(&a, &b, 1e-14));
    }

    #[test]
    fn zz_gadget_is_exact() {
        let phi = -0.43;
        let psi = probe_state();
        let seq = GateSequence::from_gates(4, compile_zz(3, 4, phi)).unwrap();
        let got = simulate_sequence(&psi, &seq).unwrap();
        let want = apply_pauli_exponential(&psi, &ps("IIZZ"), phi).unwrap();
        assert!(close(&got, &want, 1e-13));
    }

    #[test]
    fn four_body_gadgets_are_exact() {
        let psi = probe_state();
        for (letters, _) in crate::model::INTERACTION_STRINGS {
            for phi in [0.31, -1.2] {
                let seq = GateSequence::from_gates(4, compile_four_body(&ps(letters), phi).unwrap()).unwrap();
                let got = simulate_sequence(&psi, &seq).unwrap();
                let want = apply_pauli_exponential(&psi, &ps(letters), phi).unwrap();
                assert!(close(&got, &want, 1e-13), "{letters} {phi}");
            }
        }
    }

    #[test]
    fn four_body_rejects_unsupported() {
        assert!(matches!(compile_four_body(&ps("XXZX"), 0.1), Err(Error::Compile(_))));
        assert!(matches!(compile_four_body(&ps("XXIX"), 0.1), Err(Error::Compile(_))));
    }

    #[test]
    fn per_step_counts() {
        let s = build_schedule(&ModelParams::new(1.0, 1.0, 1.0), 2.0, 5).unwrap();
        let seq = compile_schedule(&s).unwrap();
        let c = count_gates(&seq, 5);
        assert_eq!(c.per_trotter_step, StepCounts { single_qubit: 52, two_qubit_equivalent: 50, collective_ms: 16 });
        assert_eq!(c.single_qubit, 260);
        assert_eq!(c.native_two_qubit, 10);
    }

    #[test]
    fn counts_without_interaction() {
        let s = build_schedule(&ModelParams::new(1.0, 0.7, -0.7), 1.0, 3).unwrap();
        let c = count_gates(&compile_schedule(&s).unwrap(), 3);
        assert_eq!(c.per_trotter_step, StepCounts { single_qubit: 12, two_qubit_equivalent: 2, collective_ms: 0 });
    }

    #[test]
    fn counts_do_not_depend_on_angles() {
        let a = count_gates(
            &compile_schedule(&build_schedule(&ModelParams::new(1.0, 1.0, 0.0), 1.0, 4).unwrap()).unwrap(),
            4,
        );
        let b = count_gates(
            &compile_schedule(&build_schedule(&ModelParams::new(2.0, 0.0, 0.3), 7.5, 4).unwrap()).unwrap(),
            4,
        );
        assert_eq!(a, b);
    }

    #[test]
    fn compiled_step_matches_trotter_step() {
        let p = ModelParams::new(1.0, 0.8, 0.3);
        let s = build_schedule(&p, 0.9, 1).unwrap();
        let seq = compile_step(&s).unwrap();
        for k in 0..16 {
            let psi = StateVector::basis(4, k).unwrap();
            let want = s.evolve(&psi).unwrap();
            let got = simulate_sequence(&psi, &seq).unwrap();
            assert!(close(&got, &want, 1e-12));
            assert!(fidelity(&got, &want).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn error_budget_examples() {
        let per = StepCounts { single_qubit: 52, two_qubit_equivalent: 50, collective_ms: 16 };
        let b = error_budget(&per, 1e-4, 1e-3, 5).unwrap();
        assert!((b.total - 0.276).abs() < 1e-12);
        assert!((b.fidelity.unwrap() - 0.724).abs() < 1e-12);
        assert!((error_budget(&per, 1e-4, 1e-3, 1).unwrap().total - 0.0552).abs() < 1e-12);
        assert_eq!(error_budget(&per, 0.0, 0.0, 5).unwrap().total, 0.0);
        assert_eq!(error_budget(&per, 0.1, 0.1, 5).unwrap().fidelity, None);
        assert!(error_budget(&per, -0.1, 0.0, 5).is_err());
    }

    #[test]
    fn text_round_trip() {
        let s = build_schedule(&ModelParams::new(1.0, 0.37, 0.91), 1.3, 2).unwrap();
        let seq = compile_schedule(&s).unwrap();
        let text = seq.to_string();
        assert!(text.lines().any(|l| l.starts_with("MS ") && l.ends_with(" x 1,2,3,4")));
        assert!(text.lines().any(|l| l.starts_with("PHASE ")));
        assert_eq!(GateSequence::parse(&text).unwrap(), seq);
    }

    #[test]
    fn parse_errors_report_line() {
        let err = GateSequence::parse("R z 0.1 1\n\nR w 0.1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = GateSequence::parse("# qubits 2\nMS 0.1 x 1,3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(GateSequence::parse("MS 0.1 x 1\n").is_err());
        assert!(GateSequence::parse("PHASE nan\n").is_err());
    }

    #[test]
    fn empty_sequence_is_identity() {
        let psi = probe_state();
        assert_eq!(simulate_sequence(&psi, &GateSequence::new(4)).unwrap(), psi);
        assert_eq!(GateSequence::parse("").unwrap(), GateSequence::new(0));
    }
}
