//! Dense state vectors, Pauli-string application and exact evolution.
//!
//! Basis index bit `n - q` holds qubit `q`; a set bit means `↓`. So
//! `|↓↓↑↑>` is index `0b1100 = 12` and `|↑>` on one qubit is `(1, 0)`.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum, MAX_DENSE_QUBITS};

/// Drift allowed on the norm of a state after any operation.
pub const NORM_TOLERANCE: f64 = 1e-10;

const UNIT_COEFF_TOLERANCE: f64 = 1e-12;

/// Qubits the state-vector engine will allocate for.
pub const MAX_STATE_QUBITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl TryFrom<char> for Spin {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'u' | 'U' | '↑' | '0' => Ok(Spin::Up),
            'd' | 'D' | '↓' | '1' => Ok(Spin::Down),
            _ => Err(Error::InvalidSpinLabel(c)),
        }
    }
}

/// Parses a spin pattern such as `"ddUU"` or `"↓↓↑↑"`.
pub fn parse_spins(pattern: &str) -> Result<Vec<Spin>> {
    pattern.chars().filter(|c| !c.is_whitespace()).map(Spin::try_from).collect()
}

/// Formats spins with arrows.
pub fn format_spins(spins: &[Spin]) -> String {
    spins.iter().map(|s| if *s == Spin::Up { '↑' } else { '↓' }).collect()
}

/// Basis index of a spin pattern (qubit 1 most significant, `↓` = bit 1).
pub fn basis_index(spins: &[Spin]) -> usize {
    spins.iter().fold(0usize, |acc, s| (acc << 1) | usize::from(*s == Spin::Down))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::Capacity { n, max: MAX_STATE_QUBITS });
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_spins(spins: &[Spin]) -> Result<Self> {
        Self::basis(spins.len(), basis_index(spins))
    }

    /// Takes ownership of raw amplitudes; the vector must already be normalised.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("length {dim} is not a power of two ≥ 2")));
        }
        let n = dim.trailing_zeros() as usize;
        let s = Self { n, amps };
        if (s.norm() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("state norm {} is not 1", s.norm())));
        }
        Ok(s)
    }

    /// Normalises `amps` before wrapping them.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalise a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    fn check_op(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::QubitMismatch { left: self.n, right: n });
        }
        Ok(())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn apply_global_phase(&mut self, phi: f64) {
        let f = Complex64::from_polar(1.0, phi);
        self.amps.iter_mut().for_each(|a| *a *= f);
    }

    /// `|ψ> ← P|ψ>` including the string's coefficient.
    pub fn apply_pauli_string(&mut self, p: &PauliString) -> Result<()> {
        self.check_op(p.num_qubits())?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (k, &a) in self.amps.iter().enumerate() {
            let (amp, k2) = p.apply_to_index(k);
            out[k2] = amp * a;
        }
        self.amps = out;
        Ok(())
    }

    /// `|ψ> ← exp(−iθP)|ψ> = cos θ |ψ> − i sin θ P|ψ>`.
    ///
    /// `P` must carry a coefficient of `±1`; a `-1` is folded into `θ`.
    pub fn apply_pauli_exponential(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        self.check_op(p.num_qubits())?;
        let c = p.coefficient();
        if c.im.abs() > UNIT_COEFF_TOLERANCE || (c.re.abs() - 1.0).abs() > UNIT_COEFF_TOLERANCE {
            return Err(Error::NonUnitCoefficient(c));
        }
        let theta = theta * c.re.signum();
        let unit = p.with_coefficient(Complex64::new(1.0, 0.0));
        let (cos, sin) = (theta.cos(), theta.sin());
        let minus_i_sin = Complex64::new(0.0, -sin);
        let mut out: Vec<Complex64> = self.amps.iter().map(|a| a * cos).collect();
        for (k, &a) in self.amps.iter().enumerate() {
            let (amp, k2) = unit.apply_to_index(k);
            out[k2] += minus_i_sin * amp * a;
        }
        self.amps = out;
        Ok(())
    }

    /// `ψ_k ← e^{−i E_k t} ψ_k` for a diagonal generator with entries `energies`.
    pub fn apply_diagonal_evolution(&mut self, energies: &[f64], t: f64) -> Result<()> {
        if energies.len() != self.amps.len() {
            return Err(Error::InvalidArgument(format!(
                "diagonal of length {} for a state of dimension {}",
                energies.len(),
                self.amps.len()
            )));
        }
        for (a, e) in self.amps.iter_mut().zip(energies) {
            *a *= Complex64::from_polar(1.0, -e * t);
        }
        Ok(())
    }

    /// Applies a dense unitary (or any square matrix) of matching dimension.
    pub fn apply_matrix(&mut self, m: &DMatrix<Complex64>) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::InvalidArgument("matrix dimension does not match state".into()));
        }
        let v = m * DVector::from_column_slice(&self.amps);
        self.amps = v.iter().copied().collect();
        Ok(())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let spins: String = (0..self.n).map(|b| if (k >> (self.n - 1 - b)) & 1 == 1 { '↓' } else { '↑' }).collect();
            write!(f, "({:.6}{:+.6}i)|{spins}>", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Basis state from a spin pattern such as `"ddUU"`.
pub fn basis_state(pattern: &str) -> Result<StateVector> {
    StateVector::from_spins(&parse_spins(pattern)?)
}

/// Pure form of [`StateVector::apply_pauli_exponential`].
pub fn apply_pauli_exponential(psi: &StateVector, p: &PauliString, theta: f64) -> Result<StateVector> {
    let mut out = psi.clone();
    out.apply_pauli_exponential(p, theta)?;
    Ok(out)
}

/// `<ψ|O|ψ>` for Hermitian `O`.
pub fn expectation(psi: &StateVector, op: &PauliSum) -> Result<f64> {
    psi.check_op(op.num_qubits())?;
    if !op.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let mut acc = Complex64::default();
    for t in op.terms() {
        for (k, &a) in psi.amps.iter().enumerate() {
            let (amp, k2) = t.apply_to_index(k);
            acc += psi.amps[k2].conj() * amp * a;
        }
    }
    Ok(acc.re)
}

/// `|<ψ|φ>|²`
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr().min(1.0))
}

/// Probability weight outside the given basis indices.
pub fn population_outside(psi: &StateVector, indices: &[usize]) -> f64 {
    let inside: f64 = indices.iter().map(|&k| psi.probability(k)).sum();
    (psi.norm().powi(2) - inside).max(0.0)
}

/// Spectral propagator `exp(−iHt)` from a Hermitian eigendecomposition,
/// reusable across many times.
#[derive(Debug, Clone)]
pub struct Propagator {
    n: usize,
    energies: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(h: &PauliSum) -> Result<Self> {
        if h.num_qubits() > MAX_DENSE_QUBITS {
            return Err(Error::Capacity { n: h.num_qubits(), max: MAX_DENSE_QUBITS });
        }
        if !h.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        let eig = SymmetricEigen::new(h.to_matrix()?);
        Ok(Self { n: h.num_qubits(), energies: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `exp(−iHt)|ψ>`
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        psi.check_op(self.n)?;
        let v = DVector::from_column_slice(&psi.amps);
        let mut coeffs = self.vectors.ad_mul(&v);
        for (c, e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * coeffs;
        Ok(StateVector { n: self.n, amps: out.iter().copied().collect() })
    }

    /// Dense `exp(−iHt)`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let phases = DVector::from_iterator(
            self.energies.len(),
            self.energies.iter().map(|e| Complex64::from_polar(1.0, -e * t)),
        );
        let scaled =
            DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| self.vectors[(r, c)] * phases[c]);
        scaled * self.vectors.adjoint()
    }
}

/// `exp(−iHt)|ψ0>` via dense Hermitian eigendecomposition.
pub fn exact_evolve(psi0: &StateVector, h: &PauliSum, t: f64) -> Result<StateVector> {
    Propagator::new(h)?.evolve(psi0, t)
}

/// Real samples of an observable on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(format!("{} times but {} values", times.len(), values.len())));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }

    pub fn min(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::min)
    }

    /// Largest pointwise `|a − b|` against a series on the same grid.
    pub fn max_abs_deviation(&self, other: &Self) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::InvalidArgument("series are sampled on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// `samples` evenly spaced points on `[0, t_final]`.
pub fn time_grid(t_final: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    if t_final <= 0.0 || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!("final time must be positive, got {t_final}")));
    }
    let dt = t_final / (samples - 1) as f64;
    Ok((0..samples).map(|i| i as f64 * dt).collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::model::{build_split_j1, ModelParams};

    fn ps(letters: &str) -> PauliString {
        PauliString::parse(Complex64::new(1.0, 0.0), letters).unwrap()
    }

    #[test]
    fn single_up_is_index_zero() {
        let up = basis_state("u").unwrap();
        assert_eq!(up.amplitudes(), &[Complex64::new(1.0, 0.0), Complex64::default()]);
        let down = basis_state("↓").unwrap();
        assert_eq!(down.probability(1), 1.0);
    }

    #[test]
    fn reference_state_layout() {
        let s = basis_state("ddUU").unwrap();
        assert_eq!(s, basis_state("↓↓↑↑").unwrap());
        assert_eq!(s.probability(0b1100), 1.0);
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.to_string(), "(1.000000+0.000000i)|↓↓↑↑>");
    }

    #[test]
    fn bad_label_rejected() {
        assert_eq!(basis_state("dx"), Err(Error::InvalidSpinLabel('x')));
    }

    #[test]
    fn z_on_reference_state() {
        let s = basis_state("ddUU").unwrap();
        let z1: PauliSum = ps("ZIII").into();
        assert_eq!(expectation(&s, &z1).unwrap(), -1.0);
        assert_eq!(expectation(&s, &ps("ZZII").into()).unwrap(), 1.0);
        assert_eq!(expectation(&s, &ps("XIII").into()).unwrap(), 0.0);
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let s = basis_state("u").unwrap();
        let op: PauliSum = PauliString::parse(Complex64::new(0.0, 1.0), "Z").unwrap().into();
        assert_eq!(expectation(&s, &op), Err(Error::NotHermitian));
    }

    #[test]
    fn energy_of_reference_state() {
        let split = build_split_j1(&ModelParams::new(1.0, 1.0, 1.0)).unwrap();
        let s = basis_state("ddUU").unwrap();
        let e = expectation(&s, &split.total().unwrap()).unwrap();
        assert!((e + 1.5).abs() < 1e-12);
        let m = split.total().unwrap().to_matrix().unwrap();
        assert!((m[(12, 12)].re + 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_angle_exponential_is_identity() {
        let s = basis_state("ddUU").unwrap();
        assert_eq!(apply_pauli_exponential(&s, &ps("XYZX"), 0.0).unwrap(), s);
    }

    #[test]
    fn z_exponential_on_up_is_phase() {
        let theta = 0.37;
        let out = apply_pauli_exponential(&basis_state("u").unwrap(), &ps("Z"), theta).unwrap();
        let expected = Complex64::from_polar(1.0, -theta);
        assert!((out.amplitudes()[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn xxxx_quarter_turn_flips_all() {
        let out = apply_pauli_exponential(&basis_state("ddUU").unwrap(), &ps("XXXX"), FRAC_PI_2).unwrap();
        let target = basis_state("UUdd").unwrap();
        let overlap = target.inner(&out).unwrap();
        assert!((overlap - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn negative_coefficient_folds_into_angle() {
        let s = basis_state("ud").unwrap();
        let neg = PauliString::parse(Complex64::new(-1.0, 0.0), "XY").unwrap();
        let a = apply_pauli_exponential(&s, &neg, 0.3).unwrap();
        let b = apply_pauli_exponential(&s, &ps("XY"), -0.3).unwrap();
        assert_eq!(a, b);
        let bad = PauliString::parse(Complex64::new(0.5, 0.0), "XY").unwrap();
        assert!(matches!(apply_pauli_exponential(&s, &bad, 0.3), Err(Error::NonUnitCoefficient(_))));
    }

    #[test]
    fn exponential_matches_dense_matrix() {
        let mut s =
            StateVector::normalized((0..8).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect()).unwrap();
        let p = ps("YXZ");
        let theta: f64 = 0.81;
        let m = PauliSum::from(p.clone()).to_matrix().unwrap();
        let u = DMatrix::<Complex64>::identity(8, 8) * Complex64::new(theta.cos(), 0.0)
            - m * Complex64::new(0.0, theta.sin());
        let mut dense = s.clone();
        dense.apply_matrix(&u).unwrap();
        s.apply_pauli_exponential(&p, theta).unwrap();
        assert!(fidelity(&s, &dense).unwrap() > 1.0 - 1e-14);
        assert!(s.amplitudes().iter().zip(dense.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn fidelity_basics() {
        let a = basis_state("ud").unwrap();
        let b = basis_state("du").unwrap();
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let psi = StateVector::normalized(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.0, 0.4),
            Complex64::new(0.7, 0.0),
        ])
        .unwrap();
        let mut rotated = psi.clone();
        rotated.apply_global_phase(1.234);
        assert!((fidelity(&psi, &rotated).unwrap() - 1.0).abs() < 1e-14);
        assert!((fidelity(&a, &psi).unwrap() - fidelity(&psi, &a).unwrap()).abs() < 1e-15);
        assert!(matches!(fidelity(&a, &basis_state("u").unwrap()), Err(Error::QubitMismatch { .. })));
    }

    #[test]
    fn exact_evolve_at_zero_time() {
        let split = build_split_j1(&ModelParams::new(1.0, 1.0, 1.0)).unwrap();
        let s = basis_state("ddUU").unwrap();
        let out = exact_evolve(&s, &split.total().unwrap(), 0.0).unwrap();
        assert!(fidelity(&s, &out).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn diagonal_hamiltonian_keeps_basis_state() {
        let split = build_split_j1(&ModelParams::new(1.0, 0.6, -0.6)).unwrap();
        let s = basis_state("ddUU").unwrap();
        for t in [0.5, 3.0, 17.0] {
            let out = exact_evolve(&s, &split.total().unwrap(), t).unwrap();
            assert!((fidelity(&s, &out).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_evolve_rejects_non_hermitian() {
        let h: PauliSum = PauliString::parse(Complex64::new(0.0, 1.0), "XZ").unwrap().into();
        assert_eq!(exact_evolve(&basis_state("ud").unwrap(), &h, 1.0).unwrap_err(), Error::NotHermitian);
    }

    #[test]
    fn exact_evolve_capacity_guard() {
        let h = PauliSum::identity(13).unwrap();
        assert!(matches!(Propagator::new(&h), Err(Error::Capacity { .. })));
    }

    #[test]
    fn propagator_unitary_matches_evolve() {
        let split = build_split_j1(&ModelParams::new(1.0, 0.3, 0.9)).unwrap();
        let prop = Propagator::new(&split.total().unwrap()).unwrap();
        let s = basis_state("dudU").unwrap();
        let mut via_matrix = s.clone();
        via_matrix.apply_matrix(&prop.unitary(1.7)).unwrap();
        assert!(fidelity(&via_matrix, &prop.evolve(&s, 1.7).unwrap()).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn time_series_validation() {
        assert!(TimeSeries::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(TimeSeries::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        let ts = TimeSeries::new(vec![0.0, 1.0, 2.0], vec![0.5, -1.0, 2.0]).unwrap();
        assert_eq!(ts.max(), Some(2.0));
        assert_eq!(ts.min(), Some(-1.0));
        assert!(time_grid(1.0, 1).is_err());
        assert!(time_grid(0.0, 10).is_err());
        assert_eq!(time_grid(2.0, 3).unwrap(), vec![0.0, 1.0, 2.0]);
    }
}
