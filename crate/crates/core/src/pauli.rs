//! Pauli strings, Pauli sums and the Jordan-Wigner map.
//!
//! Conventions used throughout the crate:
//!
//! * Qubits are labelled `1..=n`. Qubit 1 is the leftmost tensor factor and
//!   the most significant bit of a basis index.
//! * The single-qubit basis is the usual computational one, `|0> = ↑` with
//!   `σᶻ = +1` and `|1> = ↓` with `σᶻ = -1`, so `Z = diag(+1, -1)`.
//! * `σ± = (X ± iY) / 2`; `σ⁺` raises `↓ → ↑`.
//!
//! A string is stored in symplectic form: bit `n - q` of `x` (resp. `z`) is
//! set when qubit `q` carries an `X` (resp. `Z`) factor, with `Y = i·X·Z`.
//! The same bit layout is used for basis indices, so applying a string to a
//! basis state is a XOR plus a sign.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped by canonicalisation.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

/// Default tolerance for the Hermiticity predicate.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Upper bound on qubit count for dense matrix construction.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Upper bound on qubit count for the bit-packed representation.
pub const MAX_QUBITS: usize = 64;

const I_POW: [Complex64; 4] =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];

/// `i^k` for any integer `k`.
#[inline]
pub(crate) fn i_pow(k: i64) -> Complex64 {
    I_POW[k.rem_euclid(4) as usize]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::InvalidLetter(c)),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Capacity { n, max: MAX_QUBITS });
    }
    Ok(())
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A weighted tensor product of single-qubit Pauli operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    coeff: Complex64,
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self { coeff: Complex64::new(1.0, 0.0), n, x: 0, z: 0 })
    }

    pub fn new(coeff: Complex64, letters: &[Pauli]) -> Result<Self> {
        let n = letters.len();
        check_qubits(n)?;
        let (mut x, mut z) = (0u64, 0u64);
        for (i, p) in letters.iter().enumerate() {
            let bit = 1u64 << (n - 1 - i);
            let (px, pz) = p.bits();
            if px {
                x |= bit;
            }
            if pz {
                z |= bit;
            }
        }
        Ok(Self { coeff, n, x, z })
    }

    /// Parses a letter sequence such as `"XYIZ"`; qubit 1 is the first letter.
    pub fn parse(coeff: Complex64, letters: &str) -> Result<Self> {
        let letters = letters.chars().map(Pauli::try_from).collect::<Result<Vec<_>>>()?;
        Self::new(coeff, &letters)
    }

    /// A single Pauli letter on `qubit` (1-based), identity elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Result<Self> {
        let mut letters = vec![Pauli::I; n];
        if qubit == 0 || qubit > n {
            return Err(Error::QubitOutOfRange { qubit, n });
        }
        letters[qubit - 1] = p;
        Self::new(Complex64::new(1.0, 0.0), &letters)
    }

    pub(crate) fn from_masks(coeff: Complex64, n: usize, x: u64, z: u64) -> Self {
        debug_assert!(x & !mask(n) == 0 && z & !mask(n) == 0);
        Self { coeff, n, x, z }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coeff
    }

    /// `(x_mask, z_mask)` in basis-index bit layout.
    pub fn masks(&self) -> (u64, u64) {
        (self.x, self.z)
    }

    fn bit(&self, qubit: usize) -> u64 {
        1u64 << (self.n - qubit)
    }

    /// Letter on `qubit` (1-based).
    pub fn letter(&self, qubit: usize) -> Pauli {
        let b = self.bit(qubit);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (1..=self.n).map(|q| self.letter(q)).collect()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// True when the string only contains `I` and `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn with_coefficient(&self, coeff: Complex64) -> Self {
        Self { coeff, ..self.clone() }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.with_coefficient(self.coeff * factor)
    }

    /// Hermitian conjugate: the letters are Hermitian, so only the coefficient changes.
    pub fn adjoint(&self) -> Self {
        self.with_coefficient(self.coeff.conj())
    }

    pub fn same_letters(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Whether the unweighted strings commute (otherwise they anticommute).
    pub fn commutes_with(&self, other: &Self) -> bool {
        let sym = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        sym.is_multiple_of(2)
    }

    /// Sitewise product `self · other` with the accumulated phase.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // P = i^{|x&z|} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{|z1&x2|}.
        let k = (self.x & self.z).count_ones() as i64
            + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x & z).count_ones() as i64;
        Ok(Self { coeff: self.coeff * other.coeff * i_pow(k), n: self.n, x, z })
    }

    /// Action on the basis state `|index>`: returns `(amplitude, image index)`.
    #[inline]
    pub fn apply_to_index(&self, index: usize) -> (Complex64, usize) {
        let k = (self.x & self.z).count_ones() as i64 + 2 * (self.z & index as u64).count_ones() as i64;
        (self.coeff * i_pow(k), index ^ self.x as usize)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+}{:+}i) ", self.coeff.re, self.coeff.im)?;
        for p in self.letters() {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// A linear combination of Pauli strings on a common number of qubits,
/// always held in canonical form: one term per letter sequence, sorted,
/// with negligible coefficients removed.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self { n, terms: Vec::new() })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(PauliString::identity(n)?.into())
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = PauliString>,
    {
        check_qubits(n)?;
        let mut acc: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for t in terms {
            if t.n != n {
                return Err(Error::QubitMismatch { left: n, right: t.n });
            }
            *acc.entry((t.x, t.z)).or_default() += t.coeff;
        }
        Ok(Self::from_map(n, acc))
    }

    fn from_map(n: usize, acc: BTreeMap<(u64, u64), Complex64>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= PRUNE_TOLERANCE)
            .map(|((x, z), c)| PauliString::from_masks(c, n, x, z))
            .collect();
        Self { n, terms }
    }

    /// Re-runs canonicalisation. Sums are always canonical, so this is the identity.
    pub fn canonical(&self) -> Self {
        Self::from_terms(self.n, self.terms.iter().cloned()).expect("qubit counts agree")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient is below `tol` in modulus.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.norm() < tol)
    }

    /// Coefficient of the given letter sequence (zero when absent).
    pub fn coefficient_of(&self, s: &PauliString) -> Complex64 {
        self.terms.iter().find(|t| t.same_letters(s)).map(|t| t.coeff).unwrap_or_default()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::QubitMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Self::from_terms(self.n, self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.n, self.terms.iter().map(|t| t.scaled(factor))).expect("qubit counts agree")
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut acc: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let p = a.multiply(b)?;
                *acc.entry((p.x, p.z)).or_default() += p.coeff;
            }
        }
        Ok(Self::from_map(self.n, acc))
    }

    pub fn adjoint(&self) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(PauliString::adjoint).collect() }
    }

    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.im.abs() <= tol)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_hermitian_within(HERMITICITY_TOLERANCE)
    }

    /// True when only `I`/`Z` strings appear.
    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(PauliString::is_diagonal)
    }

    /// Coefficientwise comparison of two canonical sums.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero_within(tol),
            Err(_) => false,
        }
    }

    /// Diagonal entries for a sum of `I`/`Z` strings, in basis-index order.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::InvalidArgument("sum contains off-diagonal strings".into()));
        }
        if !self.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        if self.n > MAX_QUBITS.min(usize::BITS as usize - 1) {
            return Err(Error::Capacity { n: self.n, max: MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        Ok((0..dim)
            .map(|k| {
                self.terms
                    .iter()
                    .map(|t| {
                        let sign = if (t.z & k as u64).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                        sign * t.coeff.re
                    })
                    .sum()
            })
            .collect())
    }

    /// Dense `2^n × 2^n` matrix in the crate's basis ordering.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity { n: self.n, max: MAX_DENSE_QUBITS });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            for k in 0..dim {
                let (amp, row) = t.apply_to_index(k);
                m[(row, k)] += amp;
            }
        }
        Ok(m)
    }
}

impl From<PauliString> for PauliSum {
    fn from(s: PauliString) -> Self {
        let n = s.n;
        Self::from_terms(n, [s]).expect("qubit counts agree")
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `ab - ba` in canonical form.
pub fn commutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// `ab + ba` in canonical form.
pub fn anticommutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.mul(b)?.add(&b.mul(a)?)
}

/// Free-function form of [`PauliString::multiply`].
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.multiply(b)
}

/// One fermionic ladder operator: mode index (1-based) and whether it creates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderOp {
    pub mode: usize,
    pub dagger: bool,
}

/// An ordered product of fermionic creation/annihilation operators.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FermionWord {
    factors: Vec<LadderOp>,
}

impl FermionWord {
    pub fn new(factors: Vec<LadderOp>) -> Self {
        Self { factors }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self::new(vec![LadderOp { mode, dagger: false }])
    }

    pub fn create(mode: usize) -> Self {
        Self::new(vec![LadderOp { mode, dagger: true }])
    }

    /// Appends `c_mode` on the right.
    pub fn then_annihilate(mut self, mode: usize) -> Self {
        self.factors.push(LadderOp { mode, dagger: false });
        self
    }

    /// Appends `c†_mode` on the right.
    pub fn then_create(mut self, mode: usize) -> Self {
        self.factors.push(LadderOp { mode, dagger: true });
        self
    }

    pub fn factors(&self) -> &[LadderOp] {
        &self.factors
    }

    pub fn max_mode(&self) -> usize {
        self.factors.iter().map(|f| f.mode).max().unwrap_or(0)
    }
}

/// Jordan-Wigner image of a single ladder operator:
/// `c_i = σᵢ⁻ ⊗ Z_{i+1} ⊗ … ⊗ Z_n`, with the Z-string trailing the mode.
fn jw_ladder(op: LadderOp, n: usize) -> Result<PauliSum> {
    if op.mode == 0 || op.mode > n {
        return Err(Error::ModeOutOfRange { mode: op.mode, n });
    }
    let bit = 1u64 << (n - op.mode);
    let tail = bit - 1;
    let half = Complex64::new(0.5, 0.0);
    let y_sign = if op.dagger { 1.0 } else { -1.0 };
    // X_i Z_tail and Y_i Z_tail; Y = i X Z so the Y string carries masks (bit, bit | tail).
    let xs = PauliString::from_masks(half, n, bit, tail);
    let ys = PauliString::from_masks(Complex64::new(0.0, 0.5 * y_sign), n, bit, bit | tail);
    PauliSum::from_terms(n, [xs, ys])
}

/// Maps a fermionic word to qubit operators on `n` qubits.
pub fn jw_map(word: &FermionWord, n: usize) -> Result<PauliSum> {
    check_qubits(n)?;
    let mut acc = PauliSum::identity(n)?;
    for &op in word.factors() {
        acc = acc.mul(&jw_ladder(op, n)?)?;
    }
    Ok(acc)
}
