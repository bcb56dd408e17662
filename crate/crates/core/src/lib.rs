//! Quantum simulation toolkit for the Agassi two-level pairing-plus-monopole
//! model: fermion-to-qubit mapping, exact and Trotterized dynamics,
//! trapped-ion gate compilation with error budgeting, and the
//! fidelity / survival / correlation experiments built on top.

pub mod error;
pub mod experiments;
pub mod ion;
pub mod model;
pub mod pauli;
pub mod state;
pub mod trotter;

pub use error::{Error, Result};
