//! Penalty-Hamiltonian compiler and exact adiabatic simulator for small
//! integer-factoring instances, with the matching NMR pulse program and
//! noise-robustness tooling.

pub mod adiabatic;
pub mod error;
pub mod factoring;
pub mod format;
pub mod nmr;
pub mod noise;
pub mod pauli;
pub mod polynomial;
pub mod state;

pub use error::{Error, Result};
pub use pauli::{PauliAxis, PauliSum, PauliTerm};
pub use state::StateVector;
