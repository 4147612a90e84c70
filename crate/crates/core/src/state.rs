use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on ‖ψ‖ − 1 accepted at construction.
pub const NORM_TOL: f64 = 1e-10;

/// Normalized pure state of an n-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Wraps `amplitudes`, checking that the length is a power of two and the norm is 1.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "state length {dim} is not a power of two"
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::ContractViolation(format!(
                "state norm {norm} is not 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_unchecked(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero vector".into(),
            ));
        }
        Self::new(amplitudes / Complex64::new(norm, 0.0))
    }

    /// Computational basis state |index⟩.
    pub fn basis(qubit_count: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubit_count;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {qubit_count} qubits"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubit_count(&self) -> usize {
        self.dimension().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// |amplitude_i|² for every basis index.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// |⟨self|other⟩|².
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes).norm_sqr())
    }

    /// Largest entrywise distance after removing the global phase that best aligns `other` with `self`.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        let inner = other.amplitudes.dotc(&self.amplitudes);
        let phase = if inner.norm() > 0.0 {
            inner / inner.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max))
    }
}
