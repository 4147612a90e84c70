//! Pauli-product Hamiltonians and their dense realization.
//!
//! A Hamiltonian is stored as a weighted sum of Pauli products,
//!
//!   H = Σ_k  c_k · P_k,
//!
//! with each `P_k` a tensor product of single-qubit `I`, `X`, `Y`, `Z`.
//! Dense matrices use the basis convention
//! `index = Σ_i b_i · 2^(n-1-i)`: qubit 0 is the most significant bit and
//! `|0⟩` is the `+1` eigenstate of `Z`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Largest qubit count `to_matrix` realizes by default.
pub const DEFAULT_QUBIT_CAP: usize = 12;

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn letter(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(PauliAxis::I),
            'X' => Some(PauliAxis::X),
            'Y' => Some(PauliAxis::Y),
            'Z' => Some(PauliAxis::Z),
            _ => None,
        }
    }
}

/// Non-identity factors of a Pauli product, keyed by qubit index.
pub type Factors = BTreeMap<usize, PauliAxis>;

/// One weighted Pauli product on `qubit_count` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    factors: Factors,
    qubit_count: usize,
}

impl PauliTerm {
    /// Builds a term; identity factors are dropped.
    pub fn new(
        coefficient: f64,
        factors: impl IntoIterator<Item = (usize, PauliAxis)>,
        qubit_count: usize,
    ) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidArgument(
                "qubit_count must be positive".into(),
            ));
        }
        if !coefficient.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "coefficient {coefficient} is not finite"
            )));
        }
        let mut map = Factors::new();
        for (qubit, axis) in factors {
            if qubit >= qubit_count {
                return Err(Error::InvalidArgument(format!(
                    "qubit index {qubit} out of range for {qubit_count} qubits"
                )));
            }
            if axis == PauliAxis::I {
                continue;
            }
            if map.insert(qubit, axis).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "qubit {qubit} appears twice in one product"
                )));
            }
        }
        Ok(Self {
            coefficient,
            factors: map,
            qubit_count,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn factors(&self) -> &Factors {
        &self.factors
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Number of non-identity factors.
    pub fn locality(&self) -> usize {
        self.factors.len()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        if self.factors.is_empty() {
            return write!(f, "·I");
        }
        for (q, a) in &self.factors {
            write!(f, "·{}{}", a.letter(), q)?;
        }
        Ok(())
    }
}

/// Canonical weighted sum of Pauli products.
///
/// No two terms share a factor map and no stored coefficient is exactly
/// zero. Terms are ordered by their factor maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPauliSum", into = "RawPauliSum")]
pub struct PauliSum {
    qubit_count: usize,
    terms: BTreeMap<Vec<(usize, PauliAxis)>, f64>,
}

impl PauliSum {
    pub fn zero(qubit_count: usize) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidArgument(
                "qubit_count must be positive".into(),
            ));
        }
        Ok(Self {
            qubit_count,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms(
        qubit_count: usize,
        terms: impl IntoIterator<Item = PauliTerm>,
    ) -> Result<Self> {
        let mut sum = Self::zero(qubit_count)?;
        for t in terms {
            sum.add_term(t)?;
        }
        Ok(sum)
    }

    /// Σ_i coefficient · σ_x^i over every qubit.
    pub fn transverse_field(qubit_count: usize, coefficient: f64) -> Result<Self> {
        let terms = (0..qubit_count)
            .map(|q| PauliTerm::new(coefficient, [(q, PauliAxis::X)], qubit_count))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(qubit_count, terms)
    }

    /// Adds a term, merging with an existing product if present.
    pub fn add_term(&mut self, term: PauliTerm) -> Result<()> {
        if term.qubit_count != self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: self.qubit_count,
                found: term.qubit_count,
            });
        }
        let key: Vec<_> = term.factors.into_iter().collect();
        self.accumulate(key, term.coefficient);
        Ok(())
    }

    fn accumulate(&mut self, key: Vec<(usize, PauliAxis)>, coefficient: f64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                if coefficient != 0.0 {
                    v.insert(coefficient);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coefficient;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(k, &c)| PauliTerm {
            coefficient: c,
            factors: k.iter().copied().collect(),
            qubit_count: self.qubit_count,
        })
    }

    /// Coefficient of the given product, zero when absent.
    pub fn coefficient(&self, factors: &[(usize, PauliAxis)]) -> f64 {
        let mut key: Vec<_> = factors
            .iter()
            .copied()
            .filter(|(_, a)| *a != PauliAxis::I)
            .collect();
        key.sort();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self {
            qubit_count: self.qubit_count,
            terms: BTreeMap::new(),
        };
        for (k, c) in &self.terms {
            let v = c * factor;
            if v != 0.0 {
                out.terms.insert(k.clone(), v);
            }
        }
        out
    }

    /// Canonical sum of two operators on the same register.
    pub fn plus(&self, other: &PauliSum) -> Result<Self> {
        if other.qubit_count != self.qubit_count {
            return Err(Error::DimensionMismatch {
                expected: self.qubit_count,
                found: other.qubit_count,
            });
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), *c);
        }
        Ok(out)
    }

    /// True when every term is built only from `Z` factors.
    pub fn is_diagonal(&self) -> bool {
        self.terms
            .keys()
            .all(|k| k.iter().all(|(_, a)| *a == PauliAxis::Z))
    }

    /// Largest number of non-identity factors in any term.
    pub fn max_locality(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Σ |c_k|, an upper bound on the operator norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Energy of a computational basis state; only valid for diagonal sums.
    pub fn diagonal_energy(&self, basis_index: usize) -> Result<f64> {
        if !self.is_diagonal() {
            return Err(Error::ContractViolation(
                "diagonal_energy called on a sum with X or Y factors".into(),
            ));
        }
        let n = self.qubit_count;
        Ok(self
            .terms
            .iter()
            .map(|(k, c)| {
                let parity = k
                    .iter()
                    .filter(|(q, _)| (basis_index >> (n - 1 - q)) & 1 == 1)
                    .count();
                if parity % 2 == 0 {
                    *c
                } else {
                    -*c
                }
            })
            .sum())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms().enumerate() {
            let c = t.coefficient();
            match (i, c < 0.0) {
                (0, _) => write!(f, "{c}")?,
                (_, true) => write!(f, " - {}", -c)?,
                (_, false) => write!(f, " + {c}")?,
            }
            if t.factors.is_empty() {
                write!(f, "·I")?;
            }
            for (q, a) in &t.factors {
                write!(f, "·{}{}", a.letter(), q)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    coefficient: f64,
    factors: Vec<(usize, char)>,
}

#[derive(Serialize, Deserialize)]
struct RawPauliSum {
    qubit_count: usize,
    terms: Vec<RawTerm>,
}

impl From<PauliSum> for RawPauliSum {
    fn from(h: PauliSum) -> Self {
        RawPauliSum {
            qubit_count: h.qubit_count,
            terms: h
                .terms
                .iter()
                .map(|(k, &c)| RawTerm {
                    coefficient: c,
                    factors: k.iter().map(|(q, a)| (*q, a.letter())).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<RawPauliSum> for PauliSum {
    type Error = Error;

    fn try_from(raw: RawPauliSum) -> Result<Self> {
        let mut sum = PauliSum::zero(raw.qubit_count)?;
        for t in raw.terms {
            let factors = t
                .factors
                .iter()
                .map(|&(q, c)| {
                    PauliAxis::from_letter(c)
                        .map(|a| (q, a))
                        .ok_or_else(|| Error::Serialization(format!("unknown Pauli axis '{c}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            sum.add_term(PauliTerm::new(t.coefficient, factors, raw.qubit_count)?)?;
        }
        Ok(sum)
    }
}

/// Dense complex matrix that passed the Hermiticity check.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    matrix: DMatrix<Complex64>,
}

impl DenseHermitian {
    /// Validates that `matrix` is square and Hermitian within [`HERMITIAN_TOL`].
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::ContractViolation(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows();
        for i in 0..n {
            for j in i..n {
                let d = matrix[(i, j)] - matrix[(j, i)].conj();
                if d.re.abs() > HERMITIAN_TOL || d.im.abs() > HERMITIAN_TOL {
                    return Err(Error::ContractViolation(format!(
                        "matrix is not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Real diagonal entries.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dimension())
            .map(|i| self.matrix[(i, i)].re)
            .collect()
    }

    /// ⟨ψ|H|ψ⟩.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        check_dimension(self.dimension(), state.dimension())?;
        let v = state.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }
}

fn check_dimension(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Realizes `h` as a dense matrix, refusing more than [`DEFAULT_QUBIT_CAP`] qubits.
pub fn to_matrix(h: &PauliSum) -> Result<DenseHermitian> {
    to_matrix_with_cap(h, DEFAULT_QUBIT_CAP)
}

pub fn to_matrix_with_cap(h: &PauliSum, cap: usize) -> Result<DenseHermitian> {
    let n = h.qubit_count();
    if n > cap {
        return Err(Error::ResourceLimit { qubits: n, cap });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (factors, &c) in &h.terms {
        let mut flip = 0usize;
        let mut y_mask = 0usize;
        let mut z_mask = 0usize;
        for &(q, a) in factors {
            let bit = 1usize << (n - 1 - q);
            match a {
                PauliAxis::X => flip |= bit,
                PauliAxis::Y => {
                    flip |= bit;
                    y_mask |= bit;
                }
                PauliAxis::Z => z_mask |= bit,
                PauliAxis::I => {}
            }
        }
        let y_count = y_mask.count_ones();
        // Y|b⟩ = i(-1)^b |b⊕1⟩, Z|b⟩ = (-1)^b |b⟩.
        let base = Complex64::i().powu(y_count);
        for col in 0..dim {
            let sign_bits = ((col & y_mask).count_ones() + (col & z_mask).count_ones()) % 2;
            let phase = if sign_bits == 0 { base } else { -base };
            m[(col ^ flip, col)] += phase * c;
        }
    }
    DenseHermitian::new(m)
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Number of eigenvalues within `tol` of the minimum.
    pub fn ground_degeneracy(&self, tol: f64) -> usize {
        let e0 = self.eigenvalues[0];
        self.eigenvalues
            .iter()
            .take_while(|&&e| e - e0 <= tol)
            .count()
    }

    /// V Λ V†.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(e);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// V e^{-iΛt} V† ψ.
    pub fn propagate(&self, state: &StateVector, duration: f64) -> Result<StateVector> {
        check_dimension(self.dimension(), state.dimension())?;
        if !duration.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "duration {duration} is not finite"
            )));
        }
        let mut coeffs = self.eigenvectors.ad_mul(state.amplitudes());
        for (c, &e) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -e * duration);
        }
        Ok(StateVector::from_unchecked(&self.eigenvectors * coeffs))
    }

    /// ⟨ψ|P|ψ⟩ for P the projector onto eigenvectors within `tol` of the minimum eigenvalue.
    pub fn ground_subspace_weight(&self, state: &StateVector, tol: f64) -> Result<f64> {
        check_dimension(self.dimension(), state.dimension())?;
        let k = self.ground_degeneracy(tol);
        let w: f64 = (0..k)
            .map(|j| {
                self.eigenvectors
                    .column(j)
                    .dotc(state.amplitudes())
                    .norm_sqr()
            })
            .sum();
        Ok(w.clamp(0.0, 1.0))
    }
}

/// Full Hermitian eigendecomposition.
///
/// Eigenpairs are sorted ascending. Each eigenvector is rephased so that its
/// first component with modulus above 1e-10 is real and positive.
pub fn eigendecompose(m: &DenseHermitian) -> Result<EigenSystem> {
    let eig = nalgebra::linalg::SymmetricEigen::new(m.matrix().clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });
    let dim = m.dimension();
    let mut vectors = DMatrix::<Complex64>::zeros(dim, dim);
    let mut values = Vec::with_capacity(dim);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let pivot = col
            .iter()
            .find(|c| c.norm() > 1e-10)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        vectors.set_column(dst, &(col * phase));
    }
    Ok(EigenSystem {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Evolves `state` under the time-independent `h` for `duration`.
///
/// Units follow `h`: dimensionless `h` pairs with dimensionless duration,
/// angular-frequency `h` (rad/s) with seconds.
pub fn propagate(state: &StateVector, h: &PauliSum, duration: f64) -> Result<StateVector> {
    check_dimension(1usize << h.qubit_count(), state.dimension())?;
    let eig = eigendecompose(&to_matrix(h)?)?;
    eig.propagate(state, duration)
}
