//! Factoring instances as weighted penalty Hamiltonians.
//!
//! A factoring problem `N = p · q` becomes a set of clauses over binary
//! unknowns. Each clause `r_k(x) = t_k` contributes `w_k · (r_k − t_k)²` to a
//! penalty polynomial that vanishes exactly on satisfying assignments. Any
//! strictly positive weights `w_k` give the same zero set, so the weights are
//! free to be tuned towards hardware that is easy to realize. The penalty is
//! mapped to qubits through `x̂ = (1 − σ_z)/2`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliSum, PauliTerm};
use crate::polynomial::{Assignment, BinaryPolynomial, BitVariable};

/// Largest variable count accepted by [`brute_force_ground`].
pub const ENUMERATION_CAP: usize = 24;

/// The semiprime factored by the built-in reduced instance.
pub const N_291311: u64 = 291_311;

/// Largest `m + n` for which every penalty coefficient stays an exact `f64` integer.
pub const MAX_INTERIOR_BITS: usize = 22;

/// A single equation `residual = target` over binary variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clause {
    pub residual: BinaryPolynomial,
    pub target: f64,
}

impl Clause {
    pub fn new(residual: BinaryPolynomial, target: f64) -> Self {
        Self { residual, target }
    }

    /// `(residual − target)²`, multilinear-reduced.
    pub fn squared_violation(&self) -> BinaryPolynomial {
        self.residual
            .minus(&BinaryPolynomial::constant(self.target))
            .square()
    }

    pub fn is_satisfied(&self, a: &Assignment) -> Option<bool> {
        self.residual.evaluate(a).map(|v| v == self.target)
    }

    /// Matches `x + y = 1` for distinct single variables.
    fn as_complement_pair(&self) -> Option<(BitVariable, BitVariable)> {
        if self.target != 1.0
            || self.residual.constant_term() != 0.0
            || self.residual.term_count() != 2
        {
            return None;
        }
        let mut vars = Vec::with_capacity(2);
        for (m, c) in self.residual.terms() {
            if c != 1.0 || m.degree() != 1 {
                return None;
            }
            vars.push(m.variables()[0].clone());
        }
        Some((vars[0].clone(), vars[1].clone()))
    }

    /// Moves the residual constant into the target and makes the leading coefficient positive.
    fn normalized(&self) -> Clause {
        let c = self.residual.constant_term();
        let mut residual = self.residual.minus(&BinaryPolynomial::constant(c));
        let mut target = self.target - c;
        if residual.terms().next().is_some_and(|(_, lead)| lead < 0.0) {
            residual = residual.scaled(-1.0);
            target = -target;
        }
        if target == 0.0 {
            target = 0.0;
        }
        Clause { residual, target }
    }
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", self.residual, self.target)
    }
}

/// Clauses plus the complement substitutions already applied to them.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ClauseSet {
    pub clauses: Vec<Clause>,
    /// `(eliminated, partner)` pairs meaning `eliminated = 1 − partner`, in application order.
    pub eliminated: Vec<(BitVariable, BitVariable)>,
}

impl ClauseSet {
    pub fn new(clauses: Vec<Clause>) -> Self {
        Self {
            clauses,
            eliminated: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Variables of all residuals in first-appearance order.
    pub fn variables_in_order(&self) -> Vec<BitVariable> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in &self.clauses {
            for v in c.residual.variables_in_order() {
                if seen.insert(v.clone()) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn is_satisfied(&self, a: &Assignment) -> Option<bool> {
        let mut all = true;
        for c in &self.clauses {
            all &= c.is_satisfied(a)?;
        }
        Some(all)
    }

    /// Adds eliminated variables, later substitutions first.
    pub fn complete_assignment(&self, a: &Assignment) -> Option<Assignment> {
        let mut out = a.clone();
        for (gone, partner) in self.eliminated.iter().rev() {
            let v = *out.get(partner)?;
            out.insert(gone.clone(), !v);
        }
        Some(out)
    }
}

/// The six reduced equations over `p1, p2, p5, q1, q2, q5` for `N = 291311`.
///
/// The factors have the form `p = {1 0 0 0 p5 0 1 p2 p1 1}` and likewise for `q`.
pub fn clauses_291311() -> ClauseSet {
    let (p, q) = (
        |i| BinaryPolynomial::variable(BitVariable::p(i)),
        |i| BinaryPolynomial::variable(BitVariable::q(i)),
    );
    let pq = |a: usize, b: usize| p(a).times(&q(b));
    ClauseSet::new(vec![
        Clause::new(p(1).plus(&q(1)), 1.0),
        Clause::new(p(2).plus(&q(2)), 1.0),
        Clause::new(p(5).plus(&q(5)), 1.0),
        Clause::new(pq(1, 2).plus(&pq(2, 1)), 1.0),
        Clause::new(pq(2, 5).plus(&pq(5, 2)), 0.0),
        Clause::new(pq(5, 1).plus(&pq(1, 5)), 1.0),
    ])
}

/// Eliminates every `x + y = 1` clause by substituting the lexicographically
/// earlier variable with `1 − other`.
pub fn substitute_complements(cs: &ClauseSet) -> Result<ClauseSet> {
    let mut clauses: Vec<Clause> = cs.clauses.iter().map(Clause::normalized).collect();
    let mut eliminated = cs.eliminated.clone();
    while let Some(k) = clauses
        .iter()
        .position(|c| c.as_complement_pair().is_some())
    {
        let (a, b) = clauses[k].as_complement_pair().expect("matched above");
        clauses.remove(k);
        let (gone, keep) = if a < b { (a, b) } else { (b, a) };
        let replacement =
            BinaryPolynomial::constant(1.0).minus(&BinaryPolynomial::variable(keep.clone()));
        clauses = clauses
            .iter()
            .map(|c| Clause::new(c.residual.substitute(&gone, &replacement), c.target).normalized())
            .collect();
        eliminated.push((gone, keep));
    }
    let mut kept = Vec::with_capacity(clauses.len());
    for c in clauses {
        if c.residual.is_constant() {
            if c.residual.constant_term() != c.target {
                return Err(Error::Unsatisfiable(format!(
                    "clause reduced to {} = {}",
                    c.residual.constant_term(),
                    c.target
                )));
            }
        } else {
            kept.push(c);
        }
    }
    Ok(ClauseSet {
        clauses: kept,
        eliminated,
    })
}

/// `N = p · q` with `p = {1 p_m … p_1 1}` and `q = {1 q_n … q_1 1}` in binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactoringInstance {
    pub modulus: u64,
    pub p_bits: usize,
    pub q_bits: usize,
}

impl FactoringInstance {
    pub fn new(modulus: u64, p_bits: usize, q_bits: usize) -> Result<Self> {
        if modulus.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("N = {modulus} is even")));
        }
        if modulus < 9 {
            return Err(Error::InvalidArgument(format!("N = {modulus} is below 9")));
        }
        if p_bits + q_bits > MAX_INTERIOR_BITS {
            return Err(Error::InvalidArgument(format!(
                "{} interior bits exceeds the supported {MAX_INTERIOR_BITS}",
                p_bits + q_bits
            )));
        }
        Ok(Self {
            modulus,
            p_bits,
            q_bits,
        })
    }

    fn factor_polynomial(prefix: &str, bits: usize) -> BinaryPolynomial {
        let mut poly = BinaryPolynomial::constant((1u64 << (bits + 1)) as f64 + 1.0);
        for i in 1..=bits {
            poly = poly.plus(&BinaryPolynomial::term(
                (1u64 << i) as f64,
                [BitVariable::new(prefix, i)],
            ));
        }
        poly
    }

    pub fn variables(&self) -> Vec<BitVariable> {
        (1..=self.p_bits)
            .map(BitVariable::p)
            .chain((1..=self.q_bits).map(BitVariable::q))
            .collect()
    }
}

/// The single global clause `p(bits) · q(bits) − N = 0`.
pub fn build_bit_equations(inst: &FactoringInstance) -> ClauseSet {
    let p = FactoringInstance::factor_polynomial("p", inst.p_bits);
    let q = FactoringInstance::factor_polynomial("q", inst.q_bits);
    let residual = p
        .times(&q)
        .minus(&BinaryPolynomial::constant(inst.modulus as f64));
    ClauseSet::new(vec![Clause::new(residual, 0.0)])
}

/// A clause set lowered to a weighted penalty polynomial and its qubit Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompiledProblem {
    pub clause_set: ClauseSet,
    pub elm_weights: Vec<f64>,
    pub penalty: BinaryPolynomial,
    pub hamiltonian: PauliSum,
    /// Qubit `i` carries `variable_map[i]`.
    pub variable_map: Vec<BitVariable>,
    /// Identity coefficient removed from the Hamiltonian.
    pub dropped_constant: f64,
}

/// Σ_S c_S Π_{i∈S} (1 − z_i)/2 expanded into Z products keyed by qubit sets.
fn penalty_to_z_products(
    p: &BinaryPolynomial,
    qubit_of: &BTreeMap<BitVariable, usize>,
) -> BTreeMap<Vec<usize>, f64> {
    let mut out: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    *out.entry(Vec::new()).or_default() += p.constant_term();
    for (m, c) in p.terms() {
        let qubits: Vec<usize> = m.variables().iter().map(|v| qubit_of[v]).collect();
        let k = qubits.len();
        let scale = c / (1u64 << k) as f64;
        for subset in 0u32..(1 << k) {
            let mut key: Vec<usize> = (0..k)
                .filter(|b| subset >> b & 1 == 1)
                .map(|b| qubits[b])
                .collect();
            key.sort_unstable();
            let sign = if subset.count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            *out.entry(key).or_default() += sign * scale;
        }
    }
    out.retain(|_, c| *c != 0.0);
    out
}

/// Builds Σ_k w_k (r_k − t_k)² and its Z-basis Hamiltonian with the constant dropped.
pub fn compile(cs: &ClauseSet, weights: &[f64]) -> Result<CompiledProblem> {
    if weights.len() != cs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} clauses",
            weights.len(),
            cs.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "weight {w} is not strictly positive"
        )));
    }
    let variable_map = cs.variables_in_order();
    if variable_map.is_empty() {
        return Err(Error::InvalidArgument("clause set has no variables".into()));
    }
    let n = variable_map.len();
    let qubit_of: BTreeMap<BitVariable, usize> = variable_map
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();

    let mut penalty = BinaryPolynomial::default();
    let mut z_products: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (clause, &w) in cs.clauses.iter().zip(weights) {
        let sq = clause.squared_violation();
        penalty = penalty.plus(&sq.scaled(w));
        // Expand each clause before weighting so dyadic cancellations stay exact.
        for (key, c) in penalty_to_z_products(&sq, &qubit_of) {
            *z_products.entry(key).or_default() += w * c;
        }
    }
    let dropped_constant = z_products.remove(&Vec::new()).unwrap_or(0.0);
    let mut hamiltonian = PauliSum::zero(n)?;
    for (key, c) in z_products {
        hamiltonian.add_term(PauliTerm::new(
            c,
            key.into_iter().map(|q| (q, PauliAxis::Z)),
            n,
        )?)?;
    }
    Ok(CompiledProblem {
        clause_set: cs.clone(),
        elm_weights: weights.to_vec(),
        penalty,
        hamiltonian,
        variable_map,
        dropped_constant,
    })
}

/// Linear and quadratic Z coefficients of an at-most-2-local Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingModel {
    pub qubit_count: usize,
    pub linear: Vec<(usize, f64)>,
    pub quadratic: Vec<(usize, usize, f64)>,
    pub offset: f64,
}

impl CompiledProblem {
    pub fn qubit_count(&self) -> usize {
        self.variable_map.len()
    }

    /// Assignment encoded by a computational basis index.
    pub fn assignment_for_basis(&self, index: usize) -> Assignment {
        let n = self.qubit_count();
        self.variable_map
            .iter()
            .enumerate()
            .map(|(q, v)| (v.clone(), (index >> (n - 1 - q)) & 1 == 1))
            .collect()
    }

    pub fn basis_for_assignment(&self, a: &Assignment) -> Option<usize> {
        let n = self.qubit_count();
        let mut idx = 0usize;
        for (q, v) in self.variable_map.iter().enumerate() {
            if *a.get(v)? {
                idx |= 1 << (n - 1 - q);
            }
        }
        Some(idx)
    }

    pub fn to_ising(&self) -> Result<IsingModel> {
        let mut linear = Vec::new();
        let mut quadratic = Vec::new();
        for t in self.hamiltonian.terms() {
            let qs: Vec<usize> = t.factors().keys().copied().collect();
            match qs.as_slice() {
                [i] => linear.push((*i, t.coefficient())),
                [i, j] => quadratic.push((*i, *j, t.coefficient())),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "term {t} is {}-local; Ising export needs at most 2-local terms",
                        qs.len()
                    )))
                }
            }
        }
        Ok(IsingModel {
            qubit_count: self.qubit_count(),
            linear,
            quadratic,
            offset: self.dropped_constant,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Exhaustive minimum of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub minimum: f64,
    /// Variable order used by `assignments`, sorted by name.
    pub variables: Vec<BitVariable>,
    /// Minimizing assignments in ascending enumeration order.
    pub assignments: Vec<Vec<bool>>,
}

impl GroundStates {
    pub fn assignment_maps(&self) -> Vec<Assignment> {
        self.assignments
            .iter()
            .map(|bits| {
                self.variables
                    .iter()
                    .cloned()
                    .zip(bits.iter().copied())
                    .collect()
            })
            .collect()
    }
}

/// Enumerates all assignments of the polynomial's variables.
///
/// Values within `1e-9 · max(1, Σ|c|)` of the minimum count as minimal.
pub fn brute_force_ground(p: &BinaryPolynomial) -> Result<GroundStates> {
    let variables: Vec<BitVariable> = p.variables().into_iter().collect();
    let k = variables.len();
    if k > ENUMERATION_CAP {
        return Err(Error::EnumerationLimit {
            variables: k,
            cap: ENUMERATION_CAP,
        });
    }
    let terms = p.masked_terms(&variables);
    let constant = p.constant_term();
    let eval = |bits: u64| -> f64 {
        terms
            .iter()
            .filter(|(mask, _)| bits & mask == *mask)
            .fold(constant, |acc, (_, c)| acc + c)
    };
    let values: Vec<f64> = (0..1u64 << k).into_par_iter().map(eval).collect();
    let minimum = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = terms.iter().map(|(_, c)| c.abs()).sum::<f64>() + constant.abs();
    let tol = 1e-9 * scale.max(1.0);
    let assignments = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v - minimum <= tol)
        .map(|(i, _)| (0..k).map(|j| (i >> (k - 1 - j)) & 1 == 1).collect())
        .collect();
    Ok(GroundStates {
        minimum,
        variables,
        assignments,
    })
}

/// Bit layout used to turn an assignment back into integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorLayout {
    /// `p = {1 0 0 0 p5 0 1 p2 p1 1}`, `q` likewise, `N = 291311`.
    Reduced291311,
    Generic(FactoringInstance),
}

impl FactorLayout {
    pub fn modulus(&self) -> u64 {
        match self {
            FactorLayout::Reduced291311 => N_291311,
            FactorLayout::Generic(inst) => inst.modulus,
        }
    }
}

fn bit(a: &Assignment, v: &BitVariable) -> Result<u64> {
    a.get(v)
        .map(|&b| b as u64)
        .ok_or_else(|| Error::InvalidArgument(format!("assignment is missing {v}")))
}

/// Reconstructs `(p, q)` from an assignment and checks `p · q = N`.
///
/// For the reduced 291311 layout a missing `p_i` is taken as `1 − q_i`.
pub fn decode_factors(a: &Assignment, layout: &FactorLayout) -> Result<(u64, u64)> {
    let (p, q) = match layout {
        FactorLayout::Reduced291311 => {
            let mut full = a.clone();
            for i in [1, 2, 5] {
                if let Entry::Vacant(e) = full.entry(BitVariable::p(i)) {
                    e.insert(bit(a, &BitVariable::q(i))? == 0);
                }
            }
            let value = |prefix: fn(usize) -> BitVariable| -> Result<u64> {
                Ok(512
                    + (bit(&full, &prefix(5))? << 5)
                    + 8
                    + (bit(&full, &prefix(2))? << 2)
                    + (bit(&full, &prefix(1))? << 1)
                    + 1)
            };
            (value(BitVariable::p)?, value(BitVariable::q)?)
        }
        FactorLayout::Generic(inst) => {
            let value = |prefix: fn(usize) -> BitVariable, bits: usize| -> Result<u64> {
                let mut v = (1u64 << (bits + 1)) + 1;
                for i in 1..=bits {
                    v += bit(a, &prefix(i))? << i;
                }
                Ok(v)
            };
            (
                value(BitVariable::p, inst.p_bits)?,
                value(BitVariable::q, inst.q_bits)?,
            )
        }
    };
    let n = layout.modulus();
    let product = p as u128 * q as u128;
    if product != n as u128 {
        return Err(Error::DecodeVerification { p, q, product, n });
    }
    Ok((p, q))
}
