//! Multilinear polynomials over binary variables.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

/// A named binary unknown such as `p1` or `q5`.
///
/// Variables order lexicographically by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVariable {
    name: String,
    index: usize,
}

impl BitVariable {
    pub fn new(prefix: &str, index: usize) -> Self {
        Self {
            name: format!("{prefix}{index}"),
            index,
        }
    }

    pub fn p(index: usize) -> Self {
        Self::new("p", index)
    }

    pub fn q(index: usize) -> Self {
        Self::new("q", index)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Bit position inside its factor.
    pub fn index(&self) -> usize {
        self.index
    }
}

impl Ord for BitVariable {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for BitVariable {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for BitVariable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

/// Values of a set of binary variables.
pub type Assignment = BTreeMap<BitVariable, bool>;

/// Product of distinct variables. Ordered by degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<BitVariable>);

impl Monomial {
    pub fn new(vars: impl IntoIterator<Item = BitVariable>) -> Self {
        let set: BTreeSet<_> = vars.into_iter().collect();
        Self(set.into_iter().collect())
    }

    pub fn variables(&self) -> &[BitVariable] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Product with x² = x applied.
    fn times(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.0.iter().chain(other.0.iter()).cloned())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Σ c_S Π_{v∈S} v + constant, kept multilinear with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinaryPolynomial {
    terms: BTreeMap<Monomial, f64>,
    constant: f64,
}

impl BinaryPolynomial {
    pub fn constant(value: f64) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn variable(v: BitVariable) -> Self {
        Self::term(1.0, [v])
    }

    pub fn term(coefficient: f64, vars: impl IntoIterator<Item = BitVariable>) -> Self {
        let mut p = Self::default();
        p.add_monomial(Monomial::new(vars), coefficient);
        p
    }

    fn add_monomial(&mut self, m: Monomial, c: f64) {
        if m.degree() == 0 {
            self.constant += c;
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                if c != 0.0 {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
        }
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    /// Non-constant terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, vars: impl IntoIterator<Item = BitVariable>) -> f64 {
        let m = Monomial::new(vars);
        if m.degree() == 0 {
            self.constant
        } else {
            self.terms.get(&m).copied().unwrap_or(0.0)
        }
    }

    /// Variables that appear in some term, sorted.
    pub fn variables(&self) -> BTreeSet<BitVariable> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().cloned())
            .collect()
    }

    /// Variables in order of first appearance over the canonical term order.
    pub fn variables_in_order(&self) -> Vec<BitVariable> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for m in self.terms.keys() {
            for v in &m.0 {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self::constant(self.constant * factor);
        for (m, c) in &self.terms {
            out.add_monomial(m.clone(), c * factor);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant += other.constant;
        for (m, c) in &other.terms {
            out.add_monomial(m.clone(), *c);
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn times(&self, other: &Self) -> Self {
        let mut out = Self::constant(self.constant * other.constant);
        for (m, c) in &self.terms {
            out.add_monomial(m.clone(), c * other.constant);
        }
        for (m, c) in &other.terms {
            out.add_monomial(m.clone(), c * self.constant);
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_monomial(ma.times(mb), ca * cb);
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.times(self)
    }

    /// Replaces every occurrence of `var` with `replacement`.
    pub fn substitute(&self, var: &BitVariable, replacement: &BinaryPolynomial) -> Self {
        let mut out = Self::constant(self.constant);
        for (m, c) in &self.terms {
            if m.0.contains(var) {
                let rest = Monomial::new(m.0.iter().filter(|v| *v != var).cloned());
                let mut base = Self::default();
                base.add_monomial(rest, *c);
                out = out.plus(&base.times(replacement));
            } else {
                out.add_monomial(m.clone(), *c);
            }
        }
        out
    }

    /// Value at a 0/1 assignment; `None` if a variable is missing.
    pub fn evaluate(&self, assignment: &Assignment) -> Option<f64> {
        let mut total = self.constant;
        for (m, c) in &self.terms {
            let mut on = true;
            for v in &m.0 {
                if !*assignment.get(v)? {
                    on = false;
                }
            }
            if on {
                total += c;
            }
        }
        Some(total)
    }

    /// Term list with each monomial as a bit mask over `order` (first variable = most significant bit).
    pub(crate) fn masked_terms(&self, order: &[BitVariable]) -> Vec<(u64, f64)> {
        let k = order.len();
        let pos: BTreeMap<&BitVariable, usize> =
            order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        self.terms
            .iter()
            .map(|(m, &c)| {
                let mask =
                    m.0.iter()
                        .fold(0u64, |acc, v| acc | 1u64 << (k - 1 - pos[v]));
                (mask, c)
            })
            .collect()
    }
}

impl fmt::Display for BinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in &self.terms {
            let names: Vec<&str> = m.0.iter().map(|v| v.name()).collect();
            let (sign, mag) = if *c < 0.0 { ("-", -c) } else { ("+", *c) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag != 1.0 {
                write!(f, "{mag}*")?;
            }
            f.write_str(&names.join("*"))?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant != 0.0 {
            let (sign, mag) = if self.constant < 0.0 {
                ("-", -self.constant)
            } else {
                ("+", self.constant)
            };
            write!(f, " {sign} {mag}")
        } else {
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct TermRecord<'a> {
    variables: &'a [BitVariable],
    coefficient: f64,
}

impl Serialize for BinaryPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRecord<'_>> = self
            .terms
            .iter()
            .map(|(m, &c)| TermRecord {
                variables: &m.0,
                coefficient: c,
            })
            .collect();
        let mut st = s.serialize_struct("BinaryPolynomial", 2)?;
        st.serialize_field("constant", &self.constant)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: usize) -> BinaryPolynomial {
        BinaryPolynomial::variable(BitVariable::q(i))
    }

    #[test]
    fn squaring_applies_idempotence() {
        let x = q(1);
        assert_eq!(x.square(), x);
        // (q1 + q2)² = q1 + q2 + 2 q1 q2
        let s = q(1).plus(&q(2)).square();
        assert_eq!(s.coefficient([BitVariable::q(1)]), 1.0);
        assert_eq!(s.coefficient([BitVariable::q(1), BitVariable::q(2)]), 2.0);
        assert_eq!(s.degree(), 2);
    }

    #[test]
    fn canonical_drops_zero_terms() {
        let p = q(1).minus(&q(1));
        assert!(p.is_constant());
        assert_eq!(p.term_count(), 0);
    }

    #[test]
    fn substitution_of_complement() {
        // p1 q2 with p1 := 1 - q1  ->  q2 - q1 q2
        let p1q2 = BinaryPolynomial::term(1.0, [BitVariable::p(1), BitVariable::q(2)]);
        let repl = BinaryPolynomial::constant(1.0).minus(&q(1));
        let out = p1q2.substitute(&BitVariable::p(1), &repl);
        assert_eq!(out.coefficient([BitVariable::q(2)]), 1.0);
        assert_eq!(
            out.coefficient([BitVariable::q(1), BitVariable::q(2)]),
            -1.0
        );
        assert_eq!(out.term_count(), 2);
    }

    #[test]
    fn canonical_order_is_degree_first() {
        let p = BinaryPolynomial::term(-2.0, [BitVariable::q(1), BitVariable::q(2)])
            .plus(&q(2))
            .plus(&q(1));
        assert_eq!(p.to_string(), "q1 + q2 - 2*q1*q2");
        assert_eq!(
            p.variables_in_order(),
            vec![BitVariable::q(1), BitVariable::q(2)]
        );
    }

    #[test]
    fn evaluate_requires_full_assignment() {
        let p = q(1).times(&q(2)).plus(&BinaryPolynomial::constant(3.0));
        let mut a = Assignment::new();
        a.insert(BitVariable::q(1), true);
        assert_eq!(p.evaluate(&a), None);
        a.insert(BitVariable::q(2), true);
        assert_eq!(p.evaluate(&a), Some(4.0));
    }
}
