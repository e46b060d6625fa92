//! Exact truth-table evaluation of propositional entailment and of `Γ ⊢ φ↪ψ`.
//!
//! Every formula is compiled to the bitset of assignments satisfying it; a
//! subset test is then a handful of word-wise ANDs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counterfactual::{SubsetOrder, Subsets};
use crate::kernel::syntax::{FALSUM, VERUM};
use crate::kernel::Formula;

pub const MAX_PREMISES: usize = 12;
pub const MAX_ATOMS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("formula is outside the propositional fragment: {0}")]
    NotPropositional(String),
    #[error("{0} premises exceed the oracle limit of {MAX_PREMISES}")]
    TooManyPremises(usize),
    #[error("{0} atoms exceed the oracle limit of {MAX_ATOMS}")]
    TooManyAtoms(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub entailed: bool,
    /// φ alone is unsatisfiable.
    pub antecedent_inconsistent: bool,
    /// First Γ′ in small-first order meeting both conditions.
    pub witness: Option<Vec<usize>>,
}

/// Model sets over a fixed atom list.
struct Models {
    atoms: BTreeMap<String, usize>,
    words: usize,
}

impl Models {
    fn new<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Result<Self, OracleError> {
        let mut atoms = BTreeMap::new();
        for f in fs {
            if !f.is_propositional() {
                return Err(OracleError::NotPropositional(f.to_string()));
            }
            for a in f.prop_letters() {
                let n = atoms.len();
                atoms.entry(a).or_insert(n);
            }
        }
        if atoms.len() > MAX_ATOMS {
            return Err(OracleError::TooManyAtoms(atoms.len()));
        }
        let words = (1usize << atoms.len()).div_ceil(64);
        Ok(Models { atoms, words })
    }

    fn rows(&self) -> usize {
        1 << self.atoms.len()
    }

    fn full(&self) -> Vec<u64> {
        let mut v = vec![u64::MAX; self.words];
        let rem = self.rows() % 64;
        if rem != 0 {
            *v.last_mut().unwrap() = (1u64 << rem) - 1;
        }
        v
    }

    fn of(&self, f: &Formula) -> Vec<u64> {
        match f {
            Formula::Atom(r, _) if r == VERUM => self.full(),
            Formula::Atom(r, _) if r == FALSUM => vec![0; self.words],
            Formula::Atom(r, _) => {
                let bit = self.atoms[r];
                let mut v = vec![0u64; self.words];
                for row in 0..self.rows() {
                    if row >> bit & 1 == 1 {
                        v[row / 64] |= 1 << (row % 64);
                    }
                }
                v
            }
            Formula::Not(g) => {
                let full = self.full();
                self.of(g).iter().zip(&full).map(|(a, m)| !a & m).collect()
            }
            Formula::And(gs) => gs.iter().fold(self.full(), |acc, g| and(&acc, &self.of(g))),
            Formula::Or(gs) => gs.iter().fold(vec![0; self.words], |acc, g| {
                acc.iter().zip(self.of(g)).map(|(a, b)| a | b).collect()
            }),
            Formula::Implies(a, b) => self.of(&Formula::Or(vec![Formula::Not(a.clone()), (**b).clone()])),
            Formula::Iff(a, b) => {
                let full = self.full();
                let (x, y) = (self.of(a), self.of(b));
                x.iter().zip(&y).zip(&full).map(|((x, y), m)| !(x ^ y) & m).collect()
            }
            _ => unreachable!("checked propositional"),
        }
    }
}

fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn empty(a: &[u64]) -> bool {
    a.iter().all(|&w| w == 0)
}

fn within(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

pub fn satisfiable(fs: &[Formula]) -> Result<bool, OracleError> {
    let m = Models::new(fs)?;
    Ok(!empty(&fs.iter().fold(m.full(), |acc, f| and(&acc, &m.of(f)))))
}

/// Semantic entailment `Γ ⊨ ψ`.
pub fn entails(gamma: &[Formula], psi: &Formula) -> Result<bool, OracleError> {
    let m = Models::new(gamma.iter().chain([psi]))?;
    let g = gamma.iter().fold(m.full(), |acc, f| and(&acc, &m.of(f)));
    Ok(within(&g, &m.of(psi)))
}

/// Exact evaluation of the subset condition over every `Γ′ ⊆ Γ`.
pub fn oracle_counterfactual(gamma: &[Formula], phi: &Formula, psi: &Formula) -> Result<OracleVerdict, OracleError> {
    if gamma.len() > MAX_PREMISES {
        return Err(OracleError::TooManyPremises(gamma.len()));
    }
    let m = Models::new(gamma.iter().chain([phi, psi]))?;
    let phi_m = m.of(phi);
    if empty(&phi_m) {
        return Ok(OracleVerdict { entailed: true, antecedent_inconsistent: true, witness: None });
    }
    let psi_m = m.of(psi);
    let gm: Vec<Vec<u64>> = gamma.iter().map(|g| m.of(g)).collect();
    for mask in Subsets::new(gamma.len(), SubsetOrder::SmallFirst) {
        let mut s = phi_m.clone();
        for (i, g) in gm.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s = and(&s, g);
            }
        }
        if !empty(&s) && within(&s, &psi_m) {
            let witness = (0..gamma.len()).filter(|i| mask >> i & 1 == 1).collect();
            return Ok(OracleVerdict { entailed: true, antecedent_inconsistent: false, witness: Some(witness) });
        }
    }
    Ok(OracleVerdict { entailed: false, antecedent_inconsistent: false, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        Formula::prop(s)
    }

    #[test]
    fn belief_revision_example() {
        let gamma = [Formula::not(p("p")), Formula::implies(p("p"), p("q"))];
        let v = oracle_counterfactual(&gamma, &p("p"), &p("q")).unwrap();
        assert!(v.entailed);
        assert_eq!(v.witness, Some(vec![1]));
    }

    #[test]
    fn identity_and_absurdity() {
        let gamma = [Formula::not(p("p"))];
        assert!(oracle_counterfactual(&gamma, &p("p"), &p("p")).unwrap().entailed);
        let v = oracle_counterfactual(&[p("q")], &p("p"), &Formula::falsum()).unwrap();
        assert!(!v.entailed);
        let contra = Formula::and(vec![p("p"), Formula::not(p("p"))]);
        let v = oracle_counterfactual(&[], &contra, &Formula::falsum()).unwrap();
        assert!(v.entailed && v.antecedent_inconsistent);
    }

    #[test]
    fn truth_tables() {
        assert!(entails(&[p("a"), Formula::implies(p("a"), p("b"))], &p("b")).unwrap());
        assert!(!entails(&[Formula::or(vec![p("a"), p("b")])], &p("a")).unwrap());
        assert!(entails(&[], &Formula::iff(p("a"), Formula::not(Formula::not(p("a"))))).unwrap());
        assert!(entails(&[], &Formula::verum()).unwrap());
        assert!(!satisfiable(&[p("a"), Formula::not(p("a"))]).unwrap());
        assert!(satisfiable(&[]).unwrap());
    }

    #[test]
    fn limits() {
        let big: Vec<Formula> = (0..13).map(|i| p(&format!("x{i}"))).collect();
        assert_eq!(oracle_counterfactual(&big, &p("a"), &p("a")).unwrap_err(), OracleError::TooManyPremises(13));
        let wide = Formula::and((0..17).map(|i| p(&format!("x{i}"))).collect());
        assert_eq!(entails(&[], &wide).unwrap_err(), OracleError::TooManyAtoms(17));
        let fo = Formula::atom("P", vec![crate::kernel::Term::constant("c")]);
        assert!(matches!(satisfiable(&[fo]), Err(OracleError::NotPropositional(_))));
    }
}
