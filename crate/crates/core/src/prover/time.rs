//! Order on moments, read off ground `prior` facts.

use std::collections::{BTreeMap, BTreeSet};

use crate::kernel::signature::MOMENT;
use crate::kernel::{Formula, Signature, Term};

#[derive(Clone, Debug, Default)]
pub struct TimeOrder {
    succ: BTreeMap<Term, BTreeSet<Term>>,
    moments: BTreeSet<Term>,
}

impl TimeOrder {
    pub fn from_facts<'a>(sig: &Signature, facts: impl IntoIterator<Item = &'a Formula>) -> Self {
        let mut t = TimeOrder::default();
        for c in sig.constants_of(MOMENT) {
            t.moments.insert(Term::Const(c));
        }
        for f in facts {
            t.collect(f);
        }
        t
    }

    fn collect(&mut self, f: &Formula) {
        match f {
            Formula::Atom(r, args) if r == "prior" && args.len() == 2 => {
                if args.iter().all(Term::is_ground) {
                    self.moments.insert(args[0].clone());
                    self.moments.insert(args[1].clone());
                    self.succ.entry(args[0].clone()).or_default().insert(args[1].clone());
                }
            }
            Formula::And(gs) => gs.iter().for_each(|g| self.collect(g)),
            _ => {}
        }
    }

    /// Strictly later by a chain of `prior` facts.
    pub fn before(&self, a: &Term, b: &Term) -> bool {
        let mut stack: Vec<&Term> = vec![a];
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            for y in self.succ.get(x).into_iter().flatten() {
                if y == b {
                    return true;
                }
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        false
    }

    /// `a ≤ b`: equal or [`before`](Self::before).
    pub fn not_after(&self, a: &Term, b: &Term) -> bool {
        a == b || self.before(a, b)
    }

    /// Every known moment strictly after `a`.
    pub fn later_than(&self, a: &Term) -> Vec<Term> {
        self.moments.iter().filter(|m| self.before(a, m)).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_is_transitive() {
        let c = Term::constant;
        let facts = vec![
            Formula::atom("prior", vec![c("t0"), c("t1")]),
            Formula::and(vec![Formula::atom("prior", vec![c("t1"), c("t2")])]),
        ];
        let o = TimeOrder::from_facts(&Signature::event_calculus(), &facts);
        assert!(o.before(&c("t0"), &c("t2")));
        assert!(!o.before(&c("t2"), &c("t0")));
        assert!(o.not_after(&c("t1"), &c("t1")));
        assert_eq!(o.later_than(&c("t0")), vec![c("t1"), c("t2")]);
    }
}
