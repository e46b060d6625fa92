//! Shadowing: intensional subformulas become opaque first-order atoms.
//!
//! Each maximal intensional subformula is split into a skeleton and a list of
//! argument terms. Every maximal term that mentions no variable bound inside
//! the subformula is cut out and replaced by a hole. The skeleton, printed
//! alpha-canonically, names the shadow predicate and the cut-out terms are its
//! arguments. Alpha-equivalent subformulas therefore map to the same atom, and
//! a quantified variable outside the subformula stays visible to unification.

use std::collections::BTreeMap;

use crate::kernel::{alpha_key, Formula, Term, Var};

pub const SHADOW_OPEN: char = '⟦';
pub const SHADOW_CLOSE: char = '⟧';
const HOLE_SORT: &str = "_";

pub fn is_shadow_name(name: &str) -> bool {
    name.starts_with(SHADOW_OPEN)
}

/// Remembers the skeleton behind every shadow predicate, for display.
#[derive(Clone, Debug, Default)]
pub struct ShadowTable {
    templates: BTreeMap<String, Formula>,
}

impl ShadowTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The intensional formula a shadow atom stands for.
    pub fn unshadow(&self, name: &str, args: &[Term]) -> Option<Formula> {
        let t = self.templates.get(name)?;
        Some(
            args.iter()
                .enumerate()
                .fold(t.clone(), |f, (i, a)| f.substitute(&hole(i), a)),
        )
    }

    /// Replace every maximal intensional subformula of `f` by its shadow atom.
    pub fn shadow(&mut self, f: &Formula) -> Formula {
        if f.is_intensional() {
            let (name, args) = self.atom_for(f);
            return Formula::Atom(name, args);
        }
        match f {
            Formula::Atom(..) | Formula::Eq(..) => f.clone(),
            Formula::Not(g) => Formula::not(self.shadow(g)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| self.shadow(g)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.shadow(g)).collect()),
            Formula::Implies(a, b) => Formula::implies(self.shadow(a), self.shadow(b)),
            Formula::Iff(a, b) => Formula::iff(self.shadow(a), self.shadow(b)),
            Formula::Forall(v, g) => Formula::forall(v.clone(), self.shadow(g)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), self.shadow(g)),
            _ => unreachable!("intensional handled above"),
        }
    }

    /// Shadow predicate name and arguments for an intensional formula.
    pub fn atom_for(&mut self, f: &Formula) -> (String, Vec<Term>) {
        let mut cut = Cutter { bound: Vec::new(), args: Vec::new() };
        let template = cut.formula(f);
        let name = format!("{SHADOW_OPEN}{}{SHADOW_CLOSE}", alpha_key(&template));
        self.templates.entry(name.clone()).or_insert(template);
        (name, cut.args)
    }
}

/// Shadow atom for `f` without keeping the table.
pub fn shadow(f: &Formula) -> Formula {
    ShadowTable::new().shadow(f)
}

fn hole(i: usize) -> String {
    format!("#{i}")
}

struct Cutter {
    bound: Vec<String>,
    args: Vec<Term>,
}

impl Cutter {
    fn mentions_bound(&self, t: &Term) -> bool {
        match t {
            Term::Var(v) => self.bound.contains(&v.name),
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| self.mentions_bound(a)),
        }
    }

    fn term(&mut self, t: &Term) -> Term {
        if !self.mentions_bound(t) {
            let h = Term::Var(Var::new(hole(self.args.len()), HOLE_SORT));
            self.args.push(t.clone());
            return h;
        }
        match t {
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.term(a)).collect()),
            _ => t.clone(),
        }
    }

    fn scoped(&mut self, v: &Var, g: &Formula) -> Formula {
        self.bound.push(v.name.clone());
        let out = self.formula(g);
        self.bound.pop();
        out
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(|a| self.term(a)).collect()),
            Formula::Eq(a, b) => {
                let a = self.term(a);
                Formula::Eq(a, self.term(b))
            }
            Formula::Not(g) => Formula::not(self.formula(g)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| self.formula(g)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.formula(g)).collect()),
            Formula::Implies(a, b) => {
                let a = self.formula(a);
                Formula::implies(a, self.formula(b))
            }
            Formula::Iff(a, b) => {
                let a = self.formula(a);
                Formula::iff(a, self.formula(b))
            }
            Formula::Counterfactual(a, b) => {
                let a = self.formula(a);
                Formula::cf(a, self.formula(b))
            }
            Formula::Forall(v, g) => Formula::forall(v.clone(), self.scoped(v, g)),
            Formula::Exists(v, g) => Formula::exists(v.clone(), self.scoped(v, g)),
            Formula::Modal { op, agent, time, body } => {
                let agent = self.term(agent);
                let time = self.term(time);
                Formula::modal(*op, agent, time, self.formula(body))
            }
            Formula::Common { time, body } => {
                let time = self.term(time);
                Formula::common(time, self.formula(body))
            }
            Formula::Says { speaker, addressee, time, body } => {
                let speaker = self.term(speaker);
                let addressee = addressee.as_ref().map(|a| self.term(a));
                let time = self.term(time);
                Formula::Says { speaker, addressee, time, body: Box::new(self.formula(body)) }
            }
            Formula::Ought { agent, time, condition, action } => {
                let agent = self.term(agent);
                let time = self.term(time);
                let condition = self.formula(condition);
                Formula::ought(agent, time, condition, self.formula(action))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Formula as F;

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    #[test]
    fn knowledge_becomes_an_atom() {
        let k = F::knows(c("a"), c("t"), F::prop("P"));
        let Formula::Atom(name, args) = shadow(&k) else { panic!() };
        assert!(is_shadow_name(&name));
        assert_eq!(args, vec![c("a"), c("t")]);
    }

    #[test]
    fn conjunction_of_modal_and_extensional() {
        let f = F::and(vec![F::knows(c("a"), c("t"), F::prop("P")), F::prop("Q")]);
        let Formula::And(parts) = shadow(&f) else { panic!() };
        assert!(matches!(&parts[0], Formula::Atom(n, _) if is_shadow_name(n)));
        assert_eq!(parts[1], F::prop("Q"));
    }

    #[test]
    fn alpha_variants_share_an_atom() {
        let x = Var::new("x", "Agent");
        let y = Var::new("y", "Agent");
        let fx = F::believes(c("a"), c("t"), F::forall(x.clone(), F::atom("P", vec![Term::Var(x)])));
        let fy = F::believes(c("a"), c("t"), F::forall(y.clone(), F::atom("P", vec![Term::Var(y)])));
        assert_eq!(shadow(&fx), shadow(&fy));
        let other = F::believes(c("a"), c("t"), F::prop("P"));
        assert_ne!(shadow(&fx), shadow(&other));
    }

    #[test]
    fn distinct_bodies_get_distinct_predicates() {
        let a = shadow(&F::knows(c("a"), c("t"), F::prop("P")));
        let b = shadow(&F::knows(c("a"), c("t"), F::prop("Q")));
        let (Formula::Atom(na, _), Formula::Atom(nb, _)) = (a, b) else { panic!() };
        assert_ne!(na, nb);
    }

    #[test]
    fn round_trip_through_the_table() {
        let mut tab = ShadowTable::new();
        let f = F::knows(c("a"), c("t"), F::atom("Murderer", vec![Term::app("owner", vec![c("gun")])]));
        let Formula::Atom(name, args) = tab.shadow(&f) else { panic!() };
        assert_eq!(tab.unshadow(&name, &args), Some(f));
    }
}
