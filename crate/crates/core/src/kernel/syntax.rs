//! Terms and formulas of the sorted modal language.

use std::collections::BTreeSet;
use std::fmt;

/// A sorted variable as it appears at a binding site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub sort: String,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            sort: sort.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn app(f: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(f.into(), args)
    }

    pub fn var(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Term::Var(Var::new(name, sort))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Replace free occurrences of `var` (matched by name) with `by`.
    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Var(v) if v.name == var => by.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(var, by)).collect())
            }
        }
    }
}

/// The agent-indexed modal operators that share the `(op agent time body)` shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModalOp {
    Knows,
    Believes,
    Desires,
    Intends,
    Perceives,
}

impl ModalOp {
    pub fn keyword(self) -> &'static str {
        match self {
            ModalOp::Knows => "K",
            ModalOp::Believes => "B",
            ModalOp::Desires => "D",
            ModalOp::Intends => "I",
            ModalOp::Perceives => "perceives",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "K" => ModalOp::Knows,
            "B" => ModalOp::Believes,
            "D" => ModalOp::Desires,
            "I" => ModalOp::Intends,
            "perceives" => ModalOp::Perceives,
            _ => return None,
        })
    }
}

impl fmt::Display for ModalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Formula of the sorted quantified modal logic with the counterfactual connective.
///
/// Falsum and verum are the nullary atoms `false` and `true`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    Modal {
        op: ModalOp,
        agent: Term,
        time: Term,
        body: Box<Formula>,
    },
    Common {
        time: Term,
        body: Box<Formula>,
    },
    Says {
        speaker: Term,
        addressee: Option<Term>,
        time: Term,
        body: Box<Formula>,
    },
    Ought {
        agent: Term,
        time: Term,
        condition: Box<Formula>,
        action: Box<Formula>,
    },
    Counterfactual(Box<Formula>, Box<Formula>),
}

pub const FALSUM: &str = "false";
pub const VERUM: &str = "true";

impl Formula {
    pub fn falsum() -> Self {
        Formula::Atom(FALSUM.into(), Vec::new())
    }

    pub fn verum() -> Self {
        Formula::Atom(VERUM.into(), Vec::new())
    }

    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Atom(name.into(), Vec::new())
    }

    pub fn atom(rel: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(rel.into(), args)
    }

    pub fn is_falsum(&self) -> bool {
        matches!(self, Formula::Atom(r, a) if r == FALSUM && a.is_empty())
    }

    pub fn is_verum(&self) -> bool {
        matches!(self, Formula::Atom(r, a) if r == VERUM && a.is_empty())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: Vec<Formula>) -> Self {
        Formula::And(fs)
    }

    pub fn or(fs: Vec<Formula>) -> Self {
        Formula::Or(fs)
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Var, body: Formula) -> Self {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Self {
        Formula::Exists(v, Box::new(body))
    }

    pub fn modal(op: ModalOp, agent: Term, time: Term, body: Formula) -> Self {
        Formula::Modal {
            op,
            agent,
            time,
            body: Box::new(body),
        }
    }

    pub fn knows(agent: Term, time: Term, body: Formula) -> Self {
        Self::modal(ModalOp::Knows, agent, time, body)
    }

    pub fn believes(agent: Term, time: Term, body: Formula) -> Self {
        Self::modal(ModalOp::Believes, agent, time, body)
    }

    pub fn desires(agent: Term, time: Term, body: Formula) -> Self {
        Self::modal(ModalOp::Desires, agent, time, body)
    }

    pub fn intends(agent: Term, time: Term, body: Formula) -> Self {
        Self::modal(ModalOp::Intends, agent, time, body)
    }

    pub fn common(time: Term, body: Formula) -> Self {
        Formula::Common {
            time,
            body: Box::new(body),
        }
    }

    pub fn ought(agent: Term, time: Term, condition: Formula, action: Formula) -> Self {
        Formula::Ought {
            agent,
            time,
            condition: Box::new(condition),
            action: Box::new(action),
        }
    }

    pub fn cf(antecedent: Formula, consequent: Formula) -> Self {
        Formula::Counterfactual(Box::new(antecedent), Box::new(consequent))
    }

    /// True for every intensional constructor: modal operators, `C`, `S`, `O` and `cf`.
    pub fn is_intensional(&self) -> bool {
        matches!(
            self,
            Formula::Modal { .. }
                | Formula::Common { .. }
                | Formula::Says { .. }
                | Formula::Ought { .. }
                | Formula::Counterfactual(..)
        )
    }

    /// Whether an intensional subformula occurs anywhere inside.
    pub fn has_intensional(&self) -> bool {
        if self.is_intensional() {
            return true;
        }
        match self {
            Formula::Atom(..) | Formula::Eq(..) => false,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.has_intensional(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_intensional),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.has_intensional() || b.has_intensional()
            }
            _ => unreachable!(),
        }
    }

    /// Nullary atoms other than `true`/`false`, i.e. the propositional letters.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Atom(_, args) => args.is_empty(),
            Formula::Not(f) => f.is_propositional(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_propositional),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<Var>) {
        let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<Var>| {
            let mut vs = BTreeSet::new();
            t.collect_vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(&v.name)));
        };
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|t| term(t, bound, out)),
            Formula::Eq(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Counterfactual(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.name.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            Formula::Modal {
                agent, time, body, ..
            } => {
                term(agent, bound, out);
                term(time, bound, out);
                body.collect_free(bound, out);
            }
            Formula::Common { time, body } => {
                term(time, bound, out);
                body.collect_free(bound, out);
            }
            Formula::Says {
                speaker,
                addressee,
                time,
                body,
            } => {
                term(speaker, bound, out);
                if let Some(a) = addressee {
                    term(a, bound, out);
                }
                term(time, bound, out);
                body.collect_free(bound, out);
            }
            Formula::Ought {
                agent,
                time,
                condition,
                action,
            } => {
                term(agent, bound, out);
                term(time, bound, out);
                condition.collect_free(bound, out);
                action.collect_free(bound, out);
            }
        }
    }

    /// Capture-avoiding substitution of a free variable (by name).
    ///
    /// Callers substitute ground terms or terms whose variables do not clash
    /// with binders in `self`; binders shadowing `var` stop the substitution.
    pub fn substitute(&self, var: &str, by: &Term) -> Formula {
        let st = |t: &Term| t.substitute(var, by);
        let sf = |f: &Formula| Box::new(f.substitute(var, by));
        match self {
            Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(st).collect()),
            Formula::Eq(a, b) => Formula::Eq(st(a), st(b)),
            Formula::Not(f) => Formula::Not(sf(f)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(var, by)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(var, by)).collect()),
            Formula::Implies(a, b) => Formula::Implies(sf(a), sf(b)),
            Formula::Iff(a, b) => Formula::Iff(sf(a), sf(b)),
            Formula::Counterfactual(a, b) => Formula::Counterfactual(sf(a), sf(b)),
            Formula::Forall(v, f) | Formula::Exists(v, f) if v.name == var => self.clone(),
            Formula::Forall(v, f) => Formula::Forall(v.clone(), sf(f)),
            Formula::Exists(v, f) => Formula::Exists(v.clone(), sf(f)),
            Formula::Modal {
                op,
                agent,
                time,
                body,
            } => Formula::Modal {
                op: *op,
                agent: st(agent),
                time: st(time),
                body: sf(body),
            },
            Formula::Common { time, body } => Formula::Common {
                time: st(time),
                body: sf(body),
            },
            Formula::Says {
                speaker,
                addressee,
                time,
                body,
            } => Formula::Says {
                speaker: st(speaker),
                addressee: addressee.as_ref().map(st),
                time: st(time),
                body: sf(body),
            },
            Formula::Ought {
                agent,
                time,
                condition,
                action,
            } => Formula::Ought {
                agent: st(agent),
                time: st(time),
                condition: sf(condition),
                action: sf(action),
            },
        }
    }

    /// Nullary relation names occurring in the formula, excluding `true`/`false`.
    pub fn prop_letters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(r, args) = f {
                if args.is_empty() && r != FALSUM && r != VERUM {
                    out.insert(r.clone());
                }
            }
        });
        out
    }

    /// Pre-order visit of every subformula.
    pub fn visit<'a>(&'a self, g: &mut impl FnMut(&'a Formula)) {
        g(self);
        match self {
            Formula::Atom(..) | Formula::Eq(..) => {}
            Formula::Not(f)
            | Formula::Forall(_, f)
            | Formula::Exists(_, f)
            | Formula::Modal { body: f, .. }
            | Formula::Common { body: f, .. }
            | Formula::Says { body: f, .. } => f.visit(g),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.visit(g)),
            Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Counterfactual(a, b)
            | Formula::Ought {
                condition: a,
                action: b,
                ..
            } => {
                a.visit(g);
                b.visit(g);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print::print_formula(self))
    }
}
