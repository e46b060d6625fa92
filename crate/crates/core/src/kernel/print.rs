//! Canonical printer.
//!
//! The printed form is what the reader accepts. [`alpha_key`] prints with
//! bound variables renamed by binding depth, so two formulas are
//! alpha-equivalent exactly when their keys are equal.

use std::fmt::Write;

use super::syntax::{Formula, Term, Var};

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    Printer { canonical: false, bound: Vec::new() }.term(t, &mut out);
    out
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    Printer { canonical: false, bound: Vec::new() }.formula(f, &mut out);
    out
}

/// Alpha-canonical text of a formula.
pub fn alpha_key(f: &Formula) -> String {
    let mut out = String::new();
    Printer { canonical: true, bound: Vec::new() }.formula(f, &mut out);
    out
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    a == b || alpha_key(a) == alpha_key(b)
}

struct Printer {
    canonical: bool,
    bound: Vec<String>,
}

impl Printer {
    fn var(&self, v: &Var, out: &mut String) {
        if !self.canonical {
            out.push_str(&v.name);
            return;
        }
        match self.bound.iter().rposition(|b| b == &v.name) {
            Some(level) => {
                let _ = write!(out, "_{level}");
            }
            None => {
                let _ = write!(out, "?{}:{}", v.name, v.sort);
            }
        }
    }

    fn term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => self.var(v, out),
            Term::Const(c) => out.push_str(c),
            Term::App(f, args) => {
                out.push('(');
                out.push_str(f);
                for a in args {
                    out.push(' ');
                    self.term(a, out);
                }
                out.push(')');
            }
        }
    }

    fn list(&mut self, head: &str, out: &mut String, body: impl FnOnce(&mut Self, &mut String)) {
        out.push('(');
        out.push_str(head);
        body(self, out);
        out.push(')');
    }

    fn formula(&mut self, f: &Formula, out: &mut String) {
        match f {
            Formula::Atom(r, args) if args.is_empty() => out.push_str(r),
            Formula::Atom(r, args) => self.list(r, out, |p, out| {
                for a in args {
                    out.push(' ');
                    p.term(a, out);
                }
            }),
            Formula::Eq(a, b) => self.list("=", out, |p, out| {
                out.push(' ');
                p.term(a, out);
                out.push(' ');
                p.term(b, out);
            }),
            Formula::Not(g) => self.list("not", out, |p, out| {
                out.push(' ');
                p.formula(g, out);
            }),
            Formula::And(gs) | Formula::Or(gs) => {
                let head = if matches!(f, Formula::And(_)) { "and" } else { "or" };
                self.list(head, out, |p, out| {
                    for g in gs {
                        out.push(' ');
                        p.formula(g, out);
                    }
                })
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Counterfactual(a, b) => {
                let head = match f {
                    Formula::Implies(..) => "implies",
                    Formula::Iff(..) => "iff",
                    _ => "cf",
                };
                self.list(head, out, |p, out| {
                    out.push(' ');
                    p.formula(a, out);
                    out.push(' ');
                    p.formula(b, out);
                })
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let head = if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" };
                self.list(head, out, |p, out| {
                    p.bound.push(v.name.clone());
                    out.push_str(" (");
                    p.var(v, out);
                    out.push(' ');
                    out.push_str(&v.sort);
                    out.push_str(") ");
                    p.formula(g, out);
                    p.bound.pop();
                })
            }
            Formula::Modal {
                op,
                agent,
                time,
                body,
            } => self.list(op.keyword(), out, |p, out| {
                out.push(' ');
                p.term(agent, out);
                out.push(' ');
                p.term(time, out);
                out.push(' ');
                p.formula(body, out);
            }),
            Formula::Common { time, body } => self.list("C", out, |p, out| {
                out.push(' ');
                p.term(time, out);
                out.push(' ');
                p.formula(body, out);
            }),
            Formula::Says {
                speaker,
                addressee,
                time,
                body,
            } => self.list("S", out, |p, out| {
                out.push(' ');
                p.term(speaker, out);
                if let Some(a) = addressee {
                    out.push(' ');
                    p.term(a, out);
                }
                out.push(' ');
                p.term(time, out);
                out.push(' ');
                p.formula(body, out);
            }),
            Formula::Ought {
                agent,
                time,
                condition,
                action,
            } => self.list("O", out, |p, out| {
                out.push(' ');
                p.term(agent, out);
                out.push(' ');
                p.term(time, out);
                out.push(' ');
                p.formula(condition, out);
                out.push(' ');
                p.formula(action, out);
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::syntax::Formula as F;

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    #[test]
    fn canonical_forms() {
        let f = F::cf(
            F::not(F::atom("Mortal", vec![c("socrates")])),
            F::not(F::atom("Human", vec![c("socrates")])),
        );
        assert_eq!(
            print_formula(&f),
            "(cf (not (Mortal socrates)) (not (Human socrates)))"
        );
        let g = F::forall(Var::new("x", "Agent"), F::atom("P", vec![Term::var("x", "Agent")]));
        assert_eq!(print_formula(&g), "(forall (x Agent) (P x))");
        assert_eq!(print_formula(&F::knows(c("a"), c("t"), F::prop("P"))), "(K a t P)");
    }

    #[test]
    fn alpha_keys_ignore_bound_names() {
        let fx = F::forall(Var::new("x", "Agent"), F::atom("P", vec![Term::var("x", "Agent")]));
        let fy = F::forall(Var::new("y", "Agent"), F::atom("P", vec![Term::var("y", "Agent")]));
        assert!(alpha_eq(&fx, &fy));
        let free = F::atom("P", vec![Term::var("x", "Agent")]);
        let free_y = F::atom("P", vec![Term::var("y", "Agent")]);
        assert!(!alpha_eq(&free, &free_y));
    }
}
