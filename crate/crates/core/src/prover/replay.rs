//! Mechanical re-verification of a justification.

use std::collections::HashMap;

use thiserror::Error;

use crate::kernel::signature::AGENT;
use crate::kernel::{alpha_eq, extract_context, print_formula, Formula, ModalOp, Signature, Term};

use super::clausify::Clausifier;
use super::fol::Clause;
use super::modal::{
    bridges, close_universally, r14_parts, Closing, Fact, FactOrigin, Justification, Refutation,
    RefutationInput, SchemaRule,
};
use super::resolution::{eq_resolve, factor, paramodulate, resolve, Inference};
use super::shadow::ShadowTable;
use super::time::TimeOrder;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("fact {0}: premise does not match the premise list")]
    Premise(usize),
    #[error("fact {fact}: {rule} does not yield {formula}")]
    Schema { fact: usize, rule: &'static str, formula: String },
    #[error("fact {0}: refers to a later or missing fact")]
    Order(usize),
    #[error("goal is not the closing fact")]
    Goal,
    #[error("refutation input {0} does not match its source")]
    Input(usize),
    #[error("clause c{0} does not follow by its inference")]
    Clause(usize),
    #[error("refutation does not end in the empty clause")]
    NotEmpty,
}

/// Check `j` as a proof of `goal` from `gamma`.
pub fn replay(sig: &Signature, gamma: &[Formula], goal: &Formula, j: &Justification) -> Result<(), ReplayError> {
    if !alpha_eq(&close_universally(goal), &j.goal) {
        return Err(ReplayError::Goal);
    }
    for k in 0..j.facts.len() {
        check_fact(sig, gamma, &j.facts, k)?;
    }
    match &j.closing {
        Closing::GoalIsFact(k) => {
            let f = j.facts.get(*k).ok_or(ReplayError::Goal)?;
            if alpha_eq(&f.formula, &j.goal) {
                Ok(())
            } else {
                Err(ReplayError::Goal)
            }
        }
        Closing::Refutation(r) => check_refutation(sig, &j.facts, &j.goal, r),
    }
}

fn schema_err(fact: usize, rule: SchemaRule, f: &Formula) -> ReplayError {
    ReplayError::Schema { fact, rule: rule.name(), formula: print_formula(f) }
}

fn check_fact(sig: &Signature, gamma: &[Formula], facts: &[Fact], k: usize) -> Result<(), ReplayError> {
    let fact = &facts[k];
    let (rule, from, inner) = match &fact.origin {
        FactOrigin::Premise(i) => {
            return match gamma.get(*i) {
                Some(g) if alpha_eq(g, &fact.formula) => Ok(()),
                _ => Err(ReplayError::Premise(k)),
            };
        }
        FactOrigin::Derived { rule, from, inner } => (*rule, from, inner),
    };
    if from.iter().any(|&i| i >= k) || inner.as_ref().is_some_and(|n| n.premises.iter().any(|&i| i >= k)) {
        return Err(ReplayError::Order(k));
    }
    let src = |i: usize| -> &Formula { &facts[from[i]].formula };
    let f = &fact.formula;
    let bad = || schema_err(k, rule, f);
    let before = || TimeOrder::from_facts(sig, facts[..k].iter().map(|x| &x.formula));
    let ok = match rule {
        SchemaRule::AndElim => matches!(src(0), Formula::And(gs) if gs.iter().any(|g| alpha_eq(g, f))),
        SchemaRule::ForallElim => match src(0) {
            Formula::Forall(v, body) => sig
                .constants_of(&v.sort)
                .into_iter()
                .any(|c| alpha_eq(&body.substitute(&v.name, &Term::Const(c)), f)),
            _ => false,
        },
        SchemaRule::ModusPonens => match src(0) {
            Formula::Implies(a, b) if alpha_eq(b, f) => match inner {
                Some(n) => {
                    let sub_gamma: Vec<Formula> = n.premises.iter().map(|&i| facts[i].formula.clone()).collect();
                    replay(sig, &sub_gamma, a, &n.proof).is_ok()
                }
                None => conjuncts_present(a, &from[1..], facts),
            },
            _ => false,
        },
        SchemaRule::R4 => matches!(src(0), Formula::Modal { op: ModalOp::Knows, body, .. } if alpha_eq(body, f)),
        SchemaRule::CommonElim => match (src(0), f) {
            (Formula::Common { time, body }, Formula::Modal { op: ModalOp::Knows, agent, time: t, body: b }) => {
                t == time
                    && alpha_eq(b, body)
                    && matches!(agent, Term::Const(c) if sig.constants_of(AGENT).contains(c))
            }
            _ => false,
        },
        SchemaRule::R13 => match (src(0), f) {
            (
                Formula::Modal { op: ModalOp::Intends, agent, time, body },
                Formula::Modal { op: ModalOp::Perceives, agent: a2, time: t2, body: b2 },
            ) => agent == a2 && alpha_eq(body, b2) && before().before(time, t2),
            _ => false,
        },
        SchemaRule::R14 => {
            let b_o = src(0);
            let shaped = matches!(b_o, Formula::Modal { op: ModalOp::Believes, agent, time, body }
                if matches!(&**body, Formula::Ought { agent: a2, time: t2, .. } if a2 == agent && t2 == time));
            shaped && {
                let (b_phi, conclusion, o) = r14_parts(b_o);
                alpha_eq(&conclusion, f)
                    && match inner {
                        Some(n) => {
                            let sub_gamma: Vec<Formula> =
                                n.premises.iter().map(|&i| facts[i].formula.clone()).collect();
                            replay(sig, &sub_gamma, &Formula::and(vec![b_phi, o]), &n.proof).is_ok()
                        }
                        None => {
                            from.len() == 3 && alpha_eq(src(1), &b_phi) && alpha_eq(src(2), &o)
                        }
                    }
            }
        }
        SchemaRule::RK | SchemaRule::RB => {
            let op = if rule == SchemaRule::RK { ModalOp::Knows } else { ModalOp::Believes };
            match (f, inner) {
                (Formula::Modal { op: o, agent, time: t2, body: phi }, Some(n)) if *o == op => {
                    let order = before();
                    let mut bodies = Vec::new();
                    let mut fine = true;
                    for &i in &n.premises {
                        match &facts[i].formula {
                            Formula::Modal { op: o1, agent: a1, time: t1, body }
                                if *o1 == op && a1 == agent && order.not_after(t1, t2) =>
                            {
                                bodies.push((**body).clone())
                            }
                            _ => fine = false,
                        }
                    }
                    fine && replay(sig, &bodies, phi, &n.proof).is_ok()
                }
                _ => false,
            }
        }
        SchemaRule::Rcf2 | SchemaRule::Rcf4 => {
            let (ctx, body) = extract_context(src(0));
            match body {
                Formula::Counterfactual(a, b) => {
                    (ctx.is_empty() == (rule == SchemaRule::Rcf2))
                        && from.len() == 2
                        && alpha_eq(src(1), &ctx.wrap((*a).clone()))
                        && alpha_eq(f, &ctx.wrap((*b).clone()))
                }
                _ => false,
            }
        }
    };
    if ok {
        Ok(())
    } else {
        Err(bad())
    }
}

fn conjuncts_present(a: &Formula, support: &[usize], facts: &[Fact]) -> bool {
    if a.is_verum() || support.iter().any(|&i| alpha_eq(&facts[i].formula, a)) {
        return true;
    }
    match a {
        Formula::And(gs) => gs.iter().all(|g| conjuncts_present(g, support, facts)),
        _ => false,
    }
}

fn check_refutation(sig: &Signature, facts: &[Fact], goal: &Formula, r: &Refutation) -> Result<(), ReplayError> {
    let expected_bridges = bridges(
        r.inputs
            .iter()
            .filter(|(i, _)| *i != RefutationInput::Bridge)
            .map(|(_, f)| f),
    );
    for (n, (kind, f)) in r.inputs.iter().enumerate() {
        let ok = match kind {
            RefutationInput::Fact(k) => facts.get(*k).is_some_and(|x| alpha_eq(&x.formula, f)),
            RefutationInput::NegatedGoal => alpha_eq(f, &Formula::not(goal.clone())),
            RefutationInput::Bridge => expected_bridges.iter().any(|b| alpha_eq(b, f)),
        };
        if !ok {
            return Err(ReplayError::Input(n));
        }
    }
    let mut table = r.base_table.clone();
    let mut shadows = ShadowTable::new();
    let mut input_clauses: Vec<Vec<Clause>> = Vec::new();
    {
        let mut cl = Clausifier::new(&mut table, sig);
        for (_, f) in &r.inputs {
            input_clauses.push(cl.clausify(&shadows.shadow(f)));
        }
    }
    let t = &r.table;
    let mut known: HashMap<usize, &Clause> = HashMap::new();
    for s in &r.steps {
        let get = |i: usize| known.get(&i).copied().ok_or(ReplayError::Clause(s.id));
        let derived = match &s.inference {
            Inference::Input { formula } => {
                let ok = input_clauses.get(*formula).is_some_and(|cs| cs.contains(&s.clause));
                if !ok {
                    return Err(ReplayError::Clause(s.id));
                }
                Some(s.clause.clone())
            }
            Inference::Resolve { left, left_lit, right, right_lit } => {
                resolve(t, get(*left)?, *left_lit, get(*right)?, *right_lit)
            }
            Inference::Factor { clause, i, j } => factor(t, get(*clause)?, *i, *j),
            Inference::EqResolve { clause, lit } => eq_resolve(t, get(*clause)?, *lit),
            Inference::Paramodulate { from, from_lit, reversed, into, into_lit, arg, path } => {
                paramodulate(t, get(*from)?, *from_lit, *reversed, get(*into)?, *into_lit, *arg, path)
            }
        };
        if derived.as_ref() != Some(&s.clause) {
            return Err(ReplayError::Clause(s.id));
        }
        known.insert(s.id, &s.clause);
    }
    match r.steps.last() {
        Some(s) if s.clause.is_empty() => Ok(()),
        _ => Err(ReplayError::NotEmpty),
    }
}
