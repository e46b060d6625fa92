//! Modal saturation and the justification it produces.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write;

use serde::Serialize;

use crate::kernel::signature::AGENT;
use crate::kernel::{alpha_key, extract_context, print_formula, Formula, ModalOp, Signature, Term};

use super::budget::Deadline;
use super::clausify::Clausifier;
use super::fol::{Clause, Show, SymbolTable};
use super::resolution::{Engine, Inference, Outcome};
use super::shadow::ShadowTable;
use super::time::TimeOrder;

const FACT_CAP: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SchemaRule {
    AndElim,
    ForallElim,
    ModusPonens,
    CommonElim,
    R4,
    R13,
    R14,
    RK,
    RB,
    Rcf2,
    Rcf4,
}

impl SchemaRule {
    pub fn name(self) -> &'static str {
        match self {
            SchemaRule::AndElim => "FO and-elimination",
            SchemaRule::ForallElim => "FO forall-elimination",
            SchemaRule::ModusPonens => "FO modus ponens",
            SchemaRule::CommonElim => "C-elimination",
            SchemaRule::R4 => "R_4",
            SchemaRule::R13 => "R_13",
            SchemaRule::R14 => "R_14",
            SchemaRule::RK => "R_K",
            SchemaRule::RB => "R_B",
            SchemaRule::Rcf2 => "R_cf2",
            SchemaRule::Rcf4 => "R_cf4",
        }
    }
}

/// A sub-proof used as a side condition of a schema step.
#[derive(Clone, Debug)]
pub struct Inner {
    /// Facts of the enclosing justification that served as premises, in order.
    /// For R_K and R_B the premise is the body under the operator.
    pub premises: Vec<usize>,
    pub proof: Justification,
}

#[derive(Clone, Debug)]
pub enum FactOrigin {
    Premise(usize),
    Derived { rule: SchemaRule, from: Vec<usize>, inner: Option<Box<Inner>> },
}

#[derive(Clone, Debug)]
pub struct Fact {
    pub formula: Formula,
    pub origin: FactOrigin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefutationInput {
    Fact(usize),
    NegatedGoal,
    /// `∀x̄ ((φ↪ψ) → (φ→ψ))`, an instance of ↪-elimination.
    Bridge,
}

#[derive(Clone, Debug)]
pub struct RefutationStep {
    pub id: usize,
    pub clause: Clause,
    pub inference: Inference,
}

#[derive(Clone, Debug)]
pub struct Refutation {
    pub inputs: Vec<(RefutationInput, Formula)>,
    /// Symbols before clausification; replay re-clausifies from here.
    pub base_table: SymbolTable,
    pub table: SymbolTable,
    /// The ancestry of the empty clause, in derivation order.
    pub steps: Vec<RefutationStep>,
}

#[derive(Clone, Debug)]
pub enum Closing {
    GoalIsFact(usize),
    Refutation(Refutation),
}

#[derive(Clone, Debug)]
pub struct Justification {
    pub facts: Vec<Fact>,
    pub goal: Formula,
    pub closing: Closing,
}

impl Justification {
    /// Indices of the premises the proof depends on.
    pub fn used_premises(&self) -> Vec<usize> {
        let mut stack: Vec<usize> = match &self.closing {
            Closing::GoalIsFact(k) => vec![*k],
            Closing::Refutation(r) => r
                .steps
                .iter()
                .filter_map(|s| match s.inference {
                    Inference::Input { formula } => match r.inputs[formula].0 {
                        RefutationInput::Fact(k) => Some(k),
                        _ => None,
                    },
                    _ => None,
                })
                .collect(),
        };
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        while let Some(k) = stack.pop() {
            if !seen.insert(k) {
                continue;
            }
            match &self.facts[k].origin {
                FactOrigin::Premise(i) => out.push(*i),
                FactOrigin::Derived { from, .. } => stack.extend(from.iter().copied()),
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Schema steps actually used, in derivation order.
    pub fn used_facts(&self) -> Vec<usize> {
        let mut stack: Vec<usize> = match &self.closing {
            Closing::GoalIsFact(k) => vec![*k],
            Closing::Refutation(r) => r
                .inputs
                .iter()
                .filter_map(|(i, _)| match i {
                    RefutationInput::Fact(k) => Some(*k),
                    _ => None,
                })
                .collect(),
        };
        let mut seen = HashSet::new();
        while let Some(k) = stack.pop() {
            if seen.insert(k) {
                if let FactOrigin::Derived { from, .. } = &self.facts[k].origin {
                    stack.extend(from.iter().copied());
                }
            }
        }
        let mut v: Vec<usize> = seen.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Human-readable listing of the schema steps and the refutation.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        for k in self.used_facts() {
            let f = &self.facts[k];
            match &f.origin {
                FactOrigin::Premise(i) => {
                    let _ = writeln!(out, "{pad}[{k}] {}  (premise {i})", print_formula(&f.formula));
                }
                FactOrigin::Derived { rule, from, inner } => {
                    let _ = writeln!(
                        out,
                        "{pad}[{k}] {}  ({} from {:?})",
                        print_formula(&f.formula),
                        rule.name(),
                        from
                    );
                    if let Some(inner) = inner {
                        inner.proof.render_into(out, indent + 1);
                    }
                }
            }
        }
        match &self.closing {
            Closing::GoalIsFact(k) => {
                let _ = writeln!(out, "{pad}goal is [{k}]");
            }
            Closing::Refutation(r) => {
                for s in &r.steps {
                    let how = match &s.inference {
                        Inference::Input { formula } => match &r.inputs[*formula].0 {
                            RefutationInput::Fact(k) => format!("clause of [{k}]"),
                            RefutationInput::NegatedGoal => "clause of negated goal".into(),
                            RefutationInput::Bridge => "clause of cf-elimination instance".into(),
                        },
                        inf => format!("{} {:?}", inf.rule_name(), inf.parents()),
                    };
                    let _ = writeln!(out, "{pad}  c{}: {}  ({how})", s.id, Show(&r.table, &s.clause));
                }
            }
        }
    }
}

pub(crate) struct Attempt {
    pub proof: Option<Justification>,
    pub complete: bool,
}

pub(crate) fn close_universally(f: &Formula) -> Formula {
    f.free_vars().into_iter().rev().fold(f.clone(), |acc, v| Formula::forall(v, acc))
}

/// Maximal intensional subformulas reachable through first-order connectives.
pub(crate) fn maximal_intensional<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    if f.is_intensional() {
        out.push(f);
        return;
    }
    match f {
        Formula::Atom(..) | Formula::Eq(..) => {}
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => maximal_intensional(g, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| maximal_intensional(g, out)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            maximal_intensional(a, out);
            maximal_intensional(b, out);
        }
        _ => unreachable!(),
    }
}

/// The closed ↪-elimination instances for extensional counterfactuals in `fs`.
pub(crate) fn bridges<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vec<Formula> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for f in fs {
        let mut subs = Vec::new();
        maximal_intensional(f, &mut subs);
        for s in subs {
            if let Formula::Counterfactual(a, b) = s {
                let ax = Formula::implies(s.clone(), Formula::implies((**a).clone(), (**b).clone()));
                let ax = close_universally(&ax);
                if seen.insert(alpha_key(&ax)) {
                    out.push(ax);
                }
            }
        }
    }
    out
}

/// Shadow, clausify and refute. Returns the outcome and, when refuted, the trace.
pub(crate) fn refute(
    sig: &Signature,
    mut inputs: Vec<(RefutationInput, Formula)>,
    deadline: &Deadline,
    max_clauses: Option<usize>,
) -> (Outcome, Option<Refutation>) {
    let extra = bridges(inputs.iter().map(|(_, f)| f));
    inputs.extend(extra.into_iter().map(|b| (RefutationInput::Bridge, b)));
    let mut table = SymbolTable::new(sig);
    let base_table = table.clone();
    let mut shadows = ShadowTable::new();
    let mut clauses = Vec::new();
    {
        let mut cl = Clausifier::new(&mut table, sig);
        for (i, (_, f)) in inputs.iter().enumerate() {
            for c in cl.clausify(&shadows.shadow(f)) {
                clauses.push((i, c));
            }
        }
    }
    let mut engine = Engine::new(table, max_clauses);
    for (i, c) in clauses {
        engine.add(c, Inference::Input { formula: i });
    }
    let outcome = engine.run(deadline);
    let trace = match outcome {
        Outcome::Refuted(e) => {
            let steps = engine
                .ancestry(e)
                .into_iter()
                .map(|id| RefutationStep {
                    id,
                    clause: engine.store[id].clause.clone(),
                    inference: engine.store[id].inference.clone(),
                })
                .collect();
            Some(Refutation { inputs, base_table, table: engine.table, steps })
        }
        _ => None,
    };
    (outcome, trace)
}

pub(crate) fn prove_at(
    sig: &Signature,
    gamma: &[Formula],
    goal: &Formula,
    deadline: &Deadline,
    depth: u32,
    max_clauses: Option<usize>,
) -> Attempt {
    let goal = close_universally(goal);
    let mut sat = Saturator::new(sig, gamma, deadline, depth, max_clauses);
    let intensional = goal.has_intensional() || gamma.iter().any(Formula::has_intensional);
    if intensional {
        sat.forward();
        let rounds = depth.max(1);
        let mut round = 0;
        loop {
            if let Some(k) = sat.lookup(&goal) {
                return sat.finish(goal, Closing::GoalIsFact(k));
            }
            if deadline.expired() {
                return Attempt { proof: None, complete: false };
            }
            if round == rounds {
                sat.complete = false;
                break;
            }
            round += 1;
            let progress = sat.expensive(&goal);
            sat.forward();
            if !progress {
                break;
            }
        }
    } else if let Some(k) = sat.lookup(&goal) {
        return sat.finish(goal, Closing::GoalIsFact(k));
    }
    let mut inputs: Vec<(RefutationInput, Formula)> = sat
        .facts
        .iter()
        .enumerate()
        .map(|(k, f)| (RefutationInput::Fact(k), f.formula.clone()))
        .collect();
    if !goal.is_falsum() {
        inputs.push((RefutationInput::NegatedGoal, Formula::not(goal.clone())));
    }
    let (outcome, trace) = refute(sig, inputs, deadline, max_clauses);
    match trace {
        Some(r) => sat.finish(goal, Closing::Refutation(r)),
        None => Attempt { proof: None, complete: sat.complete && outcome == Outcome::Saturated },
    }
}

struct Saturator<'a> {
    sig: &'a Signature,
    facts: Vec<Fact>,
    keys: HashMap<String, usize>,
    queue: VecDeque<usize>,
    implications: Vec<usize>,
    obligations: Vec<usize>,
    counterfactuals: Vec<usize>,
    intentions: Vec<usize>,
    settled: HashSet<usize>,
    tried: HashMap<String, usize>,
    deadline: &'a Deadline,
    depth: u32,
    max_clauses: Option<usize>,
    complete: bool,
}

impl<'a> Saturator<'a> {
    fn new(
        sig: &'a Signature,
        gamma: &[Formula],
        deadline: &'a Deadline,
        depth: u32,
        max_clauses: Option<usize>,
    ) -> Self {
        let mut s = Saturator {
            sig,
            facts: Vec::new(),
            keys: HashMap::new(),
            queue: VecDeque::new(),
            implications: Vec::new(),
            obligations: Vec::new(),
            counterfactuals: Vec::new(),
            intentions: Vec::new(),
            settled: HashSet::new(),
            tried: HashMap::new(),
            deadline,
            depth,
            max_clauses,
            complete: true,
        };
        for (i, g) in gamma.iter().enumerate() {
            // Duplicated premises stay separate so premise indices line up.
            let k = s.facts.len();
            s.keys.entry(alpha_key(g)).or_insert(k);
            s.facts.push(Fact { formula: g.clone(), origin: FactOrigin::Premise(i) });
            s.queue.push_back(k);
        }
        s
    }

    fn finish(self, goal: Formula, closing: Closing) -> Attempt {
        Attempt { proof: Some(Justification { facts: self.facts, goal, closing }), complete: true }
    }

    fn lookup(&self, f: &Formula) -> Option<usize> {
        self.keys.get(&alpha_key(f)).copied()
    }

    fn add(&mut self, formula: Formula, rule: SchemaRule, from: Vec<usize>, inner: Option<Inner>) -> bool {
        let key = alpha_key(&formula);
        if self.keys.contains_key(&key) {
            return false;
        }
        if self.facts.len() >= FACT_CAP {
            self.complete = false;
            return false;
        }
        let k = self.facts.len();
        self.keys.insert(key, k);
        self.facts.push(Fact {
            formula,
            origin: FactOrigin::Derived { rule, from, inner: inner.map(Box::new) },
        });
        self.queue.push_back(k);
        true
    }

    /// Facts establishing `f` syntactically: `f` itself, or all conjuncts.
    fn established(&self, f: &Formula) -> Option<Vec<usize>> {
        if f.is_verum() {
            return Some(Vec::new());
        }
        if let Some(k) = self.lookup(f) {
            return Some(vec![k]);
        }
        match f {
            Formula::And(gs) => {
                let mut out = Vec::new();
                for g in gs {
                    out.extend(self.established(g)?);
                }
                Some(out)
            }
            _ => None,
        }
    }

    fn order(&self) -> TimeOrder {
        TimeOrder::from_facts(self.sig, self.facts.iter().map(|f| &f.formula))
    }

    /// Single-premise rules, then two-premise rules, until nothing changes.
    fn forward(&mut self) {
        loop {
            while let Some(k) = self.queue.pop_front() {
                self.unary(k);
            }
            let mut progress = false;
            for k in self.implications.clone() {
                if self.settled.contains(&k) {
                    continue;
                }
                let Formula::Implies(a, b) = self.facts[k].formula.clone() else { continue };
                if let Some(support) = self.established(&a) {
                    self.settled.insert(k);
                    let mut from = vec![k];
                    from.extend(support);
                    progress |= self.add(*b, SchemaRule::ModusPonens, from, None);
                }
            }
            for k in self.obligations.clone() {
                if self.settled.contains(&k) {
                    continue;
                }
                let (phi, conclusion, o) = r14_parts(&self.facts[k].formula);
                if let (Some(kb), Some(ko)) = (self.lookup(&phi), self.lookup(&o)) {
                    self.settled.insert(k);
                    progress |= self.add(conclusion, SchemaRule::R14, vec![k, kb, ko], None);
                }
            }
            for k in self.counterfactuals.clone() {
                let (ctx, body) = extract_context(&self.facts[k].formula);
                let Formula::Counterfactual(a, b) = body else { continue };
                if let Some(ka) = self.lookup(&ctx.wrap(*a)) {
                    let rule = if ctx.is_empty() { SchemaRule::Rcf2 } else { SchemaRule::Rcf4 };
                    progress |= self.add(ctx.wrap(*b), rule, vec![k, ka], None);
                }
            }
            if !self.intentions.is_empty() {
                let order = self.order();
                for k in self.intentions.clone() {
                    let Formula::Modal { agent, time, body, .. } = self.facts[k].formula.clone() else {
                        continue;
                    };
                    for later in order.later_than(&time) {
                        let p = Formula::modal(ModalOp::Perceives, agent.clone(), later, (*body).clone());
                        progress |= self.add(p, SchemaRule::R13, vec![k], None);
                    }
                }
            }
            if !progress && self.queue.is_empty() {
                break;
            }
        }
    }

    fn unary(&mut self, k: usize) {
        let f = self.facts[k].formula.clone();
        if !f.has_intensional() {
            return;
        }
        match &f {
            Formula::And(gs) => {
                for g in gs {
                    self.add(g.clone(), SchemaRule::AndElim, vec![k], None);
                }
            }
            Formula::Forall(v, body) => {
                for c in self.sig.constants_of(&v.sort) {
                    let inst = body.substitute(&v.name, &Term::Const(c));
                    self.add(inst, SchemaRule::ForallElim, vec![k], None);
                }
            }
            Formula::Implies(_, b) if b.has_intensional() => self.implications.push(k),
            Formula::Modal { op: ModalOp::Knows, body, .. } => {
                self.add((**body).clone(), SchemaRule::R4, vec![k], None);
            }
            Formula::Modal { op: ModalOp::Intends, .. } => self.intentions.push(k),
            Formula::Common { time, body } => {
                for a in self.sig.constants_of(AGENT) {
                    let kf = Formula::knows(Term::Const(a), time.clone(), (**body).clone());
                    self.add(kf, SchemaRule::CommonElim, vec![k], None);
                }
            }
            _ => {}
        }
        if let Formula::Modal { op: ModalOp::Believes, agent, time, body } = &f {
            if let Formula::Ought { agent: a2, time: t2, .. } = &**body {
                if a2 == agent && t2 == time {
                    self.obligations.push(k);
                }
            }
        }
        if matches!(extract_context(&f).1, Formula::Counterfactual(..)) {
            self.counterfactuals.push(k);
        }
    }

    /// One pass of the rules whose side conditions need a sub-proof.
    fn expensive(&mut self, goal: &Formula) -> bool {
        let mut progress = false;
        for k in self.implications.clone() {
            if self.settled.contains(&k) || self.deadline.expired() {
                continue;
            }
            let Formula::Implies(a, b) = self.facts[k].formula.clone() else { continue };
            if let Some((used, inner)) = self.discharge(&a) {
                self.settled.insert(k);
                let mut from = vec![k];
                from.extend(used);
                progress |= self.add(*b, SchemaRule::ModusPonens, from, Some(inner));
            }
        }
        for k in self.obligations.clone() {
            if self.settled.contains(&k) || self.deadline.expired() {
                continue;
            }
            let (phi, conclusion, o) = r14_parts(&self.facts[k].formula);
            if let Some((used, inner)) = self.discharge(&Formula::and(vec![phi, o])) {
                self.settled.insert(k);
                let mut from = vec![k];
                from.extend(used);
                progress |= self.add(conclusion, SchemaRule::R14, from, Some(inner));
            }
        }
        let mut targets: Vec<Formula> = Vec::new();
        {
            let mut subs = Vec::new();
            maximal_intensional(goal, &mut subs);
            for f in &self.facts {
                maximal_intensional(&f.formula, &mut subs);
            }
            let mut seen = HashSet::new();
            for s in subs {
                if matches!(s, Formula::Modal { op: ModalOp::Knows | ModalOp::Believes, .. })
                    && s.is_closed()
                    && self.lookup(s).is_none()
                    && seen.insert(alpha_key(s))
                {
                    targets.push(s.clone());
                }
            }
        }
        for t in targets {
            if self.deadline.expired() {
                self.complete = false;
                break;
            }
            progress |= self.modal_closure(&t);
        }
        progress
    }

    /// R_K / R_B for one target `op(a, t2, φ)`.
    fn modal_closure(&mut self, target: &Formula) -> bool {
        let Formula::Modal { op, agent, time: t2, body: phi } = target else { return false };
        let order = self.order();
        let premises: Vec<usize> = (0..self.facts.len())
            .filter(|&k| match &self.facts[k].formula {
                Formula::Modal { op: o, agent: a, time: t1, .. } => {
                    o == op && a == agent && order.not_after(t1, t2)
                }
                _ => false,
            })
            .collect();
        if premises.is_empty() {
            return false;
        }
        let key = alpha_key(target);
        if self.tried.get(&key) == Some(&premises.len()) {
            return false;
        }
        self.tried.insert(key, premises.len());
        if self.depth == 0 {
            self.complete = false;
            return false;
        }
        let bodies: Vec<Formula> = premises
            .iter()
            .map(|&k| match &self.facts[k].formula {
                Formula::Modal { body, .. } => (**body).clone(),
                _ => unreachable!(),
            })
            .collect();
        let sub = self.deadline.share(0.5);
        let attempt = prove_at(self.sig, &bodies, phi, &sub, self.depth - 1, self.max_clauses);
        if !attempt.complete {
            self.complete = false;
        }
        let Some(proof) = attempt.proof else { return false };
        let from = proof.used_premises().into_iter().map(|i| premises[i]).collect();
        let rule = if *op == ModalOp::Knows { SchemaRule::RK } else { SchemaRule::RB };
        self.add(target.clone(), rule, from, Some(Inner { premises, proof }))
    }

    /// First-order proof of `goal` from the current facts.
    fn discharge(&mut self, goal: &Formula) -> Option<(Vec<usize>, Inner)> {
        let premises: Vec<usize> = (0..self.facts.len()).collect();
        let inputs = self
            .facts
            .iter()
            .enumerate()
            .map(|(k, f)| (RefutationInput::Fact(k), f.formula.clone()))
            .chain(std::iter::once((RefutationInput::NegatedGoal, Formula::not(goal.clone()))))
            .collect();
        let sub = self.deadline.share(0.25);
        let (outcome, trace) = refute(self.sig, inputs, &sub, self.max_clauses);
        match trace {
            Some(r) => {
                let facts = self
                    .facts
                    .iter()
                    .enumerate()
                    .map(|(k, f)| Fact { formula: f.formula.clone(), origin: FactOrigin::Premise(k) })
                    .collect();
                let proof = Justification { facts, goal: goal.clone(), closing: Closing::Refutation(r) };
                Some((proof.used_premises(), Inner { premises, proof }))
            }
            None => {
                if outcome != Outcome::Saturated {
                    self.complete = false;
                }
                None
            }
        }
    }
}

/// For `B(a,t,O(a,t,φ,χ))`: the belief `B(a,t,φ)`, the conclusion
/// `K(a,t,I(a,t,χ))` and the bare obligation.
pub(crate) fn r14_parts(f: &Formula) -> (Formula, Formula, Formula) {
    let Formula::Modal { agent, time, body, .. } = f else { unreachable!() };
    let Formula::Ought { condition, action, .. } = &**body else { unreachable!() };
    let b_phi = Formula::believes(agent.clone(), time.clone(), (**condition).clone());
    let conclusion = Formula::knows(
        agent.clone(),
        time.clone(),
        Formula::intends(agent.clone(), time.clone(), (**action).clone()),
    );
    (b_phi, conclusion, (**body).clone())
}
