//! Situations, utilities and the clause-5 formulas of the doctrine of double effect.
//!
//! A dilemma knowledge base is an ordinary problem file with a trailing
//! `(dde ...)` block:
//!
//! ```text
//! (dde (agent I) (now t) (next t1) (situation s) (action alphaD)
//!      (mu dead1 -1) (mu saved5 5))
//! ```
//!
//! `next` names the moment after `now`. The `mu` entries give the utility of
//! every declared fluent constant.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::counterfactual::{prove_counterfactual_in_context, CfConfig, CfError, CfResult};
use crate::kernel::signature::{ACTION_TYPE, AGENT, FLUENT, MOMENT, SITUATION};
use crate::kernel::{
    extract_context, parse_problem_with, ContextOp, Decl, Formula, ModalContext, ParseError,
    Problem, SExpr, Signature, SortError, Term, Var,
};
use crate::prover::{prove, Budget, ProofOutcome};

/// Relation tying an action type to the situation that sanctions it.
pub const ACTION_SIT: &str = "actionSit";
/// Fluent-forming function: agent is in situation.
pub const IN: &str = "in";
/// External hook: the action is compliant with clauses one to four.
pub const DDE_COMPLIANT: &str = "ddeCompliant";

#[derive(Debug, Error)]
pub enum EthicsError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error(transparent)]
    Counterfactual(#[from] CfError),
    #[error("missing `(dde ...)` block")]
    MissingBlock,
    #[error("malformed dde entry `{0}`")]
    BadEntry(String),
    #[error("dde block lacks `({0} ...)`")]
    MissingEntry(&'static str),
    #[error("fluent `{0}` has no utility")]
    MissingUtility(String),
    #[error("`{name}` is not a declared {sort} constant")]
    Undeclared { name: String, sort: &'static str },
}

/// Declare the situation symbols on top of the event-calculus core.
pub fn situation_prelude(sig: &mut Signature) -> Result<(), SortError> {
    sig.ensure(Decl::Func { name: IN.into(), args: vec![AGENT.into(), SITUATION.into()], result: FLUENT.into() })?;
    sig.ensure(Decl::Rel {
        name: ACTION_SIT.into(),
        args: vec![AGENT.into(), ACTION_TYPE.into(), SITUATION.into(), MOMENT.into()],
    })?;
    sig.ensure(Decl::Rel { name: DDE_COMPLIANT.into(), args: vec![ACTION_TYPE.into()] })
}

fn c(name: &str) -> Term {
    Term::constant(name)
}

fn act(agent: &Term, alpha: &Term) -> Term {
    Term::app("action", vec![agent.clone(), alpha.clone()])
}

fn holds_in(agent: &Term, sigma: &Term, t: &Term) -> Formula {
    Formula::atom("holds", vec![Term::app(IN, vec![agent.clone(), sigma.clone()]), t.clone()])
}

fn happens(agent: &Term, alpha: &Term, t: &Term) -> Formula {
    Formula::atom("happens", vec![act(agent, alpha), t.clone()])
}

/// `∀a ∀α ∀t (happens(action(a,α),t) → ∃σ (holds(in(a,σ),t) ∧ actionSit(a,α,σ,t)))`.
pub fn sanctioning_axiom() -> Formula {
    let a = Var::new("a", AGENT);
    let al = Var::new("alpha", ACTION_TYPE);
    let t = Var::new("t", MOMENT);
    let s = Var::new("sigma", SITUATION);
    let (ta, tal, tt, ts) = (Term::Var(a.clone()), Term::Var(al.clone()), Term::Var(t.clone()), Term::Var(s.clone()));
    let body = Formula::implies(
        happens(&ta, &tal, &tt),
        Formula::exists(
            s,
            Formula::and(vec![
                holds_in(&ta, &ts, &tt),
                Formula::atom(ACTION_SIT, vec![ta.clone(), tal.clone(), ts.clone(), tt.clone()]),
            ]),
        ),
    );
    Formula::forall(a, Formula::forall(al, Formula::forall(t, body)))
}

#[derive(Clone, Debug)]
pub struct DilemmaKb {
    pub problem: Problem,
    pub agent: String,
    pub now: String,
    pub next: String,
    pub situation: String,
    pub action: String,
    /// Utility of every fluent constant, in declaration order of the block.
    pub mu: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause5 {
    A,
    B,
}

impl fmt::Display for Clause5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause5::A => "C5a",
            Clause5::B => "C5b",
        })
    }
}

fn parse_rational(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (f64, f64) = (n.parse().ok()?, d.parse().ok()?);
            (d != 0.0).then(|| n / d)
        }
        None => s.parse().ok(),
    }
}

impl DilemmaKb {
    pub fn parse(text: &str) -> Result<Self, EthicsError> {
        let problem = parse_problem_with(text, situation_prelude)?;
        Self::from_problem(problem)
    }

    pub fn from_problem(problem: Problem) -> Result<Self, EthicsError> {
        let block = problem
            .extensions
            .iter()
            .find(|e| e.head() == Some("dde"))
            .ok_or(EthicsError::MissingBlock)?
            .clone();
        let mut fields: BTreeMap<&str, String> = BTreeMap::new();
        let mut mu = BTreeMap::new();
        for e in &block.as_list().unwrap()[1..] {
            let bad = || EthicsError::BadEntry(e.to_string());
            let items = e.as_list().ok_or_else(bad)?;
            let words: Vec<&str> = items.iter().map(SExpr::as_symbol).collect::<Option<_>>().ok_or_else(bad)?;
            match words.as_slice() {
                ["mu", f, v] => {
                    mu.insert(f.to_string(), parse_rational(v).ok_or_else(bad)?);
                }
                [key @ ("agent" | "now" | "next" | "situation" | "action"), v] => {
                    fields.insert(key, v.to_string());
                }
                _ => return Err(bad()),
            }
        }
        let mut take = |k: &'static str| fields.remove(k).ok_or(EthicsError::MissingEntry(k));
        let kb = DilemmaKb {
            agent: take("agent")?,
            now: take("now")?,
            next: take("next")?,
            situation: take("situation")?,
            action: take("action")?,
            mu,
            problem,
        };
        kb.check()?;
        Ok(kb)
    }

    fn check(&self) -> Result<(), EthicsError> {
        let sig = &self.problem.signature;
        for (name, sort) in [
            (&self.agent, AGENT),
            (&self.now, MOMENT),
            (&self.next, MOMENT),
            (&self.situation, SITUATION),
            (&self.action, ACTION_TYPE),
        ] {
            if !sig.constant_sort(name).is_some_and(|s| sig.is_subsort(s, sort)) {
                return Err(EthicsError::Undeclared { name: name.clone(), sort });
            }
        }
        for f in sig.constants_of(FLUENT) {
            if !self.mu.contains_key(&f) {
                return Err(EthicsError::MissingUtility(f));
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.problem.signature
    }

    pub fn premises(&self) -> &[Formula] {
        &self.problem.assumptions
    }

    /// Add a premise, such as the external compliance statement for the action.
    pub fn assume(&mut self, f: Formula) -> Result<(), SortError> {
        self.problem.signature.check_formula(&f)?;
        self.problem.assumptions.push(f);
        Ok(())
    }

    /// `ddeCompliant(α_D)`.
    pub fn compliance_premise(&self) -> Formula {
        Formula::atom(DDE_COMPLIANT, vec![c(&self.action)])
    }

    /// The same KB without any premise whose context-stripped body is a common-knowledge formula.
    pub fn without_common_knowledge(&self) -> DilemmaKb {
        let mut kb = self.clone();
        kb.problem
            .assumptions
            .retain(|f| !matches!(extract_context(f).1, Formula::Common { .. }));
        kb
    }

    fn fluents_with(&self, keep: impl Fn(f64) -> bool) -> Result<Vec<String>, EthicsError> {
        let mut out = Vec::new();
        for f in self.problem.signature.constants_of(FLUENT) {
            let v = *self.mu.get(&f).ok_or_else(|| EthicsError::MissingUtility(f.clone()))?;
            if keep(v) {
                out.push(f);
            }
        }
        Ok(out)
    }

    /// Θ(σ,t) for agent `agent` and current situation `sigma`.
    ///
    /// ∃ρ [ρ≠σ ∧ holds(in(a,ρ),t) ∧ ∃α (actionSit(a,α,ρ,t)
    ///     ∧ ¬O(a,t,holds(in(a,ρ),t),¬happens(action(a,α),t))
    ///     ∧ ⋀_{μ(f)<0} ¬initiates(action(a,α),f,t) ∧ ⋀_{μ(f)>0} ¬terminates(action(a,α),f,t))]
    pub fn theta_for(&self, agent: &Term, sigma: &Term) -> Result<Formula, EthicsError> {
        let t = c(&self.now);
        let rho = Var::new("rho", SITUATION);
        let alpha = Var::new("alpha", ACTION_TYPE);
        let (r, a) = (Term::Var(rho.clone()), Term::Var(alpha.clone()));
        let e = act(agent, &a);
        let harmless = self
            .fluents_with(|v| v < 0.0)?
            .into_iter()
            .map(|f| Formula::not(Formula::atom("initiates", vec![e.clone(), c(&f), t.clone()])));
        let helpful = self
            .fluents_with(|v| v > 0.0)?
            .into_iter()
            .map(|f| Formula::not(Formula::atom("terminates", vec![e.clone(), c(&f), t.clone()])));
        let no_harm = conj(harmless.collect());
        let no_loss = conj(helpful.collect());
        let permitted = Formula::not(Formula::ought(
            agent.clone(),
            t.clone(),
            holds_in(agent, &r, &t),
            Formula::not(happens(agent, &a, &t)),
        ));
        let inner = Formula::exists(
            alpha,
            Formula::and(vec![
                Formula::atom(ACTION_SIT, vec![agent.clone(), a.clone(), r.clone(), t.clone()]),
                permitted,
                no_harm,
                no_loss,
            ]),
        );
        Ok(Formula::exists(
            rho,
            Formula::and(vec![Formula::not(Formula::Eq(r.clone(), sigma.clone())), holds_in(agent, &r, &t), inner]),
        ))
    }

    pub fn theta(&self) -> Result<Formula, EthicsError> {
        self.theta_for(&c(&self.agent), &c(&self.situation))
    }

    /// `B(I,t,holds(in(I,σ),t)) ∧ D(I,t,Θ(σ,t))`.
    pub fn c5a_formula(&self) -> Result<Formula, EthicsError> {
        let (i, t, s) = (c(&self.agent), c(&self.now), c(&self.situation));
        Ok(Formula::and(vec![
            Formula::believes(i.clone(), t.clone(), holds_in(&i, &s, &t)),
            Formula::desires(i, t, self.theta()?),
        ]))
    }

    /// `¬happens(action(I,α_D),t+1)`.
    pub fn c5b_consequent(&self) -> Formula {
        Formula::not(happens(&c(&self.agent), &c(&self.action), &c(&self.next)))
    }

    pub fn belief_context(&self) -> ModalContext {
        ModalContext::single(ContextOp::B, c(&self.agent), c(&self.now))
    }

    /// `B(I,t, Θ(σ,t) ↪ ¬happens(action(I,α_D),t+1))`.
    pub fn c5b_formula(&self) -> Result<Formula, EthicsError> {
        Ok(self.belief_context().wrap(Formula::cf(self.theta()?, self.c5b_consequent())))
    }
}

fn conj(mut fs: Vec<Formula>) -> Formula {
    match fs.len() {
        0 => Formula::verum(),
        1 => fs.pop().unwrap(),
        _ => Formula::and(fs),
    }
}

#[derive(Clone, Debug)]
pub enum C5Outcome {
    A(ProofOutcome),
    B(CfResult),
}

impl C5Outcome {
    pub fn is_proved(&self) -> bool {
        match self {
            C5Outcome::A(p) => p.is_proved(),
            C5Outcome::B(r) => r.is_proved(),
        }
    }

    pub fn elapsed_ms(&self) -> f64 {
        match self {
            C5Outcome::A(p) => p.elapsed_ms,
            C5Outcome::B(r) => r.elapsed_ms,
        }
    }
}

/// C5a by direct proof, C5b by a counterfactual search inside the agent's beliefs.
pub fn derive_c5(kb: &DilemmaKb, which: Clause5, cfg: &CfConfig) -> Result<C5Outcome, EthicsError> {
    match which {
        Clause5::A => {
            let budget = Budget { timeout_ms: cfg.overall_ms, depth: cfg.depth, max_clauses: None };
            Ok(C5Outcome::A(prove(kb.signature(), kb.premises(), &kb.c5a_formula()?, &budget)?))
        }
        Clause5::B => Ok(C5Outcome::B(prove_counterfactual_in_context(
            kb.signature(),
            kb.premises(),
            &kb.belief_context(),
            &kb.theta()?,
            &kb.c5b_consequent(),
            cfg,
        )?)),
    }
}

/// The shipped trolley-style dilemma.
pub const SHIPPED_DILEMMA: &str = include_str!("../../data/dilemma.clp");

pub fn shipped_dilemma() -> DilemmaKb {
    DilemmaKb::parse(SHIPPED_DILEMMA).expect("shipped dilemma parses")
}
