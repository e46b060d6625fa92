//! Modal contexts: the K/B/D prefix wrapping a formula.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::print::{alpha_eq, print_term};
use super::syntax::{Formula, ModalOp, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContextOp {
    K,
    B,
    D,
}

impl ContextOp {
    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "K" => Some(ContextOp::K),
            "B" => Some(ContextOp::B),
            "D" => Some(ContextOp::D),
            _ => None,
        }
    }

    pub fn modal_op(self) -> ModalOp {
        match self {
            ContextOp::K => ModalOp::Knows,
            ContextOp::B => ModalOp::Believes,
            ContextOp::D => ModalOp::Desires,
        }
    }

    fn from_modal(op: ModalOp) -> Option<Self> {
        match op {
            ModalOp::Knows => Some(ContextOp::K),
            ModalOp::Believes => Some(ContextOp::B),
            ModalOp::Desires => Some(ContextOp::D),
            ModalOp::Intends | ModalOp::Perceives => None,
        }
    }
}

impl fmt::Display for ContextOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.modal_op().keyword())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContextEntry {
    pub op: ContextOp,
    pub agent: Term,
    pub time: Term,
}

/// Ordered list of (operator, agent, time) triples. Empty means extensional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModalContext {
    entries: Vec<ContextEntry>,
}

impl ModalContext {
    pub fn new(entries: Vec<ContextEntry>) -> Self {
        ModalContext { entries }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(op: ContextOp, agent: Term, time: Term) -> Self {
        ModalContext { entries: vec![ContextEntry { op, agent, time }] }
    }

    pub fn entries(&self) -> &[ContextEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self ⊕ other`.
    pub fn concat(&self, other: &ModalContext) -> ModalContext {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        ModalContext { entries }
    }

    /// Re-wrap a body in this context, outermost entry first.
    pub fn wrap(&self, body: Formula) -> Formula {
        self.entries.iter().rev().fold(body, |acc, e| {
            Formula::modal(e.op.modal_op(), e.agent.clone(), e.time.clone(), acc)
        })
    }

    /// Entry-wise equality with terms compared syntactically.
    pub fn matches(&self, other: &ModalContext) -> bool {
        self == other
    }

    /// The flat rendering `⟨B, a, t1, K, b, t2⟩`.
    pub fn flat(&self) -> String {
        let parts: Vec<String> = self
            .entries
            .iter()
            .flat_map(|e| [e.op.to_string(), print_term(&e.agent), print_term(&e.time)])
            .collect();
        format!("⟨{}⟩", parts.join(", "))
    }
}

impl fmt::Display for ModalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({} {} {})", e.op, print_term(&e.agent), print_term(&e.time))?;
        }
        f.write_str(")")
    }
}

/// Split a formula into its maximal K/B/D prefix and the remaining body.
///
/// Any other operator, including `I`, `P`, `C`, `S` and `O`, ends the prefix.
pub fn extract_context(f: &Formula) -> (ModalContext, Formula) {
    let mut entries = Vec::new();
    let mut cur = f;
    while let Formula::Modal { op, agent, time, body } = cur {
        match ContextOp::from_modal(*op) {
            Some(op) => {
                entries.push(ContextEntry { op, agent: agent.clone(), time: time.clone() });
                cur = body;
            }
            None => break,
        }
    }
    (ModalContext { entries }, cur.clone())
}

/// Bodies of the members of `gamma` that sit under `ctx`.
///
/// A non-empty `ctx` selects members whose extracted context starts with
/// `ctx`; the body keeps whatever K/B/D prefix follows `ctx`. An empty `ctx`
/// selects the members without a K/B/D prefix, unchanged.
pub fn project_context(gamma: &[Formula], ctx: &ModalContext) -> Vec<Formula> {
    project_context_indexed(gamma, ctx).into_iter().map(|(_, f)| f).collect()
}

/// Like [`project_context`] but keeps each body's index in `gamma`.
pub fn project_context_indexed(gamma: &[Formula], ctx: &ModalContext) -> Vec<(usize, Formula)> {
    gamma
        .iter()
        .enumerate()
        .filter_map(|(i, g)| strip_context(g, ctx).map(|body| (i, body)))
        .collect()
}

/// The body of `f` under `ctx`, if `f` sits under `ctx`.
pub fn strip_context(f: &Formula, ctx: &ModalContext) -> Option<Formula> {
    let (c, body) = extract_context(f);
    if ctx.is_empty() {
        return c.is_empty().then_some(body);
    }
    let n = ctx.len();
    (c.len() >= n && c.entries[..n] == ctx.entries[..])
        .then(|| ModalContext { entries: c.entries[n..].to_vec() }.wrap(body))
}

/// Whether `f` is syntactically (mod alpha) the wrapping of `body` in `ctx`.
pub fn has_context(f: &Formula, ctx: &ModalContext, body: &Formula) -> bool {
    let (c, b) = extract_context(f);
    c.matches(ctx) && alpha_eq(&b, body)
}
