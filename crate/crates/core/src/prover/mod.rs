//! Bounded prover: modal saturation, shadowing, then sorted first-order refutation.
//!
//! [`prove`] first closes the premises under the modal schemata, turns every
//! remaining intensional subformula into an opaque atom, and finally searches
//! for a resolution refutation of the premises plus the negated goal.
//! [`consistent`] is a refutation attempt of the set itself under a small
//! budget; failure to refute within it is read as consistency.

pub mod budget;
pub mod clausify;
pub mod fol;
pub mod modal;
pub mod replay;
pub mod resolution;
pub mod shadow;
pub mod time;

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::kernel::{Formula, Signature, SortError};

pub use budget::{Budget, Deadline};
pub use modal::{Closing, Fact, FactOrigin, Justification, Refutation, RefutationInput, SchemaRule};
pub use replay::{replay, ReplayError};
pub use shadow::{shadow, ShadowTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProofStatus {
    Proved,
    NotProvedWithinBudget,
}

impl fmt::Display for ProofStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofStatus::Proved => "Proved",
            ProofStatus::NotProvedWithinBudget => "NotProvedWithinBudget",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ProofOutcome {
    pub status: ProofStatus,
    /// Present exactly when `status` is `Proved`.
    pub justification: Option<Justification>,
    pub elapsed_ms: f64,
    /// Set when the search ran out of inferences rather than out of budget.
    /// The goal is then not derivable by this procedure at this depth.
    pub exhausted: bool,
    /// Indices into the premise list that the proof uses.
    pub used_premises: Vec<usize>,
}

impl ProofOutcome {
    pub fn is_proved(&self) -> bool {
        self.status == ProofStatus::Proved
    }
}

/// Decide `gamma ⊢ goal` within `budget`.
///
/// Ill-sorted input is rejected before any search.
pub fn prove(
    sig: &Signature,
    gamma: &[Formula],
    goal: &Formula,
    budget: &Budget,
) -> Result<ProofOutcome, SortError> {
    for f in gamma.iter().chain(std::iter::once(goal)) {
        sig.check_formula(f)?;
    }
    Ok(prove_unchecked(sig, gamma, goal, budget))
}

/// [`prove`] without the sort check, for callers that already checked their input.
pub fn prove_unchecked(sig: &Signature, gamma: &[Formula], goal: &Formula, budget: &Budget) -> ProofOutcome {
    let start = Instant::now();
    let deadline = Deadline::after(budget.timeout_ms);
    let attempt = modal::prove_at(sig, gamma, goal, &deadline, budget.depth, budget.max_clauses);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    match attempt.proof {
        Some(j) => ProofOutcome {
            status: ProofStatus::Proved,
            used_premises: j.used_premises(),
            justification: Some(j),
            elapsed_ms,
            exhausted: false,
        },
        None => ProofOutcome {
            status: ProofStatus::NotProvedWithinBudget,
            justification: None,
            elapsed_ms,
            exhausted: attempt.complete,
            used_premises: Vec::new(),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Consistency {
    Inconsistent,
    /// No refutation was found within the time limit. This is an approximation.
    PresumedConsistent,
}

impl fmt::Display for Consistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Consistency::Inconsistent => "Inconsistent",
            Consistency::PresumedConsistent => "PresumedConsistent (approximation)",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConsistencyVerdict {
    pub value: Consistency,
    pub elapsed_ms: f64,
    pub delta_ms: u64,
    /// The refutation of the set, when inconsistent.
    pub refutation: Option<ProofOutcome>,
    /// The refutation search saturated, so no refutation exists at this depth.
    pub saturated: bool,
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        self.value == Consistency::PresumedConsistent
    }

    /// Indices of a refuted subset, when inconsistent.
    pub fn core(&self) -> Option<&[usize]> {
        self.refutation.as_ref().map(|r| r.used_premises.as_slice())
    }
}

/// Cons[Φ] approximated by failure to refute Φ within `delta_ms`.
pub fn consistent(sig: &Signature, phis: &[Formula], delta_ms: u64) -> ConsistencyVerdict {
    consistent_with(sig, phis, &Budget { timeout_ms: delta_ms, ..Budget::default() })
}

pub fn consistent_with(sig: &Signature, phis: &[Formula], budget: &Budget) -> ConsistencyVerdict {
    let out = prove_unchecked(sig, phis, &Formula::falsum(), budget);
    let elapsed_ms = out.elapsed_ms;
    if out.is_proved() {
        ConsistencyVerdict {
            value: Consistency::Inconsistent,
            elapsed_ms,
            delta_ms: budget.timeout_ms,
            refutation: Some(out),
            saturated: false,
        }
    } else {
        ConsistencyVerdict {
            value: Consistency::PresumedConsistent,
            elapsed_ms,
            delta_ms: budget.timeout_ms,
            saturated: out.exhausted,
            refutation: None,
        }
    }
}
