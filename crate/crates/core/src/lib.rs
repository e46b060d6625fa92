//! Budget-bounded reasoning for a sorted quantified modal logic with a
//! counterfactual conditional.
//!
//! * [`kernel`]: formulas, signatures, concrete syntax, modal contexts.
//! * [`prover`]: bounded modal saturation plus sorted resolution.
//! * [`counterfactual`]: subset search deciding `Γ ⊢ φ ↪ ψ`, extensional and in context.
//! * [`ethics`]: situations over the event calculus and the C5 formulas.
//! * [`harness`]: truth-table oracle, datasets, benchmark runner and reports.

pub mod counterfactual;
pub mod ethics;
pub mod harness;
pub mod kernel;
pub mod prover;
