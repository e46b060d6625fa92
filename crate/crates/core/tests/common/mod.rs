#![allow(dead_code)]

use cfreason::counterfactual::{
    prove_counterfactual, prove_counterfactual_in_context, verify_witness, CfConfig, CfResult, SubsetOrder,
};
use cfreason::harness::generate::{prop_signature, Generator};
use cfreason::harness::oracle::oracle_counterfactual;
use cfreason::kernel::{ContextOp, Decl, Formula, ModalContext, Signature, Term};
use cfreason::prover::{consistent, prove, Budget, Consistency};

/// Atom pool used by every randomized check.
pub const ATOMS: usize = 6;
pub const DEPTH: u32 = 4;

/// Large enough that no propositional call here ends on the clock.
pub fn complete(order: SubsetOrder) -> CfConfig {
    CfConfig { delta_ms: 20_000, entail_ms: 20_000, overall_ms: 600_000, order, max_cardinality: None, depth: 1 }
}

pub fn budget() -> Budget {
    Budget::with_timeout(20_000).depth(1)
}

pub fn sig() -> Signature {
    sig_with(ATOMS)
}

pub fn sig_with(atoms: usize) -> Signature {
    let mut s = prop_signature(atoms);
    s.declare(Decl::Const { name: "a".into(), sort: "Agent".into() }).unwrap();
    s.declare(Decl::Const { name: "t".into(), sort: "Moment".into() }).unwrap();
    s
}

pub fn gen(seed: u64) -> Generator {
    Generator::new(seed, ATOMS, DEPTH)
}

pub fn belief_ctx() -> ModalContext {
    ModalContext::single(ContextOp::B, Term::constant("a"), Term::constant("t"))
}

pub fn cf(s: &Signature, gamma: &[Formula], phi: &Formula, psi: &Formula) -> bool {
    cf_with(s, gamma, phi, psi, SubsetOrder::LargeFirst).is_proved()
}

pub fn cf_with(s: &Signature, gamma: &[Formula], phi: &Formula, psi: &Formula, order: SubsetOrder) -> CfResult {
    prove_counterfactual(s, gamma, phi, psi, &complete(order)).unwrap()
}

pub fn cf_in(s: &Signature, gamma: &[Formula], ctx: &ModalContext, phi: &Formula, psi: &Formula) -> bool {
    prove_counterfactual_in_context(s, gamma, ctx, phi, psi, &complete(SubsetOrder::LargeFirst))
        .unwrap()
        .is_proved()
}

pub fn entails(s: &Signature, gamma: &[Formula], goal: &Formula) -> bool {
    prove(s, gamma, goal, &budget()).unwrap().is_proved()
}

pub fn inconsistent(s: &Signature, phi: &Formula) -> bool {
    consistent(s, std::slice::from_ref(phi), 20_000).value == Consistency::Inconsistent
}

pub fn witness_ok(s: &Signature, gamma: &[Formula], phi: &Formula, psi: &Formula, r: &CfResult, order: SubsetOrder) -> bool {
    verify_witness(s, gamma, &ModalContext::empty(), phi, psi, r, &complete(order)).is_ok()
}

pub fn oracle(gamma: &[Formula], phi: &Formula, psi: &Formula) -> bool {
    oracle_counterfactual(gamma, phi, psi).unwrap().entailed
}

/// A formula equivalent to `f` but usually not syntactically equal.
pub fn rewrite(g: &mut Generator, f: &Formula) -> Formula {
    let pad = g.atom();
    match g.below(4) {
        0 => Formula::not(Formula::not(f.clone())),
        1 => Formula::and(vec![f.clone(), Formula::or(vec![pad.clone(), Formula::not(pad)])]),
        2 => Formula::or(vec![f.clone(), Formula::and(vec![pad.clone(), Formula::not(pad)])]),
        _ => Formula::implies(Formula::not(f.clone()), Formula::falsum()),
    }
}
