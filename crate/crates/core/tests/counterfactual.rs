use cfreason::counterfactual::{
    prove_counterfactual, prove_counterfactual_in_context, verify_witness, CfConfig, CfError,
    CfWitness, SubsetOrder,
};
use cfreason::kernel::{parse_formula, parse_problem, ContextOp, Formula, ModalContext, Problem, Term};
use cfreason::prover::ProofStatus;

const SOCRATES: &str = r#"
(problem socrates
  (sort Thing)
  (const socrates Thing)
  (rel Human (Thing))
  (rel Mortal (Thing))
  (rel P ())
  (assumptions
    (forall (x Thing) (implies (Human x) (Mortal x)))
    (Human socrates))
  (queries))
"#;

fn problem(text: &str) -> Problem {
    parse_problem(text).unwrap()
}

fn f(p: &Problem, s: &str) -> Formula {
    parse_formula(&p.signature, s).unwrap()
}

fn cfg(order: SubsetOrder) -> CfConfig {
    CfConfig { order, ..CfConfig::default() }
}

#[test]
fn socrates_counterfactual_keeps_the_rule() {
    let p = problem(SOCRATES);
    let phi = f(&p, "(not (Mortal socrates))");
    let psi = f(&p, "(not (Human socrates))");
    for order in [SubsetOrder::LargeFirst, SubsetOrder::SmallFirst] {
        let r = prove_counterfactual(&p.signature, &p.assumptions, &phi, &psi, &cfg(order)).unwrap();
        assert_eq!(r.status, ProofStatus::Proved);
        assert_eq!(r.subset(), Some(&[0usize][..]), "{order}");
        let Some(CfWitness::Subset { approximation_used, .. }) = &r.witness else { panic!() };
        assert!(!approximation_used, "saturated consistency check");
        verify_witness(&p.signature, &p.assumptions, &ModalContext::empty(), &phi, &psi, &r, &cfg(order))
            .unwrap();
    }
}

#[test]
fn socrates_absurd_consequent_fails() {
    let p = problem(SOCRATES);
    let phi = f(&p, "(not (Mortal socrates))");
    let r = prove_counterfactual(&p.signature, &p.assumptions, &phi, &Formula::falsum(), &CfConfig::default())
        .unwrap();
    assert_eq!(r.status, ProofStatus::NotProvedWithinBudget);
    assert!(r.counters.subsets_examined >= 1);
}

#[test]
fn identity() {
    let p = problem(SOCRATES);
    let phi = f(&p, "P");
    let r = prove_counterfactual(&p.signature, &p.assumptions, &phi, &phi, &CfConfig::default()).unwrap();
    assert!(r.is_proved());
}

#[test]
fn contradictory_antecedent_takes_the_other_branch() {
    let p = problem(SOCRATES);
    let phi = f(&p, "(and P (not P))");
    let r = prove_counterfactual(&p.signature, &p.assumptions, &phi, &f(&p, "(Human socrates)"), &CfConfig::default())
        .unwrap();
    assert!(matches!(r.witness, Some(CfWitness::InconsistentAntecedent { .. })));
    verify_witness(&p.signature, &p.assumptions, &ModalContext::empty(), &phi, &phi, &r, &CfConfig::default())
        .unwrap();
}

const BELIEFS: &str = r#"
(problem beliefs
  (const a Agent) (const t Moment)
  (rel p ()) (rel q ()) (rel P ()) (rel Q ())
  (assumptions
    (B a t (not p))
    (B a t (implies p q))
    (K a t P))
  (queries))
"#;

#[test]
fn contextual_counterfactual_uses_the_projected_beliefs() {
    let p = problem(BELIEFS);
    let ctx = ModalContext::single(ContextOp::B, Term::constant("a"), Term::constant("t"));
    let gamma = &p.assumptions[..2];
    let r = prove_counterfactual_in_context(&p.signature, gamma, &ctx, &f(&p, "p"), &f(&p, "q"), &CfConfig::default())
        .unwrap();
    assert!(r.is_proved());
    assert_eq!(r.subset(), Some(&[1usize][..]));
    let Some(CfWitness::Subset { formulas, .. }) = &r.witness else { panic!() };
    assert_eq!(formulas, &vec![f(&p, "(implies p q)")]);
    verify_witness(&p.signature, gamma, &ctx, &f(&p, "p"), &f(&p, "q"), &r, &CfConfig::default()).unwrap();
}

#[test]
fn empty_projection_fails() {
    let p = problem(BELIEFS);
    let ctx = ModalContext::single(ContextOp::B, Term::constant("a"), Term::constant("t"));
    let gamma = &p.assumptions[2..];
    let r = prove_counterfactual_in_context(&p.signature, gamma, &ctx, &f(&p, "Q"), &f(&p, "P"), &CfConfig::default())
        .unwrap();
    assert_eq!(r.status, ProofStatus::NotProvedWithinBudget);
}

#[test]
fn empty_context_matches_the_plain_procedure() {
    let p = problem(SOCRATES);
    let phi = f(&p, "(not (Mortal socrates))");
    let psi = f(&p, "(not (Human socrates))");
    let a = prove_counterfactual(&p.signature, &p.assumptions, &phi, &psi, &CfConfig::default()).unwrap();
    let b = prove_counterfactual_in_context(
        &p.signature,
        &p.assumptions,
        &ModalContext::empty(),
        &phi,
        &psi,
        &CfConfig::default(),
    )
    .unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.subset(), b.subset());
}

#[test]
fn too_many_assumptions_are_rejected() {
    let p = problem(SOCRATES);
    let gamma = vec![f(&p, "P"); 31];
    let err = prove_counterfactual(&p.signature, &gamma, &f(&p, "P"), &f(&p, "P"), &CfConfig::default());
    assert!(matches!(err, Err(CfError::TooManyAssumptions(31))));
}

#[test]
fn zero_limits_are_rejected() {
    let p = problem(SOCRATES);
    let bad = CfConfig { delta_ms: 0, ..CfConfig::default() };
    assert!(matches!(
        prove_counterfactual(&p.signature, &[], &f(&p, "P"), &f(&p, "P"), &bad),
        Err(CfError::Config(_))
    ));
}

#[test]
fn small_first_skips_supersets_of_an_entailing_set() {
    let p = problem(
        "(problem m (rel a ()) (rel b ()) (rel c ()) (rel d ()) (rel x ())
          (assumptions (implies x d) b c (not d)) (queries))",
    );
    let r = prove_counterfactual(&p.signature, &p.assumptions, &f(&p, "x"), &f(&p, "d"), &cfg(SubsetOrder::SmallFirst))
        .unwrap();
    assert!(r.is_proved());
    assert_eq!(r.subset(), Some(&[0usize][..]));
    let r2 = prove_counterfactual(&p.signature, &p.assumptions, &f(&p, "x"), &f(&p, "a"), &cfg(SubsetOrder::SmallFirst))
        .unwrap();
    assert!(!r2.is_proved());
    let r3 = prove_counterfactual(&p.signature, &p.assumptions, &f(&p, "x"), &f(&p, "a"), &cfg(SubsetOrder::LargeFirst))
        .unwrap();
    assert!(!r3.is_proved());
    assert!(r3.counters.consistencies_memoized > 0);
    assert!(r3.counters.entailment_calls < 16);
}
