use cfreason::counterfactual::{
    prove_counterfactual, prove_counterfactual_in_context, CfConfig, CfWitness,
};
use cfreason::ethics::{
    derive_c5, sanctioning_axiom, shipped_dilemma, C5Outcome, Clause5, DilemmaKb, EthicsError,
    SHIPPED_DILEMMA,
};
use cfreason::kernel::{
    alpha_eq, extract_context, parse_formula, parse_problem, print_formula, ContextOp, Formula,
    ModalContext, Term,
};
use cfreason::prover::{prove, replay, Budget};

fn cfg() -> CfConfig {
    CfConfig { overall_ms: 60_000, ..CfConfig::default() }
}

fn golden(name: &str) -> String {
    let path = format!("{}/data/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap().trim_end().to_string()
}

#[test]
fn c5a_is_derived_and_replays() {
    let kb = shipped_dilemma();
    let out = derive_c5(&kb, Clause5::A, &cfg()).unwrap();
    let C5Outcome::A(p) = out else { panic!() };
    assert!(p.is_proved(), "{p:?}");
    replay(kb.signature(), kb.premises(), &kb.c5a_formula().unwrap(), p.justification.as_ref().unwrap()).unwrap();
}

#[test]
fn c5b_is_derived_inside_the_beliefs() {
    let kb = shipped_dilemma();
    let C5Outcome::B(r) = derive_c5(&kb, Clause5::B, &cfg()).unwrap() else { panic!() };
    assert!(r.is_proved(), "{:?}", r.counters);
    let Some(CfWitness::Subset { formulas, .. }) = &r.witness else { panic!("{:?}", r.witness) };
    assert!(formulas.iter().any(|f| matches!(f, Formula::Common { .. })));
}

#[test]
fn c5b_needs_the_common_knowledge() {
    let kb = shipped_dilemma().without_common_knowledge();
    assert!(kb.premises().iter().all(|f| !print_formula(f).contains("(C ")));
    let out = derive_c5(&kb, Clause5::B, &CfConfig { overall_ms: 20_000, ..CfConfig::default() }).unwrap();
    assert!(!out.is_proved());
}

#[test]
fn formulas_match_the_golden_files() {
    let kb = shipped_dilemma();
    assert_eq!(print_formula(&kb.c5a_formula().unwrap()), golden("c5a.txt"));
    assert_eq!(print_formula(&kb.c5b_formula().unwrap()), golden("c5b.txt"));
    let (ctx, body) = extract_context(&kb.c5b_formula().unwrap());
    assert_eq!(ctx, kb.belief_context());
    assert_eq!(body, Formula::cf(kb.theta().unwrap(), kb.c5b_consequent()));
}

#[test]
fn generic_theta_matches_the_desire_premise() {
    let kb = shipped_dilemma();
    let a = Term::var("a", "Agent");
    let sg = Term::var("sg", "Situation");
    let theta = kb.theta_for(&a, &sg).unwrap();
    let found = print_formula(&kb.premises()[5]);
    assert!(found.contains(&print_formula(&theta)), "{found}");
}

#[test]
fn construction_is_deterministic() {
    let a = shipped_dilemma();
    let b = DilemmaKb::parse(SHIPPED_DILEMMA).unwrap();
    assert_eq!(print_formula(&a.c5b_formula().unwrap()), print_formula(&b.c5b_formula().unwrap()));
    assert!(alpha_eq(&a.theta().unwrap(), &b.theta().unwrap()));
}

const SMALL: &str = "(problem p (const me Agent) (const t Moment) (const t1 Moment) (const s Situation)
  (const go ActionType) FLUENTS (assumptions) (queries) (dde (agent me) (now t) (next t1) (situation s) (action go) MU))";

fn small(fluents: &str, mu: &str) -> Result<DilemmaKb, EthicsError> {
    DilemmaKb::parse(&SMALL.replace("FLUENTS", fluents).replace("MU", mu))
}

#[test]
fn no_fluents_leaves_empty_conjunctions() {
    let kb = small("", "").unwrap();
    let text = print_formula(&kb.theta().unwrap());
    assert!(!text.contains("initiates") && !text.contains("terminates"));
    assert!(text.contains("true"));
}

#[test]
fn single_fluent_signs() {
    let harm = print_formula(&small("(const f Fluent)", "(mu f -1/2)").unwrap().theta().unwrap());
    assert!(harm.contains("(not (initiates (action me alpha) f t))"));
    assert!(!harm.contains("terminates"));
    let good = print_formula(&small("(const f Fluent)", "(mu f 3)").unwrap().theta().unwrap());
    assert!(good.contains("(not (terminates (action me alpha) f t))"));
    let neutral = print_formula(&small("(const f Fluent)", "(mu f 0)").unwrap().theta().unwrap());
    assert!(!neutral.contains("(action me alpha) f"));
}

#[test]
fn missing_utility_names_the_fluent() {
    match small("(const f Fluent) (const g Fluent)", "(mu f 1)") {
        Err(EthicsError::MissingUtility(g)) => assert_eq!(g, "g"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn undeclared_action_is_rejected() {
    let text = SMALL.replace("FLUENTS", "").replace("MU", "").replace("(action go)", "(action jump)");
    assert!(matches!(DilemmaKb::parse(&text), Err(EthicsError::Undeclared { .. })));
    let no_block = "(problem p (assumptions) (queries))";
    assert!(matches!(DilemmaKb::parse(no_block), Err(EthicsError::MissingBlock)));
    let bad = SMALL.replace("FLUENTS", "(const f Fluent)").replace("MU", "(mu f one)");
    assert!(matches!(DilemmaKb::parse(&bad), Err(EthicsError::BadEntry(_))));
}

#[test]
fn sanctioning_axiom_yields_a_situation() {
    let kb = shipped_dilemma();
    let sig = kb.signature();
    let gamma = vec![sanctioning_axiom(), parse_formula(sig, "(happens (action me divert) t)").unwrap()];
    let goal = parse_formula(sig, "(exists (q Situation) (actionSit me divert q t))").unwrap();
    let out = prove(sig, &gamma, &goal, &Budget::with_timeout(5_000)).unwrap();
    assert!(out.is_proved());
    let goal = parse_formula(sig, "(exists (q Situation) (holds (in me q) t))").unwrap();
    assert!(prove(sig, &gamma, &goal, &Budget::with_timeout(5_000)).unwrap().is_proved());
    assert!(alpha_eq(&kb.premises()[0], &sanctioning_axiom()));
}

const OBLIGED: &str = "(problem o (const a Agent) (const t Moment) (const go ActionType) (rel P ())
  (assumptions
    (B a t (O a t P (happens (action a go) t)))
    (O a t P (happens (action a go) t)))
  (queries))";

#[test]
fn believed_obligation_supports_a_counterfactual_intention() {
    let p = parse_problem(OBLIGED).unwrap();
    let sig = &p.signature;
    let phi = parse_formula(sig, "(B a t P)").unwrap();
    let psi = parse_formula(sig, "(I a t (happens (action a go) t))").unwrap();
    let r = prove_counterfactual(sig, &p.assumptions, &phi, &psi, &CfConfig::default()).unwrap();
    assert!(r.is_proved());
    assert_eq!(r.subset(), Some(&[0usize, 1][..]));
}

#[test]
fn obligation_alone_does_not_detach_the_action() {
    let p = parse_problem(OBLIGED).unwrap();
    let sig = &p.signature;
    let ctx = ModalContext::single(ContextOp::B, Term::constant("a"), Term::constant("t"));
    let chi = parse_formula(sig, "(happens (action a go) t)").unwrap();
    let phi = parse_formula(sig, "P").unwrap();
    let cfg = CfConfig { overall_ms: 5_000, ..CfConfig::default() };
    let r = prove_counterfactual_in_context(sig, &p.assumptions, &ctx, &phi, &chi, &cfg).unwrap();
    assert!(!r.is_proved());
    let ext = prove_counterfactual(sig, &p.assumptions, &parse_formula(sig, "(B a t P)").unwrap(), &chi, &cfg).unwrap();
    assert!(!ext.is_proved());
}
