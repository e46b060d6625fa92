use proptest::prelude::*;

use cfreason::counterfactual::CfCounters;
use cfreason::harness::oracle::{oracle_counterfactual, OracleVerdict};
use cfreason::harness::{
    load_dataset, run_problems, shipped_dataset_dir, validate_dataset, validate_problem, BenchConfig, BenchRecord,
    BenchReport, QueryKind,
};
use cfreason::kernel::{parse_problem, Formula};
use cfreason::prover::{Budget, ProofStatus};

fn p(s: &str) -> Formula {
    Formula::prop(s)
}

#[test]
fn oracle_examples() {
    let gamma = [Formula::not(p("p")), Formula::implies(p("p"), p("q"))];
    let v = oracle_counterfactual(&gamma, &p("p"), &p("q")).unwrap();
    assert_eq!(v, OracleVerdict { entailed: true, antecedent_inconsistent: false, witness: Some(vec![1]) });

    let v = oracle_counterfactual(&gamma, &p("p"), &Formula::falsum()).unwrap();
    assert!(!v.entailed && v.witness.is_none());

    let contra = Formula::and(vec![p("p"), Formula::not(p("p"))]);
    let v = oracle_counterfactual(&gamma, &contra, &p("r")).unwrap();
    assert!(v.entailed && v.antecedent_inconsistent);
}

#[test]
fn shipped_dataset_is_clean() {
    let rep = validate_dataset(&shipped_dataset_dir(), &Budget::with_timeout(10_000)).unwrap();
    assert!(rep.is_clean(), "{:?}", rep.issues);
    assert_eq!(rep.problems, 16);
    assert!(rep.oracle_checked >= 5);
}

fn triple(assumptions: &str, phi: &str, psi: &str) -> cfreason::kernel::Problem {
    parse_problem(&format!(
        "(problem x (rel a ()) (rel b ()) (rel c ()) (assumptions {assumptions})
           (queries (cf {phi} {psi}) (entail (implies {phi} false)) (cf {phi} false)))"
    ))
    .unwrap()
}

const WANT: [ProofStatus; 3] = [ProofStatus::Proved, ProofStatus::Proved, ProofStatus::NotProvedWithinBudget];

#[test]
fn validation_flags_oracle_disagreement() {
    let problem = triple("(implies a b) a", "(not b)", "c");
    let mut checked = 0;
    let issues = validate_problem(&problem, &WANT, &Budget::with_timeout(2_000), &mut checked);
    assert_eq!(checked, 1);
    assert_eq!(issues, vec!["oracle says cf is false, expected true".to_string()]);
}

#[test]
fn validation_flags_a_contradictory_antecedent() {
    let problem = triple("a", "(and b (not b))", "c");
    let mut checked = 0;
    let issues = validate_problem(&problem, &WANT, &Budget::with_timeout(2_000), &mut checked);
    assert!(issues.iter().any(|i| i == "oracle says cf-absurd is true, expected false"), "{issues:?}");
}

#[test]
fn validation_flags_an_unrefuted_antecedent() {
    let problem = triple("(implies a b)", "a", "b");
    let mut checked = 0;
    let issues = validate_problem(&problem, &WANT, &Budget::with_timeout(2_000), &mut checked);
    assert!(issues.iter().any(|i| i.contains("do not prove (not a)")), "{issues:?}");
}

#[test]
fn benchmark_is_deterministic_on_terminating_problems() {
    let problems = load_dataset(&shipped_dataset_dir()).unwrap();
    let quick = &problems[..5];
    let cfg = BenchConfig { timeout_ms: 10_000, ..BenchConfig::default() };
    let strip = |r: BenchReport| -> Vec<(String, QueryKind, ProofStatus, Option<Vec<usize>>)> {
        r.records.into_iter().map(|r| (r.problem, r.kind, r.status, r.witness)).collect()
    };
    let first = strip(run_problems(quick, &cfg).unwrap());
    let second = strip(run_problems(quick, &cfg).unwrap());
    assert_eq!(first.len(), 15);
    assert_eq!(first, second);
    assert!(first.iter().all(|(_, kind, status, _)| (*kind == QueryKind::CfAbsurd) != (*status == ProofStatus::Proved)));
}

fn status() -> impl Strategy<Value = ProofStatus> {
    prop_oneof![Just(ProofStatus::Proved), Just(ProofStatus::NotProvedWithinBudget)]
}

fn kind() -> impl Strategy<Value = QueryKind> {
    prop_oneof![Just(QueryKind::Cf), Just(QueryKind::MaterialAbsurd), Just(QueryKind::CfAbsurd)]
}

fn counters() -> impl Strategy<Value = CfCounters> {
    prop::array::uniform5(0u64..1_000_000).prop_map(|c| CfCounters {
        subsets_examined: c[0],
        entailment_calls: c[1],
        consistency_calls: c[2],
        entailments_memoized: c[3],
        consistencies_memoized: c[4],
    })
}

fn record() -> impl Strategy<Value = BenchRecord> {
    (
        "[a-z][a-z0-9-]{0,12}",
        kind(),
        status(),
        status(),
        0.0f64..120_000.0,
        prop::option::of(counters()),
        prop::option::of(prop::collection::vec(0usize..15, 0..6)),
    )
        .prop_map(|(problem, kind, status, expected, elapsed_ms, counters, witness)| BenchRecord {
            problem,
            kind,
            status,
            expected,
            elapsed_ms,
            counters,
            witness,
        })
}

proptest! {
    #[test]
    fn report_json_round_trips(records in prop::collection::vec(record(), 0..20)) {
        let rep = BenchReport::from_records(records);
        let back = BenchReport::from_json(&rep.to_json()).unwrap();
        prop_assert_eq!(back, rep);
    }

    #[test]
    fn summary_rows_bound_their_means(records in prop::collection::vec(record(), 1..20)) {
        let rep = BenchReport::from_records(records);
        for row in &rep.summary {
            prop_assert!(row.min_s <= row.mean_s + 1e-9 && row.mean_s <= row.max_s + 1e-9);
        }
        let counted: usize = rep.summary.iter().map(|r| r.count).sum();
        prop_assert_eq!(counted, rep.records.len());
    }
}
