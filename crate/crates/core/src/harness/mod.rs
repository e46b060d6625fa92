//! Dataset runner, validation, reports and the propositional oracle.

pub mod generate;
pub mod oracle;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counterfactual::{
    prove_counterfactual, prove_counterfactual_in_context, CfConfig, CfCounters, CfError, CfResult,
};
use crate::kernel::{parse_problem, Formula, ParseError, Problem, Query};
use crate::prover::{prove_unchecked, Budget, ProofStatus};

pub use generate::{prop_signature, Generator, Instance};
pub use oracle::{entails, oracle_counterfactual, satisfiable, OracleError, OracleVerdict};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Counterfactual(#[from] CfError),
}

/// The three conditionals asked of every dataset problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryKind {
    /// `φ ↪ ψ`
    Cf,
    /// `φ → ⊥`
    MaterialAbsurd,
    /// `φ ↪ ⊥`
    CfAbsurd,
}

impl QueryKind {
    pub const ALL: [QueryKind; 3] = [QueryKind::Cf, QueryKind::MaterialAbsurd, QueryKind::CfAbsurd];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Cf => "cf",
            QueryKind::MaterialAbsurd => "material-absurd",
            QueryKind::CfAbsurd => "cf-absurd",
        }
    }

    pub fn of(q: &Query) -> Option<QueryKind> {
        match q {
            Query::Entail(Formula::Implies(_, b)) if b.is_falsum() => Some(QueryKind::MaterialAbsurd),
            Query::Counterfactual { consequent, .. } if consequent.is_falsum() => Some(QueryKind::CfAbsurd),
            Query::Counterfactual { .. } => Some(QueryKind::Cf),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub premises: usize,
    /// Expected status per query, in file order.
    pub expected: Vec<ProofStatus>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub problems: Vec<ManifestEntry>,
}

#[derive(Clone, Debug)]
pub struct DatasetProblem {
    pub entry: ManifestEntry,
    pub problem: Problem,
}

pub const MANIFEST: &str = "manifest.json";

pub fn shipped_dataset_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("dataset")
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })
}

pub fn load_problem(path: &Path) -> Result<Problem, HarnessError> {
    parse_problem(&read(path)?).map_err(|source| HarnessError::Parse { path: path.into(), source })
}

pub fn load_dataset(dir: &Path) -> Result<Vec<DatasetProblem>, HarnessError> {
    let text = read(&dir.join(MANIFEST))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| HarnessError::Manifest(e.to_string()))?;
    manifest
        .problems
        .into_iter()
        .map(|entry| {
            let problem = load_problem(&dir.join(&entry.file))?;
            if entry.expected.len() != problem.queries.len() {
                return Err(HarnessError::Manifest(format!(
                    "{}: {} expected statuses for {} queries",
                    entry.file,
                    entry.expected.len(),
                    problem.queries.len()
                )));
            }
            Ok(DatasetProblem { entry, problem })
        })
        .collect()
}

/// Limits for a benchmark run. `timeout_ms` bounds each query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub timeout_ms: u64,
    pub cf: CfConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { timeout_ms: 30_000, cf: CfConfig::default() }
    }
}

impl BenchConfig {
    fn cf_config(&self) -> CfConfig {
        CfConfig { overall_ms: self.timeout_ms, entail_ms: self.cf.entail_ms.min(self.timeout_ms), ..self.cf.clone() }
    }

    fn budget(&self) -> Budget {
        Budget { timeout_ms: self.timeout_ms, depth: self.cf.depth, max_clauses: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub problem: String,
    pub kind: QueryKind,
    pub status: ProofStatus,
    pub expected: ProofStatus,
    pub elapsed_ms: f64,
    pub counters: Option<CfCounters>,
    /// Original indices of Γ′ for a subset witness.
    pub witness: Option<Vec<usize>>,
}

impl BenchRecord {
    pub fn as_expected(&self) -> bool {
        self.status == self.expected
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryRun {
    pub status: ProofStatus,
    pub elapsed_ms: f64,
    pub counters: Option<CfCounters>,
    pub witness: Option<Vec<usize>>,
}

fn cf_run(r: CfResult) -> QueryRun {
    QueryRun { status: r.status, elapsed_ms: r.elapsed_ms, counters: Some(r.counters), witness: r.subset().map(<[usize]>::to_vec) }
}

/// Run one query of a problem.
pub fn run_query(problem: &Problem, query: &Query, cfg: &BenchConfig) -> Result<QueryRun, HarnessError> {
    let sig = &problem.signature;
    let gamma = &problem.assumptions;
    match query {
        Query::Entail(goal) => {
            let out = prove_unchecked(sig, gamma, goal, &cfg.budget());
            Ok(QueryRun { status: out.status, elapsed_ms: out.elapsed_ms, counters: None, witness: None })
        }
        Query::Counterfactual { antecedent, consequent } => {
            Ok(cf_run(prove_counterfactual(sig, gamma, antecedent, consequent, &cfg.cf_config())?))
        }
        Query::ContextualCounterfactual { context, antecedent, consequent } => Ok(cf_run(
            prove_counterfactual_in_context(sig, gamma, context, antecedent, consequent, &cfg.cf_config())?,
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub kind: QueryKind,
    pub count: usize,
    pub mean_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SummaryRow>,
}

impl BenchReport {
    pub fn from_records(records: Vec<BenchRecord>) -> Self {
        let summary = QueryKind::ALL
            .iter()
            .filter_map(|&kind| {
                let secs: Vec<f64> =
                    records.iter().filter(|r| r.kind == kind).map(|r| r.elapsed_ms / 1000.0).collect();
                (!secs.is_empty()).then(|| SummaryRow {
                    kind,
                    count: secs.len(),
                    mean_s: secs.iter().sum::<f64>() / secs.len() as f64,
                    min_s: secs.iter().cloned().fold(f64::INFINITY, f64::min),
                    max_s: secs.iter().cloned().fold(0.0, f64::max),
                })
            })
            .collect();
        BenchReport { records, summary }
    }

    pub fn row(&self, kind: QueryKind) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.kind == kind)
    }

    pub fn all_as_expected(&self) -> bool {
        self.records.iter().all(BenchRecord::as_expected)
    }

    /// Fixed-width table with one row per query kind.
    pub fn table(&self) -> String {
        let mut out = format!("{:<18}{:>10}{:>10}{:>10}\n", "Formula", "Mean (s)", "Min (s)", "Max (s)");
        for r in &self.summary {
            let _ = writeln!(out, "{:<18}{:>10.3}{:>10.3}{:>10.3}", r.kind.name(), r.mean_s, r.min_s, r.max_s);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Run every query of every problem in order, on this thread.
pub fn run_benchmark(dir: &Path, cfg: &BenchConfig) -> Result<BenchReport, HarnessError> {
    run_problems(&load_dataset(dir)?, cfg)
}

/// [`run_benchmark`] over problems already loaded.
pub fn run_problems(problems: &[DatasetProblem], cfg: &BenchConfig) -> Result<BenchReport, HarnessError> {
    let mut records = Vec::new();
    for p in problems {
        for (q, &expected) in p.problem.queries.iter().zip(&p.entry.expected) {
            let kind = QueryKind::of(q)
                .ok_or_else(|| HarnessError::Manifest(format!("{}: unsupported query {}", p.entry.file, q.print())))?;
            let run = run_query(&p.problem, q, cfg)?;
            records.push(BenchRecord {
                problem: p.problem.name.clone(),
                kind,
                status: run.status,
                expected,
                elapsed_ms: run.elapsed_ms,
                counters: run.counters,
                witness: run.witness,
            });
        }
    }
    Ok(BenchReport::from_records(records))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub problems: usize,
    pub oracle_checked: usize,
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

pub const MIN_PROBLEMS: usize = 16;
pub const PREMISE_RANGE: (usize, usize) = (2, 15);

/// Check structure, provable counterfactuality and oracle agreement.
pub fn validate_dataset(dir: &Path, budget: &Budget) -> Result<ValidationReport, HarnessError> {
    let problems = load_dataset(dir)?;
    let mut rep = ValidationReport { problems: problems.len(), ..Default::default() };
    if problems.len() < MIN_PROBLEMS {
        rep.issues.push(format!("{} problems, at least {MIN_PROBLEMS} required", problems.len()));
    }
    let counts: Vec<usize> = problems.iter().map(|p| p.problem.assumptions.len()).collect();
    let (lo, hi) = PREMISE_RANGE;
    if counts.iter().min() != Some(&lo) || counts.iter().max() != Some(&hi) {
        rep.issues.push(format!("premise counts {counts:?} do not span {lo}..{hi}"));
    }
    for p in &problems {
        let file = &p.entry.file;
        let n = p.problem.assumptions.len();
        if n != p.entry.premises {
            rep.issues.push(format!("{file}: manifest says {} premises, file has {n}", p.entry.premises));
        }
        for issue in validate_problem(&p.problem, &p.entry.expected, budget, &mut rep.oracle_checked) {
            rep.issues.push(format!("{file}: {issue}"));
        }
    }
    Ok(rep)
}

/// Per-problem checks; returns the problems found.
pub fn validate_problem(problem: &Problem, expected: &[ProofStatus], budget: &Budget, oracle_checked: &mut usize) -> Vec<String> {
    let mut issues = Vec::new();
    let kinds: Vec<Option<QueryKind>> = problem.queries.iter().map(QueryKind::of).collect();
    if kinds != [Some(QueryKind::Cf), Some(QueryKind::MaterialAbsurd), Some(QueryKind::CfAbsurd)] {
        issues.push("queries must be cf, material-absurd, cf-absurd in that order".into());
        return issues;
    }
    let Query::Counterfactual { antecedent: phi, consequent: psi } = &problem.queries[0] else { unreachable!() };
    let same_phi = match (&problem.queries[1], &problem.queries[2]) {
        (Query::Entail(Formula::Implies(a, _)), Query::Counterfactual { antecedent, .. }) => **a == *phi && antecedent == phi,
        _ => false,
    };
    if !same_phi {
        issues.push("the three queries must share one antecedent".into());
    }
    let want = [ProofStatus::Proved, ProofStatus::Proved, ProofStatus::NotProvedWithinBudget];
    if expected != want {
        issues.push(format!("expected statuses {expected:?}, the dataset requires {want:?}"));
    }
    let not_phi = Formula::not(phi.clone());
    if !prove_unchecked(&problem.signature, &problem.assumptions, &not_phi, budget).is_proved() {
        issues.push(format!("the assumptions do not prove {not_phi}"));
    }
    let gamma = &problem.assumptions;
    if gamma.iter().chain([phi, psi]).all(Formula::is_propositional) && gamma.len() <= oracle::MAX_PREMISES {
        *oracle_checked += 1;
        let checks = [
            ("cf", oracle_counterfactual(gamma, phi, psi).map(|v| v.entailed), true),
            ("material-absurd", entails(gamma, &not_phi), true),
            ("cf-absurd", oracle_counterfactual(gamma, phi, &Formula::falsum()).map(|v| v.entailed), false),
        ];
        for (name, got, wanted) in checks {
            match got {
                Ok(v) if v == wanted => {}
                Ok(v) => issues.push(format!("oracle says {name} is {v}, expected {wanted}")),
                Err(e) => issues.push(format!("oracle failed on {name}: {e}")),
            }
        }
    }
    issues
}
