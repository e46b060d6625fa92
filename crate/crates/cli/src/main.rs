use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cfreason::counterfactual::{CfConfig, CfResult, CfWitness, SubsetOrder};
use cfreason::ethics::{derive_c5, shipped_dilemma, C5Outcome, Clause5, DilemmaKb};
use cfreason::harness::{
    entails, load_problem, oracle_counterfactual, run_benchmark, shipped_dataset_dir, validate_dataset,
    BenchConfig, OracleVerdict,
};
use cfreason::kernel::{print_formula, Problem, Query};
use cfreason::prover::{prove_unchecked, Budget, ProofOutcome};

#[derive(Parser)]
#[command(name = "cfreason", version, about = "Counterfactual reasoning over a sorted modal logic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Limits {
    /// Wall-clock limit per query, in milliseconds.
    #[arg(long, default_value_t = 30_000)]
    timeout_ms: u64,
    /// Time allowed to each consistency check, in milliseconds.
    #[arg(long, default_value_t = 500)]
    delta_ms: u64,
    /// Modal nesting depth for the prover.
    #[arg(long, default_value_t = 3)]
    depth: u32,
    /// Subset enumeration order for counterfactual search.
    #[arg(long, default_value = "large-first", value_parser = parse_order)]
    order: SubsetOrder,
    /// Emit one JSON document instead of text.
    #[arg(long)]
    json: bool,
}

fn parse_order(s: &str) -> Result<SubsetOrder, String> {
    s.parse()
}

#[derive(Args)]
struct QueryArgs {
    file: PathBuf,
    /// Run only the N-th query of the file (counting from 1).
    #[arg(long)]
    query: Option<usize>,
    #[command(flatten)]
    limits: Limits,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    A,
    B,
}

#[derive(Subcommand)]
enum Command {
    /// Prove the `entail` queries of a problem file.
    Prove(QueryArgs),
    /// Decide the `cf` queries of a problem file.
    Cf(QueryArgs),
    /// Decide the `cf-in` queries of a problem file.
    CfIn(QueryArgs),
    /// Run the benchmark dataset and print the summary table.
    Bench {
        /// Dataset directory; defaults to the shipped dataset.
        dir: Option<PathBuf>,
        /// Only check the dataset, without timing the queries.
        #[arg(long)]
        validate_only: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Derive C5a or C5b from a dilemma file.
    Dde {
        /// Dilemma problem file; defaults to the shipped trolley dilemma.
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "a")]
        which: Which,
        /// Drop every common-knowledge premise first.
        #[arg(long)]
        ablate: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Evaluate propositional queries exactly by truth tables.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        query: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

/// Exit status: 0 proved or complete, 1 not proved or mismatch, 2 input error.
struct Failure(String);

type Outcome = Result<bool, Failure>;

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

impl Limits {
    fn cf(&self) -> CfConfig {
        CfConfig {
            delta_ms: self.delta_ms,
            entail_ms: self.timeout_ms.min(CfConfig::default().entail_ms),
            order: self.order,
            overall_ms: self.timeout_ms,
            max_cardinality: None,
            depth: self.depth,
        }
    }

    fn budget(&self) -> Budget {
        Budget { timeout_ms: self.timeout_ms, depth: self.depth, max_clauses: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Prove(a) => run_queries(&a, "entail"),
        Command::Cf(a) => run_queries(&a, "cf"),
        Command::CfIn(a) => run_queries(&a, "cf-in"),
        Command::Bench { dir, validate_only, limits } => bench(dir.unwrap_or_else(shipped_dataset_dir), validate_only, &limits),
        Command::Dde { file, which, ablate, limits } => dde(file.as_deref(), which, ablate, &limits),
        Command::Oracle { file, query, json } => oracle(&file, query, json),
    }
}

fn selected<'p>(p: &'p Problem, query: Option<usize>, kind: &str) -> Result<Vec<(usize, &'p Query)>, Failure> {
    let chosen: Vec<(usize, &Query)> = match query {
        Some(n) => {
            let q = n
                .checked_sub(1)
                .and_then(|i| p.queries.get(i))
                .ok_or_else(|| Failure(format!("problem has {} queries, no query {n}", p.queries.len())))?;
            if q.kind() != kind {
                return Err(Failure(format!("query {n} is `{}`, not `{kind}`", q.kind())));
            }
            vec![(n, q)]
        }
        None => p.queries.iter().enumerate().filter(|(_, q)| q.kind() == kind).map(|(i, q)| (i + 1, q)).collect(),
    };
    if chosen.is_empty() {
        return Err(Failure(format!("problem has no `{kind}` queries")));
    }
    Ok(chosen)
}

fn run_queries(a: &QueryArgs, kind: &str) -> Outcome {
    let p = load_problem(&a.file)?;
    let mut all = true;
    let mut docs = Vec::new();
    for (n, q) in selected(&p, a.query, kind)? {
        let (proved, doc, text) = match q {
            Query::Entail(goal) => {
                let out = prove_unchecked(&p.signature, &p.assumptions, goal, &a.limits.budget());
                (out.is_proved(), proof_json(&out), proof_text(&out))
            }
            Query::Counterfactual { antecedent, consequent } => {
                let r = cfreason::counterfactual::prove_counterfactual(
                    &p.signature,
                    &p.assumptions,
                    antecedent,
                    consequent,
                    &a.limits.cf(),
                )?;
                (r.is_proved(), cf_json(&r), cf_text(&r))
            }
            Query::ContextualCounterfactual { context, antecedent, consequent } => {
                let r = cfreason::counterfactual::prove_counterfactual_in_context(
                    &p.signature,
                    &p.assumptions,
                    context,
                    antecedent,
                    consequent,
                    &a.limits.cf(),
                )?;
                (r.is_proved(), cf_json(&r), cf_text(&r))
            }
        };
        all &= proved;
        if a.limits.json {
            let mut doc = doc;
            doc["query"] = json!(n);
            doc["text"] = json!(q.print());
            docs.push(doc);
        } else {
            println!("query {n}: {}", q.print());
            print!("{text}");
        }
    }
    if a.limits.json {
        println!("{}", json!({ "problem": p.name, "results": docs }));
    }
    Ok(all)
}

fn proof_json(out: &ProofOutcome) -> Value {
    json!({
        "status": out.status.to_string(),
        "elapsed_ms": out.elapsed_ms,
        "exhausted": out.exhausted,
        "used_premises": out.used_premises,
        "justification": out.justification.as_ref().map(|j| j.render()),
    })
}

fn proof_text(out: &ProofOutcome) -> String {
    let mut s = format!("  status: {}  ({:.1} ms)\n", out.status, out.elapsed_ms);
    if let Some(j) = &out.justification {
        s += &format!("  premises used: {:?}\n", out.used_premises);
        for line in j.render().lines() {
            s += &format!("    {line}\n");
        }
    } else if out.exhausted {
        s += "  search saturated without a proof\n";
    }
    s
}

fn witness_json(r: &CfResult) -> Value {
    match &r.witness {
        None => Value::Null,
        Some(CfWitness::InconsistentAntecedent { refutation }) => json!({
            "kind": "inconsistent-antecedent",
            "refutation": proof_json(refutation),
        }),
        Some(CfWitness::Subset { indices, formulas, approximation_used, consistency, entailment, .. }) => json!({
            "kind": "subset",
            "indices": indices,
            "formulas": formulas.iter().map(print_formula).collect::<Vec<_>>(),
            "consistency": consistency.value.to_string(),
            "approximation_used": approximation_used,
            "entailment": proof_json(entailment),
        }),
    }
}

fn cf_json(r: &CfResult) -> Value {
    json!({
        "status": r.status.to_string(),
        "elapsed_ms": r.elapsed_ms,
        "context": r.context.to_string(),
        "counters": r.counters,
        "witness": witness_json(r),
    })
}

fn cf_text(r: &CfResult) -> String {
    let c = &r.counters;
    let mut s = format!(
        "  status: {}  ({:.1} ms; {} subsets, {} entailment and {} consistency calls)\n",
        r.status, r.elapsed_ms, c.subsets_examined, c.entailment_calls, c.consistency_calls
    );
    match &r.witness {
        None => {}
        Some(CfWitness::InconsistentAntecedent { .. }) => s += "  witness: the antecedent is inconsistent\n",
        Some(CfWitness::Subset { indices, formulas, approximation_used, .. }) => {
            s += &format!("  witness subset {indices:?}\n");
            for f in formulas {
                s += &format!("    {}\n", print_formula(f));
            }
            if *approximation_used {
                s += "  consistency presumed after the time limit\n";
            }
        }
    }
    s
}

fn bench(dir: PathBuf, validate_only: bool, limits: &Limits) -> Outcome {
    if validate_only {
        let rep = validate_dataset(&dir, &limits.budget())?;
        if limits.json {
            println!("{}", serde_json::to_string_pretty(&rep)?);
        } else {
            println!("{} problems, {} cross-checked by the oracle", rep.problems, rep.oracle_checked);
            for i in &rep.issues {
                println!("  {i}");
            }
            if rep.is_clean() {
                println!("dataset is valid");
            }
        }
        return Ok(rep.is_clean());
    }
    let cfg = BenchConfig { timeout_ms: limits.timeout_ms, cf: limits.cf() };
    let rep = run_benchmark(&dir, &cfg)?;
    if limits.json {
        println!("{}", rep.to_json());
    } else {
        for r in &rep.records {
            let mark = if r.as_expected() { "ok" } else { "MISMATCH" };
            println!("{:<14}{:<17}{:<23}{:>10.1} ms  {mark}", r.problem, r.kind.name(), r.status.to_string(), r.elapsed_ms);
        }
        println!();
        print!("{}", rep.table());
    }
    Ok(rep.all_as_expected())
}

fn dde(file: Option<&Path>, which: Which, ablate: bool, limits: &Limits) -> Outcome {
    let kb = match file {
        Some(path) => DilemmaKb::parse(&std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?)?,
        None => shipped_dilemma(),
    };
    let kb = if ablate { kb.without_common_knowledge() } else { kb };
    let clause = match which {
        Which::A => Clause5::A,
        Which::B => Clause5::B,
    };
    let formula = match clause {
        Clause5::A => kb.c5a_formula()?,
        Clause5::B => kb.c5b_formula()?,
    };
    let out = derive_c5(&kb, clause, &limits.cf())?;
    let (doc, text) = match &out {
        C5Outcome::A(p) => (proof_json(p), proof_text(p)),
        C5Outcome::B(r) => (cf_json(r), cf_text(r)),
    };
    if limits.json {
        let mut doc = doc;
        doc["clause"] = json!(clause.to_string());
        doc["formula"] = json!(print_formula(&formula));
        println!("{doc}");
    } else {
        println!("{clause}: {}", print_formula(&formula));
        print!("{text}");
    }
    Ok(out.is_proved())
}

fn oracle(file: &Path, query: Option<usize>, json_out: bool) -> Outcome {
    let p = load_problem(file)?;
    let picked: Vec<(usize, &Query)> = match query {
        Some(n) => vec![(n, n.checked_sub(1).and_then(|i| p.queries.get(i)).ok_or_else(|| Failure(format!("no query {n}")))?)],
        None => p.queries.iter().enumerate().map(|(i, q)| (i + 1, q)).collect(),
    };
    let mut all = true;
    let mut docs = Vec::new();
    for (n, q) in picked {
        let (entailed, verdict): (bool, Option<OracleVerdict>) = match q {
            Query::Entail(goal) => (entails(&p.assumptions, goal)?, None),
            Query::Counterfactual { antecedent, consequent } => {
                let v = oracle_counterfactual(&p.assumptions, antecedent, consequent)?;
                (v.entailed, Some(v))
            }
            Query::ContextualCounterfactual { .. } => return Err(Failure("the oracle handles only the propositional fragment".into())),
        };
        all &= entailed;
        if json_out {
            docs.push(json!({ "query": n, "text": q.print(), "entailed": entailed, "verdict": verdict }));
        } else {
            println!("query {n}: {}", q.print());
            println!("  entailed: {entailed}");
            if let Some(w) = verdict.as_ref().and_then(|v| v.witness.as_ref()) {
                let shown: Vec<String> = w.iter().map(|&i| print_formula(&p.assumptions[i])).collect();
                println!("  witness {w:?}: {}", shown.join(", "));
            }
        }
    }
    if json_out {
        println!("{}", json!({ "problem": p.name, "results": docs }));
    }
    Ok(all)
}
