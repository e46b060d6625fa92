//! Counterfactual entailment by subset search.
//!
//! `Γ ⊢ φ↪ψ` holds when φ alone is inconsistent, or when some `Γ′ ⊆ Γ` is
//! consistent with φ and `Γ′ + φ ⊢ ψ`. The contextual form ranges `Γ′` over
//! the bodies of the members of Γ that sit under a modal context.

mod subsets;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{project_context_indexed, Formula, ModalContext, Signature, SortError};
use crate::prover::{
    consistent_with, prove_unchecked, replay, Budget, Consistency, ConsistencyVerdict, Deadline,
    ProofOutcome, ProofStatus,
};

pub use subsets::{enumerate_subsets, mask_indices, SubsetOrder, Subsets, MAX_ASSUMPTIONS};

/// Smallest slice of time handed to a single entailment call.
const MIN_SLICE_MS: u64 = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfConfig {
    /// Time allowed to each consistency check.
    pub delta_ms: u64,
    /// Time allowed to each entailment check, before division.
    pub entail_ms: u64,
    pub order: SubsetOrder,
    /// Wall-clock cap for the whole search.
    pub overall_ms: u64,
    pub max_cardinality: Option<usize>,
    /// Modal depth handed to every prover call.
    pub depth: u32,
}

impl Default for CfConfig {
    fn default() -> Self {
        CfConfig {
            delta_ms: 500,
            entail_ms: 5_000,
            order: SubsetOrder::LargeFirst,
            overall_ms: 30_000,
            max_cardinality: None,
            depth: 3,
        }
    }
}

impl CfConfig {
    pub fn validate(&self) -> Result<(), CfError> {
        if self.delta_ms == 0 || self.entail_ms == 0 || self.overall_ms == 0 {
            return Err(CfError::Config("time limits must be positive".into()));
        }
        if self.max_cardinality == Some(0) {
            return Err(CfError::Config("max cardinality must be positive".into()));
        }
        Ok(())
    }

    fn delta_budget(&self) -> Budget {
        Budget { timeout_ms: self.delta_ms, depth: self.depth, max_clauses: None }
    }
}

#[derive(Debug, Error)]
pub enum CfError {
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("{0} assumptions exceed the subset-search cap of {MAX_ASSUMPTIONS}")]
    TooManyAssumptions(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Debug)]
pub enum CfWitness {
    /// φ alone was refuted.
    InconsistentAntecedent { refutation: ProofOutcome },
    Subset {
        /// Indices into the original premise list.
        indices: Vec<usize>,
        /// The members of Γ′ (bodies, under a context).
        formulas: Vec<Formula>,
        /// Consistency verdict for Γ″ + φ with Γ′ ⊆ Γ″, indices into the original list.
        consistency_of: Vec<usize>,
        consistency: ConsistencyVerdict,
        /// Proof of ψ from Γ‴ + φ with Γ‴ ⊆ Γ′.
        entailment_of: Vec<usize>,
        entailment: ProofOutcome,
        /// Consistency is presumed from a failed refutation.
        approximation_used: bool,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfCounters {
    pub subsets_examined: u64,
    pub entailment_calls: u64,
    pub consistency_calls: u64,
    pub entailments_memoized: u64,
    pub consistencies_memoized: u64,
}

#[derive(Clone, Debug)]
pub struct CfResult {
    pub status: ProofStatus,
    pub witness: Option<CfWitness>,
    pub counters: CfCounters,
    pub elapsed_ms: f64,
    pub context: ModalContext,
}

impl CfResult {
    pub fn is_proved(&self) -> bool {
        self.status == ProofStatus::Proved
    }

    /// Indices of Γ′ for a subset witness.
    pub fn subset(&self) -> Option<&[usize]> {
        match &self.witness {
            Some(CfWitness::Subset { indices, .. }) => Some(indices),
            _ => None,
        }
    }
}

pub fn prove_counterfactual(
    sig: &Signature,
    gamma: &[Formula],
    phi: &Formula,
    psi: &Formula,
    cfg: &CfConfig,
) -> Result<CfResult, CfError> {
    prove_counterfactual_in_context(sig, gamma, &ModalContext::empty(), phi, psi, cfg)
}

/// The premises a subset may draw from: all of `gamma` under the empty
/// context, otherwise the bodies projected through `ctx`.
pub fn search_base(gamma: &[Formula], ctx: &ModalContext) -> Vec<(usize, Formula)> {
    if ctx.is_empty() {
        gamma.iter().cloned().enumerate().collect()
    } else {
        project_context_indexed(gamma, ctx)
    }
}

pub fn prove_counterfactual_in_context(
    sig: &Signature,
    gamma: &[Formula],
    ctx: &ModalContext,
    phi: &Formula,
    psi: &Formula,
    cfg: &CfConfig,
) -> Result<CfResult, CfError> {
    cfg.validate()?;
    for f in gamma.iter().chain([phi, psi]) {
        sig.check_formula(f)?;
    }
    let base = search_base(gamma, ctx);
    if base.len() > MAX_ASSUMPTIONS {
        return Err(CfError::TooManyAssumptions(base.len()));
    }
    Ok(Search::new(sig, base, phi, psi, cfg, ctx.clone()).run())
}

struct Search<'a> {
    sig: &'a Signature,
    base: Vec<(usize, Formula)>,
    phi: &'a Formula,
    psi: &'a Formula,
    cfg: &'a CfConfig,
    ctx: ModalContext,
    counters: CfCounters,
    /// Minimal sets known to entail ψ together with φ.
    entailing: Vec<(u32, ProofOutcome)>,
    /// Maximal sets whose non-entailment is definitive.
    barren: Vec<u32>,
    /// Maximal sets presumed consistent with φ.
    consistent: Vec<(u32, ConsistencyVerdict)>,
    /// Minimal sets refuted together with φ.
    cores: Vec<u32>,
}

fn subset_of(a: u32, b: u32) -> bool {
    a & !b == 0
}

impl<'a> Search<'a> {
    fn new(
        sig: &'a Signature,
        base: Vec<(usize, Formula)>,
        phi: &'a Formula,
        psi: &'a Formula,
        cfg: &'a CfConfig,
        ctx: ModalContext,
    ) -> Self {
        Search {
            sig,
            base,
            phi,
            psi,
            cfg,
            ctx,
            counters: CfCounters::default(),
            entailing: Vec::new(),
            barren: Vec::new(),
            consistent: Vec::new(),
            cores: Vec::new(),
        }
    }

    fn with_phi(&self, mask: u32) -> Vec<Formula> {
        let mut v: Vec<Formula> =
            mask_indices(mask).into_iter().map(|i| self.base[i].1.clone()).collect();
        v.push(self.phi.clone());
        v
    }

    fn original(&self, mask: u32) -> Vec<usize> {
        mask_indices(mask).into_iter().map(|i| self.base[i].0).collect()
    }

    fn result(&self, start: Instant, witness: Option<CfWitness>) -> CfResult {
        CfResult {
            status: if witness.is_some() { ProofStatus::Proved } else { ProofStatus::NotProvedWithinBudget },
            witness,
            counters: self.counters,
            elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
            context: self.ctx.clone(),
        }
    }

    fn run(mut self) -> CfResult {
        let start = Instant::now();
        let deadline = Deadline::after(self.cfg.overall_ms);
        self.counters.consistency_calls += 1;
        let alone = consistent_with(self.sig, std::slice::from_ref(self.phi), &self.cfg.delta_budget());
        if alone.value == Consistency::Inconsistent {
            let refutation = alone.refutation.expect("inconsistent verdicts carry a refutation");
            return self.result(start, Some(CfWitness::InconsistentAntecedent { refutation }));
        }
        self.consistent.push((0, alone));
        let n = self.base.len();
        let total = 1u64 << n;
        for (seen, mask) in Subsets::new(n, self.cfg.order).enumerate() {
            if deadline.expired() {
                break;
            }
            if self.cfg.max_cardinality.is_some_and(|m| mask.count_ones() as usize > m) {
                continue;
            }
            self.counters.subsets_examined += 1;
            let left = (total - seen as u64).max(1);
            let found = match self.cfg.order {
                SubsetOrder::LargeFirst => self.consistency(mask).and_then(|c| {
                    let e = self.entailment(mask, &deadline, left)?;
                    Some((c, e))
                }),
                SubsetOrder::SmallFirst => self.entailment(mask, &deadline, left).and_then(|e| {
                    let c = self.consistency(mask)?;
                    Some((c, e))
                }),
            };
            if let Some(((cmask, consistency), (emask, entailment))) = found {
                let witness = CfWitness::Subset {
                    indices: self.original(mask),
                    formulas: mask_indices(mask).into_iter().map(|i| self.base[i].1.clone()).collect(),
                    consistency_of: self.original(cmask),
                    approximation_used: !consistency.saturated,
                    consistency,
                    entailment_of: self.original(emask),
                    entailment,
                };
                return self.result(start, Some(witness));
            }
        }
        self.result(start, None)
    }

    /// Whether Γ′ + φ is presumed consistent; the verdict may come from a superset.
    fn consistency(&mut self, mask: u32) -> Option<(u32, ConsistencyVerdict)> {
        if let Some((m, v)) = self.consistent.iter().find(|(m, _)| subset_of(mask, *m)) {
            self.counters.consistencies_memoized += 1;
            return Some((*m, v.clone()));
        }
        if self.cores.iter().any(|&c| subset_of(c, mask)) {
            self.counters.consistencies_memoized += 1;
            return None;
        }
        self.counters.consistency_calls += 1;
        let v = consistent_with(self.sig, &self.with_phi(mask), &self.cfg.delta_budget());
        match v.value {
            Consistency::Inconsistent => {
                let idx = mask_indices(mask);
                let used = v.core().unwrap_or(&[]);
                let core = used
                    .iter()
                    .filter(|&&u| u < idx.len())
                    .fold(0u32, |acc, &u| acc | (1 << idx[u]));
                self.cores.retain(|&c| !subset_of(core, c));
                self.cores.push(core);
                None
            }
            Consistency::PresumedConsistent => {
                self.consistent.retain(|(m, _)| !subset_of(*m, mask));
                self.consistent.push((mask, v.clone()));
                Some((mask, v))
            }
        }
    }

    /// Whether Γ′ + φ ⊢ ψ; the proof may come from a subset.
    fn entailment(&mut self, mask: u32, deadline: &Deadline, left: u64) -> Option<(u32, ProofOutcome)> {
        if let Some((m, p)) = self.entailing.iter().find(|(m, _)| subset_of(*m, mask)) {
            self.counters.entailments_memoized += 1;
            return Some((*m, p.clone()));
        }
        if self.barren.iter().any(|&b| subset_of(mask, b)) {
            self.counters.entailments_memoized += 1;
            return None;
        }
        let remaining = deadline.remaining_ms();
        if remaining == 0 {
            return None;
        }
        let slice = (remaining / left).max(MIN_SLICE_MS).min(self.cfg.entail_ms).min(remaining);
        let budget = Budget { timeout_ms: slice, depth: self.cfg.depth, max_clauses: None };
        self.counters.entailment_calls += 1;
        let out = prove_unchecked(self.sig, &self.with_phi(mask), self.psi, &budget);
        if out.is_proved() {
            self.entailing.retain(|(m, _)| !subset_of(mask, *m));
            self.entailing.push((mask, out.clone()));
            Some((mask, out))
        } else {
            if out.exhausted {
                self.barren.retain(|&b| !subset_of(b, mask));
                self.barren.push(mask);
            }
            None
        }
    }
}

/// Re-check a result with independent prover calls.
pub fn verify_witness(
    sig: &Signature,
    gamma: &[Formula],
    ctx: &ModalContext,
    phi: &Formula,
    psi: &Formula,
    result: &CfResult,
    cfg: &CfConfig,
) -> Result<(), String> {
    let budget = Budget { timeout_ms: cfg.entail_ms, depth: cfg.depth, max_clauses: None };
    match &result.witness {
        None => Ok(()),
        Some(CfWitness::InconsistentAntecedent { refutation }) => {
            let j = refutation.justification.as_ref().ok_or("refutation without justification")?;
            replay(sig, std::slice::from_ref(phi), &Formula::falsum(), j).map_err(|e| e.to_string())?;
            let again = consistent_with(sig, std::slice::from_ref(phi), &cfg.delta_budget());
            if again.value != Consistency::Inconsistent {
                return Err("antecedent no longer refuted".into());
            }
            Ok(())
        }
        Some(CfWitness::Subset { indices, formulas, .. }) => {
            let projected = search_base(gamma, ctx);
            for (i, f) in indices.iter().zip(formulas) {
                if !projected.iter().any(|(j, g)| j == i && g == f) {
                    return Err(format!("premise {i} is not in the projected set"));
                }
            }
            let mut with_phi = formulas.clone();
            with_phi.push(phi.clone());
            let c = consistent_with(sig, &with_phi, &cfg.delta_budget());
            if c.value != Consistency::PresumedConsistent {
                return Err("subset plus antecedent is refuted".into());
            }
            let p = prove_unchecked(sig, &with_phi, psi, &budget);
            let j = p.justification.as_ref().ok_or("subset plus antecedent does not entail the consequent")?;
            replay(sig, &with_phi, psi, j).map_err(|e| e.to_string())
        }
    }
}
