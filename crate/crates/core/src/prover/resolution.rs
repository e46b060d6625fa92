//! Given-clause saturation with ordered resolution, factoring and paramodulation.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::budget::Deadline;
use super::fol::{normalize, subsumes, Clause, FTerm, Literal, Subst, Sym, SymbolTable, EQ};

const DEFAULT_CLAUSE_LIMIT: usize = 200_000;
const AGE_EVERY: usize = 5;

/// How a clause was obtained; indices refer to earlier clauses in the same store.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inference {
    Input { formula: usize },
    Resolve { left: usize, left_lit: usize, right: usize, right_lit: usize },
    Factor { clause: usize, i: usize, j: usize },
    EqResolve { clause: usize, lit: usize },
    Paramodulate {
        from: usize,
        from_lit: usize,
        reversed: bool,
        into: usize,
        into_lit: usize,
        arg: usize,
        path: Vec<usize>,
    },
}

impl Inference {
    pub fn parents(&self) -> Vec<usize> {
        match self {
            Inference::Input { .. } => vec![],
            Inference::Resolve { left, right, .. } => vec![*left, *right],
            Inference::Factor { clause, .. } | Inference::EqResolve { clause, .. } => vec![*clause],
            Inference::Paramodulate { from, into, .. } => vec![*from, *into],
        }
    }

    pub fn rule_name(&self) -> &'static str {
        match self {
            Inference::Input { .. } => "input",
            Inference::Resolve { .. } => "resolution",
            Inference::Factor { .. } => "factoring",
            Inference::EqResolve { .. } => "equality resolution",
            Inference::Paramodulate { .. } => "paramodulation",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stored {
    pub clause: Clause,
    pub inference: Inference,
    eligible: Vec<bool>,
    deleted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Index of the empty clause.
    Refuted(usize),
    /// Every inference was made: the input is satisfiable for this calculus.
    Saturated,
    OutOfTime,
    OutOfClauses,
}

fn join(a: &Clause, b: &Clause) -> (Vec<Literal>, Vec<Literal>, Subst) {
    let off = a.var_sorts.len() as u32;
    let mut sorts = a.var_sorts.clone();
    sorts.extend(b.var_sorts.iter().copied());
    (a.lits.clone(), b.shifted(off), Subst::with_sorts(sorts))
}

/// Binary resolution on `a[i]` and `b[j]`.
pub fn resolve(t: &SymbolTable, a: &Clause, i: usize, b: &Clause, j: usize) -> Option<Clause> {
    let (la, lb, mut s) = join(a, b);
    let (x, y) = (la.get(i)?, lb.get(j)?);
    if x.positive == y.positive || x.pred != y.pred || !s.unify_args(t, &x.args, &y.args) {
        return None;
    }
    let mut lits: Vec<Literal> = la.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, l)| l.clone()).collect();
    lits.extend(lb.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, l)| l.clone()));
    Some(normalize(lits, &s))
}

/// Merge `c[i]` and `c[j]` by unifying them.
pub fn factor(t: &SymbolTable, c: &Clause, i: usize, j: usize) -> Option<Clause> {
    let (x, y) = (c.lits.get(i)?, c.lits.get(j)?);
    if i == j || x.positive != y.positive || x.pred != y.pred {
        return None;
    }
    let mut s = Subst::with_sorts(c.var_sorts.clone());
    if !s.unify_args(t, &x.args, &y.args) {
        return None;
    }
    let lits = c.lits.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, l)| l.clone()).collect();
    Some(normalize(lits, &s))
}

/// Drop a negative equation `s != t` whose sides unify.
pub fn eq_resolve(t: &SymbolTable, c: &Clause, i: usize) -> Option<Clause> {
    let x = c.lits.get(i)?;
    if x.positive || x.pred != EQ {
        return None;
    }
    let mut s = Subst::with_sorts(c.var_sorts.clone());
    if !s.unify(t, &x.args[0], &x.args[1]) {
        return None;
    }
    let lits = c.lits.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, l)| l.clone()).collect();
    Some(normalize(lits, &s))
}

/// Rewrite the subterm at `into[into_lit].args[arg]@path` with the equation `from[from_lit]`.
#[allow(clippy::too_many_arguments)]
pub fn paramodulate(
    t: &SymbolTable,
    from: &Clause,
    from_lit: usize,
    reversed: bool,
    into: &Clause,
    into_lit: usize,
    arg: usize,
    path: &[usize],
) -> Option<Clause> {
    let (la, lb, mut s) = join(from, into);
    let eq = la.get(from_lit)?;
    if !eq.positive || eq.pred != EQ {
        return None;
    }
    let (lhs, rhs) = if reversed { (&eq.args[1], &eq.args[0]) } else { (&eq.args[0], &eq.args[1]) };
    if matches!(lhs, FTerm::Var(_)) {
        return None;
    }
    let target = lb.get(into_lit)?;
    if t.is_opaque(target.pred) {
        return None;
    }
    let sub = target.args.get(arg)?.at(path)?;
    if matches!(sub, FTerm::Var(_)) || !s.unify(t, lhs, sub) {
        return None;
    }
    let mut rewritten = target.clone();
    rewritten.args[arg] = target.args[arg].replace_at(path, rhs);
    let mut lits: Vec<Literal> =
        la.iter().enumerate().filter(|(k, _)| *k != from_lit).map(|(_, l)| l.clone()).collect();
    for (k, l) in lb.iter().enumerate() {
        lits.push(if k == into_lit { rewritten.clone() } else { l.clone() });
    }
    Some(normalize(lits, &s))
}

fn term_order(a: &FTerm, b: &FTerm) -> Ordering {
    a.size().cmp(&b.size()).then_with(|| a.cmp(b))
}

/// Whether rewriting left-to-right (or reversed) is allowed for this equation.
fn oriented(eq: &Literal, reversed: bool) -> bool {
    let (l, r) = if reversed { (&eq.args[1], &eq.args[0]) } else { (&eq.args[0], &eq.args[1]) };
    if matches!(l, FTerm::Var(_)) {
        return false;
    }
    if l.is_ground() && r.is_ground() {
        return term_order(l, r) == Ordering::Greater;
    }
    true
}

pub struct Engine {
    pub table: SymbolTable,
    pub store: Vec<Stored>,
    active: Vec<usize>,
    index: HashMap<(Sym, bool), Vec<(usize, usize)>>,
    eq_sources: Vec<usize>,
    by_weight: BinaryHeap<Reverse<(usize, usize)>>,
    by_age: VecDeque<usize>,
    taken: Vec<bool>,
    seen: HashSet<Clause>,
    limit: usize,
    picks: usize,
    pub generated: usize,
}

impl Engine {
    pub fn new(table: SymbolTable, max_clauses: Option<usize>) -> Self {
        Engine {
            table,
            store: Vec::new(),
            active: Vec::new(),
            index: HashMap::new(),
            eq_sources: Vec::new(),
            by_weight: BinaryHeap::new(),
            by_age: VecDeque::new(),
            taken: Vec::new(),
            seen: HashSet::new(),
            limit: max_clauses.unwrap_or(DEFAULT_CLAUSE_LIMIT),
            picks: 0,
            generated: 0,
        }
    }

    /// Add a clause; returns its index if it was new (or empty).
    pub fn add(&mut self, clause: Clause, inference: Inference) -> Option<usize> {
        if clause.is_tautology() {
            return None;
        }
        if !clause.is_empty() && !self.seen.insert(clause.clone()) {
            return None;
        }
        let id = self.store.len();
        let eligible = clause.eligible();
        self.by_weight.push(Reverse((clause.weight(), id)));
        self.by_age.push_back(id);
        self.taken.push(false);
        self.store.push(Stored { clause, inference, eligible, deleted: false });
        Some(id)
    }

    fn pick(&mut self) -> Option<usize> {
        self.picks += 1;
        let from_age = self.picks.is_multiple_of(AGE_EVERY);
        loop {
            let id = if from_age {
                match self.by_age.pop_front() {
                    Some(id) => id,
                    None => self.by_weight.pop()?.0 .1,
                }
            } else {
                match self.by_weight.pop() {
                    Some(Reverse((_, id))) => id,
                    None => self.by_age.pop_front()?,
                }
            };
            if !self.taken[id] {
                self.taken[id] = true;
                return Some(id);
            }
        }
    }

    fn forward_subsumed(&self, c: &Clause) -> bool {
        self.active.iter().any(|&a| {
            let s = &self.store[a];
            !s.deleted && subsumes(&self.table, &s.clause, c)
        })
    }

    fn backward_subsume(&mut self, given: usize) {
        let c = self.store[given].clause.clone();
        for k in 0..self.active.len() {
            let a = self.active[k];
            if a != given && !self.store[a].deleted && subsumes(&self.table, &c, &self.store[a].clause) {
                self.store[a].deleted = true;
            }
        }
    }

    fn activate(&mut self, id: usize) {
        self.active.push(id);
        let lits = self.store[id].clause.lits.clone();
        for (i, l) in lits.iter().enumerate() {
            if self.store[id].eligible[i] {
                self.index.entry((l.pred, l.positive)).or_default().push((id, i));
            }
            if l.positive && l.pred == EQ && !self.eq_sources.contains(&id) {
                self.eq_sources.push(id);
            }
        }
    }

    pub fn run(&mut self, deadline: &Deadline) -> Outcome {
        if let Some(i) = self.store.iter().position(|s| s.clause.is_empty()) {
            return Outcome::Refuted(i);
        }
        while let Some(given) = self.pick() {
            if deadline.expired() {
                return Outcome::OutOfTime;
            }
            if self.store.len() > self.limit {
                return Outcome::OutOfClauses;
            }
            let g = self.store[given].clause.clone();
            if self.forward_subsumed(&g) {
                self.store[given].deleted = true;
                continue;
            }
            self.backward_subsume(given);
            self.activate(given);
            match self.infer(given, deadline) {
                Ok(Some(empty)) => return Outcome::Refuted(empty),
                Ok(None) => {}
                Err(o) => return o,
            }
        }
        Outcome::Saturated
    }

    fn push(&mut self, c: Option<Clause>, inf: Inference) -> Option<usize> {
        let c = c?;
        self.generated += 1;
        let empty = c.is_empty();
        let id = self.add(c, inf)?;
        empty.then_some(id)
    }

    fn infer(&mut self, given: usize, deadline: &Deadline) -> Result<Option<usize>, Outcome> {
        let g = self.store[given].clause.clone();
        let g_elig = self.store[given].eligible.clone();
        let mut ticks = 0usize;
        let mut tick = |e: &Engine| -> Result<(), Outcome> {
            ticks += 1;
            if ticks.is_multiple_of(64) {
                if deadline.expired() {
                    return Err(Outcome::OutOfTime);
                }
                if e.store.len() > e.limit {
                    return Err(Outcome::OutOfClauses);
                }
            }
            Ok(())
        };

        for (i, l) in g.lits.iter().enumerate() {
            if !g_elig[i] {
                continue;
            }
            let partners = self.index.get(&(l.pred, !l.positive)).cloned().unwrap_or_default();
            for (other, j) in partners {
                if self.store[other].deleted && other != given {
                    continue;
                }
                tick(self)?;
                let c = resolve(&self.table, &g, i, &self.store[other].clause, j);
                let inf = Inference::Resolve { left: given, left_lit: i, right: other, right_lit: j };
                if let Some(e) = self.push(c, inf) {
                    return Ok(Some(e));
                }
            }
        }

        for i in 0..g.lits.len() {
            for j in i + 1..g.lits.len() {
                let c = factor(&self.table, &g, i, j);
                if let Some(e) = self.push(c, Inference::Factor { clause: given, i, j }) {
                    return Ok(Some(e));
                }
            }
            let c = eq_resolve(&self.table, &g, i);
            if let Some(e) = self.push(c, Inference::EqResolve { clause: given, lit: i }) {
                return Ok(Some(e));
            }
        }

        // Equations of the given clause into every active clause.
        let actives: Vec<usize> = self.active.clone();
        for (fi, l) in g.lits.iter().enumerate() {
            if !(l.positive && l.pred == EQ) {
                continue;
            }
            for reversed in [false, true] {
                if !oriented(l, reversed) {
                    continue;
                }
                for &into in &actives {
                    if self.store[into].deleted && into != given {
                        continue;
                    }
                    if let Some(e) = self.para_into(given, fi, reversed, into, &mut tick)? {
                        return Ok(Some(e));
                    }
                }
            }
        }
        // Active equations into the given clause.
        for from in self.eq_sources.clone() {
            if from == given || self.store[from].deleted {
                continue;
            }
            let f = self.store[from].clause.clone();
            for (fi, l) in f.lits.iter().enumerate() {
                if !(l.positive && l.pred == EQ) {
                    continue;
                }
                for reversed in [false, true] {
                    if !oriented(l, reversed) {
                        continue;
                    }
                    if let Some(e) = self.para_into(from, fi, reversed, given, &mut tick)? {
                        return Ok(Some(e));
                    }
                }
            }
        }
        Ok(None)
    }

    fn para_into(
        &mut self,
        from: usize,
        fi: usize,
        reversed: bool,
        into: usize,
        tick: &mut impl FnMut(&Engine) -> Result<(), Outcome>,
    ) -> Result<Option<usize>, Outcome> {
        let f = self.store[from].clause.clone();
        let d = self.store[into].clause.clone();
        for (ii, lit) in d.lits.iter().enumerate() {
            if self.table.is_opaque(lit.pred) {
                continue;
            }
            for (arg, term) in lit.args.iter().enumerate() {
                let mut paths = Vec::new();
                term.positions(&mut Vec::new(), &mut paths);
                for path in paths {
                    if from == into && ii == fi {
                        continue;
                    }
                    tick(self)?;
                    let c = paramodulate(&self.table, &f, fi, reversed, &d, ii, arg, &path);
                    let inf = Inference::Paramodulate {
                        from,
                        from_lit: fi,
                        reversed,
                        into,
                        into_lit: ii,
                        arg,
                        path,
                    };
                    if let Some(e) = self.push(c, inf) {
                        return Ok(Some(e));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Indices of the clauses the derivation of `id` depends on, in store order.
    pub fn ancestry(&self, id: usize) -> Vec<usize> {
        let mut seen = vec![false; self.store.len()];
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            if std::mem::replace(&mut seen[c], true) {
                continue;
            }
            stack.extend(self.store[c].inference.parents());
        }
        (0..self.store.len()).filter(|&i| seen[i]).collect()
    }
}
