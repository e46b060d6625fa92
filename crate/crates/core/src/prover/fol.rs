//! First-order clause representation with sorted unification.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::{self, Write};

use crate::kernel::Signature;

pub type Sym = u32;
pub type SortId = u16;

/// Predicate id reserved for equality.
pub const EQ: Sym = 0;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FTerm {
    Var(u32),
    Fn(Sym, Vec<FTerm>),
}

impl FTerm {
    pub fn is_ground(&self) -> bool {
        match self {
            FTerm::Var(_) => false,
            FTerm::Fn(_, args) => args.iter().all(FTerm::is_ground),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            FTerm::Var(_) => 1,
            FTerm::Fn(_, args) => 1 + args.iter().map(FTerm::size).sum::<usize>(),
        }
    }

    fn max_var(&self) -> Option<u32> {
        match self {
            FTerm::Var(v) => Some(*v),
            FTerm::Fn(_, args) => args.iter().filter_map(FTerm::max_var).max(),
        }
    }

    fn shift(&self, by: u32) -> FTerm {
        match self {
            FTerm::Var(v) => FTerm::Var(v + by),
            FTerm::Fn(f, args) => FTerm::Fn(*f, args.iter().map(|a| a.shift(by)).collect()),
        }
    }

    fn occurs(&self, v: u32, s: &Subst) -> bool {
        match self {
            FTerm::Var(w) => match s.get(*w) {
                Some(t) => t.occurs(v, s),
                None => *w == v,
            },
            FTerm::Fn(_, args) => args.iter().any(|a| a.occurs(v, s)),
        }
    }

    /// Subterm at a path of argument indices.
    pub fn at(&self, path: &[usize]) -> Option<&FTerm> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => match self {
                FTerm::Fn(_, args) => args.get(*i)?.at(rest),
                FTerm::Var(_) => None,
            },
        }
    }

    pub fn replace_at(&self, path: &[usize], by: &FTerm) -> FTerm {
        match path.split_first() {
            None => by.clone(),
            Some((i, rest)) => match self {
                FTerm::Fn(f, args) => {
                    let mut args = args.clone();
                    args[*i] = args[*i].replace_at(rest, by);
                    FTerm::Fn(*f, args)
                }
                FTerm::Var(_) => unreachable!("path into variable"),
            },
        }
    }

    /// Paths to every non-variable subterm.
    pub fn positions(&self, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if let FTerm::Fn(_, args) = self {
            out.push(prefix.clone());
            for (i, a) in args.iter().enumerate() {
                prefix.push(i);
                a.positions(prefix, out);
                prefix.pop();
            }
        }
    }
}

/// Symbol metadata for one proof job.
#[derive(Clone, Debug)]
pub struct SymInfo {
    pub name: String,
    pub args: Vec<SortId>,
    /// Result sort for function symbols; `None` for predicates.
    pub result: Option<SortId>,
    /// Shadow predicates: equality never rewrites inside their arguments.
    pub opaque: bool,
}

/// Interned sorts and symbols, with the subsort relation precomputed.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    pub sorts: Vec<String>,
    sort_ids: HashMap<String, SortId>,
    sub: Vec<Vec<bool>>,
    pub syms: Vec<SymInfo>,
    sym_ids: HashMap<String, Sym>,
    skolems: u32,
}

impl SymbolTable {
    pub fn new(sig: &Signature) -> Self {
        let mut names: Vec<String> = Vec::new();
        let push = |s: &str, names: &mut Vec<String>| {
            if !names.iter().any(|n| n == s) {
                names.push(s.to_owned());
            }
        };
        for s in [
            "Object", "Agent", "ActionType", "Action", "Event", "Moment", "Fluent", "Boolean",
            "Situation",
        ] {
            push(s, &mut names);
        }
        for d in sig.user_decls() {
            if let crate::kernel::Decl::Sort { name, .. } = d {
                push(name, &mut names);
            }
        }
        let n = names.len();
        let mut sub = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                sub[i][j] = sig.is_subsort(&names[i], &names[j]);
            }
        }
        let sort_ids = names.iter().enumerate().map(|(i, s)| (s.clone(), i as SortId)).collect();
        let mut t = SymbolTable {
            sorts: names,
            sort_ids,
            sub,
            syms: Vec::new(),
            sym_ids: HashMap::new(),
            skolems: 0,
        };
        t.syms.push(SymInfo { name: "=".into(), args: vec![], result: None, opaque: false });
        t.sym_ids.insert("=".into(), EQ);
        for (c, s) in sig.constants() {
            let s = t.sort_id(s);
            t.add(c, vec![], Some(s), false);
        }
        t
    }

    pub fn sort_id(&mut self, s: &str) -> SortId {
        if let Some(&id) = self.sort_ids.get(s) {
            return id;
        }
        // Unknown sorts (only reachable with unchecked input) become isolated roots.
        let id = self.sorts.len() as SortId;
        self.sorts.push(s.to_owned());
        self.sort_ids.insert(s.to_owned(), id);
        for row in &mut self.sub {
            row.push(false);
        }
        let mut row = vec![false; self.sorts.len()];
        row[id as usize] = true;
        self.sub.push(row);
        id
    }

    pub fn is_sub(&self, a: SortId, b: SortId) -> bool {
        self.sub[a as usize][b as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.sym_ids.get(name).copied()
    }

    pub fn add(&mut self, name: &str, args: Vec<SortId>, result: Option<SortId>, opaque: bool) -> Sym {
        if let Some(&id) = self.sym_ids.get(name) {
            return id;
        }
        let id = self.syms.len() as Sym;
        self.syms.push(SymInfo { name: name.to_owned(), args, result, opaque });
        self.sym_ids.insert(name.to_owned(), id);
        id
    }

    pub fn fresh_skolem(&mut self, args: Vec<SortId>, result: SortId) -> Sym {
        loop {
            self.skolems += 1;
            let name = format!("$sk{}", self.skolems);
            if !self.sym_ids.contains_key(&name) {
                return self.add(&name, args, Some(result), false);
            }
        }
    }

    pub fn fresh_predicate(&mut self, args: Vec<SortId>) -> Sym {
        loop {
            self.skolems += 1;
            let name = format!("$def{}", self.skolems);
            if !self.sym_ids.contains_key(&name) {
                return self.add(&name, args, None, false);
            }
        }
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.syms[s as usize].name
    }

    pub fn is_opaque(&self, s: Sym) -> bool {
        self.syms[s as usize].opaque
    }

    /// Sort of a non-variable term.
    pub fn result_sort(&self, f: Sym) -> Option<SortId> {
        self.syms[f as usize].result
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub pred: Sym,
    pub args: Vec<FTerm>,
}

impl Literal {
    pub fn is_eq(&self) -> bool {
        self.pred == EQ
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(FTerm::is_ground)
    }

    pub fn negated(&self) -> Literal {
        Literal { positive: !self.positive, ..self.clone() }
    }

    fn size(&self) -> usize {
        1 + self.args.iter().map(FTerm::size).sum::<usize>()
    }
}

/// Ground atom order used to restrict resolution: size, then structure.
pub fn compare_ground_atoms(a: &Literal, b: &Literal) -> Ordering {
    a.size()
        .cmp(&b.size())
        .then_with(|| a.pred.cmp(&b.pred))
        .then_with(|| a.args.cmp(&b.args))
}

/// A clause with the sorts of its variables `0..var_sorts.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub lits: Vec<Literal>,
    pub var_sorts: Vec<SortId>,
}

impl Clause {
    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.lits.iter().map(Literal::size).sum()
    }

    pub fn is_ground(&self) -> bool {
        self.var_sorts.is_empty()
    }

    /// Rename variables apart by `offset`.
    pub fn shifted(&self, offset: u32) -> Vec<Literal> {
        self.lits
            .iter()
            .map(|l| Literal {
                positive: l.positive,
                pred: l.pred,
                args: l.args.iter().map(|a| a.shift(offset)).collect(),
            })
            .collect()
    }

    pub fn is_tautology(&self) -> bool {
        for (i, l) in self.lits.iter().enumerate() {
            if l.positive && l.is_eq() && l.args[0] == l.args[1] {
                return true;
            }
            if self.lits[i + 1..]
                .iter()
                .any(|m| m.positive != l.positive && m.pred == l.pred && m.args == l.args)
            {
                return true;
            }
        }
        false
    }

    /// Literals allowed to take part in resolution.
    ///
    /// A ground literal is blocked when a strictly greater ground atom occurs
    /// in the same clause; non-ground literals are never blocked.
    pub fn eligible(&self) -> Vec<bool> {
        let max_ground = self
            .lits
            .iter()
            .filter(|l| l.is_ground())
            .max_by(|a, b| compare_ground_atoms(a, b));
        self.lits
            .iter()
            .map(|l| match max_ground {
                Some(m) if l.is_ground() => compare_ground_atoms(l, m) != Ordering::Less,
                _ => true,
            })
            .collect()
    }
}

/// Triangular substitution over a shared variable space.
#[derive(Clone, Debug, Default)]
pub struct Subst {
    binds: Vec<Option<FTerm>>,
    sorts: Vec<SortId>,
}

impl Subst {
    pub fn with_sorts(sorts: Vec<SortId>) -> Self {
        Subst { binds: vec![None; sorts.len()], sorts }
    }

    pub fn get(&self, v: u32) -> Option<&FTerm> {
        self.binds.get(v as usize).and_then(Option::as_ref)
    }

    pub fn var_sort(&self, v: u32) -> SortId {
        self.sorts[v as usize]
    }

    fn bind(&mut self, v: u32, t: FTerm) {
        self.binds[v as usize] = Some(t);
    }

    pub fn resolve(&self, t: &FTerm) -> FTerm {
        match t {
            FTerm::Var(v) => match self.get(*v) {
                Some(b) => self.resolve(b),
                None => t.clone(),
            },
            FTerm::Fn(f, args) => FTerm::Fn(*f, args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    fn walk<'a>(&'a self, t: &'a FTerm) -> &'a FTerm {
        let mut cur = t;
        while let FTerm::Var(v) = cur {
            match self.get(*v) {
                Some(b) => cur = b,
                None => break,
            }
        }
        cur
    }

    pub fn apply_lit(&self, l: &Literal) -> Literal {
        Literal {
            positive: l.positive,
            pred: l.pred,
            args: l.args.iter().map(|a| self.resolve(a)).collect(),
        }
    }

    /// Sorted unification; a variable only binds terms of its sort or below.
    pub fn unify(&mut self, table: &SymbolTable, a: &FTerm, b: &FTerm) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (FTerm::Var(x), FTerm::Var(y)) if x == y => true,
            (FTerm::Var(x), FTerm::Var(y)) => {
                let (sx, sy) = (self.var_sort(*x), self.var_sort(*y));
                if table.is_sub(sy, sx) {
                    self.bind(*x, b.clone());
                    true
                } else if table.is_sub(sx, sy) {
                    self.bind(*y, a.clone());
                    true
                } else {
                    false
                }
            }
            (FTerm::Var(x), FTerm::Fn(f, _)) | (FTerm::Fn(f, _), FTerm::Var(x)) => {
                let t = if matches!(a, FTerm::Var(_)) { &b } else { &a };
                let fits = table
                    .result_sort(*f)
                    .is_some_and(|s| table.is_sub(s, self.var_sort(*x)));
                if !fits || t.occurs(*x, self) {
                    return false;
                }
                self.bind(*x, t.clone());
                true
            }
            (FTerm::Fn(f, xs), FTerm::Fn(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(table, x, y))
            }
        }
    }

    pub fn unify_args(&mut self, table: &SymbolTable, xs: &[FTerm], ys: &[FTerm]) -> bool {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(table, x, y))
    }
}

/// One-way matching `pattern θ = target`, sort-respecting.
pub fn match_term(
    table: &SymbolTable,
    pat_sorts: &[SortId],
    tgt_sorts: &[SortId],
    pat: &FTerm,
    tgt: &FTerm,
    binds: &mut Vec<Option<FTerm>>,
) -> bool {
    match pat {
        FTerm::Var(v) => match &binds[*v as usize] {
            Some(b) => b == tgt,
            None => {
                let s = match tgt {
                    FTerm::Var(w) => tgt_sorts[*w as usize],
                    FTerm::Fn(f, _) => match table.result_sort(*f) {
                        Some(s) => s,
                        None => return false,
                    },
                };
                if !table.is_sub(s, pat_sorts[*v as usize]) {
                    return false;
                }
                binds[*v as usize] = Some(tgt.clone());
                true
            }
        },
        FTerm::Fn(f, xs) => match tgt {
            FTerm::Fn(g, ys) if f == g && xs.len() == ys.len() => xs
                .iter()
                .zip(ys)
                .all(|(x, y)| match_term(table, pat_sorts, tgt_sorts, x, y, binds)),
            _ => false,
        },
    }
}

fn match_lit(
    table: &SymbolTable,
    c: &Clause,
    d: &Clause,
    l: &Literal,
    m: &Literal,
    binds: &mut Vec<Option<FTerm>>,
) -> bool {
    if l.positive != m.positive || l.pred != m.pred {
        return false;
    }
    let saved = binds.clone();
    let ok = l
        .args
        .iter()
        .zip(&m.args)
        .all(|(x, y)| match_term(table, &c.var_sorts, &d.var_sorts, x, y, binds));
    if !ok && l.is_eq() {
        *binds = saved.clone();
        let ok2 = match_term(table, &c.var_sorts, &d.var_sorts, &l.args[0], &m.args[1], binds)
            && match_term(table, &c.var_sorts, &d.var_sorts, &l.args[1], &m.args[0], binds);
        if ok2 {
            return true;
        }
    }
    if !ok {
        *binds = saved;
    }
    ok
}

/// Whether `c` θ-subsumes `d` (and is not longer than it).
pub fn subsumes(table: &SymbolTable, c: &Clause, d: &Clause) -> bool {
    if c.lits.len() > d.lits.len() {
        return false;
    }
    if c.is_ground() && d.is_ground() {
        return c.lits.iter().all(|l| {
            d.lits.iter().any(|m| {
                m == l
                    || (l.is_eq() && m.is_eq() && l.positive == m.positive
                        && l.args[0] == m.args[1] && l.args[1] == m.args[0])
            })
        });
    }
    fn go(table: &SymbolTable, c: &Clause, d: &Clause, i: usize, binds: &mut Vec<Option<FTerm>>) -> bool {
        if i == c.lits.len() {
            return true;
        }
        for m in &d.lits {
            let saved = binds.clone();
            if match_lit(table, c, d, &c.lits[i], m, binds) && go(table, c, d, i + 1, binds) {
                return true;
            }
            *binds = saved;
        }
        false
    }
    let mut binds = vec![None; c.var_sorts.len()];
    go(table, c, d, 0, &mut binds)
}

/// Build a normalized clause: apply `s`, drop duplicate literals, renumber variables.
pub fn normalize(lits: Vec<Literal>, s: &Subst) -> Clause {
    let mut lits: Vec<Literal> = lits.iter().map(|l| s.apply_lit(l)).collect();
    for l in &mut lits {
        if l.is_eq() && l.args[1] < l.args[0] {
            l.args.swap(0, 1);
        }
    }
    lits.sort_by(|a, b| shape_key(a).cmp(&shape_key(b)).then_with(|| a.cmp(b)));
    lits.dedup();
    let mut map: HashMap<u32, u32> = HashMap::new();
    let mut var_sorts = Vec::new();
    fn renum(t: &FTerm, map: &mut HashMap<u32, u32>, sorts: &mut Vec<SortId>, s: &Subst) -> FTerm {
        match t {
            FTerm::Var(v) => {
                let next = map.len() as u32;
                let id = *map.entry(*v).or_insert_with(|| {
                    sorts.push(s.var_sort(*v));
                    next
                });
                FTerm::Var(id)
            }
            FTerm::Fn(f, args) => FTerm::Fn(*f, args.iter().map(|a| renum(a, map, sorts, s)).collect()),
        }
    }
    let lits = lits
        .into_iter()
        .map(|l| Literal {
            positive: l.positive,
            pred: l.pred,
            args: l.args.iter().map(|a| renum(a, &mut map, &mut var_sorts, s)).collect(),
        })
        .collect();
    Clause { lits, var_sorts }
}

/// Variable-blind ordering key so that variants normalize alike.
fn shape_key(l: &Literal) -> (bool, Sym, String) {
    fn shape(t: &FTerm, out: &mut String) {
        match t {
            FTerm::Var(_) => out.push('_'),
            FTerm::Fn(f, args) => {
                let _ = write!(out, "{f}(");
                for a in args {
                    shape(a, out);
                    out.push(',');
                }
                out.push(')');
            }
        }
    }
    let mut s = String::new();
    for a in &l.args {
        shape(a, &mut s);
        s.push(';');
    }
    (!l.positive, l.pred, s)
}

/// Max variable index + 1 over literals.
pub fn var_span(lits: &[Literal]) -> u32 {
    lits.iter()
        .flat_map(|l| l.args.iter())
        .filter_map(FTerm::max_var)
        .max()
        .map_or(0, |v| v + 1)
}

pub struct Show<'a, T>(pub &'a SymbolTable, pub &'a T);

impl fmt::Display for Show<'_, FTerm> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.1 {
            FTerm::Var(v) => write!(f, "X{v}"),
            FTerm::Fn(s, args) if args.is_empty() => f.write_str(self.0.name(*s)),
            FTerm::Fn(s, args) => {
                write!(f, "{}(", self.0.name(*s))?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", Show(self.0, a))?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Show<'_, Literal> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.1;
        if l.is_eq() {
            let op = if l.positive { "=" } else { "!=" };
            return write!(f, "{} {op} {}", Show(self.0, &l.args[0]), Show(self.0, &l.args[1]));
        }
        if !l.positive {
            f.write_str("~")?;
        }
        f.write_str(self.0.name(l.pred))?;
        if !l.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in l.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", Show(self.0, a))?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Show<'_, Clause> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1.lits.is_empty() {
            return f.write_str("$false");
        }
        for (i, l) in self.1.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{}", Show(self.0, l))?;
        }
        Ok(())
    }
}
