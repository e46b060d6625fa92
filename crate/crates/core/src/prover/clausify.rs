//! Clause normal form for shadowed (first-order) formulas.

use crate::kernel::{Formula, Signature, Term, Var};

use super::fol::{normalize, Clause, FTerm, Literal, SortId, Subst, SymbolTable, EQ};
use super::shadow::is_shadow_name;

/// Above this many clauses a disjunct is named by a fresh predicate instead of distributed.
const DISTRIBUTION_LIMIT: usize = 32;

#[derive(Clone, Debug)]
enum Nnf {
    True,
    False,
    Lit(bool, Formula),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    All(Var, Box<Nnf>),
    Ex(Var, Box<Nnf>),
}

fn and(parts: Vec<Nnf>) -> Nnf {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Nnf::True => {}
            Nnf::False => return Nnf::False,
            Nnf::And(qs) => out.extend(qs),
            q => out.push(q),
        }
    }
    match out.len() {
        0 => Nnf::True,
        1 => out.pop().unwrap(),
        _ => Nnf::And(out),
    }
}

fn or(parts: Vec<Nnf>) -> Nnf {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Nnf::False => {}
            Nnf::True => return Nnf::True,
            Nnf::Or(qs) => out.extend(qs),
            q => out.push(q),
        }
    }
    match out.len() {
        0 => Nnf::False,
        1 => out.pop().unwrap(),
        _ => Nnf::Or(out),
    }
}

fn nnf(f: &Formula, pos: bool) -> Nnf {
    match f {
        Formula::Atom(..) if f.is_falsum() => {
            if pos { Nnf::False } else { Nnf::True }
        }
        Formula::Atom(..) if f.is_verum() => {
            if pos { Nnf::True } else { Nnf::False }
        }
        Formula::Atom(..) | Formula::Eq(..) => Nnf::Lit(pos, f.clone()),
        Formula::Not(g) => nnf(g, !pos),
        Formula::And(gs) => {
            let parts = gs.iter().map(|g| nnf(g, pos)).collect();
            if pos { and(parts) } else { or(parts) }
        }
        Formula::Or(gs) => {
            let parts = gs.iter().map(|g| nnf(g, pos)).collect();
            if pos { or(parts) } else { and(parts) }
        }
        Formula::Implies(a, b) => {
            if pos {
                or(vec![nnf(a, false), nnf(b, true)])
            } else {
                and(vec![nnf(a, true), nnf(b, false)])
            }
        }
        Formula::Iff(a, b) => {
            if pos {
                and(vec![
                    or(vec![nnf(a, false), nnf(b, true)]),
                    or(vec![nnf(a, true), nnf(b, false)]),
                ])
            } else {
                or(vec![
                    and(vec![nnf(a, true), nnf(b, false)]),
                    and(vec![nnf(a, false), nnf(b, true)]),
                ])
            }
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let universal = matches!(f, Formula::Forall(..)) == pos;
            match nnf(g, pos) {
                Nnf::True => Nnf::True,
                Nnf::False => Nnf::False,
                body if universal => Nnf::All(v.clone(), Box::new(body)),
                body => Nnf::Ex(v.clone(), Box::new(body)),
            }
        }
        _ => panic!("clausify called on an intensional formula; shadow it first"),
    }
}

/// Quantifier-free matrix after Skolemization.
enum Matrix {
    Lit(Literal),
    And(Vec<Matrix>),
    Or(Vec<Matrix>),
}

pub struct Clausifier<'a> {
    pub table: &'a mut SymbolTable,
    sig: &'a Signature,
    var_sorts: Vec<SortId>,
    pending: Vec<Vec<Literal>>,
}

impl<'a> Clausifier<'a> {
    pub fn new(table: &'a mut SymbolTable, sig: &'a Signature) -> Self {
        Clausifier { table, sig, var_sorts: Vec::new(), pending: Vec::new() }
    }

    /// Clauses of a closed shadowed formula; free variables are read universally.
    pub fn clausify(&mut self, f: &Formula) -> Vec<Clause> {
        self.var_sorts.clear();
        let closed = f
            .free_vars()
            .into_iter()
            .rev()
            .fold(f.clone(), |acc, v| Formula::forall(v, acc));
        let n = nnf(&closed, true);
        let m = match n {
            Nnf::True => return Vec::new(),
            Nnf::False => return vec![Clause { lits: Vec::new(), var_sorts: Vec::new() }],
            n => self.skolemize(&n, &mut Vec::new(), &mut Vec::new()),
        };
        let mut sets = self.cnf(&m);
        sets.append(&mut self.pending);
        let s = Subst::with_sorts(self.var_sorts.clone());
        let mut out: Vec<Clause> = Vec::new();
        for lits in sets {
            let c = normalize(lits, &s);
            if !c.is_tautology() && !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    fn new_var(&mut self, sort: &str) -> u32 {
        let s = self.table.sort_id(sort);
        self.var_sorts.push(s);
        (self.var_sorts.len() - 1) as u32
    }

    fn skolemize(&mut self, n: &Nnf, env: &mut Vec<(String, FTerm)>, univ: &mut Vec<u32>) -> Matrix {
        match n {
            Nnf::True => Matrix::And(Vec::new()),
            Nnf::False => Matrix::Or(Vec::new()),
            Nnf::Lit(pos, f) => Matrix::Lit(self.literal(*pos, f, env)),
            Nnf::And(ps) => Matrix::And(ps.iter().map(|p| self.skolemize(p, env, univ)).collect()),
            Nnf::Or(ps) => Matrix::Or(ps.iter().map(|p| self.skolemize(p, env, univ)).collect()),
            Nnf::All(v, body) => {
                let id = self.new_var(&v.sort);
                env.push((v.name.clone(), FTerm::Var(id)));
                univ.push(id);
                let m = self.skolemize(body, env, univ);
                univ.pop();
                env.pop();
                m
            }
            Nnf::Ex(v, body) => {
                let arg_sorts = univ.iter().map(|&u| self.var_sorts[u as usize]).collect();
                let result = self.table.sort_id(&v.sort);
                let sk = self.table.fresh_skolem(arg_sorts, result);
                let t = FTerm::Fn(sk, univ.iter().map(|&u| FTerm::Var(u)).collect());
                env.push((v.name.clone(), t));
                let m = self.skolemize(body, env, univ);
                env.pop();
                m
            }
        }
    }

    fn literal(&mut self, positive: bool, f: &Formula, env: &[(String, FTerm)]) -> Literal {
        match f {
            Formula::Eq(a, b) => Literal {
                positive,
                pred: EQ,
                args: vec![self.term(a, env), self.term(b, env)],
            },
            Formula::Atom(r, args) => {
                let sorts = self
                    .sig
                    .relation(r)
                    .map(|s| s.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .unwrap_or_default();
                let ids = sorts.iter().map(|s| self.table.sort_id(s)).collect();
                let pred = self.table.add(r, ids, None, is_shadow_name(r));
                Literal { positive, pred, args: args.iter().map(|a| self.term(a, env)).collect() }
            }
            _ => unreachable!(),
        }
    }

    pub fn term(&mut self, t: &Term, env: &[(String, FTerm)]) -> FTerm {
        match t {
            Term::Var(v) => match env.iter().rposition(|(n, _)| n == &v.name) {
                Some(i) => env[i].1.clone(),
                None => panic!("unbound variable {} after closure", v.name),
            },
            Term::Const(c) => {
                let sym = match self.table.lookup(c) {
                    Some(s) => s,
                    None => {
                        let sort = self.sig.constant_sort(c).unwrap_or("Object").to_owned();
                        let s = self.table.sort_id(&sort);
                        self.table.add(c, vec![], Some(s), false)
                    }
                };
                FTerm::Fn(sym, Vec::new())
            }
            Term::App(f, args) => {
                let sym = match self.table.lookup(f) {
                    Some(s) => s,
                    None => {
                        let (a, r) = match self.sig.function(f) {
                            Some((a, r)) => (a.to_vec(), r.to_owned()),
                            None => (vec!["Object".to_owned(); args.len()], "Object".to_owned()),
                        };
                        let a = a.iter().map(|s| self.table.sort_id(s)).collect();
                        let r = self.table.sort_id(&r);
                        self.table.add(f, a, Some(r), false)
                    }
                };
                FTerm::Fn(sym, args.iter().map(|a| self.term(a, env)).collect())
            }
        }
    }

    fn cnf(&mut self, m: &Matrix) -> Vec<Vec<Literal>> {
        match m {
            Matrix::Lit(l) => vec![vec![l.clone()]],
            Matrix::And(ps) => ps.iter().flat_map(|p| self.cnf(p)).collect(),
            Matrix::Or(ps) => {
                let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
                for p in ps {
                    let mut next = self.cnf(p);
                    if acc.len() > 1 && next.len() > 1 && acc.len() * next.len() > DISTRIBUTION_LIMIT {
                        if next.len() >= acc.len() {
                            next = self.define(next);
                        } else {
                            acc = self.define(acc);
                        }
                    }
                    let mut prod = Vec::with_capacity(acc.len() * next.len());
                    for a in &acc {
                        for b in &next {
                            let mut c = a.clone();
                            c.extend(b.iter().cloned());
                            prod.push(c);
                        }
                    }
                    acc = prod;
                }
                acc
            }
        }
    }

    /// Replace a clause set by a fresh atom `d(x̄)` that implies it.
    fn define(&mut self, set: Vec<Vec<Literal>>) -> Vec<Vec<Literal>> {
        let mut vars: Vec<u32> = Vec::new();
        fn collect(t: &FTerm, out: &mut Vec<u32>) {
            match t {
                FTerm::Var(v) => {
                    if !out.contains(v) {
                        out.push(*v)
                    }
                }
                FTerm::Fn(_, args) => args.iter().for_each(|a| collect(a, out)),
            }
        }
        for c in &set {
            for l in c {
                l.args.iter().for_each(|a| collect(a, &mut vars));
            }
        }
        let sorts = vars.iter().map(|&v| self.var_sorts[v as usize]).collect();
        let pred = self.table.fresh_predicate(sorts);
        let atom = Literal { positive: true, pred, args: vars.iter().map(|&v| FTerm::Var(v)).collect() };
        let mut out: Vec<Vec<Literal>> = Vec::new();
        for c in set {
            let mut c2 = vec![atom.negated()];
            c2.extend(c);
            out.push(c2);
        }
        self.pending.extend(out);
        vec![vec![atom]]
    }
}
