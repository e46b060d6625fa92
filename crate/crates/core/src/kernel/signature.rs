//! Sorted signatures and well-sortedness checking.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::syntax::{Formula, Term, FALSUM, VERUM};

pub const OBJECT: &str = "Object";
pub const AGENT: &str = "Agent";
pub const ACTION_TYPE: &str = "ActionType";
pub const ACTION: &str = "Action";
pub const EVENT: &str = "Event";
pub const MOMENT: &str = "Moment";
pub const FLUENT: &str = "Fluent";
pub const BOOLEAN: &str = "Boolean";
pub const SITUATION: &str = "Situation";

/// Heads that the reader interprets as connectives; they cannot name relations.
pub const RESERVED: &[&str] = &[
    "not", "and", "or", "implies", "iff", "forall", "exists", "=", "K", "B", "D", "I",
    "perceives", "C", "S", "O", "cf",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("symbol `{0}` is declared more than once")]
    Duplicate(String),
    #[error("`{0}` is reserved and cannot be declared")]
    Reserved(String),
    #[error("sort `{0}` would make the sort hierarchy cyclic")]
    Cyclic(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} arguments, found {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("`{symbol}`: expected sort {expected}, found {found}")]
    Mismatch {
        symbol: String,
        expected: String,
        found: String,
    },
    #[error("obligation action must be a (negated) happens(action(..), t) literal, found {0}")]
    OughtAction(String),
}

/// A user-visible declaration, kept in source order for printing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Sort { name: String, parent: Option<String> },
    Const { name: String, sort: String },
    Func { name: String, args: Vec<String>, result: String },
    Rel { name: String, args: Vec<String> },
}

/// Single-inheritance sort forest with typed constants, functions and relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    sorts: BTreeSet<String>,
    parent: BTreeMap<String, String>,
    functions: BTreeMap<String, (Vec<String>, String)>,
    relations: BTreeMap<String, Vec<String>>,
    constants: BTreeMap<String, String>,
    user: Vec<Decl>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::event_calculus()
    }
}

impl Signature {
    /// A signature with nothing declared, not even the event-calculus core.
    pub fn empty() -> Self {
        Signature {
            sorts: BTreeSet::new(),
            parent: BTreeMap::new(),
            functions: BTreeMap::new(),
            relations: BTreeMap::new(),
            constants: BTreeMap::new(),
            user: Vec::new(),
        }
    }

    /// The predeclared sorts and event-calculus symbols.
    pub fn event_calculus() -> Self {
        let mut s = Self::empty();
        for sort in [OBJECT, AGENT, ACTION_TYPE, EVENT, MOMENT, FLUENT, BOOLEAN] {
            s.sorts.insert(sort.into());
        }
        s.sorts.insert(ACTION.into());
        s.parent.insert(ACTION.into(), EVENT.into());
        s.sorts.insert(SITUATION.into());
        s.parent.insert(SITUATION.into(), OBJECT.into());

        s.functions
            .insert("action".into(), (vec![AGENT.into(), ACTION_TYPE.into()], ACTION.into()));
        let rels: [(&str, &[&str]); 9] = [
            ("initially", &[FLUENT]),
            ("holds", &[FLUENT, MOMENT]),
            ("happens", &[EVENT, MOMENT]),
            ("clipped", &[MOMENT, FLUENT, MOMENT]),
            ("initiates", &[EVENT, FLUENT, MOMENT]),
            ("terminates", &[EVENT, FLUENT, MOMENT]),
            ("prior", &[MOMENT, MOMENT]),
            (FALSUM, &[]),
            (VERUM, &[]),
        ];
        for (name, args) in rels {
            s.relations
                .insert(name.into(), args.iter().map(|a| a.to_string()).collect());
        }
        s
    }

    pub fn user_decls(&self) -> &[Decl] {
        &self.user
    }

    pub fn has_sort(&self, s: &str) -> bool {
        self.sorts.contains(s)
    }

    pub fn parent_of(&self, s: &str) -> Option<&str> {
        self.parent.get(s).map(String::as_str)
    }

    pub fn constant_sort(&self, c: &str) -> Option<&str> {
        self.constants.get(c).map(String::as_str)
    }

    pub fn function(&self, f: &str) -> Option<(&[String], &str)> {
        self.functions.get(f).map(|(a, r)| (a.as_slice(), r.as_str()))
    }

    pub fn relation(&self, r: &str) -> Option<&[String]> {
        self.relations.get(r).map(Vec::as_slice)
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, &str)> {
        self.constants.iter().map(|(c, s)| (c.as_str(), s.as_str()))
    }

    /// Constants whose sort is `sort` or one of its descendants.
    pub fn constants_of(&self, sort: &str) -> Vec<String> {
        self.constants
            .iter()
            .filter(|(_, s)| self.is_subsort(s, sort))
            .map(|(c, _)| c.clone())
            .collect()
    }

    /// Reflexive-transitive descent in the sort forest.
    pub fn is_subsort(&self, sub: &str, sup: &str) -> bool {
        let mut cur = Some(sub);
        while let Some(s) = cur {
            if s == sup {
                return true;
            }
            cur = self.parent_of(s);
        }
        false
    }

    /// Two sorts share inhabitants only if one descends from the other.
    pub fn comparable(&self, a: &str, b: &str) -> bool {
        self.is_subsort(a, b) || self.is_subsort(b, a)
    }

    fn name_taken(&self, name: &str) -> bool {
        self.functions.contains_key(name)
            || self.relations.contains_key(name)
            || self.constants.contains_key(name)
    }

    fn require_sort(&self, s: &str) -> Result<(), SortError> {
        if self.sorts.contains(s) {
            Ok(())
        } else {
            Err(SortError::UnknownSort(s.into()))
        }
    }

    pub fn declare(&mut self, decl: Decl) -> Result<(), SortError> {
        match &decl {
            Decl::Sort { name, parent } => {
                if self.sorts.contains(name) {
                    return Err(SortError::Duplicate(name.clone()));
                }
                if let Some(p) = parent {
                    if p == name {
                        return Err(SortError::Cyclic(name.clone()));
                    }
                    self.require_sort(p)?;
                }
                self.sorts.insert(name.clone());
                if let Some(p) = parent {
                    self.parent.insert(name.clone(), p.clone());
                }
            }
            Decl::Const { name, sort } => {
                self.check_fresh(name)?;
                self.require_sort(sort)?;
                self.constants.insert(name.clone(), sort.clone());
            }
            Decl::Func { name, args, result } => {
                self.check_fresh(name)?;
                for s in args.iter().chain(std::iter::once(result)) {
                    self.require_sort(s)?;
                }
                self.functions
                    .insert(name.clone(), (args.clone(), result.clone()));
            }
            Decl::Rel { name, args } => {
                self.check_fresh(name)?;
                for s in args {
                    self.require_sort(s)?;
                }
                self.relations.insert(name.clone(), args.clone());
            }
        }
        self.user.push(decl);
        Ok(())
    }

    fn check_fresh(&self, name: &str) -> Result<(), SortError> {
        if RESERVED.contains(&name) {
            return Err(SortError::Reserved(name.into()));
        }
        if self.name_taken(name) {
            return Err(SortError::Duplicate(name.into()));
        }
        Ok(())
    }

    /// Declare unless an identical declaration already exists.
    pub fn ensure(&mut self, decl: Decl) -> Result<(), SortError> {
        let same = match &decl {
            Decl::Const { name, sort } => self.constants.get(name) == Some(sort),
            Decl::Func { name, args, result } => {
                self.functions.get(name) == Some(&(args.clone(), result.clone()))
            }
            Decl::Rel { name, args } => self.relations.get(name) == Some(args),
            Decl::Sort { name, parent } => {
                self.sorts.contains(name) && self.parent.get(name) == parent.as_ref()
            }
        };
        if same {
            Ok(())
        } else {
            self.declare(decl)
        }
    }

    /// Sort of a term; variables carry their own sort.
    pub fn sort_of(&self, t: &Term) -> Result<String, SortError> {
        match t {
            Term::Var(v) => {
                self.require_sort(&v.sort)?;
                Ok(v.sort.clone())
            }
            Term::Const(c) => self
                .constants
                .get(c)
                .cloned()
                .ok_or_else(|| SortError::UnknownSymbol(c.clone())),
            Term::App(f, args) => {
                let (params, result) = self
                    .functions
                    .get(f)
                    .ok_or_else(|| SortError::UnknownSymbol(f.clone()))?;
                self.check_args(f, params, args)?;
                Ok(result.clone())
            }
        }
    }

    fn check_args(&self, symbol: &str, params: &[String], args: &[Term]) -> Result<(), SortError> {
        if params.len() != args.len() {
            return Err(SortError::Arity {
                symbol: symbol.into(),
                expected: params.len(),
                found: args.len(),
            });
        }
        for (p, a) in params.iter().zip(args) {
            self.expect_term(symbol, a, p)?;
        }
        Ok(())
    }

    pub fn expect_term(&self, symbol: &str, t: &Term, expected: &str) -> Result<(), SortError> {
        let found = self.sort_of(t)?;
        if self.is_subsort(&found, expected) {
            Ok(())
        } else {
            Err(SortError::Mismatch {
                symbol: symbol.into(),
                expected: expected.into(),
                found,
            })
        }
    }

    /// Check a formula; free variables are allowed and checked against their own sorts.
    pub fn check_formula(&self, f: &Formula) -> Result<(), SortError> {
        match f {
            Formula::Atom(r, args) => {
                let params = self
                    .relations
                    .get(r)
                    .ok_or_else(|| SortError::UnknownSymbol(r.clone()))?;
                self.check_args(r, params, args)
            }
            Formula::Eq(a, b) => {
                let sa = self.sort_of(a)?;
                let sb = self.sort_of(b)?;
                if self.comparable(&sa, &sb) {
                    Ok(())
                } else {
                    Err(SortError::Mismatch {
                        symbol: "=".into(),
                        expected: sa,
                        found: sb,
                    })
                }
            }
            Formula::Not(g) => self.check_formula(g),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(|g| self.check_formula(g)),
            Formula::Implies(a, b) | Formula::Iff(a, b) | Formula::Counterfactual(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                self.require_sort(&v.sort)?;
                self.check_formula(g)
            }
            Formula::Modal {
                op,
                agent,
                time,
                body,
            } => {
                self.expect_term(op.keyword(), agent, AGENT)?;
                self.expect_term(op.keyword(), time, MOMENT)?;
                self.check_formula(body)
            }
            Formula::Common { time, body } => {
                self.expect_term("C", time, MOMENT)?;
                self.check_formula(body)
            }
            Formula::Says {
                speaker,
                addressee,
                time,
                body,
            } => {
                self.expect_term("S", speaker, AGENT)?;
                if let Some(a) = addressee {
                    self.expect_term("S", a, AGENT)?;
                }
                self.expect_term("S", time, MOMENT)?;
                self.check_formula(body)
            }
            Formula::Ought {
                agent,
                time,
                condition,
                action,
            } => {
                self.expect_term("O", agent, AGENT)?;
                self.expect_term("O", time, MOMENT)?;
                self.check_formula(condition)?;
                if !is_action_literal(action) {
                    return Err(SortError::OughtAction(action.to_string()));
                }
                self.check_formula(action)
            }
        }
    }
}

/// `happens(action(a, α), t)` or its negation.
pub fn is_action_literal(f: &Formula) -> bool {
    let atom = match f {
        Formula::Not(g) => g.as_ref(),
        g => g,
    };
    matches!(atom, Formula::Atom(r, args)
        if r == "happens" && args.len() == 2
            && matches!(&args[0], Term::App(a, xs) if a == "action" && xs.len() == 2))
}
