//! Reader for formulas and problem files.

use thiserror::Error;

use super::context::{ContextEntry, ContextOp, ModalContext};
use super::problem::{Problem, Query};
use super::sexpr::{read_all, Pos, SExpr, SyntaxError};
use super::signature::{is_action_literal, Decl, Signature, SortError, AGENT, MOMENT};
use super::syntax::{Formula, ModalOp, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: sort error: {err}")]
    Sort { pos: Pos, err: SortError },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax(e) => e.pos,
            ParseError::Sort { pos, .. } => *pos,
        }
    }

    pub fn is_sort_error(&self) -> bool {
        matches!(self, ParseError::Sort { .. })
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax(SyntaxError { pos, msg: msg.into() })
}

fn sort_err(pos: Pos, err: SortError) -> ParseError {
    ParseError::Sort { pos, err }
}

fn symbol(e: &SExpr, what: &str) -> Result<String, ParseError> {
    e.as_symbol()
        .map(str::to_owned)
        .ok_or_else(|| syntax(e.pos(), format!("expected {what}, found a list")))
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], ParseError> {
    e.as_list()
        .ok_or_else(|| syntax(e.pos(), format!("expected {what}, found `{e}`")))
}

/// Formula reader bound to a signature; tracks the variables in scope.
pub struct FormulaReader<'s> {
    sig: &'s Signature,
    scope: Vec<Var>,
}

impl<'s> FormulaReader<'s> {
    pub fn new(sig: &'s Signature) -> Self {
        FormulaReader { sig, scope: Vec::new() }
    }

    pub fn term(&mut self, e: &SExpr) -> Result<(Term, String), ParseError> {
        match e {
            SExpr::Symbol(s, pos) => {
                if let Some(v) = self.scope.iter().rev().find(|v| &v.name == s) {
                    return Ok((Term::Var(v.clone()), v.sort.clone()));
                }
                match self.sig.constant_sort(s) {
                    Some(sort) => Ok((Term::Const(s.clone()), sort.to_owned())),
                    None if self.sig.function(s).is_some() => Err(sort_err(
                        *pos,
                        SortError::Arity {
                            symbol: s.clone(),
                            expected: self.sig.function(s).unwrap().0.len(),
                            found: 0,
                        },
                    )),
                    None => Err(sort_err(*pos, SortError::UnknownSymbol(s.clone()))),
                }
            }
            SExpr::List(items, pos) => {
                let (head, rest) = items
                    .split_first()
                    .ok_or_else(|| syntax(*pos, "empty term"))?;
                let f = symbol(head, "function symbol")?;
                let (params, result) = self
                    .sig
                    .function(&f)
                    .map(|(p, r)| (p.to_vec(), r.to_owned()))
                    .ok_or_else(|| sort_err(head.pos(), SortError::UnknownSymbol(f.clone())))?;
                let args = self.args(&f, *pos, &params, rest)?;
                Ok((Term::App(f, args), result))
            }
        }
    }

    fn args(
        &mut self,
        symbol: &str,
        pos: Pos,
        params: &[String],
        items: &[SExpr],
    ) -> Result<Vec<Term>, ParseError> {
        if params.len() != items.len() {
            return Err(sort_err(
                pos,
                SortError::Arity {
                    symbol: symbol.into(),
                    expected: params.len(),
                    found: items.len(),
                },
            ));
        }
        params
            .iter()
            .zip(items)
            .map(|(p, it)| self.expect_term(symbol, it, p))
            .collect()
    }

    fn expect_term(&mut self, symbol: &str, e: &SExpr, sort: &str) -> Result<Term, ParseError> {
        let (t, found) = self.term(e)?;
        if self.sig.is_subsort(&found, sort) {
            Ok(t)
        } else {
            Err(sort_err(
                e.pos(),
                SortError::Mismatch {
                    symbol: symbol.into(),
                    expected: sort.into(),
                    found,
                },
            ))
        }
    }

    fn arity(&self, head: &str, pos: Pos, items: &[SExpr], n: usize) -> Result<(), ParseError> {
        if items.len() == n {
            Ok(())
        } else {
            Err(syntax(
                pos,
                format!("`{head}` takes {n} arguments, found {}", items.len()),
            ))
        }
    }

    pub fn formula(&mut self, e: &SExpr) -> Result<Formula, ParseError> {
        let (items, pos) = match e {
            SExpr::Symbol(s, pos) => {
                return match self.sig.relation(s) {
                    Some([]) => Ok(Formula::Atom(s.clone(), Vec::new())),
                    Some(params) => Err(sort_err(
                        *pos,
                        SortError::Arity {
                            symbol: s.clone(),
                            expected: params.len(),
                            found: 0,
                        },
                    )),
                    None => Err(sort_err(*pos, SortError::UnknownSymbol(s.clone()))),
                }
            }
            SExpr::List(items, pos) => (items.as_slice(), *pos),
        };
        let (head_e, rest) = items
            .split_first()
            .ok_or_else(|| syntax(pos, "empty formula"))?;
        let head = symbol(head_e, "connective or relation")?;
        let boxed = |r: &mut Self, e: &SExpr| r.formula(e).map(Box::new);
        match head.as_str() {
            "not" => {
                self.arity(&head, pos, rest, 1)?;
                Ok(Formula::Not(boxed(self, &rest[0])?))
            }
            "and" | "or" => {
                let fs = rest.iter().map(|e| self.formula(e)).collect::<Result<_, _>>()?;
                Ok(if head == "and" { Formula::And(fs) } else { Formula::Or(fs) })
            }
            "implies" | "iff" | "cf" => {
                self.arity(&head, pos, rest, 2)?;
                let a = boxed(self, &rest[0])?;
                let b = boxed(self, &rest[1])?;
                Ok(match head.as_str() {
                    "implies" => Formula::Implies(a, b),
                    "iff" => Formula::Iff(a, b),
                    _ => Formula::Counterfactual(a, b),
                })
            }
            "forall" | "exists" => {
                self.arity(&head, pos, rest, 2)?;
                let binder = list(&rest[0], "binder `(name Sort)`")?;
                if binder.len() != 2 {
                    return Err(syntax(rest[0].pos(), "binder must be `(name Sort)`"));
                }
                let name = symbol(&binder[0], "variable name")?;
                let sort = symbol(&binder[1], "sort name")?;
                if !self.sig.has_sort(&sort) {
                    return Err(sort_err(binder[1].pos(), SortError::UnknownSort(sort)));
                }
                let v = Var::new(name, sort);
                self.scope.push(v.clone());
                let body = self.formula(&rest[1]);
                self.scope.pop();
                let body = Box::new(body?);
                Ok(if head == "forall" {
                    Formula::Forall(v, body)
                } else {
                    Formula::Exists(v, body)
                })
            }
            "=" => {
                self.arity(&head, pos, rest, 2)?;
                let (a, sa) = self.term(&rest[0])?;
                let (b, sb) = self.term(&rest[1])?;
                if !self.sig.comparable(&sa, &sb) {
                    return Err(sort_err(
                        rest[1].pos(),
                        SortError::Mismatch { symbol: "=".into(), expected: sa, found: sb },
                    ));
                }
                Ok(Formula::Eq(a, b))
            }
            "C" => {
                self.arity(&head, pos, rest, 2)?;
                let time = self.expect_term("C", &rest[0], MOMENT)?;
                Ok(Formula::Common { time, body: boxed(self, &rest[1])? })
            }
            "S" => {
                if rest.len() != 3 && rest.len() != 4 {
                    return Err(syntax(pos, "`S` takes 3 or 4 arguments"));
                }
                let speaker = self.expect_term("S", &rest[0], AGENT)?;
                let addressee = if rest.len() == 4 {
                    Some(self.expect_term("S", &rest[1], AGENT)?)
                } else {
                    None
                };
                let time = self.expect_term("S", &rest[rest.len() - 2], MOMENT)?;
                let body = boxed(self, &rest[rest.len() - 1])?;
                Ok(Formula::Says { speaker, addressee, time, body })
            }
            "O" => {
                self.arity(&head, pos, rest, 4)?;
                let agent = self.expect_term("O", &rest[0], AGENT)?;
                let time = self.expect_term("O", &rest[1], MOMENT)?;
                let condition = boxed(self, &rest[2])?;
                let action = boxed(self, &rest[3])?;
                if !is_action_literal(&action) {
                    return Err(sort_err(rest[3].pos(), SortError::OughtAction(action.to_string())));
                }
                Ok(Formula::Ought { agent, time, condition, action })
            }
            h => {
                if let Some(op) = ModalOp::from_keyword(h) {
                    self.arity(h, pos, rest, 3)?;
                    let agent = self.expect_term(h, &rest[0], AGENT)?;
                    let time = self.expect_term(h, &rest[1], MOMENT)?;
                    let body = boxed(self, &rest[2])?;
                    return Ok(Formula::Modal { op, agent, time, body });
                }
                let params = self
                    .sig
                    .relation(h)
                    .map(<[String]>::to_vec)
                    .ok_or_else(|| sort_err(head_e.pos(), SortError::UnknownSymbol(h.into())))?;
                let args = self.args(h, pos, &params, rest)?;
                Ok(Formula::Atom(h.into(), args))
            }
        }
    }

    pub fn context(&mut self, e: &SExpr) -> Result<ModalContext, ParseError> {
        let items = list(e, "modal context list")?;
        let mut entries = Vec::with_capacity(items.len());
        for it in items {
            let parts = list(it, "context entry `(K|B|D agent time)`")?;
            if parts.len() != 3 {
                return Err(syntax(it.pos(), "context entry must be `(K|B|D agent time)`"));
            }
            let tag = symbol(&parts[0], "context operator")?;
            let op = ContextOp::from_keyword(&tag)
                .ok_or_else(|| syntax(parts[0].pos(), format!("`{tag}` is not K, B or D")))?;
            let agent = self.expect_term(&tag, &parts[1], AGENT)?;
            let time = self.expect_term(&tag, &parts[2], MOMENT)?;
            entries.push(ContextEntry { op, agent, time });
        }
        Ok(ModalContext::new(entries))
    }
}

/// Parse one formula from text against a signature.
pub fn parse_formula(sig: &Signature, text: &str) -> Result<Formula, ParseError> {
    let es = read_all(text)?;
    match es.as_slice() {
        [e] => FormulaReader::new(sig).formula(e),
        [] => Err(syntax(Pos { line: 1, col: 1 }, "empty input")),
        [_, e, ..] => Err(syntax(e.pos(), "trailing input after formula")),
    }
}

fn parse_decl(sig: &mut Signature, e: &SExpr) -> Result<(), ParseError> {
    let items = list(e, "declaration")?;
    let head = items.first().and_then(SExpr::as_symbol).unwrap_or("");
    let sorts = |e: &SExpr| -> Result<Vec<String>, ParseError> {
        list(e, "sort list")?.iter().map(|s| symbol(s, "sort name")).collect()
    };
    let decl = match (head, items.len()) {
        ("sort", 2) => Decl::Sort { name: symbol(&items[1], "sort name")?, parent: None },
        ("sort", 3) => Decl::Sort {
            name: symbol(&items[1], "sort name")?,
            parent: Some(symbol(&items[2], "parent sort")?),
        },
        ("const", 3) => Decl::Const {
            name: symbol(&items[1], "constant name")?,
            sort: symbol(&items[2], "sort name")?,
        },
        ("func", 4) => Decl::Func {
            name: symbol(&items[1], "function name")?,
            args: sorts(&items[2])?,
            result: symbol(&items[3], "result sort")?,
        },
        ("rel", 3) => Decl::Rel {
            name: symbol(&items[1], "relation name")?,
            args: sorts(&items[2])?,
        },
        _ => return Err(syntax(e.pos(), format!("malformed declaration `{e}`"))),
    };
    sig.declare(decl).map_err(|err| sort_err(e.pos(), err))
}

fn parse_query(reader: &mut FormulaReader<'_>, e: &SExpr) -> Result<Query, ParseError> {
    let items = list(e, "query")?;
    match (e.head(), items.len()) {
        (Some("entail"), 2) => Ok(Query::Entail(reader.formula(&items[1])?)),
        (Some("cf"), 3) => Ok(Query::Counterfactual {
            antecedent: reader.formula(&items[1])?,
            consequent: reader.formula(&items[2])?,
        }),
        (Some("cf-in"), 4) => Ok(Query::ContextualCounterfactual {
            context: reader.context(&items[1])?,
            antecedent: reader.formula(&items[2])?,
            consequent: reader.formula(&items[3])?,
        }),
        _ => Err(syntax(e.pos(), format!("malformed query `{e}`"))),
    }
}

/// Parse a problem file into a sort-checked [`Problem`].
///
/// `prelude` is applied to the predeclared signature before the file's own
/// declarations (the ethics layer uses it to add the situation symbols).
pub fn parse_problem_with(
    text: &str,
    prelude: impl FnOnce(&mut Signature) -> Result<(), SortError>,
) -> Result<Problem, ParseError> {
    let es = read_all(text)?;
    let top = match es.as_slice() {
        [e] => e,
        [] => return Err(syntax(Pos { line: 1, col: 1 }, "empty problem file")),
        [_, e, ..] => return Err(syntax(e.pos(), "trailing input after problem")),
    };
    let items = list(top, "`(problem ...)`")?;
    if top.head() != Some("problem") || items.len() < 2 {
        return Err(syntax(top.pos(), "expected `(problem <name> ...)`"));
    }
    let name = symbol(&items[1], "problem name")?;
    let mut sig = Signature::event_calculus();
    prelude(&mut sig).map_err(|err| sort_err(top.pos(), err))?;

    let mut rest = items[2..].iter().peekable();
    while let Some(e) = rest.peek() {
        match e.head() {
            Some("sort" | "const" | "func" | "rel") => {
                parse_decl(&mut sig, e)?;
                rest.next();
            }
            _ => break,
        }
    }

    let mut assumptions = Vec::new();
    let mut queries = Vec::new();
    let mut extensions = Vec::new();
    let mut seen_assumptions = false;
    let mut seen_queries = false;
    for e in rest {
        match e.head() {
            Some("assumptions") if !seen_assumptions && !seen_queries => {
                seen_assumptions = true;
                let mut reader = FormulaReader::new(&sig);
                for f in &e.as_list().unwrap()[1..] {
                    assumptions.push(reader.formula(f)?);
                }
            }
            Some("queries") if !seen_queries => {
                seen_queries = true;
                let mut reader = FormulaReader::new(&sig);
                for q in &e.as_list().unwrap()[1..] {
                    queries.push(parse_query(&mut reader, q)?);
                }
            }
            Some(h) if seen_queries && !matches!(h, "assumptions" | "queries") => {
                extensions.push(e.clone());
            }
            _ => return Err(syntax(e.pos(), format!("unexpected `{e}`"))),
        }
    }
    if !seen_assumptions {
        return Err(syntax(top.pos(), "missing `(assumptions ...)` block"));
    }
    if !seen_queries {
        return Err(syntax(top.pos(), "missing `(queries ...)` block"));
    }
    Ok(Problem { name, signature: sig, assumptions, queries, extensions })
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    parse_problem_with(text, |_| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::print::print_formula;

    const SOCRATES: &str = r#"
(problem socrates
  (sort Thing)
  (const socrates Thing)
  (rel Human (Thing))
  (rel Mortal (Thing))
  (assumptions
    (forall (x Thing) (implies (Human x) (Mortal x)))
    (Human socrates))
  (queries
    (cf (not (Mortal socrates)) (not (Human socrates)))))
"#;

    #[test]
    fn socrates_parses() {
        let p = parse_problem(SOCRATES).unwrap();
        assert_eq!(p.name, "socrates");
        assert_eq!(p.assumptions.len(), 2);
        assert_eq!(
            print_formula(&p.assumptions[0]),
            "(forall (x Thing) (implies (Human x) (Mortal x)))"
        );
        assert_eq!(p.queries.len(), 1);
    }

    #[test]
    fn empty_assumptions() {
        let p = parse_problem("(problem e (rel P ()) (assumptions) (queries (entail (implies P P))))")
            .unwrap();
        assert!(p.assumptions.is_empty());
    }

    #[test]
    fn moment_as_action_type_is_a_sort_error() {
        let text = "(problem bad (const a Agent) (const t Moment)
            (assumptions (happens (action a t) t)) (queries))";
        let err = parse_problem(text).unwrap_err();
        match err {
            ParseError::Sort { pos, err: SortError::Mismatch { symbol, expected, found } } => {
                assert_eq!((symbol.as_str(), expected.as_str(), found.as_str()), ("action", "ActionType", "Moment"));
                assert_eq!(pos.line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_problem("(problem x\n  (assumptions (and P)\n").unwrap_err();
        assert!(!err.is_sort_error());
        assert_eq!((err.pos().line, err.pos().col), (2, 3));
        let err = parse_problem("(problem x (rel P ()) (assumptions (implies P)) (queries))").unwrap_err();
        assert_eq!(err.pos().col, 36);
    }

    #[test]
    fn unknown_symbol_is_a_sort_error() {
        let err = parse_problem("(problem x (assumptions (Q)) (queries))").unwrap_err();
        assert!(err.is_sort_error());
    }

    #[test]
    fn ought_requires_action_literal() {
        let text = "(problem o (const a Agent) (const t Moment) (rel P ())
            (assumptions (O a t P P)) (queries))";
        assert!(matches!(
            parse_problem(text),
            Err(ParseError::Sort { err: SortError::OughtAction(_), .. })
        ));
    }

    #[test]
    fn contexts_and_says_forms() {
        let text = "(problem c (const a Agent) (const b Agent) (const t Moment) (rel P ())
            (assumptions (S a t P) (S a b t P))
            (queries (cf-in ((B a t) (K b t)) P P) (cf-in () P P)))";
        let p = parse_problem(text).unwrap();
        match &p.queries[0] {
            Query::ContextualCounterfactual { context, .. } => assert_eq!(context.len(), 2),
            q => panic!("{q:?}"),
        }
        assert!(matches!(&p.assumptions[1], Formula::Says { addressee: Some(_), .. }));
    }
}
