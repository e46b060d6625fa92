//! Problem files: a signature, an assumption set and a list of queries.

use std::fmt::Write;

use super::context::ModalContext;
use super::print::print_formula;
use super::sexpr::SExpr;
use super::signature::{Decl, Signature};
use super::syntax::Formula;

#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    Entail(Formula),
    Counterfactual { antecedent: Formula, consequent: Formula },
    ContextualCounterfactual { context: ModalContext, antecedent: Formula, consequent: Formula },
}

impl Query {
    pub fn kind(&self) -> &'static str {
        match self {
            Query::Entail(_) => "entail",
            Query::Counterfactual { .. } => "cf",
            Query::ContextualCounterfactual { .. } => "cf-in",
        }
    }

    pub fn print(&self) -> String {
        match self {
            Query::Entail(f) => format!("(entail {})", print_formula(f)),
            Query::Counterfactual { antecedent, consequent } => {
                format!("(cf {} {})", print_formula(antecedent), print_formula(consequent))
            }
            Query::ContextualCounterfactual { context, antecedent, consequent } => format!(
                "(cf-in {context} {} {})",
                print_formula(antecedent),
                print_formula(consequent)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub name: String,
    pub signature: Signature,
    pub assumptions: Vec<Formula>,
    pub queries: Vec<Query>,
    /// Trailing blocks after `(queries ...)`, left for extension layers.
    pub extensions: Vec<SExpr>,
}

fn print_decl(d: &Decl) -> String {
    match d {
        Decl::Sort { name, parent: None } => format!("(sort {name})"),
        Decl::Sort { name, parent: Some(p) } => format!("(sort {name} {p})"),
        Decl::Const { name, sort } => format!("(const {name} {sort})"),
        Decl::Func { name, args, result } => format!("(func {name} ({}) {result})", args.join(" ")),
        Decl::Rel { name, args } => format!("(rel {name} ({}))", args.join(" ")),
    }
}

/// Print a problem in the file syntax accepted by [`super::parse_problem`].
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(problem {}", p.name);
    for d in p.signature.user_decls() {
        let _ = writeln!(out, "  {}", print_decl(d));
    }
    out.push_str("  (assumptions");
    for a in &p.assumptions {
        let _ = write!(out, "\n    {}", print_formula(a));
    }
    out.push_str(")\n  (queries");
    for q in &p.queries {
        let _ = write!(out, "\n    {}", q.print());
    }
    out.push(')');
    for e in &p.extensions {
        let _ = write!(out, "\n  {e}");
    }
    out.push_str(")\n");
    out
}
