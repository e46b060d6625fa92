//! Sorted formula language: syntax, signatures, reader/printer and modal contexts.

pub mod context;
pub mod parse;
pub mod print;
pub mod problem;
pub mod sexpr;
pub mod signature;
pub mod syntax;

pub use context::{
    extract_context, project_context, project_context_indexed, strip_context, ContextEntry,
    ContextOp, ModalContext,
};
pub use parse::{parse_formula, parse_problem, parse_problem_with, FormulaReader, ParseError};
pub use print::{alpha_eq, alpha_key, print_formula, print_term};
pub use problem::{print_problem, Problem, Query};
pub use sexpr::{Pos, SExpr};
pub use signature::{Decl, Signature, SortError};
pub use syntax::{Formula, ModalOp, Term, Var};
