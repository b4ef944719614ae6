//! Signatures, abstract syntax, parsing, printing, and translations.
//!
//! Concrete syntax is plain ASCII.  Concepts:
//!
//! ```text
//! C ::= ident | "true" | "false" | "~" C | C "&" C | C "|" C | "(" C ")"
//!     | "exists" R "." C | "forall" R "." C | "box" C | "dia" C
//! R ::= ident | "box" ident | "dia" ident
//! ```
//!
//! Formulas replace the atoms by `ident "(" var {"," var} ")"` and
//! `var "=" var`, and add `F "->" F` plus `exists`/`forall` over object
//! variables.  Precedence is `{~, box, dia}` over `&` over `|` over `->`;
//! `&` and `|` associate to the left, `->` to the right, and restriction
//! and quantifier bodies extend as far to the right as possible.
//!
//! The printer emits a canonical form with minimal parentheses; parsing a
//! printed term always reproduces the term (`parse ∘ print = id`).

mod ast;
mod parse;
mod print;
mod signature;
mod translate;

pub use ast::{
    concept_rank, formula_rank, free_variables, is_local_fragment, ConceptAst, FormulaAst,
    RoleExpr, RoleKind, Sort, TwoSortedFormulaAst, TwoSortedVar,
};
pub use parse::{parse_concept, parse_formula, ParseError};
pub use signature::{Signature, SignatureError};
pub use translate::{standard_translation, two_sorted_translation, TranslateError};
