//! Abstract syntax, sort checking, and the text DSL for coherent signatures,
//! formulas, sequents, and theories. All connectives are finite.

mod ast;
mod check;
mod parser;
mod printer;

pub use ast::{
    Axiom, Formula, OpDecl, PredDecl, SchemaAxiom, Sequent, Signature, Term, Theory,
};
pub use check::{check_formula, check_sequent_wf, check_theory, term_sort, SortError, TheoryError};
pub use parser::{parse_formula_in, parse_term_in, parse_theory, ParseError};
pub use printer::{print_formula, print_sequent, print_term, print_theory};
