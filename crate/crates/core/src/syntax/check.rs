//! Sort checking for terms, formulas, sequents, and whole theories.

use super::ast::{Axiom, Formula, SchemaAxiom, Sequent, Signature, Term, Theory};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("unknown sort: {0}")]
    UnknownSort(String),
    #[error("unknown operation: {0}")]
    UnknownOp(String),
    #[error("unknown predicate: {0}")]
    UnknownPred(String),
    #[error("variable #{0} out of range for context of length {1}")]
    VarOutOfRange(usize, usize),
    #[error("operation {op} expects {expected} arguments, got {got}")]
    ArityMismatch { op: String, expected: usize, got: usize },
    #[error("argument {index} of {symbol} has sort {got}, expected {expected}")]
    ArgSortMismatch { symbol: String, index: usize, expected: String, got: String },
    #[error("equation between different sorts: {0} vs {1}")]
    EqSortMismatch(String, String),
    #[error("duplicate symbol name: {0}")]
    DuplicateName(String),
    #[error("schema axiom is ill-formed: {0}")]
    BadSchemaAxiom(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoryError {
    #[error("signature error: {0}")]
    Signature(SortError),
    #[error("axiom {index}: {error}")]
    Axiom { index: usize, error: SortError },
}

/// Infers the sort of a term in a context, or reports the first error.
pub fn term_sort(sig: &Signature, ctx: &[String], t: &Term) -> Result<String, SortError> {
    match t {
        Term::Var(i) => {
            ctx.get(*i).cloned().ok_or(SortError::VarOutOfRange(*i, ctx.len()))
        }
        Term::App(f, args) => {
            let decl = sig.op(f).ok_or_else(|| SortError::UnknownOp(f.clone()))?;
            if decl.args.len() != args.len() {
                return Err(SortError::ArityMismatch {
                    op: f.clone(),
                    expected: decl.args.len(),
                    got: args.len(),
                });
            }
            for (i, (arg, expected)) in args.iter().zip(&decl.args).enumerate() {
                let got = term_sort(sig, ctx, arg)?;
                if &got != expected {
                    return Err(SortError::ArgSortMismatch {
                        symbol: f.clone(),
                        index: i,
                        expected: expected.clone(),
                        got,
                    });
                }
            }
            Ok(decl.result.clone())
        }
    }
}

pub fn check_formula(sig: &Signature, ctx: &[String], f: &Formula) -> Result<(), SortError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Pred(p, args) => {
            let decl = sig.pred(p).ok_or_else(|| SortError::UnknownPred(p.clone()))?;
            if decl.args.len() != args.len() {
                return Err(SortError::ArityMismatch {
                    op: p.clone(),
                    expected: decl.args.len(),
                    got: args.len(),
                });
            }
            for (i, (arg, expected)) in args.iter().zip(&decl.args).enumerate() {
                let got = term_sort(sig, ctx, arg)?;
                if &got != expected {
                    return Err(SortError::ArgSortMismatch {
                        symbol: p.clone(),
                        index: i,
                        expected: expected.clone(),
                        got,
                    });
                }
            }
            Ok(())
        }
        Formula::Eq(a, b) => {
            let sa = term_sort(sig, ctx, a)?;
            let sb = term_sort(sig, ctx, b)?;
            if sa != sb {
                return Err(SortError::EqSortMismatch(sa, sb));
            }
            Ok(())
        }
        Formula::And(fs) | Formula::Or(fs) => {
            fs.iter().try_for_each(|f| check_formula(sig, ctx, f))
        }
        Formula::Exists(s, body) => {
            if !sig.has_sort(s) {
                return Err(SortError::UnknownSort(s.clone()));
            }
            let mut inner = Vec::with_capacity(ctx.len() + 1);
            inner.push(s.clone());
            inner.extend_from_slice(ctx);
            check_formula(sig, &inner, body)
        }
    }
}

pub fn check_sequent_wf(sig: &Signature, seq: &Sequent) -> Result<(), SortError> {
    for s in &seq.context {
        if !sig.has_sort(s) {
            return Err(SortError::UnknownSort(s.clone()));
        }
    }
    for f in seq.lhs.iter().chain(&seq.rhs) {
        check_formula(sig, &seq.context, f)?;
    }
    Ok(())
}

fn check_schema_axiom(sig: &Signature, ax: &SchemaAxiom) -> Result<(), SortError> {
    let check_const = |name: &String, sort: &str| -> Result<(), SortError> {
        let decl = sig.op(name).ok_or_else(|| SortError::UnknownOp(name.clone()))?;
        if !decl.args.is_empty() {
            return Err(SortError::BadSchemaAxiom(format!("{name} is not a constant")));
        }
        if decl.result != sort {
            return Err(SortError::BadSchemaAxiom(format!(
                "constant {name} has sort {}, expected {sort}",
                decl.result
            )));
        }
        Ok(())
    };
    match ax {
        SchemaAxiom::DistinctConstants { sort, constants }
        | SchemaAxiom::CoverByConstants { sort, constants } => {
            if !sig.has_sort(sort) {
                return Err(SortError::UnknownSort(sort.clone()));
            }
            constants.iter().try_for_each(|c| check_const(c, sort))
        }
        SchemaAxiom::OpGraph { op, rows } => {
            let decl = sig.op(op).ok_or_else(|| SortError::UnknownOp(op.clone()))?.clone();
            for (inputs, output) in rows {
                if inputs.len() != decl.args.len() {
                    return Err(SortError::ArityMismatch {
                        op: op.clone(),
                        expected: decl.args.len(),
                        got: inputs.len(),
                    });
                }
                for (c, sort) in inputs.iter().zip(&decl.args) {
                    check_const(c, sort)?;
                }
                check_const(output, &decl.result)?;
            }
            Ok(())
        }
    }
}

fn check_signature(sig: &Signature) -> Result<(), SortError> {
    let mut names: Vec<&str> = sig.sorts.iter().map(String::as_str).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(SortError::DuplicateName("duplicate sort".into()));
    }
    let mut op_names: Vec<&str> = sig.operations.iter().map(|o| o.name.as_str()).collect();
    op_names.sort_unstable();
    if let Some(w) = op_names.windows(2).find(|w| w[0] == w[1]) {
        return Err(SortError::DuplicateName(w[0].to_string()));
    }
    let mut pred_names: Vec<&str> = sig.predicates.iter().map(|p| p.name.as_str()).collect();
    pred_names.sort_unstable();
    if let Some(w) = pred_names.windows(2).find(|w| w[0] == w[1]) {
        return Err(SortError::DuplicateName(w[0].to_string()));
    }
    for o in &sig.operations {
        for s in o.args.iter().chain(std::iter::once(&o.result)) {
            if !sig.has_sort(s) {
                return Err(SortError::UnknownSort(s.clone()));
            }
        }
    }
    for p in &sig.predicates {
        for s in &p.args {
            if !sig.has_sort(s) {
                return Err(SortError::UnknownSort(s.clone()));
            }
        }
    }
    Ok(())
}

/// Checks the whole theory: signature well-formedness, then every axiom.
/// The error names the first offending axiom.
pub fn check_theory(thy: &Theory) -> Result<(), TheoryError> {
    check_signature(&thy.signature).map_err(TheoryError::Signature)?;
    for (index, ax) in thy.axioms.iter().enumerate() {
        let result = match ax {
            Axiom::Sequent(seq) => check_sequent_wf(&thy.signature, seq),
            Axiom::Schema(sch) => check_schema_axiom(&thy.signature, sch),
        };
        result.map_err(|error| TheoryError::Axiom { index, error })?;
    }
    Ok(())
}
