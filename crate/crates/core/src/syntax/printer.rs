//! Deterministic pretty-printer for the theory DSL. Printing then parsing
//! gives back a structurally equal value, and parsing then printing is a
//! fixed point on printer output.

use super::ast::{Axiom, Formula, SchemaAxiom, Sequent, Signature, Term, Theory};

/// Picks a context variable name that no signature symbol uses; generated
/// names are unique per position so nested binders never collide.
fn var_name(sig: &Signature, position_tag: usize) -> String {
    let mut name = format!("x{position_tag}");
    while sig.uses_name(&name) {
        name.push('_');
    }
    name
}

fn names_for_context(sig: &Signature, len: usize) -> Vec<String> {
    (0..len).map(|i| var_name(sig, i)).collect()
}

fn term_str(sig: &Signature, names: &[String], t: &Term) -> String {
    match t {
        Term::Var(i) => names.get(*i).cloned().unwrap_or_else(|| format!("?{i}")),
        Term::App(f, args) => {
            if args.is_empty() {
                f.clone()
            } else {
                let parts: Vec<String> = args.iter().map(|a| term_str(sig, names, a)).collect();
                format!("{f}({})", parts.join(", "))
            }
        }
    }
}

fn formula_str(sig: &Signature, names: &[String], next_tag: usize, f: &Formula) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Pred(p, args) => {
            let parts: Vec<String> = args.iter().map(|a| term_str(sig, names, a)).collect();
            format!("{p}({})", parts.join(", "))
        }
        Formula::Eq(a, b) => {
            format!("{} = {}", term_str(sig, names, a), term_str(sig, names, b))
        }
        Formula::And(fs) => {
            let parts: Vec<String> =
                fs.iter().map(|g| formula_str(sig, names, next_tag, g)).collect();
            format!("and({})", parts.join(", "))
        }
        Formula::Or(fs) => {
            let parts: Vec<String> =
                fs.iter().map(|g| formula_str(sig, names, next_tag, g)).collect();
            format!("or({})", parts.join(", "))
        }
        Formula::Exists(sort, body) => {
            let bound = var_name(sig, next_tag);
            let mut inner = Vec::with_capacity(names.len() + 1);
            inner.push(bound.clone());
            inner.extend_from_slice(names);
            format!("exists ({bound}:{sort}) {}", formula_str(sig, &inner, next_tag + 1, body))
        }
    }
}

pub fn print_term(sig: &Signature, context: &[String], t: &Term) -> String {
    let names = names_for_context(sig, context.len());
    term_str(sig, &names, t)
}

pub fn print_formula(sig: &Signature, context: &[String], f: &Formula) -> String {
    let names = names_for_context(sig, context.len());
    formula_str(sig, &names, context.len(), f)
}

pub fn print_sequent(sig: &Signature, seq: &Sequent) -> String {
    let names = names_for_context(sig, seq.context.len());
    let ctx: Vec<String> = names
        .iter()
        .zip(seq.context.iter())
        .map(|(n, s)| format!("{n}:{s}"))
        .collect();
    let side = |fs: &[Formula]| {
        fs.iter()
            .map(|f| formula_str(sig, &names, seq.context.len(), f))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!("[{}] {} |- {};", ctx.join(", "), side(&seq.lhs), side(&seq.rhs))
}

fn schema_axiom_str(sch: &SchemaAxiom) -> String {
    match sch {
        SchemaAxiom::DistinctConstants { sort, constants } => {
            format!("schema distinct {sort} {{ {} }}", constants.join(" "))
        }
        SchemaAxiom::CoverByConstants { sort, constants } => {
            format!("schema cover {sort} {{ {} }}", constants.join(" "))
        }
        SchemaAxiom::OpGraph { op, rows } => {
            let mut s = format!("schema graph {op} {{");
            for (inputs, output) in rows {
                s.push_str(&format!(" ({}) -> {};", inputs.join(", "), output));
            }
            s.push_str(" }");
            s
        }
    }
}

pub fn print_theory(thy: &Theory) -> String {
    let mut out = String::new();
    for s in &thy.signature.sorts {
        out.push_str(&format!("sort {s};\n"));
    }
    for o in &thy.signature.operations {
        if o.args.is_empty() {
            out.push_str(&format!("const {} : {};\n", o.name, o.result));
        } else {
            out.push_str(&format!("op {} : {} -> {};\n", o.name, o.args.join(", "), o.result));
        }
    }
    for p in &thy.signature.predicates {
        if p.args.is_empty() {
            out.push_str(&format!("pred {};\n", p.name));
        } else {
            out.push_str(&format!("pred {} : {};\n", p.name, p.args.join(", ")));
        }
    }
    for ax in &thy.axioms {
        match ax {
            Axiom::Sequent(seq) => {
                out.push_str(&format!("axiom {}\n", print_sequent(&thy.signature, seq)));
            }
            Axiom::Schema(sch) => {
                out.push_str(&schema_axiom_str(sch));
                out.push('\n');
            }
        }
    }
    out
}
