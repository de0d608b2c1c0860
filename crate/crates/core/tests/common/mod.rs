//! Shared test helpers: a naive comprehension evaluator used as an
//! independent oracle for the semantics kernel, and random generators for
//! schemas, instances, structures, and formulas.

#![allow(dead_code)]

use cohlog::finset::{product, FinFunction, FinSet};
use cohlog::minifloat::FloatTables;
use cohlog::nn::{Architecture, ParamAssignment};
use cohlog::schema::{CategoryPresentation, Generator, Instance, Path};
use cohlog::semantics::SetStructure;
use cohlog::syntax::{Formula, OpDecl, PredDecl, Signature, Term};
use rand::rngs::StdRng;
use rand::Rng;

/// Evaluates a term at one context tuple by direct recursion.
pub fn naive_term_val(m: &SetStructure, tuple: &[usize], t: &Term) -> usize {
    match t {
        Term::Var(i) => tuple[*i],
        Term::App(f, args) => {
            let decl = m.signature.op(f).expect("known op").clone();
            let vals: Vec<usize> = args.iter().map(|a| naive_term_val(m, tuple, a)).collect();
            let dom: Vec<FinSet> =
                decl.args.iter().map(|s| m.sort_set(s).unwrap().clone()).collect();
            m.op_fn(f).unwrap().apply(product(&dom).tuple_to_index(&vals))
        }
    }
}

/// Decides a formula at one context tuple by direct recursion, quantifying
/// over raw sort elements.
pub fn naive_holds(m: &SetStructure, ctx: &[String], tuple: &[usize], f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::And(fs) => fs.iter().all(|g| naive_holds(m, ctx, tuple, g)),
        Formula::Or(fs) => fs.iter().any(|g| naive_holds(m, ctx, tuple, g)),
        Formula::Eq(a, b) => naive_term_val(m, tuple, a) == naive_term_val(m, tuple, b),
        Formula::Pred(p, args) => {
            let decl = m.signature.pred(p).expect("known pred").clone();
            let vals: Vec<usize> = args.iter().map(|a| naive_term_val(m, tuple, a)).collect();
            let amb: Vec<FinSet> =
                decl.args.iter().map(|s| m.sort_set(s).unwrap().clone()).collect();
            m.pred_sub(p).unwrap().contains(product(&amb).tuple_to_index(&vals))
        }
        Formula::Exists(sort, body) => {
            let size = m.sort_set(sort).unwrap().size();
            let mut inner_ctx = vec![sort.clone()];
            inner_ctx.extend_from_slice(ctx);
            (0..size).any(|v| {
                let mut inner = vec![v];
                inner.extend_from_slice(tuple);
                naive_holds(m, &inner_ctx, &inner, body)
            })
        }
    }
}

/// Member indices of a formula's extension by brute-force comprehension.
pub fn naive_members(m: &SetStructure, ctx: &[String], f: &Formula) -> Vec<usize> {
    let prod = m.context_product(ctx).unwrap();
    (0..prod.size())
        .filter(|&i| naive_holds(m, ctx, &prod.index_to_tuple(i), f))
        .collect()
}

/// A fixed two-sorted signature with enough constants to keep random term
/// generation total.
pub fn oracle_signature() -> Signature {
    Signature {
        sorts: vec!["A".into(), "B".into()],
        operations: vec![
            OpDecl { name: "ca".into(), args: vec![], result: "A".into() },
            OpDecl { name: "cb".into(), args: vec![], result: "B".into() },
            OpDecl { name: "u".into(), args: vec!["A".into()], result: "A".into() },
            OpDecl { name: "g".into(), args: vec!["A".into(), "B".into()], result: "A".into() },
            OpDecl { name: "h".into(), args: vec!["B".into()], result: "B".into() },
            OpDecl { name: "k".into(), args: vec!["A".into()], result: "B".into() },
        ],
        predicates: vec![
            PredDecl { name: "P".into(), args: vec!["A".into()] },
            PredDecl { name: "Q".into(), args: vec!["A".into(), "B".into()] },
        ],
    }
}

/// A random structure for `oracle_signature` with sorts of the given sizes.
pub fn random_oracle_structure(rng: &mut StdRng, size_a: usize, size_b: usize) -> SetStructure {
    let sig = oracle_signature();
    let a = FinSet::new(size_a);
    let b = FinSet::new(size_b);
    let sort_set = |s: &str| if s == "A" { a.clone() } else { b.clone() };
    let mut op_map = Vec::new();
    for decl in &sig.operations {
        let dom = product(&decl.args.iter().map(|s| sort_set(s)).collect::<Vec<_>>());
        let cod = sort_set(&decl.result);
        let table: Vec<usize> = (0..dom.size()).map(|_| rng.gen_range(0..cod.size())).collect();
        op_map.push(FinFunction::new(dom.as_finset(), cod, table).unwrap());
    }
    let mut pred_map = Vec::new();
    for decl in &sig.predicates {
        let amb = product(&decl.args.iter().map(|s| sort_set(s)).collect::<Vec<_>>());
        let members: Vec<usize> = (0..amb.size()).filter(|_| rng.gen_bool(0.4)).collect();
        pred_map.push(cohlog::finset::Subobject::new(amb, members).unwrap());
    }
    SetStructure { signature: sig, sort_map: vec![a, b], op_map, pred_map }
}

/// A random well-sorted term of `sort` over `ctx` (context sorts).
pub fn random_term(
    rng: &mut StdRng,
    sig: &Signature,
    ctx: &[String],
    sort: &str,
    depth: usize,
) -> Term {
    let vars: Vec<usize> =
        ctx.iter().enumerate().filter(|(_, s)| *s == sort).map(|(i, _)| i).collect();
    if depth == 0 || (rng.gen_bool(0.4) && !vars.is_empty()) {
        if !vars.is_empty() && (depth == 0 && rng.gen_bool(0.5) || depth > 0) {
            return Term::Var(vars[rng.gen_range(0..vars.len())]);
        }
        let consts: Vec<&OpDecl> = sig.constants_of(sort);
        let c = consts[rng.gen_range(0..consts.len())];
        return Term::App(c.name.clone(), vec![]);
    }
    let ops: Vec<&OpDecl> =
        sig.operations.iter().filter(|o| o.result == sort && !o.args.is_empty()).collect();
    let o = ops[rng.gen_range(0..ops.len())];
    let args = o.args.iter().map(|s| random_term(rng, sig, ctx, s, depth - 1)).collect();
    Term::App(o.name.clone(), args)
}

/// A random well-sorted formula over `ctx`.
pub fn random_formula(rng: &mut StdRng, sig: &Signature, ctx: &[String], depth: usize) -> Formula {
    let leaf = depth == 0;
    match rng.gen_range(if leaf { 0..4 } else { 0..7 }) {
        0 => Formula::True,
        1 => Formula::False,
        2 => {
            let p = &sig.predicates[rng.gen_range(0..sig.predicates.len())];
            let args = p
                .args
                .iter()
                .map(|s| random_term(rng, sig, ctx, s, depth.min(2)))
                .collect();
            Formula::Pred(p.name.clone(), args)
        }
        3 => {
            let sort = sig.sorts[rng.gen_range(0..sig.sorts.len())].clone();
            Formula::Eq(
                random_term(rng, sig, ctx, &sort, depth.min(2)),
                random_term(rng, sig, ctx, &sort, depth.min(2)),
            )
        }
        4 | 5 => {
            let n = rng.gen_range(0..=3);
            let fs = (0..n).map(|_| random_formula(rng, sig, ctx, depth - 1)).collect();
            if rng.gen_bool(0.5) {
                Formula::And(fs)
            } else {
                Formula::Or(fs)
            }
        }
        _ => {
            let sort = sig.sorts[rng.gen_range(0..sig.sorts.len())].clone();
            let mut inner = vec![sort.clone()];
            inner.extend_from_slice(ctx);
            Formula::Exists(sort, Box::new(random_formula(rng, sig, &inner, depth - 1)))
        }
    }
}

/// A random finitely presented category: up to 4 objects, 6 generators, and
/// 3 path equations found by random walks.
pub fn random_schema(rng: &mut StdRng) -> CategoryPresentation {
    let n_obj = rng.gen_range(1..=4);
    let objects: Vec<String> = (0..n_obj).map(|i| format!("O{i}")).collect();
    let n_gen = rng.gen_range(0..=6);
    let generators: Vec<Generator> = (0..n_gen)
        .map(|i| Generator {
            name: format!("g{i}"),
            src: objects[rng.gen_range(0..n_obj)].clone(),
            dst: objects[rng.gen_range(0..n_obj)].clone(),
        })
        .collect();
    let mut schema = CategoryPresentation { objects, generators, equations: Vec::new() };
    let walk = |rng: &mut StdRng, schema: &CategoryPresentation, start: &str, max: usize| {
        let mut path = Path::identity(start);
        let mut at = start.to_string();
        for _ in 0..rng.gen_range(0..=max) {
            let outs: Vec<&Generator> =
                schema.generators.iter().filter(|g| g.src == at).collect();
            if outs.is_empty() {
                break;
            }
            let g = outs[rng.gen_range(0..outs.len())];
            at = g.dst.clone();
            path.gens.push(g.name.clone());
        }
        (path, at)
    };
    for _ in 0..rng.gen_range(0..=3) {
        let start = schema.objects[rng.gen_range(0..schema.objects.len())].clone();
        let (lhs, end) = walk(rng, &schema, &start, 3);
        for _ in 0..20 {
            let (rhs, end2) = walk(rng, &schema, &start, 4);
            if end2 == end && rhs != lhs {
                schema.equations.push((lhs, rhs));
                break;
            }
        }
    }
    schema
}

/// A random instance over a schema with carriers of size 1..=4.
pub fn random_instance(rng: &mut StdRng, schema: &CategoryPresentation) -> Instance {
    let object_sets: Vec<FinSet> =
        schema.objects.iter().map(|_| FinSet::new(rng.gen_range(1..=4))).collect();
    let generator_fns = schema
        .generators
        .iter()
        .map(|g| {
            let dom = object_sets[schema.object_index(&g.src).unwrap()].clone();
            let cod = object_sets[schema.object_index(&g.dst).unwrap()].clone();
            let table: Vec<usize> =
                (0..dom.size()).map(|_| rng.gen_range(0..cod.size())).collect();
            FinFunction::new(dom, cod, table).unwrap()
        })
        .collect();
    Instance { schema: schema.clone(), object_sets, generator_fns }
}

/// Random components between two instances of one schema (target carriers
/// must be nonempty wherever the source's are).
pub fn random_components(
    rng: &mut StdRng,
    source: &Instance,
    target: &Instance,
) -> Vec<FinFunction> {
    source
        .object_sets
        .iter()
        .zip(&target.object_sets)
        .map(|(a, b)| {
            let table: Vec<usize> = (0..a.size()).map(|_| rng.gen_range(0..b.size())).collect();
            FinFunction::new(a.clone(), b.clone(), table).unwrap()
        })
        .collect()
}

/// A random full parameter assignment for an architecture.
pub fn random_params(rng: &mut StdRng, arch: &Architecture) -> ParamAssignment {
    let r = arch.format.size();
    let weights = (0..arch.layers())
        .map(|l| {
            (0..arch.widths[l + 1])
                .map(|_| (0..arch.widths[l]).map(|_| rng.gen_range(0..r)).collect())
                .collect()
        })
        .collect();
    let biases = (0..arch.layers())
        .map(|l| (0..arch.widths[l + 1]).map(|_| rng.gen_range(0..r)).collect())
        .collect();
    ParamAssignment { weights, biases }
}

/// Resolved activation tables for an architecture's names.
pub fn resolved_acts(arch: &Architecture, tables: &FloatTables) -> Vec<FinFunction> {
    arch.activations.iter().map(|a| tables.activation(a).unwrap()).collect()
}
