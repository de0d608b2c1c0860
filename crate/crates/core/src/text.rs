//! Line-oriented text formats for schemas, instances, structures,
//! interpretations, parameter files, constraint files, activation tables,
//! and span datasets. `#` starts a comment; blank lines are ignored.
//! Printing then parsing gives back a structurally equal value.

use crate::constructions::Interpretation;
use crate::finset::{product, FinFunction, FinSet, Subobject};
use crate::minifloat::FloatFormat;
use crate::nn::{ParamAssignment, SpanDataset, TieConstraint};
use crate::schema::{CategoryPresentation, Generator, Instance, Path};
use crate::semantics::SetStructure;
use crate::syntax::{parse_formula_in, parse_term_in, print_formula, print_term, Signature, Theory};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> TextError {
    TextError { line, message: message.into() }
}

/// 1-based line numbers, comments stripped, blanks skipped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            None
        } else {
            Some((i + 1, body))
        }
    })
}

fn parse_pattern(line: usize, tok: &str) -> Result<usize, TextError> {
    let parsed = match tok.strip_prefix("0x") {
        Some(hex) => usize::from_str_radix(hex, 16),
        None => tok.parse(),
    };
    parsed.map_err(|_| err(line, format!("bad bit pattern: {tok}")))
}

fn parse_usize(line: usize, tok: &str) -> Result<usize, TextError> {
    tok.parse().map_err(|_| err(line, format!("bad number: {tok}")))
}

fn path_str(p: &Path) -> String {
    if p.gens.is_empty() {
        format!("id:{}", p.start)
    } else {
        p.gens.join(".")
    }
}

fn parse_path(line: usize, schema: &CategoryPresentation, text: &str) -> Result<Path, TextError> {
    if let Some(obj) = text.strip_prefix("id:") {
        if schema.object_index(obj).is_none() {
            return Err(err(line, format!("unknown object: {obj}")));
        }
        return Ok(Path::identity(obj));
    }
    let gens: Vec<String> = text.split('.').map(str::to_string).collect();
    let first = schema
        .generator(&gens[0])
        .ok_or_else(|| err(line, format!("unknown generator: {}", gens[0])))?;
    Ok(Path { start: first.src.clone(), gens })
}

/// Prints a schema, one declaration per line:
/// `object V`, `generator s : E -> V`, `equation a.a = id:V`.
pub fn print_schema(schema: &CategoryPresentation) -> String {
    let mut out = String::new();
    for obj in &schema.objects {
        writeln!(out, "object {obj}").unwrap();
    }
    for g in &schema.generators {
        writeln!(out, "generator {} : {} -> {}", g.name, g.src, g.dst).unwrap();
    }
    for (lhs, rhs) in &schema.equations {
        writeln!(out, "equation {} = {}", path_str(lhs), path_str(rhs)).unwrap();
    }
    out
}

pub fn parse_schema(text: &str) -> Result<CategoryPresentation, TextError> {
    let mut schema = CategoryPresentation::default();
    let mut equation_lines: Vec<(usize, String, String)> = Vec::new();
    for (line, body) in lines(text) {
        let (kw, rest) = body
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(line, "expected a declaration"))?;
        match kw {
            "object" => schema.objects.push(rest.trim().to_string()),
            "generator" => {
                let (name, sig) = rest
                    .split_once(':')
                    .ok_or_else(|| err(line, "expected `name : src -> dst`"))?;
                let (src, dst) = sig
                    .split_once("->")
                    .ok_or_else(|| err(line, "expected `src -> dst`"))?;
                schema.generators.push(Generator {
                    name: name.trim().to_string(),
                    src: src.trim().to_string(),
                    dst: dst.trim().to_string(),
                });
            }
            "equation" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err(line, "expected `path = path`"))?;
                equation_lines.push((line, lhs.trim().to_string(), rhs.trim().to_string()));
            }
            other => return Err(err(line, format!("unknown declaration: {other}"))),
        }
    }
    // paths reference generators, so resolve equations after everything else
    for (line, lhs, rhs) in equation_lines {
        let l = parse_path(line, &schema, &lhs)?;
        let r = parse_path(line, &schema, &rhs)?;
        schema.equations.push((l, r));
    }
    schema.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(schema)
}

/// Prints an instance against its schema: `object V = 4` gives the carrier
/// size, `generator s = 0 1 2 0` the function table in domain order.
pub fn print_instance(inst: &Instance) -> String {
    let mut out = String::new();
    for (obj, set) in inst.schema.objects.iter().zip(&inst.object_sets) {
        writeln!(out, "object {obj} = {}", set.size()).unwrap();
    }
    for (g, f) in inst.schema.generators.iter().zip(&inst.generator_fns) {
        let cells: Vec<String> = f.table().iter().map(usize::to_string).collect();
        writeln!(out, "generator {} = {}", g.name, cells.join(" ")).unwrap();
    }
    out
}

pub fn parse_instance(
    text: &str,
    schema: &CategoryPresentation,
) -> Result<Instance, TextError> {
    let mut sizes: BTreeMap<String, usize> = BTreeMap::new();
    let mut tables: BTreeMap<String, (usize, Vec<usize>)> = BTreeMap::new();
    for (line, body) in lines(text) {
        let (kw, rest) = body
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(line, "expected a declaration"))?;
        let (name, payload) = rest
            .split_once('=')
            .ok_or_else(|| err(line, "expected `name = ...`"))?;
        let name = name.trim();
        match kw {
            "object" => {
                sizes.insert(name.to_string(), parse_usize(line, payload.trim())?);
            }
            "generator" => {
                let cells = payload
                    .split_whitespace()
                    .map(|tok| parse_usize(line, tok))
                    .collect::<Result<Vec<_>, _>>()?;
                tables.insert(name.to_string(), (line, cells));
            }
            other => return Err(err(line, format!("unknown declaration: {other}"))),
        }
    }
    let mut object_sets = Vec::new();
    for obj in &schema.objects {
        let size =
            sizes.remove(obj).ok_or_else(|| err(0, format!("missing object: {obj}")))?;
        object_sets.push(FinSet::new(size));
    }
    let mut generator_fns = Vec::new();
    for g in &schema.generators {
        let (line, cells) = tables
            .remove(&g.name)
            .ok_or_else(|| err(0, format!("missing generator: {}", g.name)))?;
        let dom = object_sets[schema.object_index(&g.src).unwrap()].clone();
        let cod = object_sets[schema.object_index(&g.dst).unwrap()].clone();
        generator_fns.push(
            FinFunction::new(dom, cod, cells).map_err(|e| err(line, e.to_string()))?,
        );
    }
    if let Some(extra) = sizes.keys().chain(tables.keys()).next() {
        return Err(err(0, format!("not in the schema: {extra}")));
    }
    let inst = Instance { schema: schema.clone(), object_sets, generator_fns };
    inst.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(inst)
}

/// Prints a structure for a signature: `sort R = 3` gives the carrier size,
/// `op add = 0 1 2 ...` the table in domain product order (last argument
/// fastest), `pred P = (0, 1) (2, 2)` the member tuples.
pub fn print_structure(m: &SetStructure) -> String {
    let mut out = String::new();
    for (s, set) in m.signature.sorts.iter().zip(&m.sort_map) {
        writeln!(out, "sort {s} = {}", set.size()).unwrap();
    }
    for (decl, f) in m.signature.operations.iter().zip(&m.op_map) {
        let cells: Vec<String> = f.table().iter().map(usize::to_string).collect();
        writeln!(out, "op {} = {}", decl.name, cells.join(" ")).unwrap();
    }
    for (decl, sub) in m.signature.predicates.iter().zip(&m.pred_map) {
        let tuples: Vec<String> = sub
            .members()
            .iter()
            .map(|&idx| {
                let tuple = sub.ambient().index_to_tuple(idx);
                let cells: Vec<String> = tuple.iter().map(usize::to_string).collect();
                format!("({})", cells.join(", "))
            })
            .collect();
        let _ = decl;
        writeln!(out, "pred {} = {}", decl.name, tuples.join(" ")).unwrap();
    }
    out
}

fn parse_tuples(line: usize, payload: &str) -> Result<Vec<Vec<usize>>, TextError> {
    let mut tuples = Vec::new();
    for chunk in payload.split(')') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let inner = chunk
            .strip_prefix('(')
            .ok_or_else(|| err(line, "expected `(a, b, ...)` tuples"))?;
        let cells = inner
            .split(',')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(|c| parse_usize(line, c))
            .collect::<Result<Vec<_>, _>>()?;
        tuples.push(cells);
    }
    Ok(tuples)
}

pub fn parse_structure(text: &str, sig: &Signature) -> Result<SetStructure, TextError> {
    let mut sizes: BTreeMap<String, usize> = BTreeMap::new();
    let mut op_tables: BTreeMap<String, (usize, Vec<usize>)> = BTreeMap::new();
    let mut pred_bodies: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (line, body) in lines(text) {
        let (kw, rest) = body
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(line, "expected a declaration"))?;
        let (name, payload) = rest
            .split_once('=')
            .ok_or_else(|| err(line, "expected `name = ...`"))?;
        let name = name.trim().to_string();
        let payload = payload.trim().to_string();
        match kw {
            "sort" => {
                sizes.insert(name, parse_usize(line, &payload)?);
            }
            "op" => {
                let cells = payload
                    .split_whitespace()
                    .map(|tok| parse_usize(line, tok))
                    .collect::<Result<Vec<_>, _>>()?;
                op_tables.insert(name, (line, cells));
            }
            "pred" => {
                pred_bodies.insert(name, (line, payload));
            }
            other => return Err(err(line, format!("unknown declaration: {other}"))),
        }
    }
    let mut sort_map = Vec::new();
    for s in &sig.sorts {
        let size = sizes.remove(s).ok_or_else(|| err(0, format!("missing sort: {s}")))?;
        sort_map.push(FinSet::new(size));
    }
    let sort_set = |name: &str| sort_map[sig.sort_index(name).unwrap()].clone();
    let mut op_map = Vec::new();
    for decl in &sig.operations {
        let (line, cells) = op_tables
            .remove(&decl.name)
            .ok_or_else(|| err(0, format!("missing op: {}", decl.name)))?;
        let dom: Vec<FinSet> = decl.args.iter().map(|a| sort_set(a)).collect();
        let f = FinFunction::new(product(&dom).as_finset(), sort_set(&decl.result), cells)
            .map_err(|e| err(line, e.to_string()))?;
        op_map.push(f);
    }
    let mut pred_map = Vec::new();
    for decl in &sig.predicates {
        let (line, payload) = pred_bodies
            .remove(&decl.name)
            .ok_or_else(|| err(0, format!("missing pred: {}", decl.name)))?;
        let ambient = product(&decl.args.iter().map(|a| sort_set(a)).collect::<Vec<_>>());
        let mut members = Vec::new();
        for tuple in parse_tuples(line, &payload)? {
            if tuple.len() != decl.args.len() {
                return Err(err(line, format!("tuple arity mismatch for {}", decl.name)));
            }
            if tuple.iter().zip(ambient.factors()).any(|(&v, f)| v >= f.size()) {
                return Err(err(line, format!("tuple out of range for {}", decl.name)));
            }
            members.push(ambient.tuple_to_index(&tuple));
        }
        pred_map
            .push(Subobject::new(ambient, members).map_err(|e| err(line, e.to_string()))?);
    }
    if let Some(extra) =
        sizes.keys().chain(op_tables.keys()).chain(pred_bodies.keys()).next()
    {
        return Err(err(0, format!("not in the signature: {extra}")));
    }
    let m = SetStructure { signature: sig.clone(), sort_map, op_map, pred_map };
    m.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(m)
}

/// Names used for the flattened context of interpretation images; must match
/// the printer's variable naming so files round-trip.
fn image_context(sig: &Signature, flat: &[String]) -> Vec<(String, String)> {
    flat.iter()
        .enumerate()
        .map(|(i, sort)| {
            let mut name = format!("x{i}");
            while sig.uses_name(&name) {
                name.push('_');
            }
            (name, sort.clone())
        })
        .collect()
}

/// Prints an interpretation: `sort X = R R` lists the image context, `op f =
/// t1 ; t2` one image term per factor over the flattened argument context,
/// `pred P = formula` likewise.
pub fn print_interpretation(interp: &Interpretation) -> String {
    let mut out = String::new();
    let src = &interp.source.signature;
    let tgt = &interp.target.signature;
    for (s, ctx) in src.sorts.iter().zip(&interp.sort_map) {
        writeln!(out, "sort {s} = {}", ctx.join(" ")).unwrap();
    }
    for (decl, images) in src.operations.iter().zip(&interp.op_map) {
        let flat = interp.flatten_context(&decl.args).expect("valid interpretation");
        let parts: Vec<String> =
            images.iter().map(|t| print_term(tgt, &flat, t)).collect();
        writeln!(out, "op {} = {}", decl.name, parts.join(" ; ")).unwrap();
    }
    for (decl, f) in src.predicates.iter().zip(&interp.pred_map) {
        let flat = interp.flatten_context(&decl.args).expect("valid interpretation");
        writeln!(out, "pred {} = {}", decl.name, print_formula(tgt, &flat, f)).unwrap();
    }
    out
}

pub fn parse_interpretation(
    text: &str,
    source: &Theory,
    target: &Theory,
) -> Result<Interpretation, TextError> {
    let src = &source.signature;
    let tgt = &target.signature;
    let mut sort_bodies: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut op_bodies: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut pred_bodies: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (line, body) in lines(text) {
        let (kw, rest) = body
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(line, "expected a declaration"))?;
        let (name, payload) = rest
            .split_once('=')
            .ok_or_else(|| err(line, "expected `name = ...`"))?;
        let entry = (line, payload.trim().to_string());
        let map = match kw {
            "sort" => &mut sort_bodies,
            "op" => &mut op_bodies,
            "pred" => &mut pred_bodies,
            other => return Err(err(line, format!("unknown declaration: {other}"))),
        };
        map.insert(name.trim().to_string(), entry);
    }
    let mut sort_map = Vec::new();
    for s in &src.sorts {
        let (line, payload) =
            sort_bodies.remove(s).ok_or_else(|| err(0, format!("missing sort: {s}")))?;
        let ctx: Vec<String> = payload.split_whitespace().map(str::to_string).collect();
        for t in &ctx {
            if !tgt.has_sort(t) {
                return Err(err(line, format!("unknown target sort: {t}")));
            }
        }
        sort_map.push(ctx);
    }
    let flatten = |args: &[String]| -> Vec<String> {
        args.iter()
            .flat_map(|a| sort_map[src.sort_index(a).unwrap()].iter().cloned())
            .collect()
    };
    let mut op_map = Vec::new();
    for decl in &src.operations {
        let (line, payload) = op_bodies
            .remove(&decl.name)
            .ok_or_else(|| err(0, format!("missing op: {}", decl.name)))?;
        let ctx = image_context(tgt, &flatten(&decl.args));
        let mut images = Vec::new();
        for part in payload.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            images.push(
                parse_term_in(tgt, &ctx, part).map_err(|e| err(line, e.to_string()))?,
            );
        }
        op_map.push(images);
    }
    let mut pred_map = Vec::new();
    for decl in &src.predicates {
        let (line, payload) = pred_bodies
            .remove(&decl.name)
            .ok_or_else(|| err(0, format!("missing pred: {}", decl.name)))?;
        let ctx = image_context(tgt, &flatten(&decl.args));
        pred_map.push(
            parse_formula_in(tgt, &ctx, &payload).map_err(|e| err(line, e.to_string()))?,
        );
    }
    if let Some(extra) =
        sort_bodies.keys().chain(op_bodies.keys()).chain(pred_bodies.keys()).next()
    {
        return Err(err(0, format!("not in the source signature: {extra}")));
    }
    let interp = Interpretation {
        source: source.clone(),
        target: target.clone(),
        sort_map,
        op_map,
        pred_map,
    };
    interp.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(interp)
}

/// Prints a parameter file: per layer a `layer <l>` header (1-based), one
/// `w` line of hex patterns per output row, then one `b` line.
pub fn print_params(params: &ParamAssignment) -> String {
    let hex = |row: &[usize]| {
        row.iter().map(|p| format!("{p:#x}")).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    for (l, (w, b)) in params.weights.iter().zip(&params.biases).enumerate() {
        writeln!(out, "layer {}", l + 1).unwrap();
        for row in w {
            writeln!(out, "w {}", hex(row)).unwrap();
        }
        writeln!(out, "b {}", hex(b)).unwrap();
    }
    out
}

pub fn parse_params(text: &str) -> Result<ParamAssignment, TextError> {
    let mut params = ParamAssignment { weights: Vec::new(), biases: Vec::new() };
    for (line, body) in lines(text) {
        let (kw, rest) = body
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(line, "expected `layer`, `w`, or `b`"))?;
        match kw {
            "layer" => {
                let l = parse_usize(line, rest.trim())?;
                if l != params.weights.len() + 1 {
                    return Err(err(line, format!("expected layer {}", params.weights.len() + 1)));
                }
                params.weights.push(Vec::new());
                params.biases.push(Vec::new());
            }
            "w" | "b" => {
                if params.weights.is_empty() {
                    return Err(err(line, "missing `layer` header"));
                }
                let row = rest
                    .split_whitespace()
                    .map(|tok| parse_pattern(line, tok))
                    .collect::<Result<Vec<_>, _>>()?;
                let l = params.weights.len() - 1;
                if kw == "w" {
                    if !params.biases[l].is_empty() {
                        return Err(err(line, "`w` after `b` in the same layer"));
                    }
                    params.weights[l].push(row);
                } else {
                    if !params.biases[l].is_empty() {
                        return Err(err(line, "duplicate `b` line"));
                    }
                    params.biases[l] = row;
                }
            }
            other => return Err(err(line, format!("unknown line: {other}"))),
        }
    }
    Ok(params)
}

pub fn print_constraints(constraints: &[TieConstraint]) -> String {
    let mut out = String::new();
    for c in constraints {
        writeln!(out, "{c}").unwrap();
    }
    out
}

pub fn parse_constraints(text: &str) -> Result<Vec<TieConstraint>, TextError> {
    lines(text)
        .map(|(line, body)| TieConstraint::parse_line(body).map_err(|e| err(line, e.to_string())))
        .collect()
}

/// Activation table files: one `pattern -> pattern` pair per line.
pub fn parse_activation_pairs(text: &str) -> Result<Vec<(usize, usize)>, TextError> {
    lines(text)
        .map(|(line, body)| {
            let (a, b) = body
                .split_once("->")
                .ok_or_else(|| err(line, "expected `pattern -> pattern`"))?;
            Ok((parse_pattern(line, a.trim())?, parse_pattern(line, b.trim())?))
        })
        .collect()
}

fn dataset_rows(ds: &SpanDataset) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut rows: Vec<(Vec<usize>, Vec<usize>)> = (0..ds.n_set.size())
        .map(|x| (ds.input_tuple(x), ds.output_tuple(x)))
        .collect();
    rows.sort();
    rows
}

/// Prints a span dataset: a `format <fmt> <n> <m>` header, then one
/// `x-patterns -> t-patterns` row per point of N, sorted by input.
pub fn print_dataset(ds: &SpanDataset) -> String {
    let hex = |row: &[usize]| {
        row.iter().map(|p| format!("{p:#x}")).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    writeln!(out, "format {} {} {}", ds.format, ds.n_in, ds.m_out).unwrap();
    for (input, output) in dataset_rows(ds) {
        writeln!(out, "{} -> {}", hex(&input), hex(&output)).unwrap();
    }
    out
}

pub fn parse_dataset(text: &str) -> Result<SpanDataset, TextError> {
    let mut it = lines(text);
    let (hline, header) = it.next().ok_or_else(|| err(0, "empty dataset"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("format") {
        return Err(err(hline, "expected `format <fmt> <n> <m>` header"));
    }
    let fmt_str = parts.next().ok_or_else(|| err(hline, "missing format"))?;
    let format = FloatFormat::parse(fmt_str).map_err(|e| err(hline, e.to_string()))?;
    let n_in = parse_usize(hline, parts.next().ok_or_else(|| err(hline, "missing n"))?)?;
    let m_out = parse_usize(hline, parts.next().ok_or_else(|| err(hline, "missing m"))?)?;
    if parts.next().is_some() {
        return Err(err(hline, "trailing input in header"));
    }
    let r = format.size();
    let in_prod = product(&vec![format.value_set(); n_in]);
    let out_prod = product(&vec![format.value_set(); m_out]);
    let mut f_table = Vec::new();
    let mut t_table = Vec::new();
    for (line, body) in it {
        let (xs, ts) = body
            .split_once("->")
            .ok_or_else(|| err(line, "expected `x-patterns -> t-patterns`"))?;
        let parse_side = |side: &str, width: usize| -> Result<Vec<usize>, TextError> {
            let row = side
                .split_whitespace()
                .map(|tok| parse_pattern(line, tok))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != width {
                return Err(err(line, format!("expected {width} patterns")));
            }
            if row.iter().any(|&p| p >= r) {
                return Err(err(line, "pattern out of range"));
            }
            Ok(row)
        };
        f_table.push(in_prod.tuple_to_index(&parse_side(xs, n_in)?));
        t_table.push(out_prod.tuple_to_index(&parse_side(ts, m_out)?));
    }
    let n_set = FinSet::new(f_table.len());
    Ok(SpanDataset {
        format,
        n_in,
        m_out,
        n_set: n_set.clone(),
        f: FinFunction::new(n_set.clone(), in_prod.as_finset(), f_table)
            .map_err(|e| err(0, e.to_string()))?,
        t: FinFunction::new(n_set, out_prod.as_finset(), t_table)
            .map_err(|e| err(0, e.to_string()))?,
    })
}

/// First row (by sorted input order) where two datasets disagree, or a
/// header mismatch pseudo-row. `None` means bit-identical.
pub fn dataset_diff(a: &SpanDataset, b: &SpanDataset) -> Option<String> {
    if a.format != b.format || a.n_in != b.n_in || a.m_out != b.m_out {
        return Some(format!(
            "headers differ: format {} {} {} vs format {} {} {}",
            a.format, a.n_in, a.m_out, b.format, b.n_in, b.m_out
        ));
    }
    let rows_a = dataset_rows(a);
    let rows_b = dataset_rows(b);
    let hex = |row: &[usize]| {
        row.iter().map(|p| format!("{p:#x}")).collect::<Vec<_>>().join(" ")
    };
    let show = |row: &(Vec<usize>, Vec<usize>)| format!("{} -> {}", hex(&row.0), hex(&row.1));
    for i in 0..rows_a.len().max(rows_b.len()) {
        match (rows_a.get(i), rows_b.get(i)) {
            (Some(x), Some(y)) if x == y => continue,
            (Some(x), Some(y)) => return Some(format!("row {}: {} vs {}", i, show(x), show(y))),
            (Some(x), None) => return Some(format!("row {}: {} vs <missing>", i, show(x))),
            (None, Some(y)) => return Some(format!("row {}: <missing> vs {}", i, show(y))),
            (None, None) => unreachable!(),
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minifloat::build_tables;
    use crate::nn::{build_model, infer, Architecture};
    use crate::schema::builtin;
    use crate::syntax::parse_theory;

    #[test]
    fn schema_round_trip() {
        for name in ["Sort", "Oper", "Span", "Pol", "Shop"] {
            let schema = builtin(name).unwrap();
            let printed = print_schema(&schema);
            let back = parse_schema(&printed).unwrap();
            assert_eq!(schema, back, "{name}");
            assert_eq!(print_schema(&back), printed, "{name}");
        }
    }

    #[test]
    fn instance_round_trip() {
        let pol = builtin("Pol").unwrap();
        let inst = Instance {
            schema: pol.clone(),
            object_sets: vec![FinSet::new(2), FinSet::new(3)],
            generator_fns: vec![
                FinFunction::new(FinSet::new(3), FinSet::new(2), vec![0, 1, 1]).unwrap(),
                FinFunction::new(FinSet::new(3), FinSet::new(2), vec![1, 0, 0]).unwrap(),
                FinFunction::new(FinSet::new(2), FinSet::new(2), vec![1, 0]).unwrap(),
            ],
        };
        let printed = print_instance(&inst);
        let back = parse_instance(&printed, &pol).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn structure_round_trip_with_predicate() {
        let thy = parse_theory(
            "sort R; op add : R, R -> R; const z : R; pred P : R, R;",
        )
        .unwrap();
        let r = FinSet::new(3);
        let add_table: Vec<usize> = (0..9).map(|k| (k / 3 + k % 3) % 3).collect();
        let amb = product(&[r.clone(), r.clone()]);
        let m = SetStructure {
            signature: thy.signature.clone(),
            sort_map: vec![r.clone()],
            op_map: vec![
                FinFunction::new(FinSet::new(9), r.clone(), add_table).unwrap(),
                FinFunction::global_element(r.clone(), 1).unwrap(),
            ],
            pred_map: vec![Subobject::new(amb.clone(), vec![1, 5, 7]).unwrap()],
        };
        let printed = print_structure(&m);
        let back = parse_structure(&printed, &thy.signature).unwrap();
        assert_eq!(m, back);
        assert_eq!(print_structure(&back), printed);
    }

    #[test]
    fn interpretation_round_trip() {
        let tables = build_tables(FloatFormat::parse("s1e1m1").unwrap()).unwrap();
        let arch = Architecture::parse("1-id-1", tables.format).unwrap();
        let nn = crate::nn::build_network(&arch, &tables).unwrap();
        let printed = print_interpretation(&nn.interp);
        let back = parse_interpretation(&printed, &nn.rspan, &nn.theory).unwrap();
        assert_eq!(nn.interp, back);
        assert_eq!(print_interpretation(&back), printed);
    }

    #[test]
    fn params_and_constraints_round_trip() {
        let params = ParamAssignment {
            weights: vec![vec![vec![3, 1], vec![2, 3]], vec![vec![0, 7]]],
            biases: vec![vec![0, 5], vec![4]],
        };
        let printed = print_params(&params);
        assert_eq!(parse_params(&printed).unwrap(), params);
        let cs = vec![
            TieConstraint::parse_line("tie w[1][0,0] w[2][0,1]").unwrap(),
            TieConstraint::parse_line("fix b[1][1] 0x5").unwrap(),
        ];
        let printed = print_constraints(&cs);
        assert_eq!(parse_constraints(&printed).unwrap(), cs);
    }

    #[test]
    fn dataset_round_trip_and_diff() {
        let tables = build_tables(FloatFormat::parse("s1e1m1").unwrap()).unwrap();
        let arch = Architecture::parse("1-relu-1", tables.format).unwrap();
        let nn = crate::nn::build_network(&arch, &tables).unwrap();
        let params = ParamAssignment { weights: vec![vec![vec![2]]], biases: vec![vec![1]] };
        let m = build_model(&nn, &tables, &params).unwrap();
        let ds = infer(&nn, &tables, &m).unwrap();
        let printed = print_dataset(&ds);
        let back = parse_dataset(&printed).unwrap();
        assert_eq!(print_dataset(&back), printed);
        assert!(dataset_diff(&ds, &back).is_none());
        let other = {
            let params = ParamAssignment { weights: vec![vec![vec![2]]], biases: vec![vec![2]] };
            let m = build_model(&nn, &tables, &params).unwrap();
            infer(&nn, &tables, &m).unwrap()
        };
        assert!(dataset_diff(&ds, &other).is_some());
    }

    #[test]
    fn activation_pairs_parse() {
        let pairs = parse_activation_pairs("0x0 -> 0x1\n2 -> 3\n# comment\n").unwrap();
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
        assert!(parse_activation_pairs("0x0 0x1").is_err());
    }
}
