//! Theory-building toolkit: presented categories as theories, hard coding of
//! finite instances, pushout gluing of theory presentations, and
//! interpretations between theories with model transport by precomposition.
//!
//! Interpretations send sorts to contexts (lists of target sorts), so a
//! single source sort may be carried to a product in every model. Soundness
//! of an interpretation is certified semantically at each precompose call,
//! never by derivability.

use crate::finset::{find_natural_iso, FinFunction, KernelError, OpPair, Subobject};
use crate::schema::{
    check_functorial, CategoryPresentation, FunctorialVerdict, Instance, Path, SchemaError,
};
use crate::semantics::{
    check_model, check_model_morphism, eval_formula, eval_term, SemanticsError, SetStructure,
    ValidityReport,
};
use crate::syntax::{
    check_theory, term_sort, Axiom, Formula, OpDecl, PredDecl, SchemaAxiom, Sequent, Signature,
    SortError, Term, Theory, TheoryError,
};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("instance is not functorial: {0}")]
    NotFunctorial(FunctorialVerdict),
    #[error("unknown symbol in identification: {0}")]
    UnknownSymbol(String),
    #[error("identified symbols {left} and {right} have different kinds or arities")]
    IdentificationMismatch { left: String, right: String },
    #[error("interpretation shape error at {at}: {detail}")]
    InterpretationShape { at: String, detail: String },
    #[error("target structure is not a model: {0}")]
    TargetNotModel(ValidityReport),
    #[error("translated source axiom {axiom}.{sub} fails in the target model at tuple {tuple:?}")]
    SourceAxiomFails { axiom: usize, sub: usize, tuple: Vec<usize> },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// Turns a presented category into a theory: a sort per object, a unary
/// operation per generator, and one equational axiom per path equation.
pub fn schema_to_theory(schema: &CategoryPresentation) -> Result<Theory, ConstructionError> {
    schema.validate()?;
    let signature = Signature {
        sorts: schema.objects.clone(),
        operations: schema
            .generators
            .iter()
            .map(|g| OpDecl { name: g.name.clone(), args: vec![g.src.clone()], result: g.dst.clone() })
            .collect(),
        predicates: Vec::new(),
    };
    let path_term = |p: &Path| {
        p.gens
            .iter()
            .fold(Term::Var(0), |acc, g| Term::App(g.clone(), vec![acc]))
    };
    let axioms = schema
        .equations
        .iter()
        .map(|(p, q)| {
            Axiom::Sequent(Sequent {
                context: vec![p.start.clone()],
                lhs: vec![Formula::True],
                rhs: vec![Formula::Eq(path_term(p), path_term(q))],
            })
        })
        .collect();
    Ok(Theory { signature, axioms })
}

/// Repackages an instance as a structure over `schema_to_theory`'s signature.
pub fn instance_to_structure(inst: &Instance) -> Result<SetStructure, ConstructionError> {
    inst.validate()?;
    let thy = schema_to_theory(&inst.schema)?;
    Ok(SetStructure {
        signature: thy.signature,
        sort_map: inst.object_sets.clone(),
        op_map: inst.generator_fns.clone(),
        pred_map: Vec::new(),
    })
}

/// Inverse repackaging; the structure must have the signature shape produced
/// by `schema_to_theory(schema)`.
pub fn structure_to_instance(
    schema: &CategoryPresentation,
    m: &SetStructure,
) -> Result<Instance, ConstructionError> {
    let inst = Instance {
        schema: schema.clone(),
        object_sets: m.sort_map.clone(),
        generator_fns: m.op_map.clone(),
    };
    inst.validate()?;
    Ok(inst)
}

/// Extends `schema_to_theory` with one constant per element, distinctness and
/// covering schema axioms per sort, and a full graph per generator. Models of
/// the result are exactly the structures naturally isomorphic to the
/// instance.
pub fn hard_code(inst: &Instance) -> Result<Theory, ConstructionError> {
    let verdict = check_functorial(inst)?;
    if !verdict.is_ok() {
        return Err(ConstructionError::NotFunctorial(verdict));
    }
    let mut thy = schema_to_theory(&inst.schema)?;
    // element constants per object, clash-avoided deterministically
    let mut elem_names: Vec<Vec<String>> = Vec::new();
    for (obj, set) in inst.schema.objects.iter().zip(&inst.object_sets) {
        let mut names = Vec::with_capacity(set.size());
        for i in 0..set.size() {
            let mut name = format!("{obj}_{i}");
            while thy.signature.uses_name(&name) {
                name.push('_');
            }
            thy.signature.operations.push(OpDecl {
                name: name.clone(),
                args: Vec::new(),
                result: obj.clone(),
            });
            names.push(name);
        }
        elem_names.push(names);
    }
    for (oi, obj) in inst.schema.objects.iter().enumerate() {
        thy.axioms.push(Axiom::Schema(SchemaAxiom::DistinctConstants {
            sort: obj.clone(),
            constants: elem_names[oi].clone(),
        }));
        thy.axioms.push(Axiom::Schema(SchemaAxiom::CoverByConstants {
            sort: obj.clone(),
            constants: elem_names[oi].clone(),
        }));
    }
    for (gi, g) in inst.schema.generators.iter().enumerate() {
        let src = inst.schema.object_index(&g.src).unwrap();
        let dst = inst.schema.object_index(&g.dst).unwrap();
        let f = &inst.generator_fns[gi];
        let rows = (0..f.dom().size())
            .map(|x| (vec![elem_names[src][x].clone()], elem_names[dst][f.apply(x)].clone()))
            .collect();
        thy.axioms.push(Axiom::Schema(SchemaAxiom::OpGraph { op: g.name.clone(), rows }));
    }
    check_theory(&thy)?;
    Ok(thy)
}

/// A theory interpretation: sorts go to contexts, an operation goes to one
/// target term per factor of its result context (over the flattened argument
/// context), a predicate goes to a target formula. All maps align with
/// source signature declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub source: Theory,
    pub target: Theory,
    pub sort_map: Vec<Vec<String>>,
    pub op_map: Vec<Vec<Term>>,
    pub pred_map: Vec<Formula>,
}

impl Interpretation {
    pub fn sort_context(&self, sort: &str) -> Result<&[String], ConstructionError> {
        let i = self
            .source
            .signature
            .sort_index(sort)
            .ok_or_else(|| ConstructionError::UnknownSymbol(sort.into()))?;
        Ok(&self.sort_map[i])
    }

    /// Concatenates the images of every context slot.
    pub fn flatten_context(&self, ctx: &[String]) -> Result<Vec<String>, ConstructionError> {
        let mut out = Vec::new();
        for s in ctx {
            out.extend_from_slice(self.sort_context(s)?);
        }
        Ok(out)
    }

    fn block_offsets(&self, ctx: &[String]) -> Result<Vec<usize>, ConstructionError> {
        let mut offsets = Vec::with_capacity(ctx.len());
        let mut at = 0;
        for s in ctx {
            offsets.push(at);
            at += self.sort_context(s)?.len();
        }
        Ok(offsets)
    }

    /// Translates a source term of sort `s` into one target term per factor
    /// of `s`'s image context, over the flattened source context.
    pub fn translate_term(
        &self,
        ctx: &[String],
        t: &Term,
    ) -> Result<Vec<Term>, ConstructionError> {
        match t {
            Term::Var(i) => {
                let offsets = self.block_offsets(ctx)?;
                let sort = ctx.get(*i).ok_or_else(|| ConstructionError::InterpretationShape {
                    at: format!("var {i}"),
                    detail: "index outside context".into(),
                })?;
                let width = self.sort_context(sort)?.len();
                Ok((0..width).map(|j| Term::Var(offsets[*i] + j)).collect())
            }
            Term::App(f, args) => {
                let fi = self
                    .source
                    .signature
                    .op_index(f)
                    .ok_or_else(|| ConstructionError::UnknownSymbol(f.clone()))?;
                let mut subst = Vec::new();
                for a in args {
                    subst.extend(self.translate_term(ctx, a)?);
                }
                Ok(self.op_map[fi].iter().map(|body| body.substitute(&subst)).collect())
            }
        }
    }

    /// Translates a formula over `ctx` to one over the flattened context. An
    /// existential over sort `s` becomes a nest of existentials over the
    /// image context of `s`, bound so that the first factor gets the
    /// innermost binder (index 0 inside the body).
    pub fn translate_formula(
        &self,
        ctx: &[String],
        phi: &Formula,
    ) -> Result<Formula, ConstructionError> {
        match phi {
            Formula::True => Ok(Formula::True),
            Formula::False => Ok(Formula::False),
            Formula::Eq(a, b) => {
                let ta = self.translate_term(ctx, a)?;
                let tb = self.translate_term(ctx, b)?;
                if ta.len() != tb.len() {
                    return Err(ConstructionError::InterpretationShape {
                        at: "equation".into(),
                        detail: "sides translate to different widths".into(),
                    });
                }
                let eqs: Vec<Formula> = ta
                    .into_iter()
                    .zip(tb)
                    .map(|(x, y)| Formula::Eq(x, y))
                    .collect();
                Ok(if eqs.len() == 1 { eqs.into_iter().next().unwrap() } else { Formula::And(eqs) })
            }
            Formula::Pred(p, args) => {
                let pi = self
                    .source
                    .signature
                    .pred_index(p)
                    .ok_or_else(|| ConstructionError::UnknownSymbol(p.clone()))?;
                let mut subst = Vec::new();
                for a in args {
                    subst.extend(self.translate_term(ctx, a)?);
                }
                Ok(self.pred_map[pi].substitute(&subst))
            }
            Formula::And(fs) => Ok(Formula::And(
                fs.iter().map(|f| self.translate_formula(ctx, f)).collect::<Result<_, _>>()?,
            )),
            Formula::Or(fs) => Ok(Formula::Or(
                fs.iter().map(|f| self.translate_formula(ctx, f)).collect::<Result<_, _>>()?,
            )),
            Formula::Exists(sort, body) => {
                let mut inner = Vec::with_capacity(ctx.len() + 1);
                inner.push(sort.clone());
                inner.extend_from_slice(ctx);
                let translated = self.translate_formula(&inner, body)?;
                let block = self.sort_context(sort)?.to_vec();
                let mut acc = translated;
                for c in &block {
                    acc = Formula::Exists(c.clone(), Box::new(acc));
                }
                Ok(acc)
            }
        }
    }

    pub fn translate_sequent(&self, seq: &Sequent) -> Result<Sequent, ConstructionError> {
        Ok(Sequent {
            context: self.flatten_context(&seq.context)?,
            lhs: seq
                .lhs
                .iter()
                .map(|f| self.translate_formula(&seq.context, f))
                .collect::<Result<_, _>>()?,
            rhs: seq
                .rhs
                .iter()
                .map(|f| self.translate_formula(&seq.context, f))
                .collect::<Result<_, _>>()?,
        })
    }

    /// Shape check: image contexts exist in the target, operation images have
    /// one well-sorted term per result factor, predicate images sort-check
    /// over the flattened argument context.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let shape = |at: &str, detail: &str| ConstructionError::InterpretationShape {
            at: at.into(),
            detail: detail.into(),
        };
        if self.sort_map.len() != self.source.signature.sorts.len()
            || self.op_map.len() != self.source.signature.operations.len()
            || self.pred_map.len() != self.source.signature.predicates.len()
        {
            return Err(shape("maps", "lengths do not match the source signature"));
        }
        for (s, ctx) in self.source.signature.sorts.iter().zip(&self.sort_map) {
            for t in ctx {
                if !self.target.signature.has_sort(t) {
                    return Err(shape(s, "image context uses an unknown target sort"));
                }
            }
        }
        for (decl, terms) in self.source.signature.operations.iter().zip(&self.op_map) {
            let arg_ctx = self.flatten_context(&decl.args)?;
            let result_ctx = self.sort_context(&decl.result)?.to_vec();
            if terms.len() != result_ctx.len() {
                return Err(shape(&decl.name, "wrong number of image terms"));
            }
            for (term, want) in terms.iter().zip(&result_ctx) {
                let got = term_sort(&self.target.signature, &arg_ctx, term)?;
                if got != *want {
                    return Err(shape(&decl.name, "image term has the wrong sort"));
                }
            }
        }
        for (decl, f) in self.source.signature.predicates.iter().zip(&self.pred_map) {
            let arg_ctx = self.flatten_context(&decl.args)?;
            crate::syntax::check_formula(&self.target.signature, &arg_ctx, f)?;
        }
        Ok(())
    }

    /// The identity interpretation on a theory.
    pub fn identity(thy: &Theory) -> Interpretation {
        let sig = &thy.signature;
        Interpretation {
            source: thy.clone(),
            target: thy.clone(),
            sort_map: sig.sorts.iter().map(|s| vec![s.clone()]).collect(),
            op_map: sig
                .operations
                .iter()
                .map(|o| {
                    vec![Term::App(o.name.clone(), (0..o.args.len()).map(Term::Var).collect())]
                })
                .collect(),
            pred_map: sig
                .predicates
                .iter()
                .map(|p| {
                    Formula::Pred(p.name.clone(), (0..p.args.len()).map(Term::Var).collect())
                })
                .collect(),
        }
    }
}

/// Composes interpretations: `first: A -> B`, then `second: B -> C`.
pub fn compose_interpretations(
    first: &Interpretation,
    second: &Interpretation,
) -> Result<Interpretation, ConstructionError> {
    if first.target.signature != second.source.signature {
        return Err(ConstructionError::InterpretationShape {
            at: "composition".into(),
            detail: "middle signatures differ".into(),
        });
    }
    let mut sort_map = Vec::new();
    for ctx in &first.sort_map {
        sort_map.push(second.flatten_context(ctx)?);
    }
    let mut op_map = Vec::new();
    for (decl, terms) in first.source.signature.operations.iter().zip(&first.op_map) {
        let mid_ctx = first.flatten_context(&decl.args)?;
        let mut out = Vec::new();
        for t in terms {
            out.extend(second.translate_term(&mid_ctx, t)?);
        }
        op_map.push(out);
    }
    let mut pred_map = Vec::new();
    for (decl, f) in first.source.signature.predicates.iter().zip(&first.pred_map) {
        let mid_ctx = first.flatten_context(&decl.args)?;
        pred_map.push(second.translate_formula(&mid_ctx, f)?);
    }
    Ok(Interpretation {
        source: first.source.clone(),
        target: second.target.clone(),
        sort_map,
        op_map,
        pred_map,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryPushout {
    pub left: Theory,
    pub right: Theory,
    pub apex: Theory,
    pub left_leg: Interpretation,
    pub right_leg: Interpretation,
}

struct Rename {
    sorts: Vec<(String, String)>,
    ops: Vec<(String, String)>,
    preds: Vec<(String, String)>,
}

impl Rename {
    fn sort(&self, name: &str) -> String {
        self.sorts
            .iter()
            .find(|(a, _)| a == name)
            .map(|(_, b)| b.clone())
            .unwrap_or_else(|| name.into())
    }

    fn op(&self, name: &str) -> String {
        self.ops
            .iter()
            .find(|(a, _)| a == name)
            .map(|(_, b)| b.clone())
            .unwrap_or_else(|| name.into())
    }

    fn pred(&self, name: &str) -> String {
        self.preds
            .iter()
            .find(|(a, _)| a == name)
            .map(|(_, b)| b.clone())
            .unwrap_or_else(|| name.into())
    }

    fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(i) => Term::Var(*i),
            Term::App(f, args) => {
                Term::App(self.op(f), args.iter().map(|a| self.term(a)).collect())
            }
        }
    }

    fn formula(&self, f: &Formula) -> Formula {
        match f {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Eq(a, b) => Formula::Eq(self.term(a), self.term(b)),
            Formula::Pred(p, args) => {
                Formula::Pred(self.pred(p), args.iter().map(|a| self.term(a)).collect())
            }
            Formula::And(fs) => Formula::And(fs.iter().map(|g| self.formula(g)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| self.formula(g)).collect()),
            Formula::Exists(s, body) => {
                Formula::Exists(self.sort(s), Box::new(self.formula(body)))
            }
        }
    }

    fn axiom(&self, ax: &Axiom) -> Axiom {
        match ax {
            Axiom::Sequent(seq) => Axiom::Sequent(Sequent {
                context: seq.context.iter().map(|s| self.sort(s)).collect(),
                lhs: seq.lhs.iter().map(|f| self.formula(f)).collect(),
                rhs: seq.rhs.iter().map(|f| self.formula(f)).collect(),
            }),
            Axiom::Schema(sch) => Axiom::Schema(match sch {
                SchemaAxiom::DistinctConstants { sort, constants } => {
                    SchemaAxiom::DistinctConstants {
                        sort: self.sort(sort),
                        constants: constants.iter().map(|c| self.op(c)).collect(),
                    }
                }
                SchemaAxiom::CoverByConstants { sort, constants } => {
                    SchemaAxiom::CoverByConstants {
                        sort: self.sort(sort),
                        constants: constants.iter().map(|c| self.op(c)).collect(),
                    }
                }
                SchemaAxiom::OpGraph { op, rows } => SchemaAxiom::OpGraph {
                    op: self.op(op),
                    rows: rows
                        .iter()
                        .map(|(ins, out)| {
                            (ins.iter().map(|c| self.op(c)).collect(), self.op(out))
                        })
                        .collect(),
                },
            }),
        }
    }
}

/// One symbol identification for a pushout; kinds are inferred from the
/// theories, so a name must not denote both a sort and an operation.
pub type SharedPair = (String, String);

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sort,
    Op,
    Pred,
}

fn kind_of(sig: &Signature, name: &str) -> Option<Kind> {
    if sig.has_sort(name) {
        Some(Kind::Sort)
    } else if sig.op(name).is_some() {
        Some(Kind::Op)
    } else if sig.pred(name).is_some() {
        Some(Kind::Pred)
    } else {
        None
    }
}

/// Glues two theories along symbol identifications. All left symbols are
/// renamed with a `left.` prefix and all right symbols with `right.`;
/// identified right symbols take the left symbol's new name. Axioms are the
/// translated union; the legs are the evident inclusions.
pub fn pushout(
    left: &Theory,
    right: &Theory,
    shared: &[SharedPair],
) -> Result<TheoryPushout, ConstructionError> {
    let mut left_ren = Rename { sorts: Vec::new(), ops: Vec::new(), preds: Vec::new() };
    for s in &left.signature.sorts {
        left_ren.sorts.push((s.clone(), format!("left.{s}")));
    }
    for o in &left.signature.operations {
        left_ren.ops.push((o.name.clone(), format!("left.{}", o.name)));
    }
    for p in &left.signature.predicates {
        left_ren.preds.push((p.name.clone(), format!("left.{}", p.name)));
    }
    let mut right_ren = Rename { sorts: Vec::new(), ops: Vec::new(), preds: Vec::new() };
    for s in &right.signature.sorts {
        right_ren.sorts.push((s.clone(), format!("right.{s}")));
    }
    for o in &right.signature.operations {
        right_ren.ops.push((o.name.clone(), format!("right.{}", o.name)));
    }
    for p in &right.signature.predicates {
        right_ren.preds.push((p.name.clone(), format!("right.{}", p.name)));
    }

    let mut merged_right: Vec<(Kind, String)> = Vec::new();
    // first pass: sort identifications, so op arity checks see merged sorts
    for pass in [Kind::Sort, Kind::Op, Kind::Pred] {
        for (l, r) in shared {
            let lk = kind_of(&left.signature, l)
                .ok_or_else(|| ConstructionError::UnknownSymbol(l.clone()))?;
            let rk = kind_of(&right.signature, r)
                .ok_or_else(|| ConstructionError::UnknownSymbol(r.clone()))?;
            if lk != rk {
                return Err(ConstructionError::IdentificationMismatch {
                    left: l.clone(),
                    right: r.clone(),
                });
            }
            if lk != pass {
                continue;
            }
            match lk {
                Kind::Sort => {
                    let target = left_ren.sort(l);
                    let entry = right_ren.sorts.iter_mut().find(|(a, _)| a == r).unwrap();
                    entry.1 = target;
                    merged_right.push((Kind::Sort, r.clone()));
                }
                Kind::Op => {
                    let lo = left.signature.op(l).unwrap();
                    let ro = right.signature.op(r).unwrap();
                    let largs: Vec<String> = lo.args.iter().map(|s| left_ren.sort(s)).collect();
                    let rargs: Vec<String> = ro.args.iter().map(|s| right_ren.sort(s)).collect();
                    if largs != rargs || left_ren.sort(&lo.result) != right_ren.sort(&ro.result) {
                        return Err(ConstructionError::IdentificationMismatch {
                            left: l.clone(),
                            right: r.clone(),
                        });
                    }
                    let target = left_ren.op(l);
                    let entry = right_ren.ops.iter_mut().find(|(a, _)| a == r).unwrap();
                    entry.1 = target;
                    merged_right.push((Kind::Op, r.clone()));
                }
                Kind::Pred => {
                    let lp = left.signature.pred(l).unwrap();
                    let rp = right.signature.pred(r).unwrap();
                    let largs: Vec<String> = lp.args.iter().map(|s| left_ren.sort(s)).collect();
                    let rargs: Vec<String> = rp.args.iter().map(|s| right_ren.sort(s)).collect();
                    if largs != rargs {
                        return Err(ConstructionError::IdentificationMismatch {
                            left: l.clone(),
                            right: r.clone(),
                        });
                    }
                    let target = left_ren.pred(l);
                    let entry = right_ren.preds.iter_mut().find(|(a, _)| a == r).unwrap();
                    entry.1 = target;
                    merged_right.push((Kind::Pred, r.clone()));
                }
            }
        }
    }

    let merged = |k: Kind, name: &str| merged_right.iter().any(|(mk, mn)| *mk == k && mn == name);
    let mut signature = Signature::default();
    for s in &left.signature.sorts {
        signature.sorts.push(left_ren.sort(s));
    }
    for s in &right.signature.sorts {
        if !merged(Kind::Sort, s) {
            signature.sorts.push(right_ren.sort(s));
        }
    }
    for o in &left.signature.operations {
        signature.operations.push(OpDecl {
            name: left_ren.op(&o.name),
            args: o.args.iter().map(|s| left_ren.sort(s)).collect(),
            result: left_ren.sort(&o.result),
        });
    }
    for o in &right.signature.operations {
        if !merged(Kind::Op, &o.name) {
            signature.operations.push(OpDecl {
                name: right_ren.op(&o.name),
                args: o.args.iter().map(|s| right_ren.sort(s)).collect(),
                result: right_ren.sort(&o.result),
            });
        }
    }
    for p in &left.signature.predicates {
        signature.predicates.push(PredDecl {
            name: left_ren.pred(&p.name),
            args: p.args.iter().map(|s| left_ren.sort(s)).collect(),
        });
    }
    for p in &right.signature.predicates {
        if !merged(Kind::Pred, &p.name) {
            signature.predicates.push(PredDecl {
                name: right_ren.pred(&p.name),
                args: p.args.iter().map(|s| right_ren.sort(s)).collect(),
            });
        }
    }

    let mut axioms = Vec::new();
    for ax in &left.axioms {
        axioms.push(left_ren.axiom(ax));
    }
    for ax in &right.axioms {
        axioms.push(right_ren.axiom(ax));
    }
    let apex = Theory { signature, axioms };
    check_theory(&apex)?;

    let leg = |thy: &Theory, ren: &Rename| Interpretation {
        source: thy.clone(),
        target: apex.clone(),
        sort_map: thy.signature.sorts.iter().map(|s| vec![ren.sort(s)]).collect(),
        op_map: thy
            .signature
            .operations
            .iter()
            .map(|o| vec![Term::App(ren.op(&o.name), (0..o.args.len()).map(Term::Var).collect())])
            .collect(),
        pred_map: thy
            .signature
            .predicates
            .iter()
            .map(|p| Formula::Pred(ren.pred(&p.name), (0..p.args.len()).map(Term::Var).collect()))
            .collect(),
    };
    let left_leg = leg(left, &left_ren);
    let right_leg = leg(right, &right_ren);
    left_leg.validate()?;
    right_leg.validate()?;
    Ok(TheoryPushout {
        left: left.clone(),
        right: right.clone(),
        apex,
        left_leg,
        right_leg,
    })
}

/// Transports a model of the target theory to one of the source theory along
/// an interpretation: sorts become products over their image contexts,
/// operations become tuples of evaluated image terms, predicates become
/// evaluated image formulas.
///
/// The call verifies both ends: the input must be a model of the target
/// theory, and the result must be a model of the source theory (equivalent
/// to checking every translated source axiom in the input).
pub fn precompose(
    interp: &Interpretation,
    m: &SetStructure,
) -> Result<SetStructure, ConstructionError> {
    interp.validate()?;
    if m.signature != interp.target.signature {
        return Err(ConstructionError::Semantics(SemanticsError::SignatureMismatch));
    }
    let target_report = check_model(m, &interp.target)?;
    if !target_report.is_valid() {
        return Err(ConstructionError::TargetNotModel(target_report));
    }
    let sig = &interp.source.signature;
    let mut sort_map = Vec::new();
    for ctx in &interp.sort_map {
        sort_map.push(m.context_product(ctx)?.as_finset());
    }
    let mut op_map = Vec::new();
    for (decl, terms) in sig.operations.iter().zip(&interp.op_map) {
        let arg_ctx = interp.flatten_context(&decl.args)?;
        let dom = m.context_product(&arg_ctx)?;
        let result_ctx = interp.sort_context(&decl.result)?.to_vec();
        let result_prod = m.context_product(&result_ctx)?;
        let fns: Vec<FinFunction> = terms
            .iter()
            .map(|t| eval_term(m, &arg_ctx, t))
            .collect::<Result<_, _>>()?;
        let mut table = Vec::with_capacity(dom.size());
        for x in 0..dom.size() {
            let tuple: Vec<usize> = fns.iter().map(|f| f.apply(x)).collect();
            table.push(result_prod.tuple_to_index(&tuple));
        }
        op_map.push(FinFunction::new(dom.as_finset(), result_prod.as_finset(), table)?);
    }
    let mut pred_map = Vec::new();
    for (decl, f) in sig.predicates.iter().zip(&interp.pred_map) {
        let arg_ctx = interp.flatten_context(&decl.args)?;
        let sub = eval_formula(m, &arg_ctx, f)?;
        let n = SetStructure {
            signature: sig.clone(),
            sort_map: sort_map.clone(),
            op_map: Vec::new(),
            pred_map: Vec::new(),
        };
        // same index space: products of products flatten with the same radix
        let ambient = n.context_product(&decl.args)?;
        pred_map.push(Subobject::new(ambient, sub.members().to_vec())?);
    }
    let result = SetStructure { signature: sig.clone(), sort_map, op_map, pred_map };
    match check_model(&result, &interp.source)? {
        ValidityReport::Valid => Ok(result),
        ValidityReport::Invalid { axiom, sub, tuple } => {
            Err(ConstructionError::SourceAxiomFails { axiom, sub, tuple })
        }
    }
}

/// Searches for a natural isomorphism between two structures over one
/// signature by backtracking over sort bijections compatible with every
/// operation table, then verifies both directions as model morphisms (which
/// covers predicates).
pub fn structure_iso(m: &SetStructure, n: &SetStructure) -> Option<Vec<FinFunction>> {
    if m.signature != n.signature {
        return None;
    }
    let sort_sizes: Vec<(usize, usize)> = m
        .sort_map
        .iter()
        .zip(&n.sort_map)
        .map(|(a, b)| (a.size(), b.size()))
        .collect();
    let ops: Vec<OpPair> = m
        .signature
        .operations
        .iter()
        .enumerate()
        .map(|(i, decl)| OpPair {
            name: decl.name.clone(),
            arg_sorts: decl
                .args
                .iter()
                .map(|s| m.signature.sort_index(s).unwrap())
                .collect(),
            result_sort: m.signature.sort_index(&decl.result).unwrap(),
            left: m.op_map[i].clone(),
            right: n.op_map[i].clone(),
        })
        .collect();
    let iso = find_natural_iso(&sort_sizes, &ops)?;
    let forward_ok = check_model_morphism(m, n, &iso).map(|v| v.is_ok()).unwrap_or(false);
    let inverses: Option<Vec<FinFunction>> = iso.iter().map(|f| f.inverse()).collect();
    let back_ok = inverses
        .as_ref()
        .map(|inv| check_model_morphism(n, m, inv).map(|v| v.is_ok()).unwrap_or(false))
        .unwrap_or(false);
    if forward_ok && back_ok {
        Some(iso)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::FinSet;
    use crate::schema::builtin;
    use crate::semantics::check_sequent;
    use crate::syntax::parse_theory;

    fn small_instance() -> Instance {
        // Oper with A = {0,1,2}, B = {0,1}, g = [0,1,0]
        let schema = builtin("Oper").unwrap();
        Instance {
            schema,
            object_sets: vec![FinSet::new(3), FinSet::new(2)],
            generator_fns: vec![
                FinFunction::new(FinSet::new(3), FinSet::new(2), vec![0, 1, 0]).unwrap(),
            ],
        }
    }

    #[test]
    fn schema_to_theory_shapes() {
        let t = schema_to_theory(&builtin("Sort").unwrap()).unwrap();
        assert_eq!((t.signature.sorts.len(), t.signature.operations.len(), t.axioms.len()), (1, 0, 0));
        let t = schema_to_theory(&builtin("Shop").unwrap()).unwrap();
        assert_eq!((t.signature.sorts.len(), t.signature.operations.len(), t.axioms.len()), (7, 7, 0));
        assert!(t.signature.operations.iter().all(|o| o.args.len() == 1));
    }

    #[test]
    fn path_equation_becomes_nested_application() {
        let schema = CategoryPresentation {
            objects: vec!["X".into(), "Y".into(), "Z".into()],
            generators: vec![
                crate::schema::Generator { name: "a".into(), src: "X".into(), dst: "Y".into() },
                crate::schema::Generator { name: "b".into(), src: "Y".into(), dst: "Z".into() },
                crate::schema::Generator { name: "c".into(), src: "X".into(), dst: "Z".into() },
            ],
            equations: vec![(
                Path { start: "X".into(), gens: vec!["a".into(), "b".into()] },
                Path { start: "X".into(), gens: vec!["c".into()] },
            )],
        };
        let thy = schema_to_theory(&schema).unwrap();
        match &thy.axioms[0] {
            Axiom::Sequent(seq) => {
                let want = Formula::Eq(
                    Term::App("b".into(), vec![Term::App("a".into(), vec![Term::Var(0)])]),
                    Term::App("c".into(), vec![Term::Var(0)]),
                );
                assert_eq!(seq.rhs, vec![want]);
            }
            _ => panic!("expected a sequent"),
        }
    }

    #[test]
    fn instance_structure_round_trip() {
        let inst = small_instance();
        let m = instance_to_structure(&inst).unwrap();
        let back = structure_to_instance(&inst.schema, &m).unwrap();
        assert_eq!(inst, back);
        let thy = schema_to_theory(&inst.schema).unwrap();
        assert!(check_model(&m, &thy).unwrap().is_valid());
    }

    #[test]
    fn hard_code_axiom_counts() {
        let inst = small_instance();
        let thy = hard_code(&inst).unwrap();
        // 1 unary op + 3 + 2 constants
        assert_eq!(thy.signature.operations.len(), 6);
        // distinct + cover per object, one graph
        assert_eq!(thy.axioms.len(), 5);
        let m = instance_to_structure(&inst);
        let mut m = m.unwrap();
        m.signature = thy.signature.clone();
        for (name, value) in [("A_0", 0), ("A_1", 1), ("A_2", 2)] {
            let _ = name;
            m.op_map.push(FinFunction::global_element(FinSet::new(3), value).unwrap());
        }
        for value in [0, 1] {
            m.op_map.push(FinFunction::global_element(FinSet::new(2), value).unwrap());
        }
        assert!(check_model(&m, &thy).unwrap().is_valid());
        // corrupting the generator table must break model-hood
        let mut bad = m.clone();
        bad.op_map[0] =
            FinFunction::new(FinSet::new(3), FinSet::new(2), vec![1, 1, 0]).unwrap();
        assert!(!check_model(&bad, &thy).unwrap().is_valid());
    }

    #[test]
    fn terminal_instance_is_rigid() {
        let schema = builtin("Sort").unwrap();
        let inst = Instance {
            schema,
            object_sets: vec![FinSet::new(1)],
            generator_fns: vec![],
        };
        let thy = hard_code(&inst).unwrap();
        // a two-element carrier cannot satisfy the covering axiom
        let big = SetStructure {
            signature: thy.signature.clone(),
            sort_map: vec![FinSet::new(2)],
            op_map: vec![FinFunction::global_element(FinSet::new(2), 0).unwrap()],
            pred_map: vec![],
        };
        assert!(!check_model(&big, &thy).unwrap().is_valid());
        let ok = SetStructure {
            signature: thy.signature.clone(),
            sort_map: vec![FinSet::new(1)],
            op_map: vec![FinFunction::global_element(FinSet::new(1), 0).unwrap()],
            pred_map: vec![],
        };
        assert!(check_model(&ok, &thy).unwrap().is_valid());
    }

    #[test]
    fn identity_interpretation_translates_to_itself() {
        let thy = parse_theory(
            "sort R;\nop add : R, R -> R;\nconst c0 : R;\npred P : R;\n\
             axiom [x:R] P(x) |- exists (y:R) add(x, y) = c0;\n",
        )
        .unwrap();
        let id = Interpretation::identity(&thy);
        id.validate().unwrap();
        for (_, _, seq) in thy.expanded_axioms() {
            assert_eq!(id.translate_sequent(&seq).unwrap(), seq);
        }
    }

    #[test]
    fn precompose_along_identity_is_identity() {
        let inst = small_instance();
        let m = instance_to_structure(&inst).unwrap();
        let thy = schema_to_theory(&inst.schema).unwrap();
        let id = Interpretation::identity(&thy);
        let n = precompose(&id, &m).unwrap();
        assert_eq!(m, n);
    }

    #[test]
    fn sort_to_pair_context_interpretation() {
        // source: one sort with a swap op; target: one sort, no ops needed
        let source = parse_theory(
            "sort P;\nop swap : P -> P;\naxiom [x:P] |- swap(swap(x)) = x;\n",
        )
        .unwrap();
        let target = parse_theory("sort R;\n").unwrap();
        let interp = Interpretation {
            source: source.clone(),
            target: target.clone(),
            sort_map: vec![vec!["R".into(), "R".into()]],
            // swap really swaps the two components
            op_map: vec![vec![Term::Var(1), Term::Var(0)]],
            pred_map: vec![],
        };
        interp.validate().unwrap();
        let m = SetStructure {
            signature: target.signature.clone(),
            sort_map: vec![FinSet::new(3)],
            op_map: vec![],
            pred_map: vec![],
        };
        let n = precompose(&interp, &m).unwrap();
        assert_eq!(n.sort_map[0].size(), 9);
        // swap is an involution on the 9 pairs and fixes the diagonal
        let swap = &n.op_map[0];
        for x in 0..9 {
            assert_eq!(swap.apply(swap.apply(x)), x);
        }
        assert_eq!(swap.apply(0), 0);
        assert_eq!(swap.apply(1), 3);
    }

    #[test]
    fn translated_exists_binds_blocks_correctly() {
        // source: exists y. g(y) = x over a sort sent to a 2-context
        let source = parse_theory(
            "sort P;\nop g : P -> P;\naxiom [x:P] |- exists (y:P) g(y) = x;\n",
        )
        .unwrap();
        let target = parse_theory("sort R;\nop h : R, R -> R;\n").unwrap();
        let interp = Interpretation {
            source: source.clone(),
            target: target.clone(),
            sort_map: vec![vec!["R".into(), "R".into()]],
            // g(a, b) = (h(a,b), b)
            op_map: vec![vec![
                Term::App("h".into(), vec![Term::Var(0), Term::Var(1)]),
                Term::Var(1),
            ]],
            pred_map: vec![],
        };
        interp.validate().unwrap();
        let seq = match &source.axioms[0] {
            Axiom::Sequent(s) => s.clone(),
            _ => unreachable!(),
        };
        let translated = interp.translate_sequent(&seq).unwrap();
        assert_eq!(translated.context, vec!["R".to_string(), "R".to_string()]);
        // h = projection on the first argument makes g surjective
        let mut table = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let _ = b;
                table.push(a);
            }
        }
        let m = SetStructure {
            signature: target.signature.clone(),
            sort_map: vec![FinSet::new(2)],
            op_map: vec![FinFunction::new(FinSet::new(4), FinSet::new(2), table).unwrap()],
            pred_map: vec![],
        };
        assert!(check_sequent(&m, &translated).unwrap().is_valid());
        let n = precompose(&interp, &m).unwrap();
        assert!(check_model(&n, &source).unwrap().is_valid());
    }

    #[test]
    fn pushout_disjoint_union_and_merge() {
        let left = parse_theory("sort R;\nop f : R -> R;\naxiom [x:R] |- f(x) = x;\n").unwrap();
        let right = parse_theory("sort S;\nop g : S -> S;\n").unwrap();
        let disjoint = pushout(&left, &right, &[]).unwrap();
        assert_eq!(disjoint.apex.signature.sorts, vec!["left.R", "right.S"]);
        assert_eq!(disjoint.apex.signature.operations.len(), 2);
        assert_eq!(disjoint.apex.axioms.len(), 1);

        let merged = pushout(&left, &right, &[("R".into(), "S".into())]).unwrap();
        assert_eq!(merged.apex.signature.sorts, vec!["left.R"]);
        let g = merged.apex.signature.op("right.g").unwrap();
        assert_eq!(g.args, vec!["left.R".to_string()]);

        let both =
            pushout(&left, &right, &[("R".into(), "S".into()), ("f".into(), "g".into())]).unwrap();
        assert_eq!(both.apex.signature.operations.len(), 1);
        assert_eq!(both.apex.signature.operations[0].name, "left.f");
    }

    #[test]
    fn pushout_identification_mismatch_rejected() {
        let left = parse_theory("sort R;\nop f : R, R -> R;\n").unwrap();
        let right = parse_theory("sort S;\nop g : S -> S;\n").unwrap();
        let err = pushout(&left, &right, &[("R".into(), "S".into()), ("f".into(), "g".into())]);
        assert!(matches!(err, Err(ConstructionError::IdentificationMismatch { .. })));
        let err = pushout(&left, &right, &[("R".into(), "g".into())]);
        assert!(matches!(err, Err(ConstructionError::IdentificationMismatch { .. })));
    }

    #[test]
    fn pushout_leg_transport_gives_models() {
        let left = parse_theory("sort R;\nop f : R -> R;\naxiom [x:R] |- f(f(x)) = f(x);\n").unwrap();
        let right = parse_theory("sort S;\nop g : S -> S;\naxiom [x:S] |- g(x) = x;\n").unwrap();
        let po = pushout(&left, &right, &[("R".into(), "S".into())]).unwrap();
        // apex model: f idempotent, g identity on a 3-element carrier
        let m = SetStructure {
            signature: po.apex.signature.clone(),
            sort_map: vec![FinSet::new(3)],
            op_map: vec![
                FinFunction::new(FinSet::new(3), FinSet::new(3), vec![0, 0, 2]).unwrap(),
                FinFunction::identity(&FinSet::new(3)),
            ],
            pred_map: vec![],
        };
        assert!(check_model(&m, &po.apex).unwrap().is_valid());
        let lm = precompose(&po.left_leg, &m).unwrap();
        assert!(check_model(&lm, &left).unwrap().is_valid());
        let rm = precompose(&po.right_leg, &m).unwrap();
        assert!(check_model(&rm, &right).unwrap().is_valid());
    }

    #[test]
    fn precompose_functoriality() {
        // A -> B -> C with A's sort landing in a 2-context of B, and B's
        // sorts landing in 1-contexts of C
        let a = parse_theory("sort P;\nop swap : P -> P;\n").unwrap();
        let b = parse_theory("sort R;\n").unwrap();
        let c = parse_theory("sort T;\n").unwrap();
        let ab = Interpretation {
            source: a.clone(),
            target: b.clone(),
            sort_map: vec![vec!["R".into(), "R".into()]],
            op_map: vec![vec![Term::Var(1), Term::Var(0)]],
            pred_map: vec![],
        };
        let bc = Interpretation {
            source: b.clone(),
            target: c.clone(),
            sort_map: vec![vec!["T".into()]],
            op_map: vec![],
            pred_map: vec![],
        };
        let ac = compose_interpretations(&ab, &bc).unwrap();
        ac.validate().unwrap();
        let m = SetStructure {
            signature: c.signature.clone(),
            sort_map: vec![FinSet::new(2)],
            op_map: vec![],
            pred_map: vec![],
        };
        let two_step = precompose(&ab, &precompose(&bc, &m).unwrap()).unwrap();
        let one_step = precompose(&ac, &m).unwrap();
        assert_eq!(two_step, one_step);
    }

    #[test]
    fn structure_iso_finds_relabelings_and_rejects_nonisomorphic() {
        let inst = small_instance();
        let m = instance_to_structure(&inst).unwrap();
        // relabel A by the 3-cycle and B by the swap
        let pa = FinFunction::new(FinSet::new(3), FinSet::new(3), vec![1, 2, 0]).unwrap();
        let pb = FinFunction::new(FinSet::new(2), FinSet::new(2), vec![1, 0]).unwrap();
        let g = &m.op_map[0];
        let tg = pa.inverse().unwrap().then(g).unwrap().then(&pb).unwrap();
        let n = SetStructure {
            signature: m.signature.clone(),
            sort_map: m.sort_map.clone(),
            op_map: vec![tg],
            pred_map: vec![],
        };
        let iso = structure_iso(&m, &n).expect("transported structure must be isomorphic");
        assert!(check_model_morphism(&m, &n, &iso).unwrap().is_ok());

        // changing the image multiset of g breaks isomorphy
        let bad = SetStructure {
            signature: m.signature.clone(),
            sort_map: m.sort_map.clone(),
            op_map: vec![FinFunction::new(FinSet::new(3), FinSet::new(2), vec![0, 0, 0]).unwrap()],
            pred_map: vec![],
        };
        assert!(structure_iso(&m, &bad).is_none());
    }
}
