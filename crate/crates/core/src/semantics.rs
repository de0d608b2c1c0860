//! Set-valued semantics: structures over a signature, term and formula
//! evaluation as subobjects, sequent validity, model checking, and model
//! morphisms. Everything is decided by finite enumeration.

use crate::finset::{
    equalizer, product, sub_lattice, FinFunction, FinSet, KernelError, LatticeOp, ProductSet,
    Subobject,
};
use crate::syntax::{Formula, Sequent, Signature, Term, Theory};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("unknown sort: {0}")]
    UnknownSort(String),
    #[error("unknown operation: {0}")]
    UnknownOp(String),
    #[error("unknown predicate: {0}")]
    UnknownPred(String),
    #[error("structure shape mismatch at {0}")]
    ShapeMismatch(String),
    #[error("signatures differ")]
    SignatureMismatch,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A structure for a signature: one finite set per sort, one function per
/// operation (from the product of its argument sorts), one subobject per
/// predicate. All three vectors align with signature declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetStructure {
    pub signature: Signature,
    pub sort_map: Vec<FinSet>,
    pub op_map: Vec<FinFunction>,
    pub pred_map: Vec<Subobject>,
}

impl SetStructure {
    pub fn sort_set(&self, name: &str) -> Result<&FinSet, SemanticsError> {
        let i = self
            .signature
            .sort_index(name)
            .ok_or_else(|| SemanticsError::UnknownSort(name.into()))?;
        Ok(&self.sort_map[i])
    }

    pub fn op_fn(&self, name: &str) -> Result<&FinFunction, SemanticsError> {
        let i = self
            .signature
            .op_index(name)
            .ok_or_else(|| SemanticsError::UnknownOp(name.into()))?;
        Ok(&self.op_map[i])
    }

    pub fn pred_sub(&self, name: &str) -> Result<&Subobject, SemanticsError> {
        let i = self
            .signature
            .pred_index(name)
            .ok_or_else(|| SemanticsError::UnknownPred(name.into()))?;
        Ok(&self.pred_map[i])
    }

    /// The product of the sort sets named by a context, last slot fastest.
    pub fn context_product(&self, context: &[String]) -> Result<ProductSet, SemanticsError> {
        let factors: Vec<FinSet> = context
            .iter()
            .map(|s| self.sort_set(s).cloned())
            .collect::<Result<_, _>>()?;
        Ok(product(&factors))
    }

    pub fn validate(&self) -> Result<(), SemanticsError> {
        if self.sort_map.len() != self.signature.sorts.len() {
            return Err(SemanticsError::ShapeMismatch("sorts".into()));
        }
        if self.op_map.len() != self.signature.operations.len() {
            return Err(SemanticsError::ShapeMismatch("operations".into()));
        }
        if self.pred_map.len() != self.signature.predicates.len() {
            return Err(SemanticsError::ShapeMismatch("predicates".into()));
        }
        for (decl, f) in self.signature.operations.iter().zip(&self.op_map) {
            let dom = self.context_product(&decl.args)?;
            if f.dom().size() != dom.size()
                || f.cod().size() != self.sort_set(&decl.result)?.size()
            {
                return Err(SemanticsError::ShapeMismatch(decl.name.clone()));
            }
        }
        for (decl, s) in self.signature.predicates.iter().zip(&self.pred_map) {
            let dom = self.context_product(&decl.args)?;
            if s.ambient().size() != dom.size() {
                return Err(SemanticsError::ShapeMismatch(decl.name.clone()));
            }
        }
        Ok(())
    }
}

/// Interprets a term as a function from the context product to its sort.
pub fn eval_term(
    m: &SetStructure,
    context: &[String],
    t: &Term,
) -> Result<FinFunction, SemanticsError> {
    let dom = m.context_product(context)?;
    match t {
        Term::Var(i) => Ok(dom.projection(*i)),
        Term::App(f, args) => {
            let decl = m
                .signature
                .op(f)
                .ok_or_else(|| SemanticsError::UnknownOp(f.clone()))?
                .clone();
            let table = m.op_fn(f)?;
            let arg_fns: Vec<FinFunction> = args
                .iter()
                .map(|a| eval_term(m, context, a))
                .collect::<Result<_, _>>()?;
            let argprod = m.context_product(&decl.args)?;
            let mut tup = Vec::with_capacity(dom.size());
            for x in 0..dom.size() {
                let tuple: Vec<usize> = arg_fns.iter().map(|a| a.apply(x)).collect();
                tup.push(argprod.tuple_to_index(&tuple));
            }
            let tupled = FinFunction::new(dom.as_finset(), argprod.as_finset(), tup)?;
            Ok(tupled.then(table)?)
        }
    }
}

/// Interprets a formula as a subobject of the context product. Exists
/// prepends the bound sort at slot 0 and projects it away by taking indices
/// modulo the outer product size (slot 0 is the slowest digit).
pub fn eval_formula(
    m: &SetStructure,
    context: &[String],
    phi: &Formula,
) -> Result<Subobject, SemanticsError> {
    let dom = m.context_product(context)?;
    match phi {
        Formula::True => Ok(Subobject::full(dom)),
        Formula::False => Ok(Subobject::empty(dom)),
        Formula::Eq(a, b) => {
            let fa = eval_term(m, context, a)?;
            let fb = eval_term(m, context, b)?;
            Ok(equalizer(&fa, &fb)?.reambient(dom)?)
        }
        Formula::Pred(p, args) => {
            let decl = m
                .signature
                .pred(p)
                .ok_or_else(|| SemanticsError::UnknownPred(p.clone()))?
                .clone();
            let sub = m.pred_sub(p)?;
            let arg_fns: Vec<FinFunction> = args
                .iter()
                .map(|a| eval_term(m, context, a))
                .collect::<Result<_, _>>()?;
            let argprod = m.context_product(&decl.args)?;
            let mut members = Vec::new();
            for x in 0..dom.size() {
                let tuple: Vec<usize> = arg_fns.iter().map(|a| a.apply(x)).collect();
                if sub.contains(argprod.tuple_to_index(&tuple)) {
                    members.push(x);
                }
            }
            Ok(Subobject::new(dom, members)?)
        }
        Formula::And(fs) => {
            let subs: Vec<Subobject> = fs
                .iter()
                .map(|f| eval_formula(m, context, f))
                .collect::<Result<_, _>>()?;
            Ok(sub_lattice(LatticeOp::Meet, &dom, &subs)?)
        }
        Formula::Or(fs) => {
            let subs: Vec<Subobject> = fs
                .iter()
                .map(|f| eval_formula(m, context, f))
                .collect::<Result<_, _>>()?;
            Ok(sub_lattice(LatticeOp::Join, &dom, &subs)?)
        }
        Formula::Exists(sort, body) => {
            let mut inner = Vec::with_capacity(context.len() + 1);
            inner.push(sort.clone());
            inner.extend_from_slice(context);
            let inner_sub = eval_formula(m, &inner, body)?;
            let outer_size = dom.size();
            let members: Vec<usize> =
                inner_sub.members().iter().map(|&x| x % outer_size).collect();
            Ok(Subobject::new(dom, members)?)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequentVerdict {
    Valid,
    /// Least tuple (in context order) where every lhs formula holds but no
    /// rhs formula does.
    Invalid { tuple: Vec<usize> },
}

impl SequentVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, SequentVerdict::Valid)
    }
}

pub fn check_sequent(m: &SetStructure, seq: &Sequent) -> Result<SequentVerdict, SemanticsError> {
    let dom = m.context_product(&seq.context)?;
    let lhs: Vec<Subobject> = seq
        .lhs
        .iter()
        .map(|f| eval_formula(m, &seq.context, f))
        .collect::<Result<_, _>>()?;
    let rhs: Vec<Subobject> = seq
        .rhs
        .iter()
        .map(|f| eval_formula(m, &seq.context, f))
        .collect::<Result<_, _>>()?;
    let meet = sub_lattice(LatticeOp::Meet, &dom, &lhs)?;
    let join = sub_lattice(LatticeOp::Join, &dom, &rhs)?;
    for &x in meet.members() {
        if !join.contains(x) {
            return Ok(SequentVerdict::Invalid { tuple: dom.index_to_tuple(x) });
        }
    }
    Ok(SequentVerdict::Valid)
}

/// Verdict of checking a structure against a theory; a failure names the
/// axiom, the sub-sequent within a schema axiom's expansion, and the tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidityReport {
    Valid,
    Invalid { axiom: usize, sub: usize, tuple: Vec<usize> },
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidityReport::Valid)
    }
}

impl std::fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidityReport::Valid => write!(f, "valid"),
            ValidityReport::Invalid { axiom, sub, tuple } => {
                write!(f, "axiom {axiom}.{sub} fails at tuple {tuple:?}")
            }
        }
    }
}

/// Checks every axiom (schema axioms expanded) in order; reports the first
/// failure.
pub fn check_model(m: &SetStructure, thy: &Theory) -> Result<ValidityReport, SemanticsError> {
    if m.signature != thy.signature {
        return Err(SemanticsError::SignatureMismatch);
    }
    m.validate()?;
    for (axiom, sub, seq) in thy.expanded_axioms() {
        if let SequentVerdict::Invalid { tuple } = check_sequent(m, &seq)? {
            return Ok(ValidityReport::Invalid { axiom, sub, tuple });
        }
    }
    Ok(ValidityReport::Valid)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismVerdict {
    Ok,
    /// The square for `op` fails at argument tuple index `witness`.
    OpFailure { op: String, witness: usize },
    /// The image of `pred`'s extension is not contained in the target's.
    PredFailure { pred: String, witness: usize },
}

impl MorphismVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, MorphismVerdict::Ok)
    }
}

/// Checks a per-sort function family for being a homomorphism: operation
/// squares commute and predicate extensions are preserved.
pub fn check_model_morphism(
    m: &SetStructure,
    n: &SetStructure,
    components: &[FinFunction],
) -> Result<MorphismVerdict, SemanticsError> {
    if m.signature != n.signature {
        return Err(SemanticsError::SignatureMismatch);
    }
    m.validate()?;
    n.validate()?;
    if components.len() != m.signature.sorts.len() {
        return Err(SemanticsError::ShapeMismatch("components".into()));
    }
    for (i, _sort) in m.signature.sorts.iter().enumerate() {
        let c = &components[i];
        if c.dom().size() != m.sort_map[i].size() || c.cod().size() != n.sort_map[i].size() {
            return Err(SemanticsError::ShapeMismatch(format!("component {i}")));
        }
    }
    let map_tuple = |args: &[String], tuple: &[usize]| -> Vec<usize> {
        args.iter()
            .zip(tuple)
            .map(|(s, &x)| components[m.signature.sort_index(s).unwrap()].apply(x))
            .collect()
    };
    for (oi, decl) in m.signature.operations.iter().enumerate() {
        let src = m.context_product(&decl.args)?;
        let dst = n.context_product(&decl.args)?;
        let a_out = &components[m.signature.sort_index(&decl.result).unwrap()];
        for x in 0..src.size() {
            let tuple = src.index_to_tuple(x);
            let mapped = map_tuple(&decl.args, &tuple);
            let lhs = a_out.apply(m.op_map[oi].apply(x));
            let rhs = n.op_map[oi].apply(dst.tuple_to_index(&mapped));
            if lhs != rhs {
                return Ok(MorphismVerdict::OpFailure { op: decl.name.clone(), witness: x });
            }
        }
    }
    for (pi, decl) in m.signature.predicates.iter().enumerate() {
        let src = m.context_product(&decl.args)?;
        let dst = n.context_product(&decl.args)?;
        for &x in m.pred_map[pi].members() {
            let mapped = map_tuple(&decl.args, &src.index_to_tuple(x));
            if !n.pred_map[pi].contains(dst.tuple_to_index(&mapped)) {
                return Ok(MorphismVerdict::PredFailure { pred: decl.name.clone(), witness: x });
            }
        }
    }
    Ok(MorphismVerdict::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory;

    fn mod3_structure() -> (SetStructure, Theory) {
        let thy = parse_theory(
            "sort R;\n\
             op add : R, R -> R;\n\
             const c0 : R;\n\
             pred P : R;\n",
        )
        .unwrap();
        let r = FinSet::new(3);
        let pair = product(&[r.clone(), r.clone()]);
        let mut add = Vec::new();
        for x in 0..pair.size() {
            let t = pair.index_to_tuple(x);
            add.push((t[0] + t[1]) % 3);
        }
        let m = SetStructure {
            signature: thy.signature.clone(),
            sort_map: vec![r.clone()],
            op_map: vec![
                FinFunction::new(pair.as_finset(), r.clone(), add).unwrap(),
                FinFunction::global_element(r.clone(), 0).unwrap(),
            ],
            pred_map: vec![Subobject::new(product(&[r]), vec![0, 1]).unwrap()],
        };
        m.validate().unwrap();
        (m, thy)
    }

    #[test]
    fn var_over_single_context_is_identity() {
        let (m, _) = mod3_structure();
        let f = eval_term(&m, &["R".into()], &Term::Var(0)).unwrap();
        assert_eq!(f.table(), &[0, 1, 2]);
    }

    #[test]
    fn nullary_app_is_global_element() {
        let (m, _) = mod3_structure();
        let f = eval_term(&m, &[], &Term::constant("c0")).unwrap();
        assert_eq!(f.table(), &[0]);
    }

    #[test]
    fn binary_app_over_two_vars_is_the_table() {
        let (m, _) = mod3_structure();
        let ctx = vec!["R".to_string(), "R".to_string()];
        let t = Term::App("add".into(), vec![Term::Var(0), Term::Var(1)]);
        let f = eval_term(&m, &ctx, &t).unwrap();
        assert_eq!(f.table(), m.op_map[0].table());
    }

    #[test]
    fn eq_reflexive_is_full() {
        let (m, _) = mod3_structure();
        let ctx = vec!["R".to_string()];
        let phi = Formula::Eq(Term::Var(0), Term::Var(0));
        assert!(eval_formula(&m, &ctx, &phi).unwrap().is_full());
    }

    #[test]
    fn exists_with_trivial_body_is_full() {
        let (m, _) = mod3_structure();
        let ctx = vec!["R".to_string()];
        let phi = Formula::Exists("R".into(), Box::new(Formula::Eq(Term::Var(1), Term::Var(1))));
        assert!(eval_formula(&m, &ctx, &phi).unwrap().is_full());
    }

    #[test]
    fn exists_picks_out_solvable_tuples() {
        // exists y. add(x, y) = c0 holds for every x mod 3
        let (m, _) = mod3_structure();
        let ctx = vec!["R".to_string()];
        let phi = Formula::Exists(
            "R".into(),
            Box::new(Formula::Eq(
                Term::App("add".into(), vec![Term::Var(1), Term::Var(0)]),
                Term::constant("c0"),
            )),
        );
        assert!(eval_formula(&m, &ctx, &phi).unwrap().is_full());
    }

    #[test]
    fn pred_atom_restricts() {
        let (m, _) = mod3_structure();
        let ctx = vec!["R".to_string()];
        let phi = Formula::Pred("P".into(), vec![Term::Var(0)]);
        assert_eq!(eval_formula(&m, &ctx, &phi).unwrap().members(), &[0, 1]);
    }

    #[test]
    fn or_is_join_structurally() {
        let (m, _) = mod3_structure();
        let ctx = vec!["R".to_string()];
        let p = Formula::Pred("P".into(), vec![Term::Var(0)]);
        let q = Formula::Eq(Term::Var(0), Term::constant("c0"));
        let or = eval_formula(&m, &ctx, &Formula::Or(vec![p.clone(), q.clone()])).unwrap();
        let joined = sub_lattice(
            LatticeOp::Join,
            &m.context_product(&ctx).unwrap(),
            &[
                eval_formula(&m, &ctx, &p).unwrap(),
                eval_formula(&m, &ctx, &q).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(or, joined);
    }

    #[test]
    fn trivial_sequents() {
        let (m, _) = mod3_structure();
        let top = Sequent {
            context: vec!["R".into()],
            lhs: vec![Formula::True],
            rhs: vec![Formula::True],
        };
        assert!(check_sequent(&m, &top).unwrap().is_valid());
        let bot = Sequent {
            context: vec!["R".into()],
            lhs: vec![Formula::True],
            rhs: vec![Formula::False],
        };
        assert_eq!(
            check_sequent(&m, &bot).unwrap(),
            SequentVerdict::Invalid { tuple: vec![0] }
        );
    }

    #[test]
    fn check_model_reports_first_failing_axiom() {
        let (m, mut thy) = mod3_structure();
        assert!(check_model(&m, &thy).unwrap().is_valid());
        // commutativity holds, add(x,x) = c0 does not
        let extra = parse_theory(
            "sort R;\n\
             op add : R, R -> R;\n\
             const c0 : R;\n\
             pred P : R;\n\
             axiom [x:R, y:R] |- add(x, y) = add(y, x);\n\
             axiom [x:R] |- add(x, x) = c0;\n",
        )
        .unwrap();
        thy.axioms = extra.axioms;
        assert_eq!(
            check_model(&m, &thy).unwrap(),
            ValidityReport::Invalid { axiom: 1, sub: 0, tuple: vec![1] }
        );
    }

    #[test]
    fn identity_family_is_morphism_and_broken_square_is_named() {
        let (m, _) = mod3_structure();
        let id = vec![FinFunction::identity(&m.sort_map[0])];
        assert!(check_model_morphism(&m, &m, &id).unwrap().is_ok());
        // x -> x+1 breaks additivity but a constant-to-image pred stays fine
        let shift =
            FinFunction::new(m.sort_map[0].clone(), m.sort_map[0].clone(), vec![1, 2, 0]).unwrap();
        match check_model_morphism(&m, &m, &[shift]).unwrap() {
            MorphismVerdict::OpFailure { op, .. } => assert_eq!(op, "add"),
            MorphismVerdict::PredFailure { pred, .. } => {
                panic!("unexpected pred failure: {pred}")
            }
            MorphismVerdict::Ok => panic!("expected failure"),
        }
    }

    #[test]
    fn morphism_pred_preservation_checked() {
        let (m, _) = mod3_structure();
        let mut n = m.clone();
        // shrink the target predicate so identity no longer preserves it
        n.pred_map[0] = Subobject::new(n.pred_map[0].ambient().clone(), vec![0]).unwrap();
        let id = vec![FinFunction::identity(&m.sort_map[0])];
        match check_model_morphism(&m, &n, &id).unwrap() {
            MorphismVerdict::PredFailure { pred, witness } => {
                assert_eq!((pred.as_str(), witness), ("P", 1));
            }
            v => panic!("expected pred failure, got {v:?}"),
        }
    }
}
