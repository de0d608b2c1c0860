//! Dense feed-forward networks over minifloat formats presented as coherent
//! theories. The float carrier is hard coded (so its part of any model is
//! rigid), weights and biases are free constants, and inference is model
//! transport along an interpretation from the span theory, checked bit-exact
//! against the direct numeric oracle by the test suite.

use crate::constructions::{
    hard_code, precompose, pushout, ConstructionError, Interpretation, TheoryPushout,
};
use crate::finset::{product, pullback, FinFunction, FinSet, KernelError};
use crate::minifloat::{FloatError, FloatFormat, FloatTables};
use crate::schema::{builtin, Instance, SchemaError};
use crate::semantics::{SemanticsError, SetStructure};
use crate::syntax::{
    check_theory, Axiom, Formula, OpDecl, SchemaAxiom, Sequent, Term, Theory, TheoryError,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NnError {
    #[error("bad architecture string: {0}")]
    BadArchitecture(String),
    #[error("inner widths do not match: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("float formats differ")]
    FormatMismatch,
    #[error("parameter shapes do not match the architecture")]
    BadParamShape,
    #[error("bad parameter reference: {0}")]
    BadParamRef(String),
    #[error("bit pattern {0:#x} is out of range for the format")]
    BadPattern(usize),
    #[error("input domain too large to enumerate ({0} rows; limit 2^20)")]
    DomainTooLarge(usize),
    #[error(transparent)]
    Float(#[from] FloatError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// Widths and activation names of a dense network; widths has one more entry
/// than activations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Architecture {
    pub widths: Vec<usize>,
    pub activations: Vec<String>,
    pub format: FloatFormat,
}

impl Architecture {
    /// Parses `<a0>-<act1>-<a1>-...-<actn>-<an>`, e.g. `2-relu-2-id-1`.
    pub fn parse(text: &str, format: FloatFormat) -> Result<Architecture, NnError> {
        let parts: Vec<&str> = text.split('-').collect();
        if parts.len() < 3 || parts.len() % 2 == 0 {
            return Err(NnError::BadArchitecture(text.into()));
        }
        let mut widths = Vec::new();
        let mut activations = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            if i % 2 == 0 {
                let w: usize =
                    part.parse().map_err(|_| NnError::BadArchitecture(text.into()))?;
                if w == 0 {
                    return Err(NnError::BadArchitecture(text.into()));
                }
                widths.push(w);
            } else {
                activations.push((*part).to_string());
            }
        }
        Ok(Architecture { widths, activations, format })
    }

    pub fn layers(&self) -> usize {
        self.activations.len()
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.widths[0])?;
        for (act, w) in self.activations.iter().zip(&self.widths[1..]) {
            write!(f, "-{act}-{w}")?;
        }
        Ok(())
    }
}

/// Sequential composition: the output width of `a` must equal the input
/// width of `b`.
pub fn compose_arch(a: &Architecture, b: &Architecture) -> Result<Architecture, NnError> {
    if a.format != b.format {
        return Err(NnError::FormatMismatch);
    }
    let mid = *a.widths.last().unwrap();
    if mid != b.widths[0] {
        return Err(NnError::WidthMismatch(mid, b.widths[0]));
    }
    let mut widths = a.widths.clone();
    widths.extend_from_slice(&b.widths[1..]);
    let mut activations = a.activations.clone();
    activations.extend_from_slice(&b.activations);
    Ok(Architecture { widths, activations, format: a.format })
}

/// Bit patterns for every weight and bias: `weights[l][j][i]` is row j,
/// column i of layer l's matrix, `biases[l][j]` the j-th bias of layer l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamAssignment {
    pub weights: Vec<Vec<Vec<usize>>>,
    pub biases: Vec<Vec<usize>>,
}

impl ParamAssignment {
    pub fn validate(&self, arch: &Architecture) -> Result<(), NnError> {
        let layers = arch.layers();
        if self.weights.len() != layers || self.biases.len() != layers {
            return Err(NnError::BadParamShape);
        }
        let size = arch.format.size();
        for l in 0..layers {
            let (n, m) = (arch.widths[l], arch.widths[l + 1]);
            if self.weights[l].len() != m || self.biases[l].len() != m {
                return Err(NnError::BadParamShape);
            }
            for row in &self.weights[l] {
                if row.len() != n {
                    return Err(NnError::BadParamShape);
                }
                for &p in row {
                    if p >= size {
                        return Err(NnError::BadPattern(p));
                    }
                }
            }
            for &p in &self.biases[l] {
                if p >= size {
                    return Err(NnError::BadPattern(p));
                }
            }
        }
        Ok(())
    }
}

/// A weight or bias position; `layer` is 1-based, indices 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamRef {
    Weight { layer: usize, j: usize, i: usize },
    Bias { layer: usize, j: usize },
}

impl ParamRef {
    /// Parses `w[1][0,0]` or `b[2][1]`.
    pub fn parse(text: &str) -> Result<ParamRef, NnError> {
        let bad = || NnError::BadParamRef(text.into());
        let rest = text.strip_prefix(['w', 'b']).ok_or_else(bad)?;
        let kind = text.chars().next().unwrap();
        let rest = rest.strip_prefix('[').ok_or_else(bad)?;
        let (layer_s, rest) = rest.split_once(']').ok_or_else(bad)?;
        let layer: usize = layer_s.parse().map_err(|_| bad())?;
        if layer == 0 {
            return Err(bad());
        }
        let rest = rest.strip_prefix('[').ok_or_else(bad)?;
        let (idx_s, rest) = rest.split_once(']').ok_or_else(bad)?;
        if !rest.is_empty() {
            return Err(bad());
        }
        if kind == 'w' {
            let (j_s, i_s) = idx_s.split_once(',').ok_or_else(bad)?;
            Ok(ParamRef::Weight {
                layer,
                j: j_s.trim().parse().map_err(|_| bad())?,
                i: i_s.trim().parse().map_err(|_| bad())?,
            })
        } else {
            Ok(ParamRef::Bias { layer, j: idx_s.trim().parse().map_err(|_| bad())? })
        }
    }
}

impl std::fmt::Display for ParamRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamRef::Weight { layer, j, i } => write!(f, "w[{layer}][{j},{i}]"),
            ParamRef::Bias { layer, j } => write!(f, "b[{layer}][{j}]"),
        }
    }
}

/// Equality demanded of parameters: tie two positions together or pin one to
/// a bit pattern. Cross-layer ties are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TieConstraint {
    Tie(ParamRef, ParamRef),
    Fix(ParamRef, usize),
}

impl TieConstraint {
    /// Parses one line: `tie w[1][0,0] w[1][1,1]` or `fix b[2][0] 0x6`.
    pub fn parse_line(line: &str) -> Result<TieConstraint, NnError> {
        let bad = || NnError::BadParamRef(line.into());
        let mut parts = line.split_whitespace();
        let kw = parts.next().ok_or_else(bad)?;
        let a = ParamRef::parse(parts.next().ok_or_else(bad)?)?;
        let second = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        match kw {
            "tie" => Ok(TieConstraint::Tie(a, ParamRef::parse(second)?)),
            "fix" => {
                let value = if let Some(hex) = second.strip_prefix("0x") {
                    usize::from_str_radix(hex, 16).map_err(|_| bad())?
                } else {
                    second.parse().map_err(|_| bad())?
                };
                Ok(TieConstraint::Fix(a, value))
            }
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for TieConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TieConstraint::Tie(a, b) => write!(f, "tie {a} {b}"),
            TieConstraint::Fix(a, v) => write!(f, "fix {a} {v:#x}"),
        }
    }
}

/// Symbol names of the float fragment inside some theory. `a_ops` holds one
/// activation operation per layer (a single entry for the bare float
/// theory).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloatVocab {
    pub v_sort: String,
    pub e_sort: String,
    pub s_op: String,
    pub t_op: String,
    pub a_ops: Vec<String>,
    pub p1_op: String,
    pub p2_op: String,
    pub pair_op: String,
    pub v_const: Vec<String>,
    pub e_const: Vec<String>,
}

/// Builds the hard-coded float theory for one activation table: the
/// two-sorted shape (values V and pairs E) with s = add, t = mul, a = the
/// activation, every element a named constant, plus projections p1, p2 and a
/// pairing operation identifying E with V squared.
pub fn float_theory(
    tables: &FloatTables,
    act: &FinFunction,
) -> Result<(Theory, FloatVocab), NnError> {
    let r = tables.format.size();
    let v = FinSet::new(r);
    let e = FinSet::new(r * r);
    let inst = Instance {
        schema: builtin("Pol")?,
        object_sets: vec![v.clone(), e.clone()],
        generator_fns: vec![
            FinFunction::new(e.clone(), v.clone(), tables.add_fn().table().to_vec())?,
            FinFunction::new(e.clone(), v.clone(), tables.mul_fn().table().to_vec())?,
            act.clone(),
        ],
    };
    let mut thy = hard_code(&inst)?;
    let v_const: Vec<String> = (0..r).map(|i| format!("V_{i}")).collect();
    let e_const: Vec<String> = (0..r * r).map(|k| format!("E_{k}")).collect();
    debug_assert!(v_const.iter().chain(&e_const).all(|c| thy.signature.op(c).is_some()));

    for (name, pick) in [("p1", 0usize), ("p2", 1usize)] {
        thy.signature.operations.push(OpDecl {
            name: name.into(),
            args: vec!["E".into()],
            result: "V".into(),
        });
        let rows = (0..r * r)
            .map(|k| {
                let part = if pick == 0 { k / r } else { k % r };
                (vec![e_const[k].clone()], v_const[part].clone())
            })
            .collect();
        thy.axioms.push(Axiom::Schema(SchemaAxiom::OpGraph { op: name.into(), rows }));
    }
    thy.signature.operations.push(OpDecl {
        name: "pair".into(),
        args: vec!["V".into(), "V".into()],
        result: "E".into(),
    });
    let rows = (0..r * r)
        .map(|k| (vec![v_const[k / r].clone(), v_const[k % r].clone()], e_const[k].clone()))
        .collect();
    thy.axioms.push(Axiom::Schema(SchemaAxiom::OpGraph { op: "pair".into(), rows }));
    // pairing is a section of the projections
    thy.axioms.push(Axiom::Sequent(Sequent {
        context: vec!["E".into()],
        lhs: vec![Formula::True],
        rhs: vec![Formula::Eq(
            Term::App(
                "pair".into(),
                vec![
                    Term::App("p1".into(), vec![Term::Var(0)]),
                    Term::App("p2".into(), vec![Term::Var(0)]),
                ],
            ),
            Term::Var(0),
        )],
    }));
    check_theory(&thy)?;
    let vocab = FloatVocab {
        v_sort: "V".into(),
        e_sort: "E".into(),
        s_op: "s".into(),
        t_op: "t".into(),
        a_ops: vec!["a".into()],
        p1_op: "p1".into(),
        p2_op: "p2".into(),
        pair_op: "pair".into(),
        v_const,
        e_const,
    };
    Ok((thy, vocab))
}

fn leg_sort(leg: &Interpretation, name: &str) -> String {
    let i = leg.source.signature.sort_index(name).expect("sort present");
    leg.sort_map[i][0].clone()
}

fn leg_op(leg: &Interpretation, name: &str) -> String {
    let i = leg.source.signature.op_index(name).expect("op present");
    match &leg.op_map[i][0] {
        Term::App(n, _) => n.clone(),
        Term::Var(_) => unreachable!("pushout legs map operations to applications"),
    }
}

fn vocab_via_leg(leg: &Interpretation, voc: &FloatVocab) -> FloatVocab {
    FloatVocab {
        v_sort: leg_sort(leg, &voc.v_sort),
        e_sort: leg_sort(leg, &voc.e_sort),
        s_op: leg_op(leg, &voc.s_op),
        t_op: leg_op(leg, &voc.t_op),
        a_ops: voc.a_ops.iter().map(|a| leg_op(leg, a)).collect(),
        p1_op: leg_op(leg, &voc.p1_op),
        p2_op: leg_op(leg, &voc.p2_op),
        pair_op: leg_op(leg, &voc.pair_op),
        v_const: voc.v_const.iter().map(|c| leg_op(leg, c)).collect(),
        e_const: voc.e_const.iter().map(|c| leg_op(leg, c)).collect(),
    }
}

/// Names of the span fragment of an input/output theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RspanVocab {
    pub float: FloatVocab,
    pub n_sort: String,
    pub f_ops: Vec<String>,
    pub t_ops: Vec<String>,
}

/// The dataset theory: the float theory (identity activation) glued with a
/// span shape whose legs are n source and m target coordinate functions out
/// of an unconstrained sort N. Models are float structures together with an
/// arbitrary finite span over the value products.
pub fn rspan_theory(
    n: usize,
    m: usize,
    tables: &FloatTables,
) -> Result<(Theory, RspanVocab), NnError> {
    let id = FinFunction::identity(&tables.format.value_set());
    let (fth, fvoc) = float_theory(tables, &id)?;
    let mut span = Theory::default();
    span.signature.sorts = vec!["N".into(), "S".into()];
    for i in 1..=n {
        span.signature.operations.push(OpDecl {
            name: format!("f{i}"),
            args: vec!["N".into()],
            result: "S".into(),
        });
    }
    for j in 1..=m {
        span.signature.operations.push(OpDecl {
            name: format!("t{j}"),
            args: vec!["N".into()],
            result: "S".into(),
        });
    }
    let po = pushout(&fth, &span, &[(fvoc.v_sort.clone(), "S".into())])?;
    let vocab = RspanVocab {
        float: vocab_via_leg(&po.left_leg, &fvoc),
        n_sort: leg_sort(&po.right_leg, "N"),
        f_ops: (1..=n).map(|i| leg_op(&po.right_leg, &format!("f{i}"))).collect(),
        t_ops: (1..=m).map(|j| leg_op(&po.right_leg, &format!("t{j}"))).collect(),
    };
    Ok((po.apex, vocab))
}

/// Constant names of one layer's free parameters inside a network theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerParamNames {
    /// `w[j][i]` for output row j, input column i.
    pub w: Vec<Vec<String>>,
    pub b: Vec<String>,
}

/// A network presented as a theory together with the interpretation that
/// computes inference by model transport.
#[derive(Clone, Debug)]
pub struct NnTheory {
    pub arch: Architecture,
    pub act_fns: Vec<FinFunction>,
    pub theory: Theory,
    pub rspan: Theory,
    pub rspan_vocab: RspanVocab,
    /// From the dataset theory over (input width, output width) into `theory`.
    pub interp: Interpretation,
    pub float: FloatVocab,
    pub params: Vec<LayerParamNames>,
}

fn pair_app(voc: &FloatVocab, op: &str, a: Term, b: Term) -> Term {
    Term::App(op.into(), vec![Term::App(voc.pair_op.clone(), vec![a, b])])
}

fn add_term(voc: &FloatVocab, a: Term, b: Term) -> Term {
    pair_app(voc, &voc.s_op, a, b)
}

fn mul_term(voc: &FloatVocab, a: Term, b: Term) -> Term {
    pair_app(voc, &voc.t_op, a, b)
}

/// Right-nested n-ary sum, matching the recursive numeric fold.
fn add_n_term(voc: &FloatVocab, terms: &[Term]) -> Term {
    match terms {
        [] => unreachable!("widths are positive"),
        [x] => x.clone(),
        [x, rest @ ..] => add_term(voc, x.clone(), add_n_term(voc, rest)),
    }
}

/// The j-th output of one dense layer over input variables `Var(0..n)`:
/// act(add(sum_i mul(w[j][i], x_i), b[j])).
fn layer_output_term(
    voc: &FloatVocab,
    act_op: &str,
    params: &LayerParamNames,
    n: usize,
    j: usize,
) -> Term {
    let prods: Vec<Term> = (0..n)
        .map(|i| mul_term(voc, Term::constant(params.w[j][i].clone()), Term::Var(i)))
        .collect();
    let summed = add_term(voc, add_n_term(voc, &prods), Term::constant(params.b[j].clone()));
    Term::App(act_op.into(), vec![summed])
}

/// Builds the dataset-theory interpretation into a network theory: the float
/// part maps across identically except that the dataset's identity
/// activation becomes a bare variable, N goes to the n-fold value context,
/// source legs become projections, and target legs become `t_terms`.
fn network_interp(
    rspan: &Theory,
    rvoc: &RspanVocab,
    target: &Theory,
    gvoc: &FloatVocab,
    n: usize,
    t_terms: Vec<Term>,
) -> Result<Interpretation, NnError> {
    let mut sort_images: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    sort_images.insert(&rvoc.float.v_sort, vec![gvoc.v_sort.clone()]);
    sort_images.insert(&rvoc.float.e_sort, vec![gvoc.e_sort.clone()]);
    sort_images.insert(&rvoc.n_sort, vec![gvoc.v_sort.clone(); n]);
    let mut op_images: BTreeMap<&str, Vec<Term>> = BTreeMap::new();
    let unary = |name: &str| vec![Term::App(name.into(), vec![Term::Var(0)])];
    op_images.insert(&rvoc.float.s_op, unary(&gvoc.s_op));
    op_images.insert(&rvoc.float.t_op, unary(&gvoc.t_op));
    op_images.insert(&rvoc.float.a_ops[0], vec![Term::Var(0)]);
    op_images.insert(&rvoc.float.p1_op, unary(&gvoc.p1_op));
    op_images.insert(&rvoc.float.p2_op, unary(&gvoc.p2_op));
    op_images.insert(
        &rvoc.float.pair_op,
        vec![Term::App(gvoc.pair_op.clone(), vec![Term::Var(0), Term::Var(1)])],
    );
    for (from, to) in rvoc.float.v_const.iter().zip(&gvoc.v_const) {
        op_images.insert(from, vec![Term::constant(to.clone())]);
    }
    for (from, to) in rvoc.float.e_const.iter().zip(&gvoc.e_const) {
        op_images.insert(from, vec![Term::constant(to.clone())]);
    }
    for (i, f) in rvoc.f_ops.iter().enumerate() {
        op_images.insert(f, vec![Term::Var(i)]);
    }
    for (t, term) in rvoc.t_ops.iter().zip(t_terms) {
        op_images.insert(t, vec![term]);
    }
    let interp = Interpretation {
        source: rspan.clone(),
        target: target.clone(),
        sort_map: rspan
            .signature
            .sorts
            .iter()
            .map(|s| sort_images.remove(s.as_str()).expect("sort image"))
            .collect(),
        op_map: rspan
            .signature
            .operations
            .iter()
            .map(|o| op_images.remove(o.name.as_str()).expect("op image"))
            .collect(),
        pred_map: Vec::new(),
    };
    interp.validate()?;
    Ok(interp)
}

/// One dense layer as a theory: the float theory for the given activation,
/// glued with n*m weight constants and m bias constants that no axiom
/// constrains.
pub fn layer_theory(
    tables: &FloatTables,
    act_name: &str,
    act: &FinFunction,
    n: usize,
    m: usize,
) -> Result<NnTheory, NnError> {
    let (fth, fvoc) = float_theory(tables, act)?;
    let mut params_thy = Theory::default();
    params_thy.signature.sorts.push("P".into());
    for j in 0..m {
        for i in 0..n {
            params_thy.signature.operations.push(OpDecl {
                name: format!("w{j}_{i}"),
                args: Vec::new(),
                result: "P".into(),
            });
        }
    }
    for j in 0..m {
        params_thy.signature.operations.push(OpDecl {
            name: format!("b{j}"),
            args: Vec::new(),
            result: "P".into(),
        });
    }
    let po = pushout(&fth, &params_thy, &[(fvoc.v_sort.clone(), "P".into())])?;
    let gvoc = vocab_via_leg(&po.left_leg, &fvoc);
    let params = LayerParamNames {
        w: (0..m)
            .map(|j| (0..n).map(|i| leg_op(&po.right_leg, &format!("w{j}_{i}"))).collect())
            .collect(),
        b: (0..m).map(|j| leg_op(&po.right_leg, &format!("b{j}"))).collect(),
    };
    let (rspan, rvoc) = rspan_theory(n, m, tables)?;
    let t_terms: Vec<Term> = (0..m)
        .map(|j| layer_output_term(&gvoc, &gvoc.a_ops[0], &params, n, j))
        .collect();
    let interp = network_interp(&rspan, &rvoc, &po.apex, &gvoc, n, t_terms)?;
    Ok(NnTheory {
        arch: Architecture {
            widths: vec![n, m],
            activations: vec![act_name.into()],
            format: tables.format,
        },
        act_fns: vec![act.clone()],
        theory: po.apex,
        rspan,
        rspan_vocab: rvoc,
        interp,
        float: gvoc,
        params: vec![params],
    })
}

fn rename_params(leg: &Interpretation, params: &[LayerParamNames]) -> Vec<LayerParamNames> {
    params
        .iter()
        .map(|lp| LayerParamNames {
            w: lp
                .w
                .iter()
                .map(|row| row.iter().map(|name| leg_op(leg, name)).collect())
                .collect(),
            b: lp.b.iter().map(|name| leg_op(leg, name)).collect(),
        })
        .collect()
}

fn t_term_of(nn: &NnTheory, j: usize) -> Term {
    let idx = nn
        .rspan
        .signature
        .op_index(&nn.rspan_vocab.t_ops[j])
        .expect("t op present");
    nn.interp.op_map[idx][0].clone()
}

/// Glues two network theories over their shared float part (everything but
/// the per-layer activation operations) and composes the inference
/// interpretations by substituting the first network's output terms into the
/// second network's input variables.
pub fn compose_theories(
    a: &NnTheory,
    b: &NnTheory,
    tables: &FloatTables,
) -> Result<NnTheory, NnError> {
    let arch = compose_arch(&a.arch, &b.arch)?;
    let n_in = a.arch.widths[0];
    let mid = *a.arch.widths.last().unwrap();
    let m_out = *b.arch.widths.last().unwrap();
    let mut shared: Vec<(String, String)> = vec![
        (a.float.v_sort.clone(), b.float.v_sort.clone()),
        (a.float.e_sort.clone(), b.float.e_sort.clone()),
        (a.float.s_op.clone(), b.float.s_op.clone()),
        (a.float.t_op.clone(), b.float.t_op.clone()),
        (a.float.p1_op.clone(), b.float.p1_op.clone()),
        (a.float.p2_op.clone(), b.float.p2_op.clone()),
        (a.float.pair_op.clone(), b.float.pair_op.clone()),
    ];
    for (x, y) in a.float.v_const.iter().zip(&b.float.v_const) {
        shared.push((x.clone(), y.clone()));
    }
    for (x, y) in a.float.e_const.iter().zip(&b.float.e_const) {
        shared.push((x.clone(), y.clone()));
    }
    let po: TheoryPushout = pushout(&a.theory, &b.theory, &shared)?;
    let mut gvoc = vocab_via_leg(&po.left_leg, &a.float);
    gvoc.a_ops.extend(b.float.a_ops.iter().map(|op| leg_op(&po.right_leg, op)));
    let mut params = rename_params(&po.left_leg, &a.params);
    params.extend(rename_params(&po.right_leg, &b.params));

    // composite output terms: b's outputs with a's outputs substituted in
    let a_ctx: Vec<String> = vec![a.float.v_sort.clone(); n_in];
    let a_outputs: Vec<Term> = (0..mid)
        .map(|i| {
            po.left_leg
                .translate_term(&a_ctx, &t_term_of(a, i))
                .map(|v| v.into_iter().next().unwrap())
        })
        .collect::<Result<_, _>>()?;
    let b_ctx: Vec<String> = vec![b.float.v_sort.clone(); mid];
    let t_terms: Vec<Term> = (0..m_out)
        .map(|j| {
            po.right_leg
                .translate_term(&b_ctx, &t_term_of(b, j))
                .map(|v| v.into_iter().next().unwrap().substitute(&a_outputs))
        })
        .collect::<Result<_, _>>()?;

    let (rspan, rvoc) = rspan_theory(n_in, m_out, tables)?;
    let interp = network_interp(&rspan, &rvoc, &po.apex, &gvoc, n_in, t_terms)?;
    let mut act_fns = a.act_fns.clone();
    act_fns.extend(b.act_fns.iter().cloned());
    Ok(NnTheory {
        arch,
        act_fns,
        theory: po.apex,
        rspan,
        rspan_vocab: rvoc,
        interp,
        float: gvoc,
        params,
    })
}

/// Builds the full theory of an architecture by composing its layers left to
/// right. Activation names are resolved against the float tables.
pub fn build_network(arch: &Architecture, tables: &FloatTables) -> Result<NnTheory, NnError> {
    let acts = arch
        .activations
        .iter()
        .map(|name| tables.activation(name))
        .collect::<Result<Vec<_>, _>>()?;
    build_network_with_acts(arch, tables, &acts)
}

/// As `build_network` with pre-resolved activation tables, one per layer (for
/// activations loaded from files).
pub fn build_network_with_acts(
    arch: &Architecture,
    tables: &FloatTables,
    acts: &[FinFunction],
) -> Result<NnTheory, NnError> {
    if tables.format != arch.format {
        return Err(NnError::FormatMismatch);
    }
    if acts.len() != arch.layers() {
        return Err(NnError::BadParamShape);
    }
    let mut acc: Option<NnTheory> = None;
    for (l, act) in acts.iter().enumerate() {
        let layer = layer_theory(
            tables,
            &arch.activations[l],
            act,
            arch.widths[l],
            arch.widths[l + 1],
        )?;
        acc = Some(match acc {
            None => layer,
            Some(prev) => compose_theories(&prev, &layer, tables)?,
        });
    }
    Ok(acc.expect("at least one layer"))
}

fn resolve_param(nn: &NnTheory, r: &ParamRef) -> Result<String, NnError> {
    let bad = || NnError::BadParamRef(r.to_string());
    match r {
        ParamRef::Weight { layer, j, i } => nn
            .params
            .get(layer.wrapping_sub(1))
            .and_then(|lp| lp.w.get(*j))
            .and_then(|row| row.get(*i))
            .cloned()
            .ok_or_else(bad),
        ParamRef::Bias { layer, j } => nn
            .params
            .get(layer.wrapping_sub(1))
            .and_then(|lp| lp.b.get(*j))
            .cloned()
            .ok_or_else(bad),
    }
}

/// Adds one closed equational axiom per constraint. Models of the result are
/// exactly the models of the input whose parameters satisfy every constraint
/// as bit-pattern equality.
pub fn apply_constraints(
    nn: &NnTheory,
    constraints: &[TieConstraint],
) -> Result<NnTheory, NnError> {
    let mut out = nn.clone();
    for c in constraints {
        let (lhs, rhs) = match c {
            TieConstraint::Tie(a, b) => (resolve_param(nn, a)?, resolve_param(nn, b)?),
            TieConstraint::Fix(a, value) => {
                let name = nn
                    .float
                    .v_const
                    .get(*value)
                    .cloned()
                    .ok_or(NnError::BadPattern(*value))?;
                (resolve_param(nn, a)?, name)
            }
        };
        out.theory.axioms.push(Axiom::Sequent(Sequent {
            context: Vec::new(),
            lhs: vec![Formula::True],
            rhs: vec![Formula::Eq(Term::constant(lhs), Term::constant(rhs))],
        }));
    }
    out.interp.target = out.theory.clone();
    Ok(out)
}

/// Interprets the float part by its defining tables and every parameter
/// constant by its assigned pattern.
pub fn build_model(
    nn: &NnTheory,
    tables: &FloatTables,
    params: &ParamAssignment,
) -> Result<SetStructure, NnError> {
    params.validate(&nn.arch)?;
    let r = tables.format.size();
    let v = FinSet::new(r);
    let e = FinSet::new(r * r);
    let sig = &nn.theory.signature;
    let mut sort_map = Vec::new();
    for s in &sig.sorts {
        if *s == nn.float.v_sort {
            sort_map.push(v.clone());
        } else if *s == nn.float.e_sort {
            sort_map.push(e.clone());
        } else {
            return Err(NnError::Construction(ConstructionError::UnknownSymbol(s.clone())));
        }
    }
    let mut tables_by_name: BTreeMap<String, FinFunction> = BTreeMap::new();
    tables_by_name.insert(
        nn.float.s_op.clone(),
        FinFunction::new(e.clone(), v.clone(), tables.add_fn().table().to_vec())?,
    );
    tables_by_name.insert(
        nn.float.t_op.clone(),
        FinFunction::new(e.clone(), v.clone(), tables.mul_fn().table().to_vec())?,
    );
    for (op, act) in nn.float.a_ops.iter().zip(&nn.act_fns) {
        tables_by_name.insert(op.clone(), act.clone());
    }
    tables_by_name.insert(
        nn.float.p1_op.clone(),
        FinFunction::new(e.clone(), v.clone(), (0..r * r).map(|k| k / r).collect())?,
    );
    tables_by_name.insert(
        nn.float.p2_op.clone(),
        FinFunction::new(e.clone(), v.clone(), (0..r * r).map(|k| k % r).collect())?,
    );
    // pair index (a,b) -> a*r + b is exactly the product index order
    tables_by_name.insert(nn.float.pair_op.clone(), FinFunction::identity(&e));
    for (i, c) in nn.float.v_const.iter().enumerate() {
        tables_by_name.insert(c.clone(), FinFunction::global_element(v.clone(), i)?);
    }
    for (k, c) in nn.float.e_const.iter().enumerate() {
        tables_by_name.insert(c.clone(), FinFunction::global_element(e.clone(), k)?);
    }
    for (l, lp) in nn.params.iter().enumerate() {
        for (j, row) in lp.w.iter().enumerate() {
            for (i, name) in row.iter().enumerate() {
                tables_by_name.insert(
                    name.clone(),
                    FinFunction::global_element(v.clone(), params.weights[l][j][i])?,
                );
            }
        }
        for (j, name) in lp.b.iter().enumerate() {
            tables_by_name
                .insert(name.clone(), FinFunction::global_element(v.clone(), params.biases[l][j])?);
        }
    }
    let mut op_map = Vec::new();
    for decl in &sig.operations {
        let f = tables_by_name
            .remove(&decl.name)
            .ok_or_else(|| NnError::Construction(ConstructionError::UnknownSymbol(decl.name.clone())))?;
        op_map.push(f);
    }
    Ok(SetStructure { signature: sig.clone(), sort_map, op_map, pred_map: Vec::new() })
}

/// A finite span over value products: the dataset form of a model of the
/// input/output theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanDataset {
    pub format: FloatFormat,
    pub n_in: usize,
    pub m_out: usize,
    pub n_set: FinSet,
    /// into the n_in-fold product of the value set
    pub f: FinFunction,
    /// into the m_out-fold product of the value set
    pub t: FinFunction,
}

impl SpanDataset {
    /// Decodes the f-image of row x as a pattern tuple.
    pub fn input_tuple(&self, x: usize) -> Vec<usize> {
        let r = self.format.value_set();
        product(&vec![r; self.n_in]).index_to_tuple(self.f.apply(x))
    }

    pub fn output_tuple(&self, x: usize) -> Vec<usize> {
        let r = self.format.value_set();
        product(&vec![r; self.m_out]).index_to_tuple(self.t.apply(x))
    }
}

/// Runs inference by transporting a model of the network theory back along
/// the dataset interpretation and repackaging the span: N enumerates the
/// full input domain R^n with f the identity.
pub fn infer(
    nn: &NnTheory,
    tables: &FloatTables,
    m: &SetStructure,
) -> Result<SpanDataset, NnError> {
    let r = tables.format.size();
    let n_in = nn.arch.widths[0];
    let m_out = *nn.arch.widths.last().unwrap();
    let rows = r.checked_pow(n_in as u32).filter(|&x| x <= 1 << 20);
    let rows = rows.ok_or(NnError::DomainTooLarge(usize::MAX))?;
    let transported = precompose(&nn.interp, m)?;
    let n_idx = nn
        .rspan
        .signature
        .sort_index(&nn.rspan_vocab.n_sort)
        .expect("dataset sort");
    let n_set = transported.sort_map[n_idx].clone();
    debug_assert_eq!(n_set.size(), rows);
    let tuple_fn = |ops: &[String], width: usize| -> Result<FinFunction, NnError> {
        let prod = product(&vec![tables.format.value_set(); width]);
        let fns: Vec<&FinFunction> = ops
            .iter()
            .map(|name| transported.op_fn(name))
            .collect::<Result<_, _>>()?;
        let mut table = Vec::with_capacity(n_set.size());
        for x in 0..n_set.size() {
            let tuple: Vec<usize> = fns.iter().map(|f| f.apply(x)).collect();
            table.push(prod.tuple_to_index(&tuple));
        }
        Ok(FinFunction::new(n_set.clone(), prod.as_finset(), table)?)
    };
    let f = tuple_fn(&nn.rspan_vocab.f_ops, n_in)?;
    let t = tuple_fn(&nn.rspan_vocab.t_ops, m_out)?;
    debug_assert!(f.table().iter().enumerate().all(|(i, &y)| i == y));
    Ok(SpanDataset { format: tables.format, n_in, m_out, n_set, f, t })
}

/// Composes two spans by pullback of the middle leg pair; for inference
/// spans (identity f legs) this is function composition up to the canonical
/// reindexing of the pullback set.
pub fn compose_datasets(a: &SpanDataset, b: &SpanDataset) -> Result<SpanDataset, NnError> {
    if a.format != b.format {
        return Err(NnError::FormatMismatch);
    }
    if a.m_out != b.n_in {
        return Err(NnError::WidthMismatch(a.m_out, b.n_in));
    }
    let (sub, pa, pb) = pullback(&a.t, &b.f)?;
    let n_set = FinSet::new(sub.members().len());
    let f = pa.then(&a.f)?;
    let t = pb.then(&b.t)?;
    Ok(SpanDataset {
        format: a.format,
        n_in: a.n_in,
        m_out: b.m_out,
        n_set: n_set.clone(),
        f: FinFunction::new(n_set.clone(), f.cod().clone(), f.table().to_vec())?,
        t: FinFunction::new(n_set, t.cod().clone(), t.table().to_vec())?,
    })
}
