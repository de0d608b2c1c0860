//! AST for coherent signatures, terms, formulas, sequents, and theories.
//! Binding is positional (de Bruijn): a variable is an index into the
//! ambient context, and `Exists` binds context position 0 inside its body.

/// An operation symbol; nullary operations are constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredDecl {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    pub sorts: Vec<String>,
    pub operations: Vec<OpDecl>,
    pub predicates: Vec<PredDecl>,
}

impl Signature {
    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s == name)
    }

    pub fn op(&self, name: &str) -> Option<&OpDecl> {
        self.operations.iter().find(|o| o.name == name)
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.operations.iter().position(|o| o.name == name)
    }

    pub fn pred(&self, name: &str) -> Option<&PredDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn pred_index(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sorts.iter().position(|s| s == name)
    }

    /// Nullary operations of a given sort, in declaration order.
    pub fn constants_of(&self, sort: &str) -> Vec<&OpDecl> {
        self.operations.iter().filter(|o| o.args.is_empty() && o.result == sort).collect()
    }

    /// True if `name` is used by any sort, operation, or predicate.
    pub fn uses_name(&self, name: &str) -> bool {
        self.has_sort(name) || self.op(name).is_some() || self.pred(name).is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    /// Adds `by` to every variable index at or above `cutoff`.
    pub fn shift(&self, by: usize, cutoff: usize) -> Term {
        match self {
            Term::Var(i) => {
                if *i >= cutoff {
                    Term::Var(i + by)
                } else {
                    Term::Var(*i)
                }
            }
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.shift(by, cutoff)).collect())
            }
        }
    }

    /// Simultaneous substitution: variable `i` becomes `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Term {
        match self {
            Term::Var(i) => subst[*i].clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(subst)).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// `Exists(sort, body)`: inside `body`, the bound variable is context
    /// position 0 and the outer context is shifted up by one.
    Exists(String, Box<Formula>),
}

impl Formula {
    /// Simultaneous substitution over free variables.
    pub fn substitute(&self, subst: &[Term]) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Pred(p, args) => {
                Formula::Pred(p.clone(), args.iter().map(|a| a.substitute(subst)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(a.substitute(subst), b.substitute(subst)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(subst)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(subst)).collect()),
            Formula::Exists(s, body) => {
                let mut inner: Vec<Term> = vec![Term::Var(0)];
                inner.extend(subst.iter().map(|t| t.shift(1, 0)));
                Formula::Exists(s.clone(), Box::new(body.substitute(&inner)))
            }
        }
    }
}

/// A sequent over one shared typed context: the meet of `lhs` entails the
/// join of `rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub context: Vec<String>,
    pub lhs: Vec<Formula>,
    pub rhs: Vec<Formula>,
}

/// Compact encodings for the large, regular sequent families produced by
/// hard coding. `expand` defines their meaning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemaAxiom {
    DistinctConstants { sort: String, constants: Vec<String> },
    CoverByConstants { sort: String, constants: Vec<String> },
    OpGraph { op: String, rows: Vec<(Vec<String>, String)> },
}

impl SchemaAxiom {
    /// Expands to the sequent family it denotes, deterministically:
    /// pairwise-distinctness sequents, one covering disjunction, or one
    /// closed equation per graph row.
    pub fn expand(&self) -> Vec<Sequent> {
        match self {
            SchemaAxiom::DistinctConstants { constants, .. } => {
                let mut seqs = Vec::new();
                for i in 0..constants.len() {
                    for j in (i + 1)..constants.len() {
                        seqs.push(Sequent {
                            context: Vec::new(),
                            lhs: vec![Formula::Eq(
                                Term::constant(constants[i].clone()),
                                Term::constant(constants[j].clone()),
                            )],
                            rhs: vec![Formula::False],
                        });
                    }
                }
                seqs
            }
            SchemaAxiom::CoverByConstants { sort, constants } => {
                let disjuncts = constants
                    .iter()
                    .map(|c| Formula::Eq(Term::Var(0), Term::constant(c.clone())))
                    .collect();
                vec![Sequent {
                    context: vec![sort.clone()],
                    lhs: vec![Formula::True],
                    rhs: vec![Formula::Or(disjuncts)],
                }]
            }
            SchemaAxiom::OpGraph { op, rows } => rows
                .iter()
                .map(|(inputs, output)| Sequent {
                    context: Vec::new(),
                    lhs: vec![Formula::True],
                    rhs: vec![Formula::Eq(
                        Term::App(op.clone(), inputs.iter().cloned().map(Term::constant).collect()),
                        Term::constant(output.clone()),
                    )],
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axiom {
    Sequent(Sequent),
    Schema(SchemaAxiom),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
}

impl Theory {
    /// All axioms as plain sequents, with schema axioms expanded. Each entry
    /// carries its axiom index and the sub-index within the expansion.
    pub fn expanded_axioms(&self) -> Vec<(usize, usize, Sequent)> {
        let mut out = Vec::new();
        for (i, ax) in self.axioms.iter().enumerate() {
            match ax {
                Axiom::Sequent(s) => out.push((i, 0, s.clone())),
                Axiom::Schema(sch) => {
                    for (j, s) in sch.expand().into_iter().enumerate() {
                        out.push((i, j, s));
                    }
                }
            }
        }
        out
    }
}
