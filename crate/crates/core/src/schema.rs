//! Finite category presentations (generators and path equations), instances
//! as functors into finite sets, and the builtin diagram shapes.
//!
//! Presentations stand in for the categories they generate: an instance is
//! determined by where generators go, so free categories with cycles pose no
//! problem. Equations are checked pointwise on instances, never solved
//! symbolically.

use crate::finset::{FinFunction, FinSet, KernelError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("unknown object: {0}")]
    UnknownObject(String),
    #[error("unknown generator: {0}")]
    UnknownGenerator(String),
    #[error("duplicate name: {0}")]
    DuplicateName(String),
    #[error("path starting at {start} is not composable at generator {gen}")]
    NotComposable { start: String, gen: String },
    #[error("equation {index}: sides have different endpoints")]
    EquationEndpoints { index: usize },
    #[error("instance shape mismatch at {at}: expected {expected}, found {found}")]
    ShapeMismatch { at: String, expected: usize, found: usize },
    #[error("unknown builtin: {0}")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub src: String,
    pub dst: String,
}

/// A composable sequence of generators; empty means the identity at `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub start: String,
    pub gens: Vec<String>,
}

impl Path {
    pub fn identity(at: impl Into<String>) -> Path {
        Path { start: at.into(), gens: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CategoryPresentation {
    pub objects: Vec<String>,
    pub generators: Vec<Generator>,
    pub equations: Vec<(Path, Path)>,
}

impl CategoryPresentation {
    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    /// The object a path ends at, checking composability along the way.
    pub fn path_target(&self, path: &Path) -> Result<String, SchemaError> {
        if self.object_index(&path.start).is_none() {
            return Err(SchemaError::UnknownObject(path.start.clone()));
        }
        let mut at = path.start.clone();
        for name in &path.gens {
            let g = self
                .generator(name)
                .ok_or_else(|| SchemaError::UnknownGenerator(name.clone()))?;
            if g.src != at {
                return Err(SchemaError::NotComposable {
                    start: path.start.clone(),
                    gen: name.clone(),
                });
            }
            at = g.dst.clone();
        }
        Ok(at)
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        for (i, o) in self.objects.iter().enumerate() {
            if self.objects[..i].contains(o) {
                return Err(SchemaError::DuplicateName(o.clone()));
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            if self.generators[..i].iter().any(|h| h.name == g.name) {
                return Err(SchemaError::DuplicateName(g.name.clone()));
            }
            if self.object_index(&g.src).is_none() {
                return Err(SchemaError::UnknownObject(g.src.clone()));
            }
            if self.object_index(&g.dst).is_none() {
                return Err(SchemaError::UnknownObject(g.dst.clone()));
            }
        }
        for (index, (p, q)) in self.equations.iter().enumerate() {
            let pt = self.path_target(p)?;
            let qt = self.path_target(q)?;
            if p.start != q.start || pt != qt {
                return Err(SchemaError::EquationEndpoints { index });
            }
        }
        Ok(())
    }
}

/// A functor from a presented category into finite sets: one set per object
/// and one function per generator, stored in presentation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub schema: CategoryPresentation,
    pub object_sets: Vec<FinSet>,
    pub generator_fns: Vec<FinFunction>,
}

impl Instance {
    pub fn object_set(&self, name: &str) -> Result<&FinSet, SchemaError> {
        let i = self
            .schema
            .object_index(name)
            .ok_or_else(|| SchemaError::UnknownObject(name.into()))?;
        Ok(&self.object_sets[i])
    }

    pub fn generator_fn(&self, name: &str) -> Result<&FinFunction, SchemaError> {
        let i = self
            .schema
            .generator_index(name)
            .ok_or_else(|| SchemaError::UnknownGenerator(name.into()))?;
        Ok(&self.generator_fns[i])
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        self.schema.validate()?;
        if self.object_sets.len() != self.schema.objects.len() {
            return Err(SchemaError::ShapeMismatch {
                at: "objects".into(),
                expected: self.schema.objects.len(),
                found: self.object_sets.len(),
            });
        }
        if self.generator_fns.len() != self.schema.generators.len() {
            return Err(SchemaError::ShapeMismatch {
                at: "generators".into(),
                expected: self.schema.generators.len(),
                found: self.generator_fns.len(),
            });
        }
        for (g, f) in self.schema.generators.iter().zip(&self.generator_fns) {
            let src = self.object_set(&g.src)?;
            let dst = self.object_set(&g.dst)?;
            if f.dom().size() != src.size() {
                return Err(SchemaError::ShapeMismatch {
                    at: format!("dom of {}", g.name),
                    expected: src.size(),
                    found: f.dom().size(),
                });
            }
            if f.cod().size() != dst.size() {
                return Err(SchemaError::ShapeMismatch {
                    at: format!("cod of {}", g.name),
                    expected: dst.size(),
                    found: f.cod().size(),
                });
            }
        }
        Ok(())
    }

    /// Composes generator functions along a path; the empty path gives the
    /// identity at the start object.
    pub fn eval_path(&self, path: &Path) -> Result<FinFunction, SchemaError> {
        let start = self.object_set(&path.start)?;
        let mut f = FinFunction::identity(start);
        for name in &path.gens {
            f = f.then(self.generator_fn(name)?)?;
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorialVerdict {
    Functorial,
    /// The two sides of `equation` disagree; `witness` is the least element
    /// of the shared source set where they differ.
    Violation {
        equation: usize,
        lhs: Path,
        rhs: Path,
        witness: usize,
    },
}

impl FunctorialVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, FunctorialVerdict::Functorial)
    }
}

fn path_str(p: &Path) -> String {
    if p.gens.is_empty() {
        format!("id[{}]", p.start)
    } else {
        p.gens.join(";")
    }
}

impl std::fmt::Display for FunctorialVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctorialVerdict::Functorial => write!(f, "functorial"),
            FunctorialVerdict::Violation { equation, lhs, rhs, witness } => write!(
                f,
                "equation {} violated: {} = {} differ at element {}",
                equation,
                path_str(lhs),
                path_str(rhs),
                witness
            ),
        }
    }
}

/// Checks every path equation pointwise.
pub fn check_functorial(inst: &Instance) -> Result<FunctorialVerdict, SchemaError> {
    inst.validate()?;
    for (equation, (p, q)) in inst.schema.equations.iter().enumerate() {
        let fp = inst.eval_path(p)?;
        let fq = inst.eval_path(q)?;
        for x in 0..fp.dom().size() {
            if fp.apply(x) != fq.apply(x) {
                return Ok(FunctorialVerdict::Violation {
                    equation,
                    lhs: p.clone(),
                    rhs: q.clone(),
                    witness: x,
                });
            }
        }
    }
    Ok(FunctorialVerdict::Functorial)
}

/// A would-be natural transformation between instances of one schema.
#[derive(Clone, Debug)]
pub struct NatTransformCandidate {
    pub source: Instance,
    pub target: Instance,
    /// One component per object, in presentation order.
    pub components: Vec<FinFunction>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NaturalVerdict {
    Natural,
    /// Naturality square for `generator` fails at source element `witness`.
    Violation { generator: String, witness: usize },
}

impl NaturalVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, NaturalVerdict::Natural)
    }
}

impl std::fmt::Display for NaturalVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NaturalVerdict::Natural => write!(f, "natural"),
            NaturalVerdict::Violation { generator, witness } => {
                write!(f, "naturality fails for {} at element {}", generator, witness)
            }
        }
    }
}

/// Checks each generator's naturality square pointwise.
pub fn check_natural(cand: &NatTransformCandidate) -> Result<NaturalVerdict, SchemaError> {
    cand.source.validate()?;
    cand.target.validate()?;
    if cand.source.schema != cand.target.schema {
        return Err(SchemaError::ShapeMismatch {
            at: "schema".into(),
            expected: cand.source.schema.objects.len(),
            found: cand.target.schema.objects.len(),
        });
    }
    let schema = &cand.source.schema;
    if cand.components.len() != schema.objects.len() {
        return Err(SchemaError::ShapeMismatch {
            at: "components".into(),
            expected: schema.objects.len(),
            found: cand.components.len(),
        });
    }
    for (i, obj) in schema.objects.iter().enumerate() {
        let c = &cand.components[i];
        if c.dom().size() != cand.source.object_set(obj)?.size()
            || c.cod().size() != cand.target.object_set(obj)?.size()
        {
            return Err(SchemaError::ShapeMismatch {
                at: format!("component {obj}"),
                expected: cand.source.object_set(obj)?.size(),
                found: c.dom().size(),
            });
        }
    }
    for g in &schema.generators {
        let src_i = schema.object_index(&g.src).unwrap();
        let dst_i = schema.object_index(&g.dst).unwrap();
        let f = cand.source.generator_fn(&g.name)?;
        let h = cand.target.generator_fn(&g.name)?;
        let a_src = &cand.components[src_i];
        let a_dst = &cand.components[dst_i];
        for x in 0..f.dom().size() {
            if a_dst.apply(f.apply(x)) != h.apply(a_src.apply(x)) {
                return Ok(NaturalVerdict::Violation { generator: g.name.clone(), witness: x });
            }
        }
    }
    Ok(NaturalVerdict::Natural)
}

fn gens(list: &[(&str, &str, &str)]) -> Vec<Generator> {
    list.iter()
        .map(|(n, s, d)| Generator { name: (*n).into(), src: (*s).into(), dst: (*d).into() })
        .collect()
}

/// The builtin diagram shapes: a single sort, one operation, a span, the
/// two-sorted shape with a binary-carrier object, and the shop database.
pub fn builtin(name: &str) -> Result<CategoryPresentation, SchemaError> {
    let p = match name {
        "Sort" => CategoryPresentation {
            objects: vec!["X".into()],
            generators: Vec::new(),
            equations: Vec::new(),
        },
        "Oper" => CategoryPresentation {
            objects: vec!["A".into(), "B".into()],
            generators: gens(&[("g", "A", "B")]),
            equations: Vec::new(),
        },
        "Span" => CategoryPresentation {
            objects: vec!["X".into(), "N".into(), "Y".into()],
            generators: gens(&[("f", "N", "X"), ("t", "N", "Y")]),
            equations: Vec::new(),
        },
        "Pol" => CategoryPresentation {
            objects: vec!["V".into(), "E".into()],
            generators: gens(&[("s", "E", "V"), ("t", "E", "V"), ("a", "V", "V")]),
            equations: Vec::new(),
        },
        "Shop" => CategoryPresentation {
            objects: vec![
                "Item".into(),
                "Price".into(),
                "Order".into(),
                "Customer".into(),
                "Employee".into(),
                "Person".into(),
                "Address".into(),
            ],
            generators: gens(&[
                ("a", "Item", "Price"),
                ("b", "Order", "Item"),
                ("c", "Order", "Customer"),
                ("d", "Order", "Employee"),
                ("e", "Customer", "Person"),
                ("f", "Employee", "Person"),
                ("g", "Person", "Address"),
            ]),
            equations: Vec::new(),
        },
        other => return Err(SchemaError::UnknownBuiltin(other.into())),
    };
    debug_assert!(p.validate().is_ok());
    Ok(p)
}
