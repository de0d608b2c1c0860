//! Finite sets, total functions, finite limits, images and the subobject
//! lattice. Everything downstream is modelled inside this kernel.
//!
//! Elements of a [`FinSet`] are canonically the integers `0..size`; labels
//! are display metadata only and never participate in equality. Products use
//! one fixed mixed-radix convention, with the *last* factor varying fastest.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(usize, usize),
    #[error("codomain mismatch: {0} vs {1}")]
    CodomainMismatch(usize, usize),
    #[error("ambient mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("function table entry {entry} out of range for codomain of size {cod}")]
    NotTotal { entry: usize, cod: usize },
    #[error("subobject member {member} out of range for ambient of size {ambient}")]
    MemberOutOfRange { member: usize, ambient: usize },
    #[error("labels must match set size and be pairwise distinct")]
    BadLabels,
}

/// A finite set of a given cardinality. Elements are `0..size`.
#[derive(Clone, Eq)]
pub struct FinSet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl FinSet {
    pub fn new(size: usize) -> Self {
        FinSet { size, labels: None }
    }

    pub fn with_labels(size: usize, labels: Vec<String>) -> Result<Self, KernelError> {
        if labels.len() != size {
            return Err(KernelError::BadLabels);
        }
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != size {
            return Err(KernelError::BadLabels);
        }
        Ok(FinSet { size, labels: Some(labels) })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn terminal() -> Self {
        FinSet::new(1)
    }

    pub fn initial() -> Self {
        FinSet::new(0)
    }

    pub fn label_of(&self, elem: usize) -> String {
        match &self.labels {
            Some(ls) => ls[elem].clone(),
            None => elem.to_string(),
        }
    }
}

// Labels are metadata; two sets of the same size are the same set.
impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinSet({})", self.size)
    }
}

/// A total function between finite sets, stored as a lookup table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFunction {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

impl FinFunction {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Result<Self, KernelError> {
        if table.len() != dom.size() {
            return Err(KernelError::DomainMismatch(table.len(), dom.size()));
        }
        if let Some(&entry) = table.iter().find(|&&e| e >= cod.size()) {
            return Err(KernelError::NotTotal { entry, cod: cod.size() });
        }
        Ok(FinFunction { dom, cod, table })
    }

    pub fn identity(set: &FinSet) -> Self {
        FinFunction {
            dom: set.clone(),
            cod: set.clone(),
            table: (0..set.size()).collect(),
        }
    }

    /// The constant function picking `value`, from `dom`.
    pub fn constant(dom: FinSet, cod: FinSet, value: usize) -> Result<Self, KernelError> {
        let n = dom.size();
        FinFunction::new(dom, cod, vec![value; n])
    }

    /// A global element `1 -> cod`.
    pub fn global_element(cod: FinSet, value: usize) -> Result<Self, KernelError> {
        FinFunction::new(FinSet::terminal(), cod, vec![value])
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, elem: usize) -> usize {
        self.table[elem]
    }

    /// Diagrammatic composition: `self` then `g`.
    pub fn then(&self, g: &FinFunction) -> Result<FinFunction, KernelError> {
        if self.cod != g.dom {
            return Err(KernelError::CodomainMismatch(self.cod.size(), g.dom.size()));
        }
        let table = self.table.iter().map(|&i| g.table[i]).collect();
        FinFunction::new(self.dom.clone(), g.cod.clone(), table)
    }

    pub fn is_bijection(&self) -> bool {
        if self.dom.size() != self.cod.size() {
            return false;
        }
        let mut seen = vec![false; self.cod.size()];
        for &v in &self.table {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    pub fn inverse(&self) -> Option<FinFunction> {
        if !self.is_bijection() {
            return None;
        }
        let mut table = vec![0; self.cod.size()];
        for (i, &v) in self.table.iter().enumerate() {
            table[v] = i;
        }
        Some(FinFunction { dom: self.cod.clone(), cod: self.dom.clone(), table })
    }
}

/// An ordered product of finite sets with the mixed-radix index bijection.
/// The last factor varies fastest; the empty product is the terminal object.
#[derive(Clone, Debug, Eq)]
pub struct ProductSet {
    factors: Vec<FinSet>,
    size: usize,
}

impl PartialEq for ProductSet {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl ProductSet {
    pub fn new(factors: Vec<FinSet>) -> Self {
        let size = factors.iter().map(FinSet::size).product();
        ProductSet { factors, size }
    }

    pub fn singleton(factor: FinSet) -> Self {
        ProductSet::new(vec![factor])
    }

    pub fn factors(&self) -> &[FinSet] {
        &self.factors
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The product viewed as a bare finite set.
    pub fn as_finset(&self) -> FinSet {
        FinSet::new(self.size)
    }

    pub fn tuple_to_index(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.factors.len());
        let mut idx = 0;
        for (t, f) in tuple.iter().zip(&self.factors) {
            debug_assert!(*t < f.size());
            idx = idx * f.size() + t;
        }
        idx
    }

    pub fn index_to_tuple(&self, index: usize) -> Vec<usize> {
        assert!(index < self.size.max(1));
        let mut rest = index;
        let mut tuple = vec![0; self.factors.len()];
        for (slot, f) in self.factors.iter().enumerate().rev() {
            tuple[slot] = rest % f.size();
            rest /= f.size();
        }
        tuple
    }

    /// Projection onto one factor, as a function out of the flattened product.
    pub fn projection(&self, slot: usize) -> FinFunction {
        let mut table = Vec::with_capacity(self.size);
        for i in 0..self.size {
            table.push(self.index_to_tuple(i)[slot]);
        }
        FinFunction::new(self.as_finset(), self.factors[slot].clone(), table)
            .expect("projection is total")
    }
}

/// The product of a list of finite sets.
pub fn product(factors: &[FinSet]) -> ProductSet {
    ProductSet::new(factors.to_vec())
}

/// A subobject of a finite product, in canonical form: a sorted,
/// duplicate-free member list. Canonical form makes equality structural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subobject {
    ambient: ProductSet,
    members: Vec<usize>,
}

impl Subobject {
    pub fn new(ambient: ProductSet, mut members: Vec<usize>) -> Result<Self, KernelError> {
        members.sort_unstable();
        members.dedup();
        if let Some(&m) = members.iter().find(|&&m| m >= ambient.size()) {
            return Err(KernelError::MemberOutOfRange { member: m, ambient: ambient.size() });
        }
        Ok(Subobject { ambient, members })
    }

    pub fn full(ambient: ProductSet) -> Self {
        let members = (0..ambient.size()).collect();
        Subobject { ambient, members }
    }

    pub fn empty(ambient: ProductSet) -> Self {
        Subobject { ambient, members: Vec::new() }
    }

    pub fn ambient(&self) -> &ProductSet {
        &self.ambient
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.ambient.size()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The same member set presented in a different (size-equal) ambient.
    pub fn reambient(&self, ambient: ProductSet) -> Result<Subobject, KernelError> {
        if ambient.size() != self.ambient.size() {
            return Err(KernelError::AmbientMismatch(ambient.size(), self.ambient.size()));
        }
        Ok(Subobject { ambient, members: self.members.clone() })
    }

    pub fn leq(&self, other: &Subobject) -> Result<bool, KernelError> {
        if self.ambient != other.ambient {
            return Err(KernelError::AmbientMismatch(self.ambient.size(), other.ambient.size()));
        }
        Ok(self.members.iter().all(|&m| other.contains(m)))
    }
}

/// The equaliser of a parallel pair, as a subobject of the shared domain.
pub fn equalizer(f: &FinFunction, g: &FinFunction) -> Result<Subobject, KernelError> {
    if f.dom() != g.dom() {
        return Err(KernelError::DomainMismatch(f.dom().size(), g.dom().size()));
    }
    if f.cod() != g.cod() {
        return Err(KernelError::CodomainMismatch(f.cod().size(), g.cod().size()));
    }
    let members = (0..f.dom().size()).filter(|&i| f.apply(i) == g.apply(i)).collect();
    Subobject::new(ProductSet::singleton(f.dom().clone()), members)
}

/// The pullback of a cospan, as a subobject of `dom(f) x dom(g)` together
/// with the two projections restricted to it.
pub fn pullback(
    f: &FinFunction,
    g: &FinFunction,
) -> Result<(Subobject, FinFunction, FinFunction), KernelError> {
    if f.cod() != g.cod() {
        return Err(KernelError::CodomainMismatch(f.cod().size(), g.cod().size()));
    }
    let ambient = product(&[f.dom().clone(), g.dom().clone()]);
    let mut members = Vec::new();
    for a in 0..f.dom().size() {
        for b in 0..g.dom().size() {
            if f.apply(a) == g.apply(b) {
                members.push(ambient.tuple_to_index(&[a, b]));
            }
        }
    }
    let sub = Subobject::new(ambient.clone(), members)?;
    let apex = FinSet::new(sub.members().len());
    let mut p1 = Vec::with_capacity(sub.members().len());
    let mut p2 = Vec::with_capacity(sub.members().len());
    for &m in sub.members() {
        let t = ambient.index_to_tuple(m);
        p1.push(t[0]);
        p2.push(t[1]);
    }
    let proj1 = FinFunction::new(apex.clone(), f.dom().clone(), p1)?;
    let proj2 = FinFunction::new(apex, g.dom().clone(), p2)?;
    Ok((sub, proj1, proj2))
}

/// The image of a function, as a subobject of its codomain.
pub fn image(f: &FinFunction) -> Subobject {
    let members: Vec<usize> = f.table().to_vec();
    Subobject::new(ProductSet::singleton(f.cod().clone()), members).expect("range is in codomain")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeOp {
    Meet,
    Join,
}

/// Finite meets and joins in the subobject lattice of `ambient`.
/// The empty meet is the full subobject; the empty join is empty.
pub fn sub_lattice(
    op: LatticeOp,
    ambient: &ProductSet,
    subs: &[Subobject],
) -> Result<Subobject, KernelError> {
    for s in subs {
        if s.ambient() != ambient {
            return Err(KernelError::AmbientMismatch(s.ambient().size(), ambient.size()));
        }
    }
    match op {
        LatticeOp::Meet => {
            let mut acc = Subobject::full(ambient.clone());
            for s in subs {
                let members = acc.members.iter().copied().filter(|&m| s.contains(m)).collect();
                acc = Subobject { ambient: ambient.clone(), members };
            }
            Ok(acc)
        }
        LatticeOp::Join => {
            let mut members: Vec<usize> = Vec::new();
            for s in subs {
                members.extend_from_slice(s.members());
            }
            Subobject::new(ambient.clone(), members)
        }
    }
}

/// One operation shared by both sides of a natural-isomorphism search:
/// argument and result sorts index into the sort family, and each side
/// carries its own table over the mixed-radix product of its argument sets.
#[derive(Clone, Debug)]
pub struct OpPair {
    pub name: String,
    pub arg_sorts: Vec<usize>,
    pub result_sort: usize,
    pub left: FinFunction,
    pub right: FinFunction,
}

/// Searches for a family of per-sort bijections `alpha_s : A(s) -> B(s)`
/// commuting with every operation pair. The search is seeded by nullary
/// operations (constants) and closed under propagation through operation
/// tables before any backtracking happens; hard-coded theories pin every
/// element through constants, which makes the search effectively linear.
pub fn find_natural_iso(
    sort_sizes: &[(usize, usize)],
    ops: &[OpPair],
) -> Option<Vec<FinFunction>> {
    if sort_sizes.iter().any(|&(a, b)| a != b) {
        return None;
    }
    let forward: Vec<Vec<Option<usize>>> =
        sort_sizes.iter().map(|&(a, _)| vec![None; a]).collect();
    let used: Vec<Vec<bool>> = sort_sizes.iter().map(|&(_, b)| vec![false; b]).collect();
    let mut state = IsoState { forward, used };
    if !state.propagate(ops) {
        return None;
    }
    if !search(&mut state, sort_sizes, ops) {
        return None;
    }
    let mut result = Vec::new();
    for (s, &(a, _)) in sort_sizes.iter().enumerate() {
        let table: Vec<usize> = (0..a).map(|i| state.forward[s][i].unwrap()).collect();
        result.push(
            FinFunction::new(FinSet::new(a), FinSet::new(a), table).expect("assignment in range"),
        );
    }
    Some(result)
}

#[derive(Clone)]
struct IsoState {
    forward: Vec<Vec<Option<usize>>>,
    used: Vec<Vec<bool>>,
}

impl IsoState {
    fn assign(&mut self, sort: usize, from: usize, to: usize) -> bool {
        match self.forward[sort][from] {
            Some(existing) => existing == to,
            None => {
                if self.used[sort][to] {
                    false
                } else {
                    self.forward[sort][from] = Some(to);
                    self.used[sort][to] = true;
                    true
                }
            }
        }
    }

    /// Closes the partial assignment under operation tables: whenever all
    /// inputs of an operation are mapped, the output mapping is forced.
    fn propagate(&mut self, ops: &[OpPair]) -> bool {
        loop {
            let mut changed = false;
            for op in ops {
                let factors: Vec<FinSet> = op
                    .arg_sorts
                    .iter()
                    .map(|&s| FinSet::new(self.forward[s].len()))
                    .collect();
                let prod_a = ProductSet::new(factors.clone());
                let prod_b = ProductSet::new(factors);
                for i in 0..prod_a.size() {
                    let tuple = prod_a.index_to_tuple(i);
                    let mapped: Option<Vec<usize>> = tuple
                        .iter()
                        .zip(&op.arg_sorts)
                        .map(|(&e, &s)| self.forward[s][e])
                        .collect();
                    let Some(mapped) = mapped else { continue };
                    let out_a = op.left.apply(i);
                    let out_b = op.right.apply(prod_b.tuple_to_index(&mapped));
                    match self.forward[op.result_sort][out_a] {
                        Some(existing) => {
                            if existing != out_b {
                                return false;
                            }
                        }
                        None => {
                            if !self.assign(op.result_sort, out_a, out_b) {
                                return false;
                            }
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }
}

fn search(state: &mut IsoState, sort_sizes: &[(usize, usize)], ops: &[OpPair]) -> bool {
    let unassigned = state
        .forward
        .iter()
        .enumerate()
        .flat_map(|(s, f)| f.iter().enumerate().filter(|(_, v)| v.is_none()).map(move |(i, _)| (s, i)))
        .next();
    let Some((sort, elem)) = unassigned else {
        return true;
    };
    for target in 0..sort_sizes[sort].1 {
        if state.used[sort][target] {
            continue;
        }
        let mut branch = state.clone();
        if branch.assign(sort, elem, target) && branch.propagate(ops) {
            if search(&mut branch, sort_sizes, ops) {
                *state = branch;
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fun(dom: usize, cod: usize, table: &[usize]) -> FinFunction {
        FinFunction::new(FinSet::new(dom), FinSet::new(cod), table.to_vec()).unwrap()
    }

    #[test]
    fn product_sizes() {
        assert_eq!(product(&[FinSet::new(2), FinSet::new(3)]).size(), 6);
        assert_eq!(product(&[]).size(), 1);
    }

    #[test]
    fn mixed_radix_last_fastest() {
        let p = product(&[FinSet::new(16), FinSet::new(16)]);
        assert_eq!(p.size(), 256);
        assert_eq!(p.tuple_to_index(&[1, 0]), 16);
        assert_eq!(p.index_to_tuple(16), vec![1, 0]);
    }

    #[test]
    fn tuple_index_roundtrip() {
        let p = product(&[FinSet::new(3), FinSet::new(4), FinSet::new(5)]);
        for i in 0..p.size() {
            assert_eq!(p.tuple_to_index(&p.index_to_tuple(i)), i);
        }
    }

    #[test]
    fn equalizer_identity_and_disjoint() {
        let f = fun(4, 3, &[0, 1, 2, 0]);
        assert!(equalizer(&f, &f).unwrap().is_full());
        let c0 = fun(4, 3, &[0, 0, 0, 0]);
        let c1 = fun(4, 3, &[1, 1, 1, 1]);
        assert!(equalizer(&c0, &c1).unwrap().is_empty());
    }

    #[test]
    fn equalizer_matches_pointwise_scan() {
        let f = fun(5, 5, &[0, 2, 4, 1, 3]);
        let g = fun(5, 5, &[0, 1, 4, 4, 3]);
        let e = equalizer(&f, &g).unwrap();
        let expect: Vec<usize> = (0..5).filter(|&i| f.apply(i) == g.apply(i)).collect();
        assert_eq!(e.members(), expect.as_slice());
    }

    #[test]
    fn equalizer_mismatch_error() {
        let f = fun(3, 3, &[0, 1, 2]);
        let g = fun(4, 3, &[0, 1, 2, 0]);
        assert!(equalizer(&f, &g).is_err());
    }

    #[test]
    fn pullback_of_distinct_global_elements_is_empty() {
        let x = FinFunction::global_element(FinSet::new(4), 1).unwrap();
        let y = FinFunction::global_element(FinSet::new(4), 3).unwrap();
        let (sub, _, _) = pullback(&x, &y).unwrap();
        assert!(sub.is_empty());
    }

    #[test]
    fn pullback_along_identity_is_graph() {
        let f = fun(3, 4, &[2, 0, 3]);
        let id = FinFunction::identity(&FinSet::new(4));
        let (sub, p1, _) = pullback(&f, &id).unwrap();
        assert_eq!(sub.members().len(), 3);
        assert!(p1.is_bijection());
        for k in 0..3 {
            let t = sub.ambient().index_to_tuple(sub.members()[k]);
            assert_eq!(t[1], f.apply(t[0]));
        }
    }

    #[test]
    fn pullback_agrees_with_double_loop_scan() {
        let f = fun(4, 3, &[0, 1, 1, 2]);
        let g = fun(5, 3, &[2, 1, 0, 1, 2]);
        let (sub, _, _) = pullback(&f, &g).unwrap();
        let mut expect = Vec::new();
        for a in 0..4 {
            for b in 0..5 {
                if f.apply(a) == g.apply(b) {
                    expect.push(sub.ambient().tuple_to_index(&[a, b]));
                }
            }
        }
        expect.sort_unstable();
        assert_eq!(sub.members(), expect.as_slice());
    }

    #[test]
    fn pullback_symmetry() {
        let f = fun(4, 3, &[0, 1, 1, 2]);
        let g = fun(5, 3, &[2, 1, 0, 1, 2]);
        let (fg, _, _) = pullback(&f, &g).unwrap();
        let (gf, _, _) = pullback(&g, &f).unwrap();
        let swapped: Vec<usize> = {
            let mut v: Vec<usize> = gf
                .members()
                .iter()
                .map(|&m| {
                    let t = gf.ambient().index_to_tuple(m);
                    fg.ambient().tuple_to_index(&[t[1], t[0]])
                })
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(fg.members(), swapped.as_slice());
    }

    #[test]
    fn image_cases() {
        let c = fun(5, 4, &[2, 2, 2, 2, 2]);
        assert_eq!(image(&c).members(), &[2]);
        let s = fun(4, 3, &[0, 1, 2, 1]);
        assert!(image(&s).is_full());
        let f = fun(6, 6, &[5, 5, 0, 0, 3, 3]);
        assert_eq!(image(&f).members(), &[0, 3, 5]);
    }

    #[test]
    fn image_is_join_of_singletons() {
        for size in [1usize, 7, 16, 64] {
            let table: Vec<usize> = (0..size).map(|i| (i * 7 + 3) % size).collect();
            let f = fun(size, size, &table);
            let ambient = ProductSet::singleton(FinSet::new(size));
            let singletons: Vec<Subobject> = (0..size)
                .map(|i| Subobject::new(ambient.clone(), vec![f.apply(i)]).unwrap())
                .collect();
            let join = sub_lattice(LatticeOp::Join, &ambient, &singletons).unwrap();
            assert_eq!(image(&f), join);
        }
    }

    #[test]
    fn lattice_units() {
        let ambient = product(&[FinSet::new(3), FinSet::new(2)]);
        assert!(sub_lattice(LatticeOp::Meet, &ambient, &[]).unwrap().is_full());
        assert!(sub_lattice(LatticeOp::Join, &ambient, &[]).unwrap().is_empty());
        let singletons: Vec<Subobject> =
            (0..6).map(|i| Subobject::new(ambient.clone(), vec![i]).unwrap()).collect();
        assert!(sub_lattice(LatticeOp::Join, &ambient, &singletons).unwrap().is_full());
    }

    #[test]
    fn subobject_canonical_form() {
        let ambient = product(&[FinSet::new(4)]);
        let a = Subobject::new(ambient.clone(), vec![3, 1, 1, 0]).unwrap();
        let b = Subobject::new(ambient, vec![0, 1, 3]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn natural_iso_identity() {
        let add = fun(4, 2, &[0, 1, 1, 0]);
        let ops = vec![OpPair {
            name: "f".into(),
            arg_sorts: vec![0, 0],
            result_sort: 0,
            left: add.clone(),
            right: add,
        }];
        let iso = find_natural_iso(&[(2, 2)], &ops).unwrap();
        assert_eq!(iso[0].table(), &[0, 1]);
    }

    #[test]
    fn natural_iso_recovers_transport() {
        // one sort of size 3, one unary op, one constant
        let f = fun(3, 3, &[1, 2, 0]);
        let c = fun(1, 3, &[0]);
        // transport along the permutation p = [2, 0, 1]
        let p = [2usize, 0, 1];
        let f_b = {
            let mut table = vec![0; 3];
            for i in 0..3 {
                table[p[i]] = p[f.apply(i)];
            }
            fun(3, 3, &table)
        };
        let c_b = fun(1, 3, &[p[0]]);
        let ops = vec![
            OpPair { name: "f".into(), arg_sorts: vec![0], result_sort: 0, left: f.clone(), right: f_b.clone() },
            OpPair { name: "c".into(), arg_sorts: vec![], result_sort: 0, left: c, right: c_b },
        ];
        let iso = find_natural_iso(&[(3, 3)], &ops).unwrap();
        // verify the square alpha . A(f) = B(f) . alpha
        for i in 0..3 {
            assert_eq!(iso[0].apply(f.apply(i)), f_b.apply(iso[0].apply(i)));
        }
    }

    #[test]
    fn natural_iso_rejects_corruption() {
        let f = fun(3, 3, &[1, 2, 0]);
        let c = fun(1, 3, &[0]);
        let mut corrupted = f.table().to_vec();
        corrupted[0] = 0; // break the cycle structure
        let f_b = fun(3, 3, &corrupted);
        let ops = vec![
            OpPair { name: "f".into(), arg_sorts: vec![0], result_sort: 0, left: f, right: f_b },
            OpPair { name: "c".into(), arg_sorts: vec![], result_sort: 0, left: c.clone(), right: c },
        ];
        assert!(find_natural_iso(&[(3, 3)], &ops).is_none());
    }
}
