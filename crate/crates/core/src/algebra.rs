//! Finite (nuclear) implicative semilattices given by explicit tables.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::poset::Poset;
use crate::set::{Elem, ElemSet};
use crate::upset::{SPoset, Upset, UpsetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("algebra must have at least one element")]
    Empty,
    #[error("table has wrong dimensions (expected {expected})")]
    TableShape { expected: usize },
    #[error("table entry {0} is out of range")]
    EntryOutOfRange(usize),
    #[error("order table is not a partial order")]
    NotPartialOrder,
    #[error("{0} is not the greatest element")]
    NotTop(usize),
    #[error("meet table entry for ({0}, {1}) is not the greatest lower bound")]
    BadMeet(usize, usize),
    #[error("({0}, {1}) has no greatest lower bound")]
    NoMeet(usize, usize),
    #[error("residuation fails: {a} <= {b} -> {c} disagrees with {a} & {b} <= {c}")]
    Residuation { a: usize, b: usize, c: usize },
    #[error("order admits no relative pseudocomplement for ({0}, {1})")]
    NoImplication(usize, usize),
    #[error("nucleus table fails at element {0}")]
    NotNucleus(usize),
    #[error("operation needs a nucleus but the algebra has none")]
    NoNucleus,
    #[error("set is not closed under the algebra operations")]
    NotSubalgebra,
    #[error("algebra would have {count} elements, above the tabulation guard {guard}")]
    TooLarge { count: usize, guard: usize },
    #[error(transparent)]
    Upset(#[from] UpsetError),
}

/// Operations shared by tabulated algebras and algebras of upsets, so terms
/// can be evaluated in either.
pub trait NuclearAlgebra {
    type Elem: Clone + Eq + std::fmt::Debug;

    fn top(&self) -> Self::Elem;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn imp(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` when the signature has no nucleus.
    fn nucleus(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// `None` when the signature has no constant 0.
    fn bottom(&self) -> Option<Self::Elem>;
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
}

/// Which operations a subalgebra must be closed under. The top element is
/// always included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub meet: bool,
    pub imp: bool,
    pub nucleus: bool,
    pub bottom: bool,
}

impl Signature {
    pub const IMPLICATIVE: Signature = Signature { meet: true, imp: true, nucleus: false, bottom: false };
    pub const NUCLEAR: Signature = Signature { meet: true, imp: true, nucleus: true, bottom: false };
    pub const BOUNDED_NUCLEAR: Signature = Signature { meet: true, imp: true, nucleus: true, bottom: true };
    pub const BOUNDED: Signature = Signature { meet: true, imp: true, nucleus: false, bottom: true };
}

/// A finite implicative semilattice, optionally with a nucleus and with the
/// constant 0 in its signature.
///
/// Finite implicative semilattices are Heyting algebras, so joins and the
/// least element are always available; `bounded` only records whether 0 is
/// part of the signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    size: usize,
    above: Vec<ElemSet>,
    meet: Vec<usize>,
    imp: Vec<usize>,
    join: Vec<usize>,
    top: usize,
    bottom: usize,
    nucleus: Option<Vec<usize>>,
    bounded: bool,
    labels: Option<Vec<String>>,
}

fn square<T: Copy>(rows: &[Vec<T>], n: usize) -> Result<Vec<T>, AlgebraError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(AlgebraError::TableShape { expected: n });
    }
    Ok(rows.iter().flatten().copied().collect())
}

impl FiniteAlgebra {
    /// Builds and validates an algebra from its order, meet and implication
    /// tables. `leq[a][b]` means `a <= b`.
    pub fn new(
        leq: &[Vec<bool>],
        meet: &[Vec<usize>],
        imp: &[Vec<usize>],
        top: usize,
    ) -> Result<FiniteAlgebra, AlgebraError> {
        let n = leq.len();
        if n == 0 {
            return Err(AlgebraError::Empty);
        }
        let leq_flat = square(leq, n)?;
        let meet = square(meet, n)?;
        let imp = square(imp, n)?;
        if let Some(&bad) = meet.iter().chain(&imp).find(|&&v| v >= n) {
            return Err(AlgebraError::EntryOutOfRange(bad));
        }
        if top >= n {
            return Err(AlgebraError::EntryOutOfRange(top));
        }
        let above = order_from_table(&leq_flat, n)?;
        for a in 0..n {
            if !above[a].contains(top) {
                return Err(AlgebraError::NotTop(top));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let m = meet[a * n + b];
                let is_lower = above[m].contains(a) && above[m].contains(b);
                let greatest = (0..n)
                    .filter(|&c| above[c].contains(a) && above[c].contains(b))
                    .all(|c| above[c].contains(m));
                if !is_lower || !greatest {
                    return Err(AlgebraError::BadMeet(a, b));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = above[a].contains(imp[b * n + c]);
                    let rhs = above[meet[a * n + b]].contains(c);
                    if lhs != rhs {
                        return Err(AlgebraError::Residuation { a, b, c });
                    }
                }
            }
        }
        Ok(Self::assemble(above, meet, imp, top))
    }

    /// Derives meet and implication from an order alone, failing if the
    /// order is not an implicative semilattice.
    pub fn from_order(leq: &[Vec<bool>]) -> Result<FiniteAlgebra, AlgebraError> {
        let n = leq.len();
        if n == 0 {
            return Err(AlgebraError::Empty);
        }
        let above = order_from_table(&square(leq, n)?, n)?;
        let top = (0..n)
            .find(|&t| (0..n).all(|a| above[a].contains(t)))
            .ok_or(AlgebraError::NotTop(0))?;
        let greatest = |cands: Vec<usize>| -> Option<usize> {
            cands.iter().copied().find(|&m| cands.iter().all(|&c| above[c].contains(m)))
        };
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower = (0..n).filter(|&c| above[c].contains(a) && above[c].contains(b)).collect();
                meet[a * n + b] = greatest(lower).ok_or(AlgebraError::NoMeet(a, b))?;
            }
        }
        let mut imp = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let cands = (0..n).filter(|&c| above[meet[c * n + a]].contains(b)).collect();
                imp[a * n + b] = greatest(cands).ok_or(AlgebraError::NoImplication(a, b))?;
            }
        }
        Ok(Self::assemble(above, meet, imp, top))
    }

    fn assemble(above: Vec<ElemSet>, meet: Vec<usize>, imp: Vec<usize>, top: usize) -> FiniteAlgebra {
        let n = above.len();
        let mut bottom = top;
        for a in 0..n {
            bottom = meet[bottom * n + a];
        }
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                // least upper bound: the meet of all upper bounds
                let mut j = top;
                for c in above[a].intersection(&above[b]).iter() {
                    j = meet[j * n + c];
                }
                join[a * n + b] = j;
            }
        }
        FiniteAlgebra { size: n, above, meet, imp, join, top, bottom, nucleus: None, bounded: false, labels: None }
    }

    /// Attaches a nucleus after checking `a <= j(a)`, `j(j(a)) = j(a)` and
    /// `j(a & b) = j(a) & j(b)`.
    pub fn with_nucleus(mut self, table: Vec<usize>) -> Result<FiniteAlgebra, AlgebraError> {
        let n = self.size;
        if table.len() != n {
            return Err(AlgebraError::TableShape { expected: n });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= n) {
            return Err(AlgebraError::EntryOutOfRange(bad));
        }
        for a in 0..n {
            if !self.leq(a, table[a]) || table[table[a]] != table[a] {
                return Err(AlgebraError::NotNucleus(a));
            }
            for b in 0..n {
                if table[self.meet(a, b)] != self.meet(table[a], table[b]) {
                    return Err(AlgebraError::NotNucleus(a));
                }
            }
        }
        self.nucleus = Some(table);
        Ok(self)
    }

    pub(crate) fn with_nucleus_unchecked(mut self, table: Vec<usize>) -> FiniteAlgebra {
        self.nucleus = Some(table);
        self
    }

    pub fn without_nucleus(mut self) -> FiniteAlgebra {
        self.nucleus = None;
        self
    }

    /// Adds (or removes) the constant 0 in the signature.
    pub fn with_bottom(mut self, bounded: bool) -> FiniteAlgebra {
        self.bounded = bounded;
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> FiniteAlgebra {
        assert_eq!(labels.len(), self.size);
        self.labels = Some(labels);
        self
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => a.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.above[a].contains(b)
    }

    /// Elements above `a`, including `a`.
    pub fn above(&self, a: usize) -> &ElemSet {
        &self.above[a]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b]
    }

    pub fn imp(&self, a: usize, b: usize) -> usize {
        self.imp[a * self.size + b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b]
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Least element; it exists in every finite algebra whether or not 0 is
    /// in the signature.
    pub fn least(&self) -> usize {
        self.bottom
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn nucleus_table(&self) -> Option<&[usize]> {
        self.nucleus.as_deref()
    }

    pub fn nucleus(&self, a: usize) -> Option<usize> {
        self.nucleus.as_ref().map(|t| t[a])
    }

    /// Nucleus value, treating a missing nucleus as the identity.
    fn j(&self, a: usize) -> usize {
        self.nucleus(a).unwrap_or(a)
    }

    pub fn meet_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Hasse pairs `(lower, upper)` of the algebra's order.
    pub fn order_covers(&self) -> Vec<(usize, usize)> {
        let n = self.size;
        let mut out = Vec::new();
        for a in 0..n {
            for b in self.above[a].iter().filter(|&b| b != a) {
                let between = (0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn order_poset(&self) -> Poset {
        Poset::new(self.size, self.order_covers()).expect("algebra order is acyclic")
    }

    /// Meet-prime elements: `m != 1` with `a & b <= m` implying `a <= m` or
    /// `b <= m`. Sorted by index.
    pub fn meet_primes(&self) -> Vec<usize> {
        let n = self.size;
        (0..n)
            .filter(|&m| m != self.top)
            .filter(|&m| {
                (0..n).all(|a| {
                    self.leq(a, m) || (0..n).all(|b| self.leq(b, m) || !self.leq(self.meet(a, b), m))
                })
            })
            .collect()
    }

    /// The dual S-poset: meet-primes ordered by reverse inclusion, with `S`
    /// the meet-primes fixed by the nucleus (all of them if there is none).
    pub fn dual(&self) -> Dual {
        let elements = self.meet_primes();
        let k = elements.len();
        let mut relations = Vec::new();
        for i in 0..k {
            for j in 0..k {
                // i below j in the dual order iff elements[j] <= elements[i]
                if i != j && self.leq(elements[j], elements[i]) {
                    relations.push((i, j));
                }
            }
        }
        let poset = Poset::new(k, relations).expect("antisymmetric order");
        let poset = match &self.labels {
            Some(l) => poset.with_names(elements.iter().map(|&e| l[e].clone()).collect()).unwrap(),
            None => poset,
        };
        let s = ElemSet::from_indices(k, (0..k).filter(|&i| self.j(elements[i]) == elements[i]));
        let mut position = vec![None; self.size];
        for (i, &e) in elements.iter().enumerate() {
            position[e] = Some(i);
        }
        Dual { sposet: SPoset::new(poset, s).expect("same carrier"), elements, position }
    }

    /// Minimal meet-primes above `a`; their meet is `a`.
    pub fn meet_prime_components(&self, a: usize) -> Vec<usize> {
        let above: Vec<usize> = self.meet_primes().into_iter().filter(|&m| self.leq(a, m)).collect();
        above
            .iter()
            .copied()
            .filter(|&m| !above.iter().any(|&x| x != m && self.leq(x, m)))
            .collect()
    }

    /// The three standard nuclei determined by `a`: `b ↦ a ∨ b`,
    /// `b ↦ a → b` and `b ↦ (b → a) → a`.
    pub fn nucleus_constructors(&self, a: usize) -> [Vec<usize>; 3] {
        let n = self.size;
        [
            (0..n).map(|b| self.join(a, b)).collect(),
            (0..n).map(|b| self.imp(a, b)).collect(),
            (0..n).map(|b| self.imp(self.imp(b, a), a)).collect(),
        ]
    }

    /// The largest nucleus whose fixpoints contain the subalgebra `b`:
    /// `k(a) = ⋀ { (a → x) → x | x ∈ b }`.
    pub fn induced_nucleus(&self, b: &ElemSet) -> Result<Vec<usize>, AlgebraError> {
        if !self.is_subalgebra(b, Signature::IMPLICATIVE) {
            return Err(AlgebraError::NotSubalgebra);
        }
        Ok((0..self.size)
            .map(|a| self.meet_all(b.iter().map(|x| self.imp(self.imp(a, x), x))))
            .collect())
    }

    /// Nucleus on a subalgebra `b` obtained by restricting the fixpoints:
    /// `j_B(x) = ⋀ { y ∈ B ∩ A_j | x <= y }`. Keys and values are elements of
    /// `self`.
    pub fn restriction_nucleus(&self, b: &ElemSet) -> Result<BTreeMap<usize, usize>, AlgebraError> {
        let table = self.nucleus.as_ref().ok_or(AlgebraError::NoNucleus)?;
        if !self.is_subalgebra(b, Signature::IMPLICATIVE) {
            return Err(AlgebraError::NotSubalgebra);
        }
        let fixed: Vec<usize> = b.iter().filter(|&y| table[y] == y).collect();
        Ok(b
            .iter()
            .map(|x| (x, self.meet_all(fixed.iter().copied().filter(|&y| self.leq(x, y)))))
            .collect())
    }

    /// Smallest subset containing `gens` and 1 (and 0 if requested) closed
    /// under the operations named by `sig`. A nucleus requested from an
    /// algebra without one is treated as the identity.
    pub fn closure(&self, gens: impl IntoIterator<Item = usize>, sig: Signature) -> ElemSet {
        let mut inside = ElemSet::empty(self.size);
        let mut list = Vec::new();
        let add = |x: usize, inside: &mut ElemSet, list: &mut Vec<usize>| {
            if !inside.contains(x) {
                inside.insert(x);
                list.push(x);
            }
        };
        add(self.top, &mut inside, &mut list);
        if sig.bottom {
            add(self.bottom, &mut inside, &mut list);
        }
        for g in gens {
            add(g, &mut inside, &mut list);
        }
        let mut i = 0;
        while i < list.len() {
            let e = list[i];
            if sig.nucleus {
                add(self.j(e), &mut inside, &mut list);
            }
            for k in 0..=i {
                let b = list[k];
                if sig.meet {
                    add(self.meet(e, b), &mut inside, &mut list);
                }
                if sig.imp {
                    add(self.imp(e, b), &mut inside, &mut list);
                    add(self.imp(b, e), &mut inside, &mut list);
                }
            }
            i += 1;
        }
        inside
    }

    pub fn is_subalgebra(&self, set: &ElemSet, sig: Signature) -> bool {
        set.universe() == self.size && self.closure(set.iter(), sig) == *set
    }

    /// Every subalgebra for the signature, found by breadth-first search
    /// from the smallest one.
    pub fn subalgebras(&self, sig: Signature) -> Vec<ElemSet> {
        let start = self.closure([], sig);
        let mut seen: HashSet<ElemSet> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        let mut out = Vec::new();
        while let Some(b) = queue.pop_front() {
            for a in (0..self.size).filter(|&a| !b.contains(a)) {
                let c = self.closure(b.iter().chain([a]), sig);
                if seen.insert(c.clone()) {
                    queue.push_back(c);
                }
            }
            out.push(b);
        }
        out
    }

    /// Maximal proper subalgebras by exhaustive search.
    pub fn maximal_subalgebras(&self, sig: Signature) -> Vec<ElemSet> {
        let full = ElemSet::full(self.size);
        self.subalgebras(sig)
            .into_iter()
            .filter(|b| *b != full)
            .filter(|b| (0..self.size).filter(|&a| !b.contains(a)).all(|a| self.closure(b.iter().chain([a]), sig) == full))
            .collect()
    }

    /// The subalgebra `b` as an algebra in its own right, with the map from
    /// its indices to elements of `self`. The nucleus is kept only if `b` is
    /// closed under it.
    pub fn restrict(&self, b: &ElemSet) -> Result<(FiniteAlgebra, Vec<usize>), AlgebraError> {
        if !self.is_subalgebra(b, Signature::IMPLICATIVE) {
            return Err(AlgebraError::NotSubalgebra);
        }
        let elems = b.to_vec();
        let mut pos = vec![usize::MAX; self.size];
        for (i, &e) in elems.iter().enumerate() {
            pos[e] = i;
        }
        let k = elems.len();
        let above = elems
            .iter()
            .map(|&a| ElemSet::from_indices(k, (0..k).filter(|&i| self.leq(a, elems[i]))))
            .collect();
        let mut meet = Vec::with_capacity(k * k);
        let mut imp = Vec::with_capacity(k * k);
        for &a in &elems {
            for &c in &elems {
                meet.push(pos[self.meet(a, c)]);
                imp.push(pos[self.imp(a, c)]);
            }
        }
        let mut alg = Self::assemble(above, meet, imp, pos[self.top]);
        if let Some(table) = &self.nucleus {
            if elems.iter().all(|&e| b.contains(table[e])) {
                alg.nucleus = Some(elems.iter().map(|&e| pos[table[e]]).collect());
            }
        }
        alg.bounded = self.bounded && b.contains(self.bottom);
        if let Some(l) = &self.labels {
            alg.labels = Some(elems.iter().map(|&e| l[e].clone()).collect());
        }
        Ok((alg, elems))
    }

    /// Algebras are isomorphic iff their dual S-posets are.
    pub fn is_isomorphic(&self, other: &FiniteAlgebra) -> bool {
        if self.size != other.size || self.bounded != other.bounded {
            return false;
        }
        if self.nucleus.is_some() != other.nucleus.is_some() {
            return false;
        }
        crate::iso::sposets_isomorphic(&self.dual().sposet, &other.dual().sposet)
    }
}

fn order_from_table(leq: &[bool], n: usize) -> Result<Vec<ElemSet>, AlgebraError> {
    for a in 0..n {
        if !leq[a * n + a] {
            return Err(AlgebraError::NotPartialOrder);
        }
        for b in 0..n {
            if a != b && leq[a * n + b] && leq[b * n + a] {
                return Err(AlgebraError::NotPartialOrder);
            }
            for c in 0..n {
                if leq[a * n + b] && leq[b * n + c] && !leq[a * n + c] {
                    return Err(AlgebraError::NotPartialOrder);
                }
            }
        }
    }
    Ok((0..n).map(|a| ElemSet::from_indices(n, (0..n).filter(|&b| leq[a * n + b]))).collect())
}

impl NuclearAlgebra for FiniteAlgebra {
    type Elem = usize;

    fn top(&self) -> usize {
        self.top
    }
    fn meet(&self, a: &usize, b: &usize) -> usize {
        FiniteAlgebra::meet(self, *a, *b)
    }
    fn imp(&self, a: &usize, b: &usize) -> usize {
        FiniteAlgebra::imp(self, *a, *b)
    }
    fn nucleus(&self, a: &usize) -> Option<usize> {
        FiniteAlgebra::nucleus(self, *a)
    }
    fn bottom(&self) -> Option<usize> {
        self.bounded.then_some(self.bottom)
    }
    fn leq(&self, a: &usize, b: &usize) -> bool {
        FiniteAlgebra::leq(self, *a, *b)
    }
}

/// The dual S-poset of a finite algebra together with the meet-prime each
/// point stands for.
#[derive(Clone, Debug)]
pub struct Dual {
    pub sposet: SPoset,
    /// `elements[i]` is the algebra element of dual point `i`.
    pub elements: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl Dual {
    /// Dual point of a meet-prime element, if it is one.
    pub fn point_of(&self, a: usize) -> Option<Elem> {
        self.position.get(a).copied().flatten()
    }

    /// `α(a) = { x | a ≰ x }`, an upset of the dual poset.
    pub fn alpha(&self, algebra: &FiniteAlgebra, a: usize) -> Upset {
        let k = self.elements.len();
        Upset::trusted(ElemSet::from_indices(k, (0..k).filter(|&i| !algebra.leq(a, self.elements[i]))))
    }
}

/// Largest number of upsets [`UpsetAlgebra`] will tabulate.
pub const MAX_TABULATED: usize = 4096;

/// `Up(X)` as a tabulated algebra, with the correspondence between indices
/// and upsets. Upsets are indexed in antichain order.
#[derive(Clone, Debug)]
pub struct UpsetAlgebra {
    poset: Poset,
    upsets: Vec<Upset>,
    index: HashMap<Upset, usize>,
    algebra: FiniteAlgebra,
}

impl UpsetAlgebra {
    pub fn new(poset: &Poset) -> Result<UpsetAlgebra, AlgebraError> {
        Self::with_guard(poset, MAX_TABULATED)
    }

    pub fn with_guard(poset: &Poset, guard: usize) -> Result<UpsetAlgebra, AlgebraError> {
        let count = poset.count_antichains();
        if count > guard as u128 {
            return Err(AlgebraError::TooLarge { count: count.min(usize::MAX as u128) as usize, guard });
        }
        let upsets = poset.all_upsets_with_guard(usize::MAX)?;
        let index: HashMap<Upset, usize> = upsets.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        let n = upsets.len();
        let above = upsets
            .iter()
            .map(|u| ElemSet::from_indices(n, (0..n).filter(|&j| u.is_subset(&upsets[j]))))
            .collect();
        let mut meet = Vec::with_capacity(n * n);
        let mut imp = Vec::with_capacity(n * n);
        for u in &upsets {
            for v in &upsets {
                meet.push(index[&Upset::trusted(u.members().intersection(v.members()))]);
                imp.push(index[&poset.implies_unchecked(u, v)]);
            }
        }
        let top = index[&poset.top_upset()];
        let algebra = FiniteAlgebra::assemble(above, meet, imp, top);
        Ok(UpsetAlgebra { poset: poset.clone(), upsets, index, algebra })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.upsets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn upsets(&self) -> &[Upset] {
        &self.upsets
    }

    pub fn upset(&self, i: usize) -> &Upset {
        &self.upsets[i]
    }

    pub fn index_of(&self, u: &Upset) -> Option<usize> {
        self.index.get(u).copied()
    }

    /// Table of `j_S` on upset indices.
    pub fn nucleus_table(&self, s: &ElemSet) -> Vec<usize> {
        self.upsets
            .iter()
            .map(|u| {
                let j = self.poset.downset_of(&s.difference(u.members())).complement();
                self.index[&Upset::trusted(j)]
            })
            .collect()
    }

    /// The algebra `(Up(X), j_S)`, optionally with 0 in the signature.
    pub fn nuclear(&self, s: &ElemSet, bounded: bool) -> FiniteAlgebra {
        self.algebra.clone().with_nucleus_unchecked(self.nucleus_table(s)).with_bottom(bounded)
    }

    /// Replaces the carried algebra by `(Up(X), j_S)`.
    pub fn with_s(mut self, s: &ElemSet, bounded: bool) -> UpsetAlgebra {
        self.algebra = self.nuclear(s, bounded);
        self
    }

    /// Sets whether 0 is in the carried algebra's signature.
    pub fn with_bottom(mut self, bounded: bool) -> UpsetAlgebra {
        self.algebra = self.algebra.with_bottom(bounded);
        self
    }

    /// Same as [`UpsetAlgebra::nuclear`] for an S-poset on this poset.
    pub fn of_sposet(&self, sp: &SPoset, bounded: bool) -> FiniteAlgebra {
        assert_eq!(sp.poset(), &self.poset);
        self.nuclear(sp.s(), bounded)
    }

    /// `ε(x) = X ∖ ↓x`, the meet-prime upset of a point.
    pub fn epsilon_point(&self, x: Elem) -> usize {
        self.index[&Upset::trusted(self.poset.down(x).complement())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Heyting algebra of the 3-element chain 0 < 1 < 2.
    fn chain3() -> FiniteAlgebra {
        let leq: Vec<Vec<bool>> = (0..3).map(|a| (0..3).map(|b| a <= b).collect()).collect();
        FiniteAlgebra::from_order(&leq).unwrap()
    }

    #[test]
    fn chain_tables() {
        let a = chain3();
        assert_eq!(a.top(), 2);
        assert_eq!(a.least(), 0);
        assert_eq!(a.imp(1, 0), 0);
        assert_eq!(a.imp(0, 1), 2);
        assert_eq!(a.join(0, 1), 1);
        assert_eq!(a.meet_primes(), vec![0, 1]);
    }

    #[test]
    fn new_validates_residuation() {
        let leq: Vec<Vec<bool>> = (0..3).map(|a| (0..3).map(|b| a <= b).collect()).collect();
        let meet: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b: usize| a.min(b)).collect()).collect();
        let good: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| if a <= b { 2 } else { b }).collect()).collect();
        assert!(FiniteAlgebra::new(&leq, &meet, &good, 2).is_ok());
        let mut bad = good.clone();
        bad[1][0] = 1;
        assert!(matches!(FiniteAlgebra::new(&leq, &meet, &bad, 2), Err(AlgebraError::Residuation { .. })));
        assert!(matches!(FiniteAlgebra::new(&leq, &meet, &good, 1), Err(AlgebraError::NotTop(1))));
    }

    #[test]
    fn nucleus_validation() {
        let a = chain3();
        assert!(a.clone().with_nucleus(vec![1, 1, 2]).is_ok());
        assert!(matches!(a.clone().with_nucleus(vec![0, 0, 2]), Err(AlgebraError::NotNucleus(1))));
        for x in 0..3 {
            for t in a.nucleus_constructors(x) {
                assert!(a.clone().with_nucleus(t).is_ok());
            }
        }
    }

    #[test]
    fn closure_and_subalgebras() {
        let a = chain3();
        assert_eq!(a.closure([], Signature::IMPLICATIVE).to_vec(), vec![2]);
        assert_eq!(a.closure([0], Signature::IMPLICATIVE).to_vec(), vec![0, 2]);
        assert_eq!(a.subalgebras(Signature::IMPLICATIVE).len(), 4);
        assert_eq!(a.maximal_subalgebras(Signature::IMPLICATIVE).len(), 2);
    }

    #[test]
    fn upset_algebra_matches_order_algebra() {
        let p = Poset::new(3, [(0, 1), (0, 2)]).unwrap();
        let ua = UpsetAlgebra::new(&p).unwrap();
        let n = ua.len();
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| ua.algebra().leq(a, b)).collect()).collect();
        let derived = FiniteAlgebra::from_order(&leq).unwrap();
        assert_eq!(&derived, ua.algebra());
        // dual of Up(X) recovers X
        let dual = ua.algebra().dual();
        assert!(crate::iso::posets_isomorphic(dual.sposet.poset(), &p));
    }

    #[test]
    fn induced_nucleus_fixes_the_subalgebra() {
        let p = Poset::antichain(2);
        let ua = UpsetAlgebra::new(&p).unwrap();
        let a = ua.algebra();
        for b in a.subalgebras(Signature::IMPLICATIVE) {
            let k = a.induced_nucleus(&b).unwrap();
            let alg = a.clone().with_nucleus(k.clone()).unwrap();
            for x in &b {
                assert_eq!(alg.nucleus(x), Some(x));
            }
        }
    }
}
