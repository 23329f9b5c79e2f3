//! Finite posets on `0..n`, stored as their Hasse diagram plus reflexive
//! up- and down-closures.

use std::collections::HashSet;

use itertools::Itertools;
use thiserror::Error;

use crate::set::{Elem, ElemSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("element index {index} out of range for a poset of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("order relation is cyclic through element {0}")]
    Cyclic(Elem),
    #[error("expected {expected} element names, got {got}")]
    NameCount { expected: usize, got: usize },
    #[error("poset has {size} elements, above the enumeration guard of {guard}")]
    TooLarge { size: usize, guard: usize },
}

/// An immutable finite poset.
///
/// The cover relation is always the Hasse reduction of whatever relation the
/// poset was built from; `(lower, upper)` pairs in [`Poset::covers`] are sorted.
#[derive(Clone, Debug)]
pub struct Poset {
    up: Vec<ElemSet>,
    down: Vec<ElemSet>,
    upper_covers: Vec<Vec<Elem>>,
    lower_covers: Vec<Vec<Elem>>,
    heights: Vec<usize>,
    names: Option<Vec<String>>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Poset) -> bool {
        self.up == other.up && self.names == other.names
    }
}

impl Eq for Poset {}

impl Poset {
    /// Builds the poset generated by `relations`, each pair `(a, b)` meaning
    /// `a <= b`. Reflexive pairs are ignored; any other cycle is an error.
    pub fn new(
        size: usize,
        relations: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Poset, PosetError> {
        let mut succ = vec![Vec::new(); size];
        let mut indeg = vec![0usize; size];
        for (a, b) in relations {
            for index in [a, b] {
                if index >= size {
                    return Err(PosetError::IndexOutOfRange { index, size });
                }
            }
            if a != b {
                succ[a].push(b);
                indeg[b] += 1;
            }
        }
        let mut order = Vec::with_capacity(size);
        let mut ready: Vec<Elem> = (0..size).filter(|&x| indeg[x] == 0).collect();
        while let Some(x) = ready.pop() {
            order.push(x);
            for &y in &succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.push(y);
                }
            }
        }
        if order.len() < size {
            let stuck = (0..size).find(|&x| indeg[x] > 0).unwrap_or(0);
            return Err(PosetError::Cyclic(stuck));
        }
        let mut up = vec![ElemSet::empty(size); size];
        for &x in order.iter().rev() {
            let mut set = ElemSet::singleton(size, x);
            for &y in &succ[x] {
                set.union_with(&up[y]);
            }
            up[x] = set;
        }
        Ok(Self::from_up_closures(up))
    }

    fn from_up_closures(up: Vec<ElemSet>) -> Poset {
        let size = up.len();
        let mut down = vec![ElemSet::empty(size); size];
        for (x, ux) in up.iter().enumerate() {
            for y in ux {
                down[y].insert(x);
            }
        }
        let mut upper_covers = vec![Vec::new(); size];
        let mut lower_covers = vec![Vec::new(); size];
        for x in 0..size {
            let mut strict = up[x].clone();
            strict.remove(x);
            for y in &strict {
                let between = down[y].intersection(&strict);
                if between.count() == 1 {
                    upper_covers[x].push(y);
                    lower_covers[y].push(x);
                }
            }
        }
        // height_of(x) = 1 + max over upper covers; process by decreasing up-set size
        let mut heights = vec![0usize; size];
        let mut by_up: Vec<Elem> = (0..size).collect();
        by_up.sort_by_key(|&x| up[x].count());
        for &x in &by_up {
            heights[x] = 1 + upper_covers[x].iter().map(|&y| heights[y]).max().unwrap_or(0);
        }
        Poset { up, down, upper_covers, lower_covers, heights, names: None }
    }

    pub fn empty() -> Poset {
        Self::antichain(0)
    }

    pub fn antichain(size: usize) -> Poset {
        Self::new(size, []).expect("antichain is acyclic")
    }

    /// The chain `0 < 1 < ... < size - 1`.
    pub fn chain(size: usize) -> Poset {
        Self::new(size, (1..size).map(|i| (i - 1, i))).expect("chain is acyclic")
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Poset, PosetError> {
        if names.len() != self.len() {
            return Err(PosetError::NameCount { expected: self.len(), got: names.len() });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of an element: its given name, or its index.
    pub fn name(&self, x: Elem) -> String {
        match &self.names {
            Some(names) => names[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn check(&self, x: Elem) -> Result<(), PosetError> {
        if x < self.len() {
            Ok(())
        } else {
            Err(PosetError::IndexOutOfRange { index: x, size: self.len() })
        }
    }

    /// `x <= y`. Panics on out-of-range indices; see [`Poset::try_leq`].
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn try_leq(&self, x: Elem, y: Elem) -> Result<bool, PosetError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.leq(x, y))
    }

    pub fn comparable(&self, x: Elem, y: Elem) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// Reflexive up-closure `↑x`.
    pub fn up(&self, x: Elem) -> &ElemSet {
        &self.up[x]
    }

    /// Reflexive down-closure `↓x`.
    pub fn down(&self, x: Elem) -> &ElemSet {
        &self.down[x]
    }

    /// Elements covering `x`.
    pub fn covers_up(&self, x: Elem) -> &[Elem] {
        &self.upper_covers[x]
    }

    /// Elements covered by `x`.
    pub fn covers_down(&self, x: Elem) -> &[Elem] {
        &self.lower_covers[x]
    }

    /// Sorted list of Hasse pairs `(lower, upper)`.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut pairs: Vec<_> = (0..self.len())
            .flat_map(|x| self.upper_covers[x].iter().map(move |&y| (x, y)))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn full_set(&self) -> ElemSet {
        ElemSet::full(self.len())
    }

    pub fn empty_set(&self) -> ElemSet {
        ElemSet::empty(self.len())
    }

    pub fn upset_of(&self, set: &ElemSet) -> ElemSet {
        let mut out = self.empty_set();
        for x in set {
            out.union_with(&self.up[x]);
        }
        out
    }

    pub fn downset_of(&self, set: &ElemSet) -> ElemSet {
        let mut out = self.empty_set();
        for x in set {
            out.union_with(&self.down[x]);
        }
        out
    }

    pub fn is_upset(&self, set: &ElemSet) -> bool {
        set.universe() == self.len() && set.iter().all(|x| self.up[x].is_subset(set))
    }

    pub fn is_downset(&self, set: &ElemSet) -> bool {
        set.universe() == self.len() && set.iter().all(|x| self.down[x].is_subset(set))
    }

    pub fn is_antichain(&self, set: &ElemSet) -> bool {
        set.iter().all(|x| self.up[x].intersection(set).count() == 1)
    }

    /// Maximal elements of `within`.
    pub fn max_elements(&self, within: &ElemSet) -> ElemSet {
        let mut out = self.empty_set();
        for x in within {
            if self.up[x].intersection(within).count() == 1 {
                out.insert(x);
            }
        }
        out
    }

    /// Minimal elements of `within`.
    pub fn min_elements(&self, within: &ElemSet) -> ElemSet {
        let mut out = self.empty_set();
        for x in within {
            if self.down[x].intersection(within).count() == 1 {
                out.insert(x);
            }
        }
        out
    }

    pub fn maximal(&self) -> ElemSet {
        self.max_elements(&self.full_set())
    }

    pub fn minimal(&self) -> ElemSet {
        self.min_elements(&self.full_set())
    }

    /// Cardinality of the longest chain; 0 for the empty poset.
    pub fn height(&self) -> usize {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    /// Height of `↑x`; maximal elements have height 1.
    pub fn height_of(&self, x: Elem) -> usize {
        self.heights[x]
    }

    /// All antichains, ordered by size and then lexicographically by their
    /// sorted member lists. The empty antichain comes first.
    pub fn antichains(&self) -> Antichains<'_> {
        Antichains { poset: self, k: 0, stack: Vec::new(), fresh: true }
    }

    /// Number of antichains (equivalently, of upsets).
    pub fn count_antichains(&self) -> u128 {
        fn go(p: &Poset, candidates: ElemSet) -> u128 {
            let Some(x) = candidates.first() else { return 1 };
            let mut without = candidates.clone();
            without.remove(x);
            let mut with = without.clone();
            with.difference_with(&p.up[x]);
            with.difference_with(&p.down[x]);
            go(p, without) + go(p, with)
        }
        go(self, self.full_set())
    }

    /// Induced sub-poset on `subset`, with the map from new to old indices.
    pub fn induced(&self, subset: &ElemSet) -> (Poset, Vec<Elem>) {
        let old: Vec<Elem> = subset.to_vec();
        let n = old.len();
        let up = old
            .iter()
            .map(|&x| ElemSet::from_indices(n, (0..n).filter(|&j| self.leq(x, old[j]))))
            .collect();
        let mut p = Self::from_up_closures(up);
        if let Some(names) = &self.names {
            p.names = Some(old.iter().map(|&x| names[x].clone()).collect());
        }
        (p, old)
    }

    /// The order-dual poset.
    pub fn dual(&self) -> Poset {
        let mut p = Self::from_up_closures(self.down.clone());
        p.names = self.names.clone();
        p
    }

    /// Appends new elements below existing ones. Entry `i` of `covers` lists
    /// the elements the `i`-th new element is covered by; it must be an
    /// antichain of existing elements. New elements are pairwise incomparable.
    pub fn extend_below(&self, covers: &[Vec<Elem>]) -> Poset {
        let old = self.len();
        let size = old + covers.len();
        let mut up: Vec<ElemSet> = self.up.iter().map(|s| s.widened(size)).collect();
        for (i, cover) in covers.iter().enumerate() {
            let mut set = ElemSet::singleton(size, old + i);
            for &a in cover {
                assert!(a < old, "new element may only sit below existing ones");
                set.union_with(&up[a]);
            }
            up.push(set);
        }
        Self::from_up_closures(up)
    }

    /// Identity-free encoding of the strict order under a relabeling, used
    /// for isomorphism canonical forms. `perm[new] = old`.
    fn relation_code(&self, perm: &[Elem]) -> Vec<u64> {
        let n = self.len();
        let mut code = vec![0u64; (n * n).div_ceil(64).max(1)];
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq(perm[i], perm[j]) {
                    let bit = i * n + j;
                    code[bit / 64] |= 1 << (bit % 64);
                }
            }
        }
        code
    }

    /// Canonical form by exhaustive relabeling; only meant for small posets.
    pub fn canonical_code(&self) -> Vec<u64> {
        let n = self.len();
        (0..n)
            .permutations(n)
            .filter(|perm| {
                // a linear extension only; this keeps the search small and is
                // still canonical because every iso class has one
                (0..n).all(|i| (i + 1..n).all(|j| !self.lt(perm[j], perm[i])))
            })
            .map(|perm| self.relation_code(&perm))
            .max()
            .unwrap_or_default()
    }
}

/// Iterator over the antichains of a poset; see [`Poset::antichains`].
pub struct Antichains<'a> {
    poset: &'a Poset,
    k: usize,
    stack: Vec<Elem>,
    fresh: bool,
}

impl Antichains<'_> {
    fn compatible(&self, c: Elem) -> bool {
        self.stack.iter().all(|&s| !self.poset.comparable(s, c))
    }

    /// Finds the next k-antichain after the current stack, or the first one
    /// if `fresh`. Returns false when the size-k level is exhausted.
    fn advance(&mut self) -> bool {
        let n = self.poset.len();
        let mut start = if self.fresh {
            self.fresh = false;
            0
        } else {
            match self.stack.pop() {
                Some(last) => last + 1,
                None => return false,
            }
        };
        loop {
            if self.stack.len() == self.k {
                return true;
            }
            let need = self.k - self.stack.len();
            let found = (start..n).take_while(|&c| n - c >= need).find(|&c| self.compatible(c));
            match found {
                Some(c) => {
                    self.stack.push(c);
                    start = c + 1;
                }
                None => match self.stack.pop() {
                    Some(last) => start = last + 1,
                    None => return false,
                },
            }
        }
    }
}

impl Iterator for Antichains<'_> {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        loop {
            if self.k > self.poset.len() {
                return None;
            }
            let was_fresh = self.fresh;
            if self.advance() {
                return Some(self.stack.clone());
            }
            if was_fresh {
                // no antichain of size k means none larger either
                self.k = self.poset.len() + 1;
                return None;
            }
            self.k += 1;
            self.stack.clear();
            self.fresh = true;
        }
    }
}

/// Largest size accepted by [`posets_up_to_iso`].
pub const MAX_ENUMERATED_POSET: usize = 7;

/// One representative of every isomorphism class of posets of the given
/// size, in a deterministic order.
pub fn posets_up_to_iso(size: usize) -> Result<Vec<Poset>, PosetError> {
    if size > MAX_ENUMERATED_POSET {
        return Err(PosetError::TooLarge { size, guard: MAX_ENUMERATED_POSET });
    }
    let mut level = vec![Poset::empty()];
    for n in 1..=size {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for p in &level {
            // every poset arises from a smaller one by adding a new maximal
            // element on top of some downset
            for antichain in p.antichains() {
                let below = p.downset_of(&ElemSet::from_indices(p.len(), antichain));
                let relations: Vec<_> = below.iter().map(|x| (x, n - 1)).collect();
                let mut up: Vec<ElemSet> = p.up.iter().map(|s| s.widened(n)).collect();
                for (x, _) in &relations {
                    up[*x].insert(n - 1);
                }
                up.push(ElemSet::singleton(n, n - 1));
                let q = Poset::from_up_closures(up);
                if seen.insert(q.canonical_code()) {
                    next.push(q);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// All posets of size `0..=max_size` up to isomorphism, smallest first.
pub fn posets_up_to_iso_upto(max_size: usize) -> Result<Vec<Poset>, PosetError> {
    let mut all = Vec::new();
    for n in 0..=max_size {
        all.extend(posets_up_to_iso(n)?);
    }
    Ok(all)
}
