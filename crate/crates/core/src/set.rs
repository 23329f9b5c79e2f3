//! Small fixed-universe bitsets and color sets.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

/// Index of an element in a finite carrier `0..n`.
pub type Elem = usize;

/// A subset of a fixed universe `0..len`, stored as a bitset.
///
/// Sets over different universes are never equal, so a carrier mismatch
/// shows up as inequality rather than as silent truncation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElemSet {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl ElemSet {
    pub fn empty(len: usize) -> Self {
        ElemSet { len, words: SmallVec::from_elem(0, word_count(len)) }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for (w, word) in s.words.iter_mut().enumerate() {
            let lo = w * 64;
            let hi = (lo + 64).min(len);
            *word = if hi - lo == 64 { u64::MAX } else { (1u64 << (hi - lo)) - 1 };
        }
        s
    }

    pub fn singleton(len: usize, x: Elem) -> Self {
        let mut s = Self::empty(len);
        s.insert(x);
        s
    }

    /// Builds a set from indices. Panics if an index is outside the universe.
    pub fn from_indices(len: usize, items: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Self::empty(len);
        for x in items {
            s.insert(x);
        }
        s
    }

    /// Size of the universe, not of the set.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn contains(&self, x: Elem) -> bool {
        x < self.len && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: Elem) {
        assert!(x < self.len, "element {x} outside universe of size {}", self.len);
        self.words[x / 64] |= 1 << (x % 64);
    }

    pub fn remove(&mut self, x: Elem) {
        if x < self.len {
            self.words[x / 64] &= !(1 << (x % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<Elem> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { set: self, word: 0, bits: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &ElemSet) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &ElemSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &ElemSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &ElemSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &ElemSet) -> ElemSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &ElemSet) -> ElemSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn complement(&self) -> ElemSet {
        ElemSet::full(self.len).difference(self)
    }

    /// Same members, larger universe. Used when a poset grows by new elements.
    pub fn widened(&self, len: usize) -> ElemSet {
        assert!(len >= self.len);
        let mut s = ElemSet::empty(len);
        for (a, b) in s.words.iter_mut().zip(&self.words) {
            *a = *b;
        }
        s
    }

    /// Compares member lists lexicographically.
    pub fn cmp_lex(&self, other: &ElemSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Iter<'a> {
    set: &'a ElemSet,
    word: usize,
    bits: u64,
}

impl Iterator for Iter<'_> {
    type Item = Elem;

    fn next(&mut self) -> Option<Elem> {
        loop {
            if self.bits != 0 {
                let tz = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(self.word * 64 + tz);
            }
            self.word += 1;
            if self.word >= self.set.words.len() {
                return None;
            }
            self.bits = self.set.words[self.word];
        }
    }
}

impl<'a> IntoIterator for &'a ElemSet {
    type Item = Elem;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

/// Largest number of colors (propositional variables) supported.
pub const MAX_COLORS: usize = 31;

/// A subset of the colors `{1, ..., n}`, bit `i - 1` standing for color `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Color(u32);

impl Color {
    pub const EMPTY: Color = Color(0);

    pub fn full(n: usize) -> Color {
        assert!(n <= MAX_COLORS, "at most {MAX_COLORS} colors are supported");
        Color(((1u64 << n) - 1) as u32)
    }

    pub fn from_bits(bits: u32) -> Color {
        Color(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Builds a color from 1-based color numbers.
    pub fn from_colors(colors: impl IntoIterator<Item = usize>) -> Color {
        let mut bits = 0u32;
        for c in colors {
            assert!((1..=MAX_COLORS).contains(&c), "color {c} out of range");
            bits |= 1 << (c - 1);
        }
        Color(bits)
    }

    pub fn contains(self, color: usize) -> bool {
        (1..=MAX_COLORS).contains(&color) && self.0 >> (color - 1) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Color) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Color) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersection(self, other: Color) -> Color {
        Color(self.0 & other.0)
    }

    /// The 1-based colors in increasing order.
    pub fn colors(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.0 >> i & 1 == 1).map(|i| i + 1)
    }

    /// Highest color number used, 0 for the empty color.
    pub fn max_color(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// All subsets of `{1..n}` in increasing bit order.
    pub fn all(n: usize) -> impl Iterator<Item = Color> {
        let full = Color::full(n).0 as u64;
        (0..=full).map(|b| Color(b as u32))
    }

    /// All subsets of `self`, in increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = Color> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(Color(cur))
        })
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.colors().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// Serialized as the sorted list of 1-based color numbers.
impl Serialize for Color {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.colors())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Color, D::Error> {
        let colors = Vec::<usize>::deserialize(deserializer)?;
        if let Some(bad) = colors.iter().find(|c| !(1..=MAX_COLORS).contains(c)) {
            return Err(serde::de::Error::custom(format!("color {bad} out of range")));
        }
        Ok(Color::from_colors(colors))
    }
}

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
