//! Colored S-posets (models) and irreducibility.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Signature, UpsetAlgebra};
use crate::poset::Poset;
use crate::set::{Color, Elem, ElemSet, MAX_COLORS};
use crate::upset::{SPoset, Upset};

/// The varieties of algebras handled by the library.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variety {
    Nis,
    NisBot,
    Is,
    IsBot,
    Dense,
    LocallyDense,
}

impl Variety {
    pub const ALL: [Variety; 6] =
        [Variety::Nis, Variety::NisBot, Variety::Is, Variety::IsBot, Variety::Dense, Variety::LocallyDense];

    pub fn name(self) -> &'static str {
        match self {
            Variety::Nis => "nis",
            Variety::NisBot => "nis-bot",
            Variety::Is => "is",
            Variety::IsBot => "is-bot",
            Variety::Dense => "dense",
            Variety::LocallyDense => "locally-dense",
        }
    }

    /// Whether the signature has a nucleus.
    pub fn is_nuclear(self) -> bool {
        !matches!(self, Variety::Is | Variety::IsBot)
    }

    /// Whether the signature has the constant 0.
    pub fn is_bounded(self) -> bool {
        !matches!(self, Variety::Nis | Variety::Is)
    }

    pub fn signature(self) -> Signature {
        Signature { meet: true, imp: true, nucleus: self.is_nuclear(), bottom: self.is_bounded() }
    }

    /// Whether an S-poset can carry a model of this variety: every maximal
    /// point in `S` for dense algebras, every maximal point above `S` in `S`
    /// for locally dense ones.
    pub fn admits(self, sp: &SPoset) -> bool {
        let max = sp.poset().maximal();
        match self {
            Variety::Dense => max.is_subset(sp.s()),
            Variety::LocallyDense => sp.poset().upset_of(sp.s()).intersection(&max).is_subset(sp.s()),
            _ => true,
        }
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown variety `{0}` (expected one of nis, nis-bot, is, is-bot, dense, locally-dense)")]
pub struct UnknownVariety(pub String);

impl FromStr for Variety {
    type Err = UnknownVariety;

    fn from_str(s: &str) -> Result<Variety, UnknownVariety> {
        Variety::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| UnknownVariety(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("expected {expected} colors, got {got}")]
    ColorCount { expected: usize, got: usize },
    #[error("color of element {0} uses a color above n")]
    ColorRange(Elem),
    #[error("coloring is not monotone: {0} <= {1} but its color is not contained in theirs")]
    NotMonotone(Elem, Elem),
    #[error("at most {MAX_COLORS} colors are supported")]
    TooManyColors,
    #[error("generator {0} is not an upset of the poset")]
    BadGenerator(usize),
    #[error("S-poset does not satisfy the {0} precondition")]
    Precondition(Variety),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A finite S-poset with a monotone coloring by subsets of `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    sposet: SPoset,
    n: usize,
    colors: Vec<Color>,
}

/// The clause of the coloring criterion that fails, as a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "kebab-case")]
pub enum Violation {
    /// The point has the color of its cover set without being a
    /// distinguishable `S`-point.
    Redundant { x: Elem },
    /// Two points have the same covers, color and `S`-membership.
    Duplicate { x: Elem, y: Elem },
    /// The generators do not generate the whole algebra (reported when no
    /// structural criterion applies).
    NotGenerated,
}

impl Model {
    pub fn new(sposet: SPoset, n: usize, colors: Vec<Color>) -> Result<Model, ModelError> {
        if n > MAX_COLORS {
            return Err(ModelError::TooManyColors);
        }
        if colors.len() != sposet.len() {
            return Err(ModelError::ColorCount { expected: sposet.len(), got: colors.len() });
        }
        let full = Color::full(n);
        for (x, c) in colors.iter().enumerate() {
            if !c.is_subset(full) {
                return Err(ModelError::ColorRange(x));
            }
        }
        let p = sposet.poset();
        for x in 0..p.len() {
            for &y in p.covers_up(x) {
                if !colors[x].is_subset(colors[y]) {
                    return Err(ModelError::NotMonotone(x, y));
                }
            }
        }
        Ok(Model { sposet, n, colors })
    }

    /// Colors a poset by upsets: color `i` holds exactly on `gens[i - 1]`.
    pub fn from_upsets(sposet: SPoset, gens: &[Upset]) -> Result<Model, ModelError> {
        if gens.len() > MAX_COLORS {
            return Err(ModelError::TooManyColors);
        }
        for (i, g) in gens.iter().enumerate() {
            if g.members().universe() != sposet.len() || !sposet.poset().is_upset(g.members()) {
                return Err(ModelError::BadGenerator(i + 1));
            }
        }
        let colors = (0..sposet.len())
            .map(|x| Color::from_colors((0..gens.len()).filter(|&i| gens[i].contains(x)).map(|i| i + 1)))
            .collect();
        Model::new(sposet, gens.len(), colors)
    }

    pub fn sposet(&self) -> &SPoset {
        &self.sposet
    }

    pub fn poset(&self) -> &Poset {
        self.sposet.poset()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sposet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sposet.is_empty()
    }

    pub fn color(&self, x: Elem) -> Color {
        self.colors[x]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    /// Colors common to all points of `set`; all colors for the empty set.
    pub fn color_of_set(&self, set: impl IntoIterator<Item = Elem>) -> Color {
        set.into_iter().fold(Color::full(self.n), |acc, x| acc.intersection(self.colors[x]))
    }

    /// The upset where color `i` (1-based) holds.
    pub fn generator(&self, i: usize) -> Upset {
        let members = ElemSet::from_indices(self.len(), (0..self.len()).filter(|&x| self.colors[x].contains(i)));
        Upset::new(self.poset(), members).expect("monotone coloring gives upsets")
    }

    pub fn generators(&self) -> Vec<Upset> {
        (1..=self.n).map(|i| self.generator(i)).collect()
    }

    /// The submodel on an upset, with the map from new to old indices.
    pub fn restrict_to_upset(&self, u: &Upset) -> (Model, Vec<Elem>) {
        let (p, map) = self.poset().induced(u.members());
        let s = ElemSet::from_indices(map.len(), (0..map.len()).filter(|&i| self.sposet.in_s(map[i])));
        let colors = map.iter().map(|&x| self.colors[x]).collect();
        let sp = SPoset::new(p, s).expect("same carrier");
        (Model { sposet: sp, n: self.n, colors }, map)
    }

    /// First failing clause of the structural irreducibility criterion, or
    /// of the generation test for varieties without one.
    pub fn violation(&self, variety: Variety) -> Result<Option<Violation>, ModelError> {
        if !variety.admits(&self.sposet) {
            return Err(ModelError::Precondition(variety));
        }
        match variety {
            Variety::Dense | Variety::LocallyDense => {
                Ok((!self.generates_by_oracle(variety)?).then_some(Violation::NotGenerated))
            }
            _ => Ok(self.structural_violation(variety)),
        }
    }

    pub fn is_irreducible(&self, variety: Variety) -> Result<bool, ModelError> {
        Ok(self.violation(variety)?.is_none())
    }

    fn structural_violation(&self, variety: Variety) -> Option<Violation> {
        let p = self.poset();
        let nuclear = variety.is_nuclear();
        let maximal = p.maximal();
        let covers_color = |x: Elem| self.color_of_set(p.covers_up(x).iter().copied());
        for x in 0..p.len() {
            if variety.is_bounded() && maximal.contains(x) {
                continue;
            }
            if self.colors[x] == covers_color(x) {
                let excused = nuclear
                    && self.sposet.in_s(x)
                    && !p.covers_up(x).iter().all(|&y| self.sposet.in_s(y));
                if !excused {
                    return Some(Violation::Redundant { x });
                }
            }
        }
        for x in 0..p.len() {
            for y in x + 1..p.len() {
                if p.covers_up(x) == p.covers_up(y)
                    && self.colors[x] == self.colors[y]
                    && (!nuclear || self.sposet.in_s(x) == self.sposet.in_s(y))
                {
                    return Some(Violation::Duplicate { x, y });
                }
            }
        }
        None
    }

    /// Whether the coloring generates `Up(X)` in the variety's signature,
    /// decided by computing the closure of the generators.
    pub fn generates_by_oracle(&self, variety: Variety) -> Result<bool, ModelError> {
        let ua = UpsetAlgebra::new(self.poset())?;
        Ok(self.generates_in(&ua, variety))
    }

    /// Oracle check against a precomputed `Up(X)` of this model's poset.
    pub fn generates_in(&self, ua: &UpsetAlgebra, variety: Variety) -> bool {
        let alg = if variety.is_nuclear() {
            ua.nuclear(self.sposet.s(), variety.is_bounded())
        } else {
            ua.algebra().clone()
        };
        let gens: Vec<usize> = self.generators().iter().map(|g| ua.index_of(g).expect("generator is an upset")).collect();
        alg.closure(gens, variety.signature()).count() == ua.len()
    }
}
