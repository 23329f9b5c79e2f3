//! Layer-by-layer construction of universal models and embeddings of
//! irreducible models into them.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{Model, ModelError, Variety, Violation};
use crate::poset::Poset;
use crate::set::{Color, Elem, ElemSet, MAX_COLORS};
use crate::upset::SPoset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Point outside `S`.
    R,
    /// Point in `S`.
    S,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::R => "r",
            Kind::S => "s",
        })
    }
}

/// A point of a universal model, identified by its kind, its upper cover
/// antichain and its color.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UElement {
    pub kind: Kind,
    pub cover: Vec<Elem>,
    pub color: Color,
    pub layer: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_layer: usize,
    pub max_elements: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_layer: 64, max_elements: 200_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationReason {
    MaxLayer,
    MaxElements,
}

/// Why a build stopped before the construction terminated. The model keeps
/// every completed layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub reason: TruncationReason,
    /// The first layer that was not completed (1-based).
    pub layer: usize,
    /// Points of that layer generated before the build stopped.
    pub generated: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("at most {MAX_COLORS} colors are supported")]
    TooManyColors,
}

/// A (possibly truncated) universal model together with the identity of
/// every point.
#[derive(Clone, Debug)]
pub struct LayeredModel {
    variety: Variety,
    model: Model,
    elements: Vec<UElement>,
    layer_sizes: Vec<usize>,
    truncation: Option<Truncation>,
    index: HashMap<(Kind, Vec<Elem>, Color), Elem>,
}

/// Counts of points by color cardinality `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorClassCounts {
    pub d: usize,
    /// Points colored by exactly `d` colors.
    pub points: usize,
    /// Those outside `S`.
    pub r: usize,
    /// `S`-points whose color equals the color of their cover set.
    pub s_equal: usize,
    /// `S`-points whose color is strictly smaller.
    pub s_smaller: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerStatistics {
    pub layer_sizes: Vec<usize>,
    pub by_color: Vec<ColorClassCounts>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("model has {got} colors but the universal model has {expected}")]
    ColorCount { expected: usize, got: usize },
    #[error("model is not irreducible: {0:?}")]
    NotIrreducible(Violation),
    #[error("model needs layer {needed} but the universal model was truncated after {available} layers")]
    Truncated { needed: usize, available: usize },
    #[error("no universal point matches element {0}")]
    Missing(Elem),
    #[error("embedding failed verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Builds the universal model of a variety on `n` colors up to the given
/// limits. Hitting a limit is reported through [`LayeredModel::truncation`].
pub fn build_universal_model(n: usize, variety: Variety, limits: Limits) -> Result<LayeredModel, BuildError> {
    if n > MAX_COLORS {
        return Err(BuildError::TooManyColors);
    }
    let full = Color::full(n);
    let nuclear = variety.is_nuclear();
    let bounded = variety.is_bounded();

    let mut first = Vec::new();
    for kind in [Kind::R, Kind::S] {
        let allowed = match variety {
            Variety::Dense => kind == Kind::S,
            _ => kind == Kind::R || nuclear,
        };
        if !allowed {
            continue;
        }
        for color in Color::all(n) {
            if bounded || color != full {
                first.push(UElement { kind, cover: Vec::new(), color, layer: 1 });
            }
        }
    }

    let mut builder = Builder { variety, n, elements: Vec::new(), poset: Poset::empty(), layer_start: Vec::new() };
    let mut truncation = None;
    if first.len() > limits.max_elements {
        truncation = Some(Truncation { reason: TruncationReason::MaxElements, layer: 1, generated: first.len() });
    } else if limits.max_layer == 0 {
        if !first.is_empty() {
            truncation = Some(Truncation { reason: TruncationReason::MaxLayer, layer: 1, generated: 0 });
        }
    } else {
        builder.push_layer(first);
        while !builder.last_layer_is_empty() {
            let next_layer = builder.layer_start.len() + 1;
            if builder.layer_start.len() >= limits.max_layer {
                // only report truncation if the construction would continue
                if let Err(Overflow(_)) = builder.next_layer(0) {
                    truncation = Some(Truncation { reason: TruncationReason::MaxLayer, layer: next_layer, generated: 0 });
                }
                break;
            }
            let budget = limits.max_elements - builder.elements.len();
            match builder.next_layer(budget) {
                Ok(layer) => {
                    if layer.is_empty() {
                        break;
                    }
                    builder.push_layer(layer);
                }
                Err(Overflow(generated)) => {
                    truncation =
                        Some(Truncation { reason: TruncationReason::MaxElements, layer: next_layer, generated });
                    break;
                }
            }
        }
    }
    Ok(builder.finish(truncation))
}

struct Builder {
    variety: Variety,
    n: usize,
    elements: Vec<UElement>,
    poset: Poset,
    layer_start: Vec<usize>,
}

/// Layer generation exceeded its budget after producing this many points.
struct Overflow(usize);

struct Search<'a> {
    b: &'a Builder,
    candidates: Vec<Elem>,
    first_old: usize,
    reaches_r1: Vec<bool>,
    budget: usize,
    out: Vec<UElement>,
    layer: usize,
}

impl Builder {
    fn last_layer_is_empty(&self) -> bool {
        match self.layer_start.last() {
            Some(&start) => start == self.elements.len(),
            None => true,
        }
    }

    fn push_layer(&mut self, mut layer: Vec<UElement>) {
        layer.sort_by(|a, b| {
            (a.cover.len(), &a.cover, a.kind, a.color).cmp(&(b.cover.len(), &b.cover, b.kind, b.color))
        });
        self.layer_start.push(self.elements.len());
        let covers: Vec<Vec<Elem>> = layer.iter().map(|e| e.cover.clone()).collect();
        self.poset = self.poset.extend_below(&covers);
        self.elements.extend(layer);
    }

    /// Generates the next layer from antichains meeting the last layer.
    fn next_layer(&self, budget: usize) -> Result<Vec<UElement>, Overflow> {
        let lo = *self.layer_start.last().expect("first layer exists");
        let hi = self.elements.len();
        let layer1_end = self.layer_start.get(1).copied().unwrap_or(hi);
        let reaches_r1 = (0..hi)
            .map(|x| self.poset.up(x).iter().any(|y| y < layer1_end && self.elements[y].kind == Kind::R))
            .collect();
        let mut search = Search {
            b: self,
            candidates: (lo..hi).chain(0..lo).collect(),
            first_old: hi - lo,
            reaches_r1,
            budget,
            out: Vec::new(),
            layer: self.layer_start.len() + 1,
        };
        let mut chosen = Vec::new();
        search.dfs(0, &mut chosen, &ElemSet::empty(hi), Color::full(self.n), true, true)?;
        Ok(search.out)
    }

    fn finish(self, truncation: Option<Truncation>) -> LayeredModel {
        let total = self.elements.len();
        let mut layer_sizes = Vec::new();
        for (i, &start) in self.layer_start.iter().enumerate() {
            let end = self.layer_start.get(i + 1).copied().unwrap_or(total);
            if end > start {
                layer_sizes.push(end - start);
            }
        }
        let mut names = Vec::with_capacity(total);
        for (i, &start) in self.layer_start.iter().enumerate() {
            let end = self.layer_start.get(i + 1).copied().unwrap_or(total);
            for (ordinal, e) in self.elements[start..end].iter().enumerate() {
                names.push(format!("{}@{}#{:02}{}", e.kind, i + 1, ordinal, e.color));
            }
        }
        let poset = self.poset.with_names(names).expect("one name per element");
        let s = ElemSet::from_indices(total, (0..total).filter(|&x| self.elements[x].kind == Kind::S));
        let colors = self.elements.iter().map(|e| e.color).collect();
        let model = Model::new(SPoset::new(poset, s).expect("same carrier"), self.n, colors)
            .expect("construction yields a monotone coloring");
        let index = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.kind, e.cover.clone(), e.color), i))
            .collect();
        LayeredModel { variety: self.variety, model, elements: self.elements, layer_sizes, truncation, index }
    }
}

impl Search<'_> {
    fn emit(&mut self, alpha: &[Elem], color: Color, all_s: bool, gate: bool) -> Result<(), Overflow> {
        let variety = self.b.variety;
        let mut cover = alpha.to_vec();
        cover.sort_unstable();
        let mut produced = Vec::new();
        for sigma in color.subsets().filter(|&s| s != color) {
            produced.push(UElement { kind: Kind::R, cover: cover.clone(), color: sigma, layer: self.layer });
            if variety.is_nuclear() && gate {
                produced.push(UElement { kind: Kind::S, cover: cover.clone(), color: sigma, layer: self.layer });
            }
        }
        if variety.is_nuclear() && gate && !all_s {
            produced.push(UElement { kind: Kind::S, cover, color, layer: self.layer });
        }
        if self.out.len() + produced.len() > self.budget {
            return Err(Overflow(self.out.len() + produced.len()));
        }
        self.out.extend(produced);
        Ok(())
    }

    fn dfs(
        &mut self,
        start: usize,
        chosen: &mut Vec<Elem>,
        blocked: &ElemSet,
        color: Color,
        all_s: bool,
        gate: bool,
    ) -> Result<(), Overflow> {
        let nuclear = self.b.variety.is_nuclear();
        for pos in start..self.candidates.len() {
            if chosen.is_empty() && pos >= self.first_old {
                break;
            }
            let c = self.candidates[pos];
            if blocked.contains(c) {
                continue;
            }
            let e = &self.b.elements[c];
            let next_color = color.intersection(e.color);
            let next_gate = gate && !(self.b.variety == Variety::LocallyDense && self.reaches_r1[c]);
            // extensions only shrink the color and keep the gate closed, so
            // nothing below this antichain produces a point
            if next_color.is_empty() && !(nuclear && next_gate) {
                continue;
            }
            let next_all_s = all_s && e.kind == Kind::S;
            chosen.push(c);
            self.emit(chosen, next_color, next_all_s, next_gate)?;
            let mut next_blocked = blocked.union(self.b.poset.up(c));
            next_blocked.union_with(self.b.poset.down(c));
            self.dfs(pos + 1, chosen, &next_blocked, next_color, next_all_s, next_gate)?;
            chosen.pop();
        }
        Ok(())
    }
}

impl LayeredModel {
    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn poset(&self) -> &Poset {
        self.model.poset()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[UElement] {
        &self.elements
    }

    pub fn element(&self, x: Elem) -> &UElement {
        &self.elements[x]
    }

    /// Sizes of the completed layers.
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn truncation(&self) -> Option<Truncation> {
        self.truncation
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation.is_some()
    }

    pub fn height(&self) -> usize {
        self.poset().height()
    }

    pub fn name(&self, x: Elem) -> String {
        self.poset().name(x)
    }

    /// Looks up a point by its identity; `cover` need not be sorted.
    pub fn find(&self, kind: Kind, cover: &[Elem], color: Color) -> Option<Elem> {
        let mut cover = cover.to_vec();
        cover.sort_unstable();
        self.index.get(&(kind, cover, color)).copied()
    }

    /// Reassembles a layered model from stored parts, rebuilding the poset
    /// from the recorded cover sets.
    pub fn from_parts(
        variety: Variety,
        n: usize,
        elements: Vec<UElement>,
        truncation: Option<Truncation>,
    ) -> Result<LayeredModel, String> {
        if n > MAX_COLORS {
            return Err("too many colors".into());
        }
        let mut builder = Builder { variety, n, elements: Vec::new(), poset: Poset::empty(), layer_start: Vec::new() };
        let mut pos = 0;
        let mut layer = 1;
        while pos < elements.len() {
            let end = elements[pos..].iter().position(|e| e.layer != layer).map_or(elements.len(), |k| pos + k);
            if end == pos {
                return Err(format!("layer {layer} is empty or out of order"));
            }
            let chunk = elements[pos..end].to_vec();
            if chunk.iter().any(|e| e.cover.iter().any(|&c| c >= pos)) {
                return Err(format!("layer {layer} refers to points outside earlier layers"));
            }
            builder.push_layer(chunk);
            if builder.elements[pos..end] != elements[pos..end] {
                return Err(format!("layer {layer} is not in canonical order"));
            }
            pos = end;
            layer += 1;
        }
        Ok(builder.finish(truncation))
    }

    pub fn statistics(&self) -> LayerStatistics {
        let n = self.n();
        let by_color = (0..=n)
            .map(|d| {
                let mut counts = ColorClassCounts { d, points: 0, r: 0, s_equal: 0, s_smaller: 0 };
                for (x, e) in self.elements.iter().enumerate() {
                    if e.color.len() != d {
                        continue;
                    }
                    counts.points += 1;
                    match e.kind {
                        Kind::R => counts.r += 1,
                        Kind::S => {
                            if e.color == self.model.color_of_set(self.poset().covers_up(x).iter().copied()) {
                                counts.s_equal += 1;
                            } else {
                                counts.s_smaller += 1;
                            }
                        }
                    }
                }
                counts
            })
            .collect();
        LayerStatistics { layer_sizes: self.layer_sizes.clone(), by_color }
    }

    /// Points carrying every color.
    pub fn full_color_points(&self) -> Vec<Elem> {
        let full = Color::full(self.n());
        (0..self.len()).filter(|&x| self.elements[x].color == full).collect()
    }

    /// Whether later layers can add no further full-color points.
    ///
    /// A full-color point can only come from an antichain of full-color
    /// points that meets the last completed layer and is not contained in
    /// `S`, so it suffices that no such antichain exists.
    pub fn full_color_closed(&self) -> bool {
        let Some(&last) = self.layer_sizes.last() else { return true };
        let start = self.len() - last;
        let full = self.full_color_points();
        let p = self.poset();
        if !self.variety.is_nuclear() {
            // only rule 1 exists and it never keeps the full color
            return true;
        }
        let sp = self.model.sposet();
        for &f in full.iter().filter(|&&x| x >= start) {
            if !sp.in_s(f) {
                return false;
            }
            if full.iter().any(|&g| !sp.in_s(g) && !p.comparable(f, g)) {
                return false;
            }
        }
        true
    }

    /// Embeds an irreducible model as an upset, matching `S` and colors.
    /// Returns the image of each point.
    pub fn embed(&self, m: &Model) -> Result<Vec<Elem>, EmbedError> {
        if m.n() != self.n() {
            return Err(EmbedError::ColorCount { expected: self.n(), got: m.n() });
        }
        if let Some(v) = m.violation(self.variety)? {
            return Err(EmbedError::NotIrreducible(v));
        }
        let p = m.poset();
        let mut order: Vec<Elem> = (0..m.len()).collect();
        order.sort_by_key(|&y| p.height_of(y));
        let mut image = vec![usize::MAX; m.len()];
        for &y in &order {
            let kind = if self.variety.is_nuclear() && m.sposet().in_s(y) { Kind::S } else { Kind::R };
            let cover: Vec<Elem> = p.covers_up(y).iter().map(|&z| image[z]).collect();
            match self.find(kind, &cover, m.color(y)) {
                Some(x) => image[y] = x,
                None => {
                    let needed = p.height_of(y);
                    if self.is_truncated() && needed > self.layer_sizes.len() {
                        return Err(EmbedError::Truncated { needed, available: self.layer_sizes.len() });
                    }
                    return Err(EmbedError::Missing(y));
                }
            }
        }
        self.verify_embedding(m, &image).map_err(EmbedError::Verification)?;
        Ok(image)
    }

    /// Checks that `image` is an order embedding onto an upset preserving
    /// colors and, for nuclear varieties, `S`.
    pub fn verify_embedding(&self, m: &Model, image: &[Elem]) -> Result<(), String> {
        let p = m.poset();
        let q = self.poset();
        let mut img = ElemSet::empty(self.len());
        for y in 0..m.len() {
            if img.contains(image[y]) {
                return Err(format!("element {y} shares its image"));
            }
            img.insert(image[y]);
            if self.model.color(image[y]) != m.color(y) {
                return Err(format!("color of {y} not preserved"));
            }
            if self.variety.is_nuclear() && self.model.sposet().in_s(image[y]) != m.sposet().in_s(y) {
                return Err(format!("S-membership of {y} not preserved"));
            }
        }
        for y in 0..m.len() {
            for z in 0..m.len() {
                if p.leq(y, z) != q.leq(image[y], image[z]) {
                    return Err(format!("order between {y} and {z} not preserved"));
                }
            }
        }
        if !q.is_upset(&img) {
            return Err("image is not an upset".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(n: usize, v: Variety) -> Vec<usize> {
        build_universal_model(n, v, Limits::default()).unwrap().layer_sizes().to_vec()
    }

    #[test]
    fn small_models_have_expected_layers() {
        assert_eq!(sizes(0, Variety::Nis), Vec::<usize>::new());
        assert_eq!(sizes(1, Variety::Nis), vec![2, 2]);
        assert_eq!(sizes(0, Variety::NisBot), vec![2, 2]);
        assert_eq!(sizes(1, Variety::Dense), vec![2, 2, 4]);
        assert_eq!(sizes(1, Variety::LocallyDense), vec![4, 4, 4]);
        assert_eq!(sizes(2, Variety::Is), vec![3, 2]);
        assert_eq!(sizes(1, Variety::Is), vec![1]);
        assert_eq!(sizes(3, Variety::Is), vec![7, 24, 30]);
    }

    #[test]
    fn one_color_nis_model() {
        let lm = build_universal_model(1, Variety::Nis, Limits::default()).unwrap();
        assert!(!lm.is_truncated());
        let r = lm.find(Kind::R, &[], Color::EMPTY).unwrap();
        let s = lm.find(Kind::S, &[], Color::EMPTY).unwrap();
        let a = lm.find(Kind::S, &[r], Color::EMPTY).unwrap();
        let b = lm.find(Kind::S, &[r, s], Color::EMPTY).unwrap();
        assert_eq!(lm.poset().covers().len(), 3);
        assert!(lm.poset().lt(a, r) && lm.poset().lt(b, r) && lm.poset().lt(b, s));
        assert_eq!(lm.model().sposet().s().count(), 3);
        assert_eq!(lm.name(r), "r@1#00{}");
    }

    #[test]
    fn truncation_reported() {
        let lm = build_universal_model(2, Variety::Nis, Limits { max_layer: 2, ..Limits::default() }).unwrap();
        assert_eq!(lm.layer_sizes(), &[6, 68]);
        assert_eq!(lm.truncation().unwrap().reason, TruncationReason::MaxLayer);
        let lm = build_universal_model(2, Variety::Nis, Limits { max_layer: 64, max_elements: 1000 }).unwrap();
        assert_eq!(lm.layer_sizes(), &[6, 68]);
        assert_eq!(lm.truncation().unwrap().reason, TruncationReason::MaxElements);
        // a limit that is not binding is not a truncation
        let lm = build_universal_model(1, Variety::Nis, Limits { max_layer: 2, ..Limits::default() }).unwrap();
        assert!(!lm.is_truncated());
    }

    #[test]
    fn locally_dense_budget_binds() {
        let lm = build_universal_model(2, Variety::LocallyDense, Limits { max_layer: 64, max_elements: 2000 }).unwrap();
        assert_eq!(lm.layer_sizes(), &[8, 40]);
        assert_eq!(lm.truncation().unwrap().reason, TruncationReason::MaxElements);
    }

    #[test]
    fn embeds_into_itself_as_identity() {
        let lm = build_universal_model(1, Variety::Dense, Limits::default()).unwrap();
        let e = lm.embed(lm.model()).unwrap();
        assert_eq!(e, (0..lm.len()).collect::<Vec<_>>());
    }

    #[test]
    fn embeds_single_point() {
        let lm = build_universal_model(1, Variety::Nis, Limits::default()).unwrap();
        let sp = SPoset::from_indices(Poset::antichain(1), [0]).unwrap();
        let m = Model::new(sp, 1, vec![Color::EMPTY]).unwrap();
        let e = lm.embed(&m).unwrap();
        assert_eq!(e, vec![lm.find(Kind::S, &[], Color::EMPTY).unwrap()]);
    }

    #[test]
    fn parts_round_trip() {
        let lm = build_universal_model(2, Variety::IsBot, Limits::default()).unwrap();
        let again = LayeredModel::from_parts(lm.variety(), lm.n(), lm.elements().to_vec(), None).unwrap();
        assert_eq!(again.model(), lm.model());
    }
}
