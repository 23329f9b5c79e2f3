//! Partial order-preserving maps between posets (Köhler morphisms) and
//! their S-poset refinement.

use thiserror::Error;

use crate::poset::Poset;
use crate::set::{Elem, ElemSet};
use crate::upset::{SPoset, Upset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("map has {got} entries for a source of size {expected}")]
    Length { expected: usize, got: usize },
    #[error("image {image} of {x} is outside the target")]
    OutOfRange { x: Elem, image: Elem },
    #[error("{x} < {y} but their images are not strictly ordered")]
    NotStrict { x: Elem, y: Elem },
    #[error("f({x}) < {y} has no lift above {x} in the domain")]
    NoLift { x: Elem, y: Elem },
    #[error("preimage of T is not D ∩ S")]
    PreimageOfT,
    #[error("no zig-zag witness for s = {s}, d = {d}")]
    ZigZag { s: Elem, d: Elem },
    #[error("map is not monotone at {x} <= {y}")]
    NotMonotone { x: Elem, y: Elem },
    #[error("morphisms do not compose: target and source differ")]
    NotComposable,
}

/// A partial map `f: X → Y` with domain `D` such that `x < x'` in `D`
/// implies `f(x) < f(x')`, and `f(x) < y` has a lift `x < z ∈ D` with
/// `f(z) = y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KohlerMorphism<'a> {
    source: &'a Poset,
    target: &'a Poset,
    map: Vec<Option<Elem>>,
}

impl<'a> KohlerMorphism<'a> {
    pub fn new(source: &'a Poset, target: &'a Poset, map: Vec<Option<Elem>>) -> Result<Self, MorphismError> {
        let f = KohlerMorphism { source, target, map };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<(), MorphismError> {
        let (x_, y_) = (self.source, self.target);
        if self.map.len() != x_.len() {
            return Err(MorphismError::Length { expected: x_.len(), got: self.map.len() });
        }
        for (x, image) in self.map.iter().enumerate() {
            if let Some(image) = *image {
                if image >= y_.len() {
                    return Err(MorphismError::OutOfRange { x, image });
                }
            }
        }
        for x in 0..x_.len() {
            let Some(fx) = self.map[x] else { continue };
            for y in x_.up(x).iter().filter(|&y| y != x) {
                if let Some(fy) = self.map[y] {
                    if !y_.lt(fx, fy) {
                        return Err(MorphismError::NotStrict { x, y });
                    }
                }
            }
            for y in y_.up(fx).iter().filter(|&y| y != fx) {
                if !x_.up(x).iter().any(|z| z != x && self.map[z] == Some(y)) {
                    return Err(MorphismError::NoLift { x, y });
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &'a Poset {
        self.source
    }

    pub fn target(&self) -> &'a Poset {
        self.target
    }

    pub fn map(&self) -> &[Option<Elem>] {
        &self.map
    }

    pub fn apply(&self, x: Elem) -> Option<Elem> {
        self.map[x]
    }

    pub fn domain(&self) -> ElemSet {
        ElemSet::from_indices(self.source.len(), (0..self.map.len()).filter(|&x| self.map[x].is_some()))
    }

    pub fn is_total(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }

    pub fn image_of(&self, set: &ElemSet) -> ElemSet {
        ElemSet::from_indices(self.target.len(), set.iter().filter_map(|x| self.map[x]))
    }

    pub fn image(&self) -> ElemSet {
        self.image_of(&self.source.full_set())
    }

    pub fn preimage(&self, set: &ElemSet) -> ElemSet {
        ElemSet::from_indices(
            self.source.len(),
            (0..self.map.len()).filter(|&x| self.map[x].is_some_and(|y| set.contains(y))),
        )
    }

    /// Whether every maximal point of the source lies in the domain; this
    /// is what makes the dual homomorphism preserve 0.
    pub fn is_cofinal(&self) -> bool {
        self.source.maximal().is_subset(&self.domain())
    }

    /// The dual map on upsets: `f*(V) = X ∖ ↓f⁻¹(Y ∖ V)`.
    pub fn pullback(&self, v: &Upset) -> Upset {
        let outside = self.preimage(&v.members().complement());
        Upset::trusted(self.source.downset_of(&outside).complement())
    }

    /// `g ∘ self`, defined on `f⁻¹(D_g)`.
    pub fn then(&self, g: &KohlerMorphism<'a>) -> Result<KohlerMorphism<'a>, MorphismError> {
        if self.target != g.source {
            return Err(MorphismError::NotComposable);
        }
        let map = self.map.iter().map(|fx| fx.and_then(|y| g.map[y])).collect();
        KohlerMorphism::new(self.source, g.target, map)
    }

    /// The set-level condition equivalent to `f*` commuting with the nuclei:
    /// `↑(f(↑x) ∩ T) = f(↑(↑x ∩ S))` for every `x`.
    pub fn satisfies_star(&self, s: &ElemSet, t: &ElemSet) -> bool {
        (0..self.source.len()).all(|x| {
            let left = self.target.upset_of(&self.image_of(self.source.up(x)).intersection(t));
            let right = self.image_of(&self.source.upset_of(&self.source.up(x).intersection(s)));
            left == right
        })
    }

    /// Checks the two pointwise S-morphism clauses.
    pub fn check_s_clauses(&self, s: &ElemSet, t: &ElemSet) -> Result<(), MorphismError> {
        let d = self.domain();
        if self.preimage(t) != d.intersection(s) {
            return Err(MorphismError::PreimageOfT);
        }
        let sd = s.intersection(&d);
        for si in s {
            for di in self.source.up(si).intersection(&d).iter() {
                let fd = self.map[di];
                let ok = self.source.up(si).intersection(&sd).iter().any(|s2| {
                    self.source.up(s2).intersection(&d).iter().any(|d2| self.map[d2] == fd)
                });
                if !ok {
                    return Err(MorphismError::ZigZag { s: si, d: di });
                }
            }
        }
        Ok(())
    }

    /// Factors `f` as `f3 ∘ f2 ∘ f1`: the partial identity onto the domain,
    /// a total onto map, and the inclusion of the image.
    pub fn decompose(&self) -> Decomposition {
        let domain = self.domain();
        let image = self.image();
        let (domain_poset, domain_elems) = self.source.induced(&domain);
        let (image_poset, image_elems) = self.target.induced(&image);
        let mut d_pos = vec![None; self.source.len()];
        for (i, &x) in domain_elems.iter().enumerate() {
            d_pos[x] = Some(i);
        }
        let mut i_pos = vec![usize::MAX; self.target.len()];
        for (i, &y) in image_elems.iter().enumerate() {
            i_pos[y] = i;
        }
        let onto = domain_elems.iter().map(|&x| Some(i_pos[self.map[x].expect("in domain")])).collect();
        let inclusion = image_elems.iter().map(|&y| Some(y)).collect();
        Decomposition { domain_poset, image_poset, restrict: d_pos, onto, inclusion, domain_elems, image_elems }
    }
}

/// The three factors of a Köhler morphism; see [`KohlerMorphism::decompose`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub domain_poset: Poset,
    pub image_poset: Poset,
    /// `domain_elems[i]` is the source element of domain point `i`.
    pub domain_elems: Vec<Elem>,
    /// `image_elems[i]` is the target element of image point `i`.
    pub image_elems: Vec<Elem>,
    restrict: Vec<Option<Elem>>,
    onto: Vec<Option<Elem>>,
    inclusion: Vec<Option<Elem>>,
}

impl Decomposition {
    pub fn restriction<'a>(&'a self, source: &'a Poset) -> Result<KohlerMorphism<'a>, MorphismError> {
        KohlerMorphism::new(source, &self.domain_poset, self.restrict.clone())
    }

    pub fn onto(&self) -> Result<KohlerMorphism<'_>, MorphismError> {
        KohlerMorphism::new(&self.domain_poset, &self.image_poset, self.onto.clone())
    }

    pub fn inclusion<'a>(&'a self, target: &'a Poset) -> Result<KohlerMorphism<'a>, MorphismError> {
        KohlerMorphism::new(&self.image_poset, target, self.inclusion.clone())
    }
}

/// A Köhler morphism between S-posets whose dual homomorphism commutes with
/// the nuclei.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SMorphism<'a> {
    kohler: KohlerMorphism<'a>,
    source: &'a SPoset,
    target: &'a SPoset,
}

impl<'a> SMorphism<'a> {
    pub fn new(source: &'a SPoset, target: &'a SPoset, map: Vec<Option<Elem>>) -> Result<Self, MorphismError> {
        let kohler = KohlerMorphism::new(source.poset(), target.poset(), map)?;
        Self::from_kohler(source, target, kohler)
    }

    pub fn from_kohler(
        source: &'a SPoset,
        target: &'a SPoset,
        kohler: KohlerMorphism<'a>,
    ) -> Result<Self, MorphismError> {
        if kohler.source != source.poset() || kohler.target != target.poset() {
            return Err(MorphismError::NotComposable);
        }
        kohler.check_s_clauses(source.s(), target.s())?;
        Ok(SMorphism { kohler, source, target })
    }

    pub fn kohler(&self) -> &KohlerMorphism<'a> {
        &self.kohler
    }

    pub fn source(&self) -> &'a SPoset {
        self.source
    }

    pub fn target(&self) -> &'a SPoset {
        self.target
    }

    pub fn then(&self, g: &SMorphism<'a>) -> Result<SMorphism<'a>, MorphismError> {
        if self.target != g.source {
            return Err(MorphismError::NotComposable);
        }
        let k = self.kohler.then(&g.kohler)?;
        SMorphism::from_kohler(self.source, g.target, k)
    }
}

/// Turns a total p-morphism (monotone, with lifts along `<=`) into the
/// Köhler morphism defined on the points maximal in their fibre.
pub fn pmorphism_to_kohler<'a>(
    source: &'a Poset,
    target: &'a Poset,
    map: &[Elem],
) -> Result<KohlerMorphism<'a>, MorphismError> {
    if map.len() != source.len() {
        return Err(MorphismError::Length { expected: source.len(), got: map.len() });
    }
    for (x, &image) in map.iter().enumerate() {
        if image >= target.len() {
            return Err(MorphismError::OutOfRange { x, image });
        }
    }
    for x in 0..source.len() {
        for y in source.up(x) {
            if !target.leq(map[x], map[y]) {
                return Err(MorphismError::NotMonotone { x, y });
            }
        }
        for y in target.up(map[x]) {
            if !source.up(x).iter().any(|z| map[z] == y) {
                return Err(MorphismError::NoLift { x, y });
            }
        }
    }
    let partial = (0..source.len())
        .map(|x| {
            let maximal_in_fibre = source.up(x).iter().all(|z| z == x || map[z] != map[x]);
            maximal_in_fibre.then_some(map[x])
        })
        .collect();
    KohlerMorphism::new(source, target, partial)
}

/// Every Köhler morphism `source → target`, by exhaustive search over
/// partial assignments. Only sensible for tiny posets.
pub fn all_kohler_morphisms<'a>(source: &'a Poset, target: &'a Poset) -> Vec<KohlerMorphism<'a>> {
    let n = source.len();
    let choices = target.len() + 1;
    let total = choices.checked_pow(n as u32).expect("search space too large");
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let map = (0..n)
            .map(|_| {
                let v = c % choices;
                c /= choices;
                (v > 0).then(|| v - 1)
            })
            .collect();
        if let Ok(f) = KohlerMorphism::new(source, target, map) {
            out.push(f);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Source `s < d, s < s' < d'` with `S = {s, s'}` and domain `{s', d, d'}`
    /// collapsing `d, d'` onto the top of a two-element chain.
    pub(crate) fn zigzag_example() -> (SPoset, SPoset, Vec<Option<Elem>>) {
        // 0 = s, 1 = s', 2 = d, 3 = d'
        let x = Poset::new(4, [(0, 2), (0, 1), (1, 3)]).unwrap();
        let y = Poset::chain(2);
        (
            SPoset::from_indices(x, [0, 1]).unwrap(),
            SPoset::from_indices(y, [0]).unwrap(),
            vec![None, Some(0), Some(1), Some(1)],
        )
    }

    #[test]
    fn zigzag_example_is_an_s_morphism() {
        let (x, y, map) = zigzag_example();
        let f = SMorphism::new(&x, &y, map).unwrap();
        assert!(f.kohler().satisfies_star(x.s(), y.s()));
        assert!(f.kohler().is_cofinal());
    }

    #[test]
    fn restriction_factor_is_never_an_s_morphism() {
        let (x, _, map) = zigzag_example();
        let y = Poset::chain(2);
        let f = KohlerMorphism::new(x.poset(), &y, map).unwrap();
        let dec = f.decompose();
        let f1 = dec.restriction(x.poset()).unwrap();
        let d = dec.domain_poset.len();
        for bits in 0..1u32 << d {
            let t = ElemSet::from_indices(d, (0..d).filter(|i| bits >> i & 1 == 1));
            assert!(f1.check_s_clauses(x.s(), &t).is_err());
        }
    }

    #[test]
    fn decomposition_recomposes() {
        let (x, y, map) = zigzag_example();
        let f = KohlerMorphism::new(x.poset(), y.poset(), map).unwrap();
        let dec = f.decompose();
        let f1 = dec.restriction(x.poset()).unwrap();
        let f2 = dec.onto().unwrap();
        let f3 = dec.inclusion(y.poset()).unwrap();
        assert!(f2.is_total());
        assert_eq!(f2.image(), dec.image_poset.full_set());
        let f12: Vec<Option<Elem>> = f1.map().iter().map(|a| a.and_then(|i| f2.apply(i))).collect();
        let f123: Vec<Option<Elem>> = f12.iter().map(|a| a.and_then(|i| f3.apply(i))).collect();
        assert_eq!(f123, f.map());
    }

    #[test]
    fn rejects_non_strict_and_missing_lifts() {
        let two = Poset::chain(2);
        let one = Poset::antichain(1);
        assert_eq!(
            KohlerMorphism::new(&two, &one, vec![Some(0), Some(0)]),
            Err(MorphismError::NotStrict { x: 0, y: 1 })
        );
        assert_eq!(KohlerMorphism::new(&one, &two, vec![Some(0)]), Err(MorphismError::NoLift { x: 0, y: 1 }));
        // collapsing the chain is fine once the lower point is dropped
        assert!(KohlerMorphism::new(&two, &one, vec![None, Some(0)]).is_ok());
    }

    #[test]
    fn pmorphism_keeps_fibre_maxima() {
        let two = Poset::chain(2);
        let one = Poset::antichain(1);
        let f = pmorphism_to_kohler(&two, &one, &[0, 0]).unwrap();
        assert_eq!(f.map(), &[None, Some(0)]);
    }

    #[test]
    fn composition_domain_is_preimage() {
        let three = Poset::chain(3);
        let two = Poset::chain(2);
        let fs = all_kohler_morphisms(&three, &two);
        let gs = all_kohler_morphisms(&two, &two);
        for f in &fs {
            for g in &gs {
                let h = f.then(g).unwrap();
                assert_eq!(h.domain(), f.preimage(&g.domain()));
            }
        }
    }
}
