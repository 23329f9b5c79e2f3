//! Homomorphisms of finite algebras and the maps relating them to
//! morphisms of their dual S-posets.

use thiserror::Error;

use crate::algebra::{Dual, FiniteAlgebra, Signature, UpsetAlgebra};
use crate::morphism::{KohlerMorphism, MorphismError, SMorphism};
use crate::set::{Elem, ElemSet};
use crate::upset::SPoset;

/// Which optional operations a homomorphism must preserve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct HomKind {
    pub nuclear: bool,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualityError {
    #[error("map has {got} entries for a source of size {expected}")]
    Length { expected: usize, got: usize },
    #[error("image {0} is outside the target")]
    OutOfRange(usize),
    #[error("top is not preserved")]
    Top,
    #[error("meet of {0} and {1} is not preserved")]
    Meet(usize, usize),
    #[error("implication from {0} to {1} is not preserved")]
    Imp(usize, usize),
    #[error("nucleus is not preserved at {0}")]
    Nucleus(usize),
    #[error("bottom is not preserved")]
    Bottom,
    #[error("a nuclear homomorphism needs nuclei on both algebras")]
    NoNucleus,
    #[error("homomorphisms do not compose")]
    NotComposable,
    #[error("element {0} was expected to be meet-prime")]
    NotMeetPrime(usize),
    #[error("upset algebra does not belong to the morphism's poset")]
    WrongAlgebra,
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

/// A map between finite algebras preserving `∧`, `→` and 1, plus the
/// nucleus and 0 when its kind says so. Validated on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism<'a> {
    source: &'a FiniteAlgebra,
    target: &'a FiniteAlgebra,
    map: Vec<usize>,
    kind: HomKind,
}

impl<'a> Homomorphism<'a> {
    pub fn new(
        source: &'a FiniteAlgebra,
        target: &'a FiniteAlgebra,
        map: Vec<usize>,
        kind: HomKind,
    ) -> Result<Self, DualityError> {
        if map.len() != source.len() {
            return Err(DualityError::Length { expected: source.len(), got: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&b| b >= target.len()) {
            return Err(DualityError::OutOfRange(bad));
        }
        if kind.nuclear && (source.nucleus_table().is_none() || target.nucleus_table().is_none()) {
            return Err(DualityError::NoNucleus);
        }
        let h = Homomorphism { source, target, map, kind };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<(), DualityError> {
        let (a, b, h) = (self.source, self.target, &self.map);
        if h[a.top()] != b.top() {
            return Err(DualityError::Top);
        }
        if self.kind.bounded && h[a.least()] != b.least() {
            return Err(DualityError::Bottom);
        }
        for x in 0..a.len() {
            if self.kind.nuclear && h[a.nucleus(x).unwrap()] != b.nucleus(h[x]).unwrap() {
                return Err(DualityError::Nucleus(x));
            }
            for y in 0..a.len() {
                if h[a.meet(x, y)] != b.meet(h[x], h[y]) {
                    return Err(DualityError::Meet(x, y));
                }
                if h[a.imp(x, y)] != b.imp(h[x], h[y]) {
                    return Err(DualityError::Imp(x, y));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &'a FiniteAlgebra {
        self.source
    }

    pub fn target(&self) -> &'a FiniteAlgebra {
        self.target
    }

    pub fn kind(&self) -> HomKind {
        self.kind
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn image(&self) -> ElemSet {
        ElemSet::from_indices(self.target.len(), self.map.iter().copied())
    }

    pub fn is_injective(&self) -> bool {
        self.image().count() == self.source.len()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().count() == self.target.len()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Homomorphism<'a>) -> Result<Homomorphism<'a>, DualityError> {
        if self.target != g.source {
            return Err(DualityError::NotComposable);
        }
        let kind = HomKind { nuclear: self.kind.nuclear && g.kind.nuclear, bounded: self.kind.bounded && g.kind.bounded };
        let map = self.map.iter().map(|&b| g.map[b]).collect();
        Homomorphism::new(self.source, g.target, map, kind)
    }
}

/// All homomorphisms of the given kind, found by choosing images of the
/// meet-prime elements (every element is a meet of meet-primes) and
/// validating the induced map.
pub fn all_homomorphisms<'a>(
    source: &'a FiniteAlgebra,
    target: &'a FiniteAlgebra,
    kind: HomKind,
) -> Vec<Homomorphism<'a>> {
    let primes = source.meet_primes();
    let components: Vec<Vec<usize>> = (0..source.len()).map(|a| source.meet_prime_components(a)).collect();
    let mut prime_pos = vec![usize::MAX; source.len()];
    for (i, &m) in primes.iter().enumerate() {
        prime_pos[m] = i;
    }
    let k = primes.len();
    let choices = target.len();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; k];
    loop {
        let map: Vec<usize> = (0..source.len())
            .map(|a| target.meet_all(components[a].iter().map(|&m| assignment[prime_pos[m]])))
            .collect();
        if let Ok(h) = Homomorphism::new(source, target, map, kind) {
            out.push(h);
        }
        // next assignment in odometer order
        let mut i = 0;
        while i < k {
            assignment[i] += 1;
            if assignment[i] < choices {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    out
}

/// The dual of a homomorphism `h: A → B`: the partial map from the
/// meet-primes of `B` to those of `A` sending `y` to `⋁{a | h(a) <= y}`,
/// defined on the meet-primes fixed by the nucleus induced by `h(A)`.
pub fn right_adjoint<'d>(
    h: &Homomorphism,
    source_dual: &'d Dual,
    target_dual: &'d Dual,
) -> Result<KohlerMorphism<'d>, DualityError> {
    let (a, b) = (h.source, h.target);
    let induced = b.induced_nucleus(&h.image()).map_err(|_| DualityError::NotComposable)?;
    let map = target_dual
        .elements
        .iter()
        .map(|&y| {
            if induced[y] != y {
                return Ok(None);
            }
            let value = a.join_all((0..a.len()).filter(|&x| b.leq(h.map[x], y)));
            source_dual.point_of(value).map(Some).ok_or(DualityError::NotMeetPrime(value))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KohlerMorphism::new(target_dual.sposet.poset(), source_dual.sposet.poset(), map)?)
}

/// [`right_adjoint`] for a nuclear homomorphism, checked to be an
/// S-morphism of the dual S-posets.
pub fn dual_morphism_of_hom<'d>(
    h: &Homomorphism,
    source_dual: &'d Dual,
    target_dual: &'d Dual,
) -> Result<SMorphism<'d>, DualityError> {
    if !h.kind.nuclear {
        return Err(DualityError::NoNucleus);
    }
    let k = right_adjoint(h, source_dual, target_dual)?;
    Ok(SMorphism::from_kohler(&target_dual.sposet, &source_dual.sposet, k)?)
}

/// The homomorphism `f*: Up(Y) → Up(X)` of a Köhler morphism `f: X → Y`,
/// validated against the algebras carried by the two upset algebras.
pub fn dual_hom_of_morphism<'u>(
    f: &KohlerMorphism,
    target_up: &'u UpsetAlgebra,
    source_up: &'u UpsetAlgebra,
    kind: HomKind,
) -> Result<Homomorphism<'u>, DualityError> {
    if target_up.poset() != f.target() || source_up.poset() != f.source() {
        return Err(DualityError::WrongAlgebra);
    }
    let map = pullback_table(f, target_up, source_up);
    Homomorphism::new(target_up.algebra(), source_up.algebra(), map, kind)
}

/// `f*` as a table on upset indices.
pub fn pullback_table(f: &KohlerMorphism, target_up: &UpsetAlgebra, source_up: &UpsetAlgebra) -> Vec<usize> {
    target_up
        .upsets()
        .iter()
        .map(|v| source_up.index_of(&f.pullback(v)).expect("pullback is an upset"))
        .collect()
}

/// `x ↦ X ∖ ↓x` as a map from an S-poset to the dual of its upset algebra.
pub fn epsilon(up: &UpsetAlgebra, dual: &Dual) -> Result<Vec<Elem>, DualityError> {
    (0..up.poset().len())
        .map(|x| {
            let u = up.epsilon_point(x);
            dual.point_of(u).ok_or(DualityError::NotMeetPrime(u))
        })
        .collect()
}

/// Whether `epsilon` is an isomorphism of S-posets onto the dual of
/// `(Up(X), j_S)`.
pub fn epsilon_is_isomorphism(sp: &SPoset, up: &UpsetAlgebra, dual: &Dual) -> bool {
    let Ok(e) = epsilon(up, dual) else { return false };
    let n = sp.len();
    if dual.elements.len() != n || ElemSet::from_indices(n, e.iter().copied()).count() != n {
        return false;
    }
    let q = dual.sposet.poset();
    (0..n).all(|x| {
        sp.in_s(x) == dual.sposet.in_s(e[x]) && (0..n).all(|y| sp.poset().leq(x, y) == q.leq(e[x], e[y]))
    })
}

/// `a ↦ α(a)` as a table into the upset algebra of the dual S-poset.
pub fn alpha_table(algebra: &FiniteAlgebra, dual: &Dual, dual_up: &UpsetAlgebra) -> Vec<usize> {
    (0..algebra.len())
        .map(|a| dual_up.index_of(&dual.alpha(algebra, a)).expect("alpha gives upsets"))
        .collect()
}

/// Whether `α` is an isomorphism onto `(Up(X_A), j_{S_A})` preserving the
/// operations present in `algebra`.
pub fn alpha_is_isomorphism(algebra: &FiniteAlgebra, dual: &Dual) -> bool {
    let Ok(up) = UpsetAlgebra::new(dual.sposet.poset()) else { return false };
    let up = if algebra.nucleus_table().is_some() {
        up.with_s(dual.sposet.s(), algebra.is_bounded())
    } else {
        up.with_bottom(algebra.is_bounded())
    };
    let table = alpha_table(algebra, dual, &up);
    let kind = HomKind { nuclear: algebra.nucleus_table().is_some(), bounded: algebra.is_bounded() };
    match Homomorphism::new(algebra, up.algebra(), table, kind) {
        Ok(h) => h.is_injective() && h.is_surjective(),
        Err(_) => false,
    }
}

impl From<Signature> for HomKind {
    fn from(sig: Signature) -> HomKind {
        HomKind { nuclear: sig.nucleus, bounded: sig.bottom }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Poset;

    #[test]
    fn epsilon_and_alpha_on_small_sposet() {
        let p = Poset::new(3, [(0, 1), (0, 2)]).unwrap();
        let sp = SPoset::from_indices(p, [0, 2]).unwrap();
        let up = UpsetAlgebra::new(sp.poset()).unwrap().with_s(sp.s(), false);
        let dual = up.algebra().dual();
        assert!(epsilon_is_isomorphism(&sp, &up, &dual));
        assert!(alpha_is_isomorphism(up.algebra(), &dual));
    }

    #[test]
    fn pullback_of_s_morphism_is_nuclear() {
        // s < d, s < s' < d' collapsing d, d' onto the top of a 2-chain
        let x = Poset::new(4, [(0, 2), (0, 1), (1, 3)]).unwrap();
        let y = Poset::chain(2);
        let sx = SPoset::from_indices(x.clone(), [0, 1]).unwrap();
        let sy = SPoset::from_indices(y.clone(), [0]).unwrap();
        let f = KohlerMorphism::new(&x, &y, vec![None, Some(0), Some(1), Some(1)]).unwrap();
        let ux = UpsetAlgebra::new(&x).unwrap().with_s(sx.s(), false);
        let uy = UpsetAlgebra::new(&y).unwrap().with_s(sy.s(), false);
        let h = dual_hom_of_morphism(&f, &uy, &ux, HomKind { nuclear: true, bounded: false }).unwrap();
        // its dual morphism is f again, up to epsilon
        let dx = ux.algebra().dual();
        let dy = uy.algebra().dual();
        let back = dual_morphism_of_hom(&h, &dy, &dx).unwrap();
        let ex = epsilon(&ux, &dx).unwrap();
        let ey = epsilon(&uy, &dy).unwrap();
        for p in 0..x.len() {
            assert_eq!(back.kohler().apply(ex[p]), f.apply(p).map(|q| ey[q]));
        }
    }

    #[test]
    fn homomorphisms_of_chain_algebras() {
        let two = UpsetAlgebra::new(&Poset::chain(1)).unwrap();
        let three = UpsetAlgebra::new(&Poset::chain(2)).unwrap();
        // without 0 in the signature the bottom may go anywhere
        let homs = all_homomorphisms(two.algebra(), three.algebra(), HomKind::default());
        assert_eq!(homs.len(), 3);
        let bounded = HomKind { nuclear: false, bounded: true };
        assert_eq!(all_homomorphisms(two.algebra(), three.algebra(), bounded).len(), 1);
        // the chain maps onto the two-element algebra, or to its top
        let homs = all_homomorphisms(three.algebra(), two.algebra(), HomKind::default());
        assert_eq!(homs.len(), 2);
        assert_eq!(homs.iter().filter(|h| h.is_surjective()).count(), 1);
    }
}
