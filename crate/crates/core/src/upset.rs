//! Upsets of a poset, S-posets and the operations of `Up(X)`.

use thiserror::Error;

use crate::poset::{Poset, PosetError};
use crate::set::{Elem, ElemSet};

/// Carrier size above which [`Poset::all_upsets`] refuses to enumerate.
pub const DEFAULT_UPSET_GUARD: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UpsetError {
    #[error("set is not upward closed")]
    NotUpward,
    #[error("upset lives on a carrier of size {got}, expected {expected}")]
    AmbientMismatch { expected: usize, got: usize },
    #[error("poset of size {size} exceeds the upset enumeration guard {guard}")]
    TooLarge { size: usize, guard: usize },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// An upward closed subset of a poset.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Upset(ElemSet);

impl Upset {
    pub fn new(poset: &Poset, members: ElemSet) -> Result<Upset, UpsetError> {
        if members.universe() != poset.len() {
            return Err(UpsetError::AmbientMismatch { expected: poset.len(), got: members.universe() });
        }
        if !poset.is_upset(&members) {
            return Err(UpsetError::NotUpward);
        }
        Ok(Upset(members))
    }

    /// Wraps a set the caller knows to be upward closed.
    pub(crate) fn trusted(members: ElemSet) -> Upset {
        Upset(members)
    }

    pub fn members(&self) -> &ElemSet {
        &self.0
    }

    pub fn into_members(self) -> ElemSet {
        self.0
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.0.contains(x)
    }

    pub fn is_subset(&self, other: &Upset) -> bool {
        self.0.is_subset(&other.0)
    }
}

fn check_ambient(poset: &Poset, sets: &[&Upset]) -> Result<(), UpsetError> {
    for u in sets {
        if u.0.universe() != poset.len() {
            return Err(UpsetError::AmbientMismatch { expected: poset.len(), got: u.0.universe() });
        }
    }
    Ok(())
}

impl Poset {
    /// `U → V = X ∖ ↓(U ∖ V)`, the largest upset whose meet with `U` is in `V`.
    pub fn implies(&self, u: &Upset, v: &Upset) -> Result<Upset, UpsetError> {
        check_ambient(self, &[u, v])?;
        Ok(self.implies_unchecked(u, v))
    }

    pub(crate) fn implies_unchecked(&self, u: &Upset, v: &Upset) -> Upset {
        Upset(self.downset_of(&u.0.difference(&v.0)).complement())
    }

    pub fn meet(&self, u: &Upset, v: &Upset) -> Result<Upset, UpsetError> {
        check_ambient(self, &[u, v])?;
        Ok(Upset(u.0.intersection(&v.0)))
    }

    pub fn join(&self, u: &Upset, v: &Upset) -> Result<Upset, UpsetError> {
        check_ambient(self, &[u, v])?;
        Ok(Upset(u.0.union(&v.0)))
    }

    /// `¬U = U → ∅`.
    pub fn negation(&self, u: &Upset) -> Result<Upset, UpsetError> {
        check_ambient(self, &[u])?;
        Ok(Upset(self.downset_of(&u.0).complement()))
    }

    pub fn top_upset(&self) -> Upset {
        Upset(self.full_set())
    }

    pub fn bottom_upset(&self) -> Upset {
        Upset(self.empty_set())
    }

    pub fn principal_upset(&self, x: Elem) -> Upset {
        Upset(self.up(x).clone())
    }

    /// Upward closure of an arbitrary set.
    pub fn upset_generated(&self, set: &ElemSet) -> Upset {
        Upset(self.upset_of(set))
    }

    /// All upsets in antichain order (see [`Poset::antichains`]), refusing
    /// carriers larger than [`DEFAULT_UPSET_GUARD`].
    pub fn all_upsets(&self) -> Result<Vec<Upset>, UpsetError> {
        self.all_upsets_with_guard(DEFAULT_UPSET_GUARD)
    }

    pub fn all_upsets_with_guard(&self, guard: usize) -> Result<Vec<Upset>, UpsetError> {
        if self.len() > guard {
            return Err(UpsetError::TooLarge { size: self.len(), guard });
        }
        Ok(self
            .antichains()
            .map(|a| Upset(self.upset_of(&ElemSet::from_indices(self.len(), a))))
            .collect())
    }
}

/// A poset with a distinguished subset `S`, the dual of a nucleus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPoset {
    poset: Poset,
    s: ElemSet,
}

impl SPoset {
    pub fn new(poset: Poset, s: ElemSet) -> Result<SPoset, UpsetError> {
        if s.universe() != poset.len() {
            return Err(UpsetError::AmbientMismatch { expected: poset.len(), got: s.universe() });
        }
        Ok(SPoset { poset, s })
    }

    pub fn from_indices(poset: Poset, s: impl IntoIterator<Item = Elem>) -> Result<SPoset, UpsetError> {
        let n = poset.len();
        let mut set = ElemSet::empty(n);
        for x in s {
            poset.check(x)?;
            set.insert(x);
        }
        Self::new(poset, set)
    }

    /// S-poset with `S` equal to the whole carrier (identity nucleus).
    pub fn full(poset: Poset) -> SPoset {
        let s = poset.full_set();
        SPoset { poset, s }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn s(&self) -> &ElemSet {
        &self.s
    }

    pub fn in_s(&self, x: Elem) -> bool {
        self.s.contains(x)
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    /// `j_S(U) = X ∖ ↓(S ∖ U)`.
    pub fn nucleus(&self, u: &Upset) -> Result<Upset, UpsetError> {
        check_ambient(&self.poset, &[u])?;
        Ok(self.nucleus_unchecked(u))
    }

    pub(crate) fn nucleus_unchecked(&self, u: &Upset) -> Upset {
        Upset(self.poset.downset_of(&self.s.difference(&u.0)).complement())
    }

    /// Fixpoints of `j_S` among all upsets.
    pub fn fixed_upsets(&self) -> Result<Vec<Upset>, UpsetError> {
        Ok(self
            .poset
            .all_upsets()?
            .into_iter()
            .filter(|u| self.nucleus_unchecked(u) == *u)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[Elem]) -> ElemSet {
        ElemSet::from_indices(n, xs.iter().copied())
    }

    #[test]
    fn implication_on_a_chain() {
        // 0 < 1 < 2; upsets are suffixes
        let p = Poset::chain(3);
        let u = Upset::new(&p, set(3, &[1, 2])).unwrap();
        let v = Upset::new(&p, set(3, &[2])).unwrap();
        assert_eq!(p.implies(&u, &v).unwrap().members().to_vec(), vec![2]);
        assert_eq!(p.implies(&v, &u).unwrap(), p.top_upset());
        assert_eq!(p.negation(&u).unwrap(), p.bottom_upset());
    }

    #[test]
    fn residuation_on_all_upsets() {
        let p = Poset::new(4, [(0, 2), (1, 2), (1, 3)]).unwrap();
        let ups = p.all_upsets().unwrap();
        assert_eq!(ups.len(), 8);
        for a in &ups {
            for b in &ups {
                let imp = p.implies(a, b).unwrap();
                for c in &ups {
                    let lhs = c.is_subset(&imp);
                    let rhs = p.meet(c, a).unwrap().is_subset(b);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn nucleus_fixpoints() {
        let p = Poset::chain(2);
        let sp = SPoset::from_indices(p, [1]).unwrap();
        // S = {top}: j(∅) = X ∖ ↓{1} = ∅
        assert_eq!(sp.nucleus(&sp.poset().bottom_upset()).unwrap(), sp.poset().bottom_upset());
        let sp = SPoset::from_indices(Poset::chain(2), [0]).unwrap();
        assert_eq!(sp.nucleus(&sp.poset().bottom_upset()).unwrap().members().to_vec(), vec![1]);
        assert_eq!(sp.fixed_upsets().unwrap().len(), 2);
    }

    #[test]
    fn errors() {
        let p = Poset::chain(2);
        assert_eq!(Upset::new(&p, set(2, &[0])), Err(UpsetError::NotUpward));
        let q = Poset::chain(3);
        assert!(matches!(
            p.meet(&p.top_upset(), &q.top_upset()),
            Err(UpsetError::AmbientMismatch { .. })
        ));
        assert!(matches!(Poset::antichain(25).all_upsets(), Err(UpsetError::TooLarge { .. })));
    }
}
