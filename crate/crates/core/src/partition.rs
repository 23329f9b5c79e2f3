//! Partial correct partitions: the duals of subalgebras of `Up(X)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, Signature, UpsetAlgebra};
use crate::duality::{right_adjoint, Homomorphism, HomKind};
use crate::poset::Poset;
use crate::set::{Elem, ElemSet};
use crate::upset::SPoset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("element {0} is out of range")]
    OutOfRange(Elem),
    #[error("element {0} appears in more than one class")]
    Overlap(Elem),
    #[error("empty class")]
    EmptyClass,
    #[error("class containing {0} and {1} is not an antichain")]
    NotAntichain(Elem, Elem),
    #[error("correctness fails: {x} ~ {y} and {y} < {z} but no w above {x} is equivalent to {z}")]
    NotCorrect { x: Elem, y: Elem, z: Elem },
    #[error("set is not a subalgebra of Up(X)")]
    NotSubalgebra,
}

/// A partial equivalence relation on a poset whose classes are antichains
/// and which satisfies: `x ~ y`, `y < z`, `z ∈ D` give `w ∈ D` with
/// `x < w ~ z`. Classes are stored sorted, in order of their least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialCorrectPartition<'a> {
    poset: &'a Poset,
    classes: Vec<Vec<Elem>>,
    class_of: Vec<Option<usize>>,
}

/// Which kinds of subalgebra a partition corresponds to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// The relation is the identity on its domain.
    pub total: bool,
    /// The domain is everything.
    pub strict_heyting: bool,
    /// Total and closed under the nucleus; only with an `S`.
    pub nuclear_total: Option<bool>,
    /// Strict Heyting and closed under the nucleus; only with an `S`.
    pub nuclear_strict_heyting: Option<bool>,
}

/// The three families of maximal subalgebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubalgebraMode {
    Plain,
    Nuclear,
    BoundedNuclear,
}

impl SubalgebraMode {
    pub fn signature(self) -> Signature {
        match self {
            SubalgebraMode::Plain => Signature::IMPLICATIVE,
            SubalgebraMode::Nuclear => Signature::NUCLEAR,
            SubalgebraMode::BoundedNuclear => Signature::BOUNDED_NUCLEAR,
        }
    }
}

impl std::str::FromStr for SubalgebraMode {
    type Err = String;

    fn from_str(s: &str) -> Result<SubalgebraMode, String> {
        match s {
            "plain" => Ok(SubalgebraMode::Plain),
            "nuclear" => Ok(SubalgebraMode::Nuclear),
            "bounded-nuclear" => Ok(SubalgebraMode::BoundedNuclear),
            _ => Err(format!("unknown mode `{s}` (expected plain, nuclear or bounded-nuclear)")),
        }
    }
}

impl<'a> PartialCorrectPartition<'a> {
    pub fn new(poset: &'a Poset, classes: Vec<Vec<Elem>>) -> Result<Self, PartitionError> {
        let mut class_of = vec![None; poset.len()];
        let mut classes: Vec<Vec<Elem>> = classes
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        classes.sort();
        for (i, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(PartitionError::EmptyClass);
            }
            for &x in class {
                if x >= poset.len() {
                    return Err(PartitionError::OutOfRange(x));
                }
                if class_of[x].is_some() {
                    return Err(PartitionError::Overlap(x));
                }
                class_of[x] = Some(i);
            }
            for &x in class {
                for &y in class {
                    if x != y && poset.leq(x, y) {
                        return Err(PartitionError::NotAntichain(x, y));
                    }
                }
            }
        }
        let p = PartialCorrectPartition { poset, classes, class_of };
        p.check_correct()?;
        Ok(p)
    }

    /// The identity relation on `domain`.
    pub fn identity(poset: &'a Poset, domain: &ElemSet) -> Self {
        Self::new(poset, domain.iter().map(|x| vec![x]).collect()).expect("identity is correct")
    }

    fn check_correct(&self) -> Result<(), PartitionError> {
        let p = self.poset;
        for x in 0..p.len() {
            let Some(cx) = self.class_of[x] else { continue };
            for &y in &self.classes[cx] {
                for z in p.up(y).iter().filter(|&z| z != y) {
                    let Some(cz) = self.class_of[z] else { continue };
                    let ok = p.up(x).iter().any(|w| w != x && self.class_of[w] == Some(cz));
                    if !ok {
                        return Err(PartitionError::NotCorrect { x, y, z });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn poset(&self) -> &'a Poset {
        self.poset
    }

    pub fn classes(&self) -> &[Vec<Elem>] {
        &self.classes
    }

    pub fn domain(&self) -> ElemSet {
        ElemSet::from_indices(self.poset.len(), (0..self.poset.len()).filter(|&x| self.class_of[x].is_some()))
    }

    pub fn equivalent(&self, x: Elem, y: Elem) -> bool {
        self.class_of[x].is_some() && self.class_of[x] == self.class_of[y]
    }

    pub fn is_identity(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// Whether `set ∩ D` is a union of classes.
    pub fn saturates(&self, set: &ElemSet) -> bool {
        self.classes.iter().all(|c| c.iter().all(|&x| set.contains(x)) || c.iter().all(|&x| !set.contains(x)))
    }

    /// Indices (in `up`) of the upsets `U` with `U ∩ D` saturated and
    /// `max(X ∖ U) ⊆ D`.
    pub fn subalgebra(&self, up: &UpsetAlgebra) -> ElemSet {
        assert_eq!(up.poset(), self.poset);
        let d = self.domain();
        ElemSet::from_indices(
            up.len(),
            (0..up.len()).filter(|&i| {
                let u = up.upset(i).members();
                self.saturates(u) && self.poset.max_elements(&u.complement()).is_subset(&d)
            }),
        )
    }

    /// Whether the subalgebra is closed under `j_S`: `S ∩ D` is saturated,
    /// and `s <= d` with `s ∈ S`, `d ∈ D` has `s <= s' <= d'` with
    /// `s' ∈ S ∩ D` and `d' ~ d`.
    pub fn is_nuclear(&self, s: &ElemSet) -> bool {
        if !self.saturates(s) {
            return false;
        }
        let p = self.poset;
        let d = self.domain();
        let sd = s.intersection(&d);
        s.iter().all(|si| {
            p.up(si).intersection(&d).iter().all(|di| {
                p.up(si)
                    .intersection(&sd)
                    .iter()
                    .any(|s2| p.up(s2).intersection(&d).iter().any(|d2| self.equivalent(di, d2)))
            })
        })
    }

    /// Whether the subalgebra contains 0, i.e. the domain is cofinal.
    pub fn is_bounded(&self) -> bool {
        self.poset.maximal().is_subset(&self.domain())
    }

    pub fn classify(&self, s: Option<&ElemSet>) -> Classification {
        let total = self.is_identity();
        let strict_heyting = self.domain().count() == self.poset.len();
        let p = self.poset;
        let d = self.domain();
        Classification {
            total,
            strict_heyting,
            nuclear_total: s.map(|s| {
                total && d.iter().all(|x| p.max_elements(&s.intersection(p.down(x))).is_subset(&d))
            }),
            nuclear_strict_heyting: s.map(|s| strict_heyting && self.saturates(s)),
        }
    }

    /// Whether the subalgebra of `self` is contained in that of `other`:
    /// `D ⊆ D'`, `D` is saturated for `~'`, and `~` extends `~'` on `D`.
    pub fn subalgebra_leq(&self, other: &PartialCorrectPartition) -> bool {
        let d = self.domain();
        d.is_subset(&other.domain())
            && other.saturates(&d)
            && d.iter().all(|x| d.iter().all(|y| !other.equivalent(x, y) || self.equivalent(x, y)))
    }

    /// The partition of a subalgebra `b` of `up`, read off from the dual of
    /// its inclusion.
    pub fn of_subalgebra<'u>(up: &'u UpsetAlgebra, b: &ElemSet) -> Result<PartialCorrectPartition<'u>, PartitionError> {
        let alg = up.algebra();
        let plain = alg.clone().without_nucleus().with_bottom(false);
        let (sub, elems) = plain.restrict(b).map_err(|_| PartitionError::NotSubalgebra)?;
        let inclusion = Homomorphism::new(&sub, &plain, elems, HomKind::default())
            .map_err(|_| PartitionError::NotSubalgebra)?;
        let sub_dual = sub.dual();
        let full_dual = plain.dual();
        let adj = right_adjoint(&inclusion, &sub_dual, &full_dual).map_err(|_| PartitionError::NotSubalgebra)?;
        let poset = up.poset();
        let mut classes: Vec<Vec<Elem>> = vec![Vec::new(); sub_dual.elements.len()];
        for x in 0..poset.len() {
            let point = full_dual.point_of(up.epsilon_point(x)).expect("epsilon gives meet-primes");
            if let Some(c) = adj.apply(point) {
                classes[c].push(x);
            }
        }
        classes.retain(|c| !c.is_empty());
        PartialCorrectPartition::new(poset, classes)
    }
}

/// The partitions of the maximal subalgebras of `(Up(X), j_S)` in the
/// given mode: drop one point, or merge two points with the same covers.
pub fn maximal_partitions(sp: &SPoset, mode: SubalgebraMode) -> Vec<PartialCorrectPartition<'_>> {
    let p = sp.poset();
    let n = p.len();
    let nuclear = mode != SubalgebraMode::Plain;
    let maximal = p.maximal();
    let mut out = Vec::new();
    for x in 0..n {
        if nuclear && sp.in_s(x) && !p.covers_up(x).iter().all(|&y| sp.in_s(y)) {
            continue;
        }
        if mode == SubalgebraMode::BoundedNuclear && maximal.contains(x) {
            continue;
        }
        let mut d = p.full_set();
        d.remove(x);
        out.push(PartialCorrectPartition::identity(p, &d));
    }
    for x in 0..n {
        for y in x + 1..n {
            if p.covers_up(x) != p.covers_up(y) || (nuclear && sp.in_s(x) != sp.in_s(y)) {
                continue;
            }
            let mut classes: Vec<Vec<Elem>> = (0..n).filter(|&z| z != x && z != y).map(|z| vec![z]).collect();
            classes.push(vec![x, y]);
            out.push(PartialCorrectPartition::new(p, classes).expect("merging twins is correct"));
        }
    }
    out
}

/// Maximal subalgebras of `(Up(X), j_S)` by exhaustive search, as sets of
/// upset indices of `up`.
pub fn maximal_subalgebras_brute_force(up: &UpsetAlgebra, sp: &SPoset, mode: SubalgebraMode) -> Vec<ElemSet> {
    let alg: FiniteAlgebra = up.nuclear(sp.s(), mode == SubalgebraMode::BoundedNuclear);
    alg.maximal_subalgebras(mode.signature())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn two_chain_has_two_maximal_subalgebras() {
        let sp = SPoset::from_indices(Poset::chain(2), []).unwrap();
        let up = UpsetAlgebra::new(sp.poset()).unwrap();
        let parts = maximal_partitions(&sp, SubalgebraMode::Plain);
        assert_eq!(parts.len(), 2);
        let brute: HashSet<ElemSet> = maximal_subalgebras_brute_force(&up, &sp, SubalgebraMode::Plain).into_iter().collect();
        let ours: HashSet<ElemSet> = parts.iter().map(|p| p.subalgebra(&up)).collect();
        assert_eq!(ours, brute);
    }

    #[test]
    fn single_s_point_nuclear() {
        let sp = SPoset::from_indices(Poset::antichain(1), [0]).unwrap();
        assert_eq!(maximal_partitions(&sp, SubalgebraMode::Nuclear).len(), 1);
        assert_eq!(maximal_partitions(&sp, SubalgebraMode::BoundedNuclear).len(), 0);
    }

    #[test]
    fn merged_twins_in_s_are_nuclear() {
        let p = Poset::antichain(2);
        let part = PartialCorrectPartition::new(&p, vec![vec![0, 1]]).unwrap();
        assert!(part.is_nuclear(&p.full_set()));
        assert!(!part.is_nuclear(&ElemSet::from_indices(2, [0])));
    }

    #[test]
    fn rejects_incorrect_partitions() {
        // 0 < 2, 1 isolated: merging 0 and 1 needs something above 1
        let p = Poset::new(3, [(0, 2)]).unwrap();
        assert!(matches!(
            PartialCorrectPartition::new(&p, vec![vec![0, 1], vec![2]]),
            Err(PartitionError::NotCorrect { .. })
        ));
        assert!(matches!(PartialCorrectPartition::new(&p, vec![vec![0, 2]]), Err(PartitionError::NotAntichain(..))));
    }

    #[test]
    fn maximal_partitions_pairwise_incomparable() {
        for p in [Poset::chain(3), Poset::new(3, [(0, 2), (1, 2)]).unwrap()] {
            let sp = SPoset::full(p);
            let parts = maximal_partitions(&sp, SubalgebraMode::Plain);
            for (i, a) in parts.iter().enumerate() {
                for (j, b) in parts.iter().enumerate() {
                    assert_eq!(a.subalgebra_leq(b), i == j);
                }
            }
        }
    }

    #[test]
    fn partition_of_subalgebra_round_trips() {
        let p = Poset::new(4, [(0, 2), (1, 2), (1, 3)]).unwrap();
        let up = UpsetAlgebra::new(&p).unwrap();
        for b in up.algebra().subalgebras(Signature::IMPLICATIVE) {
            let part = PartialCorrectPartition::of_subalgebra(&up, &b).unwrap();
            assert_eq!(part.subalgebra(&up), b);
        }
    }

    fn all_s(n: usize) -> impl Iterator<Item = ElemSet> {
        (0u32..1 << n).map(move |m| ElemSet::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1)))
    }

    #[test]
    fn nuclear_partitions_match_closure_up_to_three() {
        for p in crate::poset::posets_up_to_iso_upto(3).into_iter().flatten() {
            let up = UpsetAlgebra::new(&p).unwrap();
            let subs = up.algebra().subalgebras(Signature::IMPLICATIVE);
            for s in all_s(p.len()) {
                let alg = up.nuclear(&s, false);
                for b in &subs {
                    let part = PartialCorrectPartition::of_subalgebra(&up, b).unwrap();
                    assert_eq!(part.is_nuclear(&s), alg.is_subalgebra(b, Signature::NUCLEAR), "{p:?} {s:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn maximal_partitions_match_brute_force_up_to_three() {
        for p in crate::poset::posets_up_to_iso_upto(3).into_iter().flatten() {
            let up = UpsetAlgebra::new(&p).unwrap();
            for s in all_s(p.len()) {
                let sp = SPoset::new(p.clone(), s).unwrap();
                for mode in [SubalgebraMode::Plain, SubalgebraMode::Nuclear, SubalgebraMode::BoundedNuclear] {
                    let ours: HashSet<ElemSet> = maximal_partitions(&sp, mode).iter().map(|q| q.subalgebra(&up)).collect();
                    let brute: HashSet<ElemSet> = maximal_subalgebras_brute_force(&up, &sp, mode).into_iter().collect();
                    assert_eq!(ours, brute, "{p:?} {:?} {mode:?}", sp.s());
                }
            }
        }
    }
}
