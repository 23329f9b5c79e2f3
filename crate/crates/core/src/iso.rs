//! Isomorphism search for small labeled posets.

use crate::coloring::Model;
use crate::poset::Poset;
use crate::set::Elem;
use crate::upset::SPoset;

/// Finds an order isomorphism `a → b` that also preserves the given labels.
/// Returns `map[x]` for each element of `a`.
pub fn find_isomorphism(a: &Poset, b: &Poset, label_a: &[u64], label_b: &[u64]) -> Option<Vec<Elem>> {
    let n = a.len();
    if n != b.len() {
        return None;
    }
    let signature = |p: &Poset, labels: &[u64], x: Elem| {
        (p.height_of(x), labels[x], p.up(x).count(), p.down(x).count(), p.covers_up(x).len())
    };
    let sig_a: Vec<_> = (0..n).map(|x| signature(a, label_a, x)).collect();
    let sig_b: Vec<_> = (0..n).map(|x| signature(b, label_b, x)).collect();
    let mut sorted_a = sig_a.clone();
    let mut sorted_b = sig_b.clone();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return None;
    }
    // assign elements of `a` from the top down so comparabilities prune early
    let mut order: Vec<Elem> = (0..n).collect();
    order.sort_by_key(|&x| (sig_a[x].0, x));
    let candidates: Vec<Vec<Elem>> = (0..n).map(|x| (0..n).filter(|&y| sig_b[y] == sig_a[x]).collect()).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn go(
        depth: usize,
        order: &[Elem],
        candidates: &[Vec<Elem>],
        a: &Poset,
        b: &Poset,
        map: &mut Vec<Elem>,
        used: &mut Vec<bool>,
    ) -> bool {
        let Some(&x) = order.get(depth) else { return true };
        for &y in &candidates[x] {
            if used[y] {
                continue;
            }
            let consistent = order[..depth].iter().all(|&z| {
                let w = map[z];
                a.leq(x, z) == b.leq(y, w) && a.leq(z, x) == b.leq(w, y)
            });
            if !consistent {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if go(depth + 1, order, candidates, a, b, map, used) {
                return true;
            }
            used[y] = false;
        }
        map[x] = usize::MAX;
        false
    }

    go(0, &order, &candidates, a, b, &mut map, &mut used).then_some(map)
}

pub fn posets_isomorphic(a: &Poset, b: &Poset) -> bool {
    let zeros = vec![0u64; a.len().max(b.len())];
    find_isomorphism(a, b, &zeros[..a.len()], &zeros[..b.len()]).is_some()
}

fn s_labels(sp: &SPoset) -> Vec<u64> {
    (0..sp.len()).map(|x| u64::from(sp.in_s(x))).collect()
}

pub fn sposets_isomorphic(a: &SPoset, b: &SPoset) -> bool {
    find_sposet_isomorphism(a, b).is_some()
}

pub fn find_sposet_isomorphism(a: &SPoset, b: &SPoset) -> Option<Vec<Elem>> {
    find_isomorphism(a.poset(), b.poset(), &s_labels(a), &s_labels(b))
}

fn model_labels(m: &Model) -> Vec<u64> {
    (0..m.len()).map(|x| u64::from(m.sposet().in_s(x)) | u64::from(m.color(x).bits()) << 1).collect()
}

/// Isomorphism of models: order, `S` and colors all preserved.
pub fn find_model_isomorphism(a: &Model, b: &Model) -> Option<Vec<Elem>> {
    if a.n() != b.n() {
        return None;
    }
    find_isomorphism(a.poset(), b.poset(), &model_labels(a), &model_labels(b))
}

pub fn models_isomorphic(a: &Model, b: &Model) -> bool {
    find_model_isomorphism(a, b).is_some()
}
