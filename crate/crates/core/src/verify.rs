//! Exhaustive checks over small posets: the duality between algebras and
//! S-posets, the enumeration of maximal subalgebras, and the structural
//! irreducibility criteria against direct generation.

use std::collections::HashSet;

use serde::Serialize;

use crate::algebra::{FiniteAlgebra, Signature, UpsetAlgebra};
use crate::coloring::{Model, Variety};
use crate::duality::{
    alpha_is_isomorphism, alpha_table, all_homomorphisms, dual_morphism_of_hom, epsilon_is_isomorphism,
    pullback_table, HomKind,
};
use crate::morphism::all_kohler_morphisms;
use crate::partition::{maximal_partitions, maximal_subalgebras_brute_force, PartialCorrectPartition, SubalgebraMode};
use crate::poset::{posets_up_to_iso_upto, Poset, PosetError};
use crate::set::ElemSet;
use crate::upset::{SPoset, Upset};

/// Failures kept in a report; later ones are only counted.
const MAX_RECORDED: usize = 20;

#[derive(Clone, Debug, Default, Serialize)]
pub struct Failures {
    pub count: u64,
    pub first: Vec<String>,
}

impl Failures {
    fn record(&mut self, msg: impl FnOnce() -> String) {
        self.count += 1;
        if self.first.len() < MAX_RECORDED {
            self.first.push(msg());
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.record(msg);
        }
    }

    fn merge(&mut self, other: Failures) {
        self.count += other.count;
        for m in other.first {
            if self.first.len() < MAX_RECORDED {
                self.first.push(m);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

fn s_subsets(n: usize) -> impl Iterator<Item = ElemSet> {
    (0u32..1 << n).map(move |m| ElemSet::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1)))
}

fn all_posets(max_size: usize) -> Result<Vec<Poset>, PosetError> {
    posets_up_to_iso_upto(max_size)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DualityReport {
    pub max_size: usize,
    pub sposets: u64,
    pub epsilon_checks: u64,
    pub alpha_checks: u64,
    pub kohler_morphisms: u64,
    /// (morphism, S, T) triples where the three nucleus conditions were compared.
    pub nucleus_condition_checks: u64,
    pub homomorphisms: u64,
    pub compositions: u64,
    pub failures: Failures,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the duality checks on every S-poset with at most `max_size` points.
/// Homomorphisms are checked between algebras of S-posets with at most
/// `hom_size` points and composites among those with at most `compose_size`.
pub fn verify_duality(max_size: usize, hom_size: usize, compose_size: usize) -> Result<DualityReport, PosetError> {
    let posets = all_posets(max_size)?;
    let mut r = DualityReport { max_size, ..Default::default() };
    let ups: Vec<UpsetAlgebra> = posets.iter().map(|p| UpsetAlgebra::new(p).expect("small poset")).collect();

    // representation of S-posets and algebras
    for (p, up) in posets.iter().zip(&ups) {
        for s in s_subsets(p.len()) {
            r.sposets += 1;
            let sp = SPoset::new(p.clone(), s.clone()).expect("same carrier");
            for bounded in [false, true] {
                let alg = up.nuclear(&s, bounded);
                let dual = alg.dual();
                r.epsilon_checks += 1;
                r.failures.check(epsilon_is_isomorphism(&sp, up, &dual), || format!("epsilon fails on {p:?} S={s:?}"));
                r.alpha_checks += 1;
                r.failures.check(alpha_is_isomorphism(&alg, &dual), || format!("alpha fails on {p:?} S={s:?}"));
            }
        }
    }

    // Köhler morphisms: f* is a homomorphism, bounded iff cofinal, the
    // decomposition recomposes, and the three nucleus conditions agree
    for (p, up_p) in posets.iter().zip(&ups) {
        let s_tables: Vec<(ElemSet, Vec<usize>)> = s_subsets(p.len()).map(|s| {
            let t = up_p.nucleus_table(&s);
            (s, t)
        }).collect();
        for (q, up_q) in posets.iter().zip(&ups) {
            let t_tables: Vec<(ElemSet, Vec<usize>)> = s_subsets(q.len()).map(|t| {
                let tab = up_q.nucleus_table(&t);
                (t, tab)
            }).collect();
            for f in all_kohler_morphisms(p, q) {
                r.kohler_morphisms += 1;
                let pull = pullback_table(&f, up_q, up_p);
                let plain = crate::duality::Homomorphism::new(up_q.algebra(), up_p.algebra(), pull.clone(), HomKind::default());
                r.failures.check(plain.is_ok(), || format!("f* is not a homomorphism for {:?}", f.map()));
                let empty_q = up_q.index_of(&q.bottom_upset()).expect("empty upset");
                let empty_p = up_p.index_of(&p.bottom_upset()).expect("empty upset");
                r.failures.check((pull[empty_q] == empty_p) == f.is_cofinal(), || {
                    format!("cofinality mismatch for {:?}", f.map())
                });
                let dec = f.decompose();
                let recomposed = dec
                    .restriction(p)
                    .and_then(|f1| f1.then(&dec.onto()?))
                    .map(|f12| f12.map().iter().map(|v| v.map(|i| dec.image_elems[i])).collect::<Vec<_>>());
                r.failures.check(recomposed.as_deref() == Ok(f.map()), || {
                    format!("decomposition does not recompose for {:?}", f.map())
                });
                for (s, js) in &s_tables {
                    for (t, jt) in &t_tables {
                        r.nucleus_condition_checks += 1;
                        let commutes = (0..up_q.len()).all(|v| pull[jt[v]] == js[pull[v]]);
                        let star = f.satisfies_star(s, t);
                        let clauses = f.check_s_clauses(s, t).is_ok();
                        r.failures.check(commutes == star && star == clauses, || {
                            format!(
                                "nucleus conditions disagree for {:?} S={s:?} T={t:?}: commutes={commutes} star={star} clauses={clauses}",
                                f.map()
                            )
                        });
                    }
                }
            }
        }
    }

    // homomorphisms and their duals
    let corpus: Vec<FiniteAlgebra> = posets
        .iter()
        .zip(&ups)
        .filter(|(p, _)| p.len() <= hom_size)
        .flat_map(|(p, up)| s_subsets(p.len()).map(move |s| up.nuclear(&s, false)))
        .collect();
    let duals: Vec<_> = corpus.iter().map(|a| a.dual()).collect();
    let dual_ups: Vec<UpsetAlgebra> =
        duals.iter().map(|d| UpsetAlgebra::new(d.sposet.poset()).expect("small poset")).collect();
    let alphas: Vec<Vec<usize>> =
        corpus.iter().zip(&duals).zip(&dual_ups).map(|((a, d), u)| alpha_table(a, d, u)).collect();
    let kind = HomKind { nuclear: true, bounded: false };
    for i in 0..corpus.len() {
        for j in 0..corpus.len() {
            for h in all_homomorphisms(&corpus[i], &corpus[j], kind) {
                r.homomorphisms += 1;
                let hs = match dual_morphism_of_hom(&h, &duals[i], &duals[j]) {
                    Ok(m) => m,
                    Err(e) => {
                        r.failures.record(|| format!("dual of {:?} fails: {e}", h.map()));
                        continue;
                    }
                };
                let k = hs.kohler();
                r.failures.check(h.is_injective() == (k.image().count() == duals[i].elements.len()), || {
                    format!("one-to-one/onto mismatch for {:?}", h.map())
                });
                let k_injective = k.image().count() == k.domain().count();
                r.failures.check(h.is_surjective() == (k.is_total() && k_injective), || {
                    format!("onto/total mismatch for {:?}", h.map())
                });
                // (h_*)^* ∘ α_A = α_B ∘ h
                let back = pullback_table(k, &dual_ups[i], &dual_ups[j]);
                r.failures.check((0..corpus[i].len()).all(|a| back[alphas[i][a]] == alphas[j][h.apply(a)]), || {
                    format!("alpha does not intertwine {:?}", h.map())
                });
            }
        }
    }

    // (g ∘ h)_* = h_* ∘ g_*
    let small: Vec<usize> = (0..corpus.len()).filter(|&i| duals[i].elements.len() <= compose_size).collect();
    for &a in &small {
        for &b in &small {
            let hs = all_homomorphisms(&corpus[a], &corpus[b], kind);
            for &c in &small {
                let gs = all_homomorphisms(&corpus[b], &corpus[c], kind);
                for h in &hs {
                    let h_dual = dual_morphism_of_hom(h, &duals[a], &duals[b]).expect("checked above");
                    for g in &gs {
                        r.compositions += 1;
                        let gh = h.then(g).expect("composable");
                        let gh_dual = dual_morphism_of_hom(&gh, &duals[a], &duals[c]).expect("checked above");
                        let g_dual = dual_morphism_of_hom(g, &duals[b], &duals[c]).expect("checked above");
                        let composite = g_dual.then(&h_dual);
                        r.failures.check(composite.as_ref().map(|m| m.kohler().map()) == Ok(gh_dual.kohler().map()), || {
                            format!("duals do not compose for h={:?} g={:?}", h.map(), g.map())
                        });
                    }
                }
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SubalgebraReport {
    pub max_size: usize,
    pub sposets: u64,
    pub maximal_checks: u64,
    pub subalgebras: u64,
    pub failures: Failures,
}

impl SubalgebraReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the maximal-subalgebra enumeration with brute force in all
/// three modes, and the nuclear-partition test with closure under `j_S`.
pub fn verify_maximal_subalgebras(max_size: usize) -> Result<SubalgebraReport, PosetError> {
    let mut r = SubalgebraReport { max_size, ..Default::default() };
    for p in all_posets(max_size)? {
        let up = UpsetAlgebra::new(&p).expect("small poset");
        let subs = up.algebra().subalgebras(Signature::IMPLICATIVE);
        let parts: Vec<PartialCorrectPartition> = subs
            .iter()
            .map(|b| PartialCorrectPartition::of_subalgebra(&up, b).expect("subalgebra has a partition"))
            .collect();
        for (b, part) in subs.iter().zip(&parts) {
            r.subalgebras += 1;
            r.failures.check(part.subalgebra(&up) == *b, || format!("partition of {b:?} on {p:?} does not round-trip"));
        }
        for s in s_subsets(p.len()) {
            r.sposets += 1;
            let sp = SPoset::new(p.clone(), s.clone()).expect("same carrier");
            let nuclear = up.nuclear(&s, false);
            for (b, part) in subs.iter().zip(&parts) {
                r.failures.check(part.is_nuclear(&s) == nuclear.is_subalgebra(b, Signature::NUCLEAR), || {
                    format!("nuclear test wrong for {b:?} on {p:?} S={s:?}")
                });
            }
            for mode in [SubalgebraMode::Plain, SubalgebraMode::Nuclear, SubalgebraMode::BoundedNuclear] {
                if mode == SubalgebraMode::Plain && s.count() > 0 {
                    continue;
                }
                r.maximal_checks += 1;
                let ours: HashSet<ElemSet> = maximal_partitions(&sp, mode).iter().map(|q| q.subalgebra(&up)).collect();
                let brute: HashSet<ElemSet> = maximal_subalgebras_brute_force(&up, &sp, mode).into_iter().collect();
                r.failures.check(ours == brute, || format!("maximal {mode:?} subalgebras differ on {p:?} S={s:?}"));
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ColoringReport {
    pub variety: Option<Variety>,
    pub max_size: usize,
    pub max_n: usize,
    pub models: u64,
    pub irreducible: u64,
    pub failures: Failures,
}

impl ColoringReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the structural irreducibility test with the generation oracle
/// on every model with at most `max_size` points and at most `max_n`
/// colors. Posets are split across threads.
pub fn verify_coloring(variety: Variety, max_size: usize, max_n: usize) -> Result<ColoringReport, PosetError> {
    let posets = all_posets(max_size)?;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(posets.len().max(1));
    let chunks: Vec<Vec<Poset>> = (0..threads).map(|t| posets.iter().skip(t).step_by(threads).cloned().collect()).collect();
    let parts: Vec<ColoringReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| scope.spawn(move || coloring_chunk(variety, chunk, max_n)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut r = ColoringReport { variety: Some(variety), max_size, max_n, ..Default::default() };
    for part in parts {
        r.models += part.models;
        r.irreducible += part.irreducible;
        r.failures.merge(part.failures);
    }
    Ok(r)
}

fn coloring_chunk(variety: Variety, posets: &[Poset], max_n: usize) -> ColoringReport {
    let mut r = ColoringReport::default();
    for p in posets {
        let up = UpsetAlgebra::new(p).expect("small poset");
        let s_choices: Vec<ElemSet> =
            if variety.is_nuclear() { s_subsets(p.len()).collect() } else { vec![p.full_set()] };
        for s in s_choices {
            let sp = SPoset::new(p.clone(), s.clone()).expect("same carrier");
            if !variety.admits(&sp) {
                continue;
            }
            let alg = if variety.is_nuclear() {
                up.nuclear(&s, variety.is_bounded())
            } else {
                up.algebra().clone().with_bottom(variety.is_bounded())
            };
            let full = up.len();
            for n in 0..=max_n {
                let mut gens = vec![0usize; n];
                loop {
                    r.models += 1;
                    let upsets: Vec<Upset> = gens.iter().map(|&g| up.upset(g).clone()).collect();
                    let model = Model::from_upsets(sp.clone(), &upsets).expect("upsets give a model");
                    let structural = model.is_irreducible(variety).expect("precondition checked");
                    let oracle = alg.closure(gens.iter().copied(), variety.signature()).count() == full;
                    if structural {
                        r.irreducible += 1;
                    }
                    r.failures.check(structural == oracle, || {
                        format!("{variety}: {p:?} S={s:?} gens={upsets:?}: structural={structural} oracle={oracle}")
                    });
                    if !advance(&mut gens, full) {
                        break;
                    }
                }
            }
        }
    }
    r
}

fn advance(a: &mut [usize], base: usize) -> bool {
    for d in a.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
