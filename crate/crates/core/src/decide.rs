//! Term evaluation, free algebras assembled from universal models, and the
//! validity check for equations `t = 1`.

use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, NuclearAlgebra, UpsetAlgebra};
use crate::coloring::{Model, ModelError, Variety};
use crate::poset::{posets_up_to_iso, PosetError, MAX_ENUMERATED_POSET};
use crate::set::{Color, Elem, ElemSet};
use crate::term::Term;
use crate::universal::{build_universal_model, BuildError, Limits, LayeredModel, Truncation};
use crate::upset::{SPoset, Upset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable x{0} has no value")]
    Unbound(u32),
    #[error("the algebra has no constant 0")]
    NoBottom,
    #[error("the algebra has no nucleus")]
    NoNucleus,
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("the {variety} universal model on {n} generators is truncated ({truncation:?}); use refute instead")]
    Truncated { n: usize, variety: Variety, truncation: Truncation },
    #[error("term uses 0, which {0} does not have")]
    BottomNotInSignature(Variety),
    #[error("term uses j, which {0} does not have")]
    NucleusNotInSignature(Variety),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("model was built for {found} on {found_n} generators, expected {expected} on {expected_n}")]
    WrongModel { expected: Variety, expected_n: usize, found: Variety, found_n: usize },
    #[error("countermodel failed re-evaluation")]
    Verification,
}

/// Evaluates `t` with `x_i` taking the value `assignment[i - 1]`.
pub fn evaluate<A: NuclearAlgebra>(t: &Term, alg: &A, assignment: &[A::Elem]) -> Result<A::Elem, EvalError> {
    Ok(match t {
        Term::Var(i) => assignment.get(*i as usize - 1).cloned().ok_or(EvalError::Unbound(*i))?,
        Term::Top => alg.top(),
        Term::Bot => alg.bottom().ok_or(EvalError::NoBottom)?,
        Term::Meet(a, b) => alg.meet(&evaluate(a, alg, assignment)?, &evaluate(b, alg, assignment)?),
        Term::Imp(a, b) => alg.imp(&evaluate(a, alg, assignment)?, &evaluate(b, alg, assignment)?),
        Term::J(a) => alg.nucleus(&evaluate(a, alg, assignment)?).ok_or(EvalError::NoNucleus)?,
    })
}

/// `Up(X)` of an S-poset computed on the fly, without tabulating.
#[derive(Clone, Copy, Debug)]
pub struct UpsetView<'a> {
    sposet: &'a SPoset,
    nuclear: bool,
    bounded: bool,
}

impl<'a> UpsetView<'a> {
    pub fn new(sposet: &'a SPoset, nuclear: bool, bounded: bool) -> Self {
        UpsetView { sposet, nuclear, bounded }
    }

    pub fn for_variety(sposet: &'a SPoset, variety: Variety) -> Self {
        Self::new(sposet, variety.is_nuclear(), variety.is_bounded())
    }
}

impl NuclearAlgebra for UpsetView<'_> {
    type Elem = Upset;

    fn top(&self) -> Upset {
        self.sposet.poset().top_upset()
    }

    fn meet(&self, a: &Upset, b: &Upset) -> Upset {
        Upset::trusted(a.members().intersection(b.members()))
    }

    fn imp(&self, a: &Upset, b: &Upset) -> Upset {
        self.sposet.poset().implies_unchecked(a, b)
    }

    fn nucleus(&self, a: &Upset) -> Option<Upset> {
        self.nuclear.then(|| self.sposet.nucleus_unchecked(a))
    }

    fn bottom(&self) -> Option<Upset> {
        self.bounded.then(|| self.sposet.poset().bottom_upset())
    }

    fn leq(&self, a: &Upset, b: &Upset) -> bool {
        a.is_subset(b)
    }
}

/// The free algebra on `n` generators: the upsets of the universal model,
/// with the generators read off the coloring.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    model: LayeredModel,
    generators: Vec<Upset>,
}

impl FreeAlgebra {
    /// Wraps a complete (untruncated) universal model.
    pub fn from_model(model: LayeredModel) -> Result<FreeAlgebra, DecideError> {
        if let Some(truncation) = model.truncation() {
            return Err(DecideError::Truncated { n: model.n(), variety: model.variety(), truncation });
        }
        let generators = model.model().generators();
        Ok(FreeAlgebra { model, generators })
    }

    pub fn variety(&self) -> Variety {
        self.model.variety()
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn universal_model(&self) -> &LayeredModel {
        &self.model
    }

    pub fn generators(&self) -> &[Upset] {
        &self.generators
    }

    pub fn view(&self) -> UpsetView<'_> {
        UpsetView::for_variety(self.model.model().sposet(), self.variety())
    }

    /// Number of elements, i.e. of upsets (equivalently antichains) of the model.
    pub fn size(&self) -> u128 {
        self.model.poset().count_antichains()
    }

    /// Tabulates the algebra. Fails when it has more than `guard` elements.
    pub fn tabulate(&self, guard: usize) -> Result<(UpsetAlgebra, FiniteAlgebra), DecideError> {
        let ua = UpsetAlgebra::with_guard(self.model.poset(), guard)?;
        let v = self.variety();
        let alg = if v.is_nuclear() {
            ua.nuclear(self.model.model().sposet().s(), v.is_bounded())
        } else {
            ua.algebra().clone().with_bottom(v.is_bounded())
        };
        Ok((ua, alg))
    }

    /// Indices of the generators in a tabulation from [`FreeAlgebra::tabulate`].
    pub fn generator_indices(&self, ua: &UpsetAlgebra) -> Vec<usize> {
        self.generators.iter().map(|g| ua.index_of(g).expect("generator is an upset")).collect()
    }
}

pub fn free_algebra(n: usize, variety: Variety, limits: Limits) -> Result<FreeAlgebra, DecideError> {
    FreeAlgebra::from_model(build_universal_model(n, variety, limits)?)
}

/// A finite model refuting `t = 1`: color `i` stands for the variable
/// `x_{variables[i-1]}` of the original term.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub model: Model,
    pub variables: Vec<u32>,
    /// Value of the term; a proper upset.
    pub value: Upset,
}

impl Countermodel {
    pub fn assignment(&self) -> Vec<Upset> {
        self.model.generators()
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub valid: bool,
    pub countermodel: Option<Countermodel>,
}

fn check_signature(t: &Term, variety: Variety) -> Result<(), DecideError> {
    if t.uses_bot() && !variety.is_bounded() {
        return Err(DecideError::BottomNotInSignature(variety));
    }
    if t.uses_j() && !variety.is_nuclear() {
        return Err(DecideError::NucleusNotInSignature(variety));
    }
    Ok(())
}

/// Decides `t = 1` in the variety by building the free algebra on the
/// variables of `t`.
pub fn decide(t: &Term, variety: Variety, limits: Limits) -> Result<Verdict, DecideError> {
    check_signature(t, variety)?;
    let (compact, _) = t.compact();
    let free = free_algebra(compact.variables().len(), variety, limits)?;
    decide_in(t, &free)
}

/// Like [`decide`], with a free algebra already at hand. The algebra must
/// have exactly as many generators as `t` has distinct variables.
pub fn decide_in(t: &Term, free: &FreeAlgebra) -> Result<Verdict, DecideError> {
    let variety = free.variety();
    check_signature(t, variety)?;
    let (compact, variables) = t.compact();
    if variables.len() != free.n() {
        return Err(DecideError::WrongModel {
            expected: variety,
            expected_n: variables.len(),
            found: variety,
            found_n: free.n(),
        });
    }
    let view = free.view();
    let value = evaluate(&compact, &view, free.generators())?;
    let Some(x) = value.members().complement().first() else {
        return Ok(Verdict { valid: true, countermodel: None });
    };
    let model = free.universal_model().model();
    let (restricted, _) = model.restrict_to_upset(&model.poset().principal_upset(x));
    let cm_view = UpsetView::for_variety(restricted.sposet(), variety);
    let cm_value = evaluate(&compact, &cm_view, &restricted.generators())?;
    if cm_value == cm_view.top() {
        return Err(DecideError::Verification);
    }
    Ok(Verdict { valid: false, countermodel: Some(Countermodel { model: restricted, variables, value: cm_value }) })
}

#[derive(Clone, Debug)]
pub enum RefuteOutcome {
    Invalid(Countermodel),
    /// No countermodel with at most `max_size` points.
    Unknown { max_size: usize, models_checked: u64 },
}

/// Searches every S-poset with at most `max_size` points (up to isomorphism
/// of the poset) and every assignment for one where `t` is not 1. Witnesses
/// are tried by size, then poset, then `S` as a bitmask, then assignment.
pub fn refute(t: &Term, variety: Variety, max_size: usize) -> Result<RefuteOutcome, DecideError> {
    check_signature(t, variety)?;
    if max_size > MAX_ENUMERATED_POSET {
        return Err(PosetError::TooLarge { size: max_size, guard: MAX_ENUMERATED_POSET }.into());
    }
    let (compact, variables) = t.compact();
    let k = variables.len();
    let mut checked = 0u64;
    for size in 1..=max_size {
        for poset in posets_up_to_iso(size)? {
            let ua = UpsetAlgebra::new(&poset)?;
            let s_choices: Vec<ElemSet> = if variety.is_nuclear() {
                (0u32..1 << size)
                    .map(|m| ElemSet::from_indices(size, (0..size).filter(|i| m >> i & 1 == 1)))
                    .collect()
            } else {
                vec![poset.full_set()]
            };
            for s in s_choices {
                let sp = SPoset::new(poset.clone(), s.clone()).expect("same carrier");
                if matches!(variety, Variety::Dense | Variety::LocallyDense) && !variety.admits(&sp) {
                    continue;
                }
                let alg = if variety.is_nuclear() {
                    ua.nuclear(&s, variety.is_bounded())
                } else {
                    ua.algebra().clone().with_bottom(variety.is_bounded())
                };
                let mut assignment = vec![0usize; k];
                loop {
                    checked += 1;
                    let value = evaluate(&compact, &alg, &assignment)?;
                    if value != alg.top() {
                        let gens: Vec<Upset> = assignment.iter().map(|&i| ua.upset(i).clone()).collect();
                        let model = Model::from_upsets(sp, &gens)?;
                        let cm_value = ua.upset(value).clone();
                        return Ok(RefuteOutcome::Invalid(Countermodel { model, variables, value: cm_value }));
                    }
                    if !next_assignment(&mut assignment, ua.len()) {
                        break;
                    }
                }
            }
        }
    }
    Ok(RefuteOutcome::Unknown { max_size, models_checked: checked })
}

fn next_assignment(a: &mut [usize], base: usize) -> bool {
    for d in a.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Re-evaluates a countermodel and confirms the term is not 1 there.
pub fn check_countermodel(t: &Term, variety: Variety, cm: &Countermodel) -> Result<bool, DecideError> {
    let (compact, variables) = t.compact();
    if variables != cm.variables {
        return Ok(false);
    }
    let view = UpsetView::for_variety(cm.model.sposet(), variety);
    let value = evaluate(&compact, &view, &cm.model.generators())?;
    Ok(value == cm.value && value != view.top())
}

/// The color of every point of a countermodel, as original variable
/// indices, for display.
pub fn countermodel_colors(cm: &Countermodel) -> Vec<(Elem, Vec<u32>)> {
    (0..cm.model.len())
        .map(|x| {
            let c: Color = cm.model.color(x);
            (x, c.colors().map(|i| cm.variables[i - 1]).collect())
        })
        .collect()
}
