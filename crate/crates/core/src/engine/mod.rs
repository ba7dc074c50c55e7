//! Online selection over a spanning chain: the level-wise greedy rule,
//! adversarial arrival orders, and selectability measurement.

mod selectability;

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::chain::SpanningChain;
use crate::error::{domain, OcrsError, Result};
use crate::matroid::MatroidOracle;
use crate::set::{ElemSet, ElementId};
use crate::stochastic::{ActiveSet, MarginalVector, RngStream};

pub use selectability::{
    chain_ocrs_trial, exact_chain_selectability, selectability_experiment,
    selectability_experiment_with, wilson_interval, ElementTally, SelectabilityReport,
    TrialOutcome, WILSON_CONFIDENCE,
};

/// Largest active set the exhaustive adversary will permute.
pub const EXHAUSTIVE_MAX_ACTIVES: usize = 7;

/// A permutation of the active elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ArrivalOrder(Vec<ElementId>);

impl ArrivalOrder {
    /// Checks that `sequence` lists every member of `actives` exactly once.
    pub fn new(sequence: Vec<ElementId>, actives: &ActiveSet) -> Result<Self> {
        let seen: ElemSet = sequence.iter().copied().collect();
        if seen.len() != sequence.len() || &seen != actives {
            return Err(domain(
                "arrival order is not a permutation of the active set",
            ));
        }
        Ok(Self(sequence))
    }

    /// Increasing id order.
    pub fn ascending(actives: &ActiveSet) -> Self {
        Self(actives.to_vec())
    }

    /// Increasing id order with `target` moved to the end.
    pub fn target_last(actives: &ActiveSet, target: ElementId) -> Result<Self> {
        if !actives.contains(target) {
            return Err(domain(format!("target {target} is not active")));
        }
        let mut seq: Vec<_> = actives.iter().filter(|&e| e != target).collect();
        seq.push(target);
        Ok(Self(seq))
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Accepted elements, grouped by chain level.
#[derive(Debug, Clone)]
pub struct OcrsState<'c> {
    chain: &'c SpanningChain,
    /// `(M|C_i)/C_{i+1}`, built on first use.
    minors: Vec<Option<MatroidOracle>>,
    accepted: Vec<ElemSet>,
}

impl<'c> OcrsState<'c> {
    pub fn new(chain: &'c SpanningChain) -> Self {
        let levels = chain.len();
        Self {
            chain,
            minors: vec![None; levels],
            accepted: vec![ElemSet::new(); levels],
        }
    }

    pub fn chain(&self) -> &SpanningChain {
        self.chain
    }

    pub fn accepted_at(&self, level: usize) -> &ElemSet {
        &self.accepted[level]
    }

    /// Union of the accepted sets of every level.
    pub fn accepted(&self) -> ElemSet {
        let mut all = ElemSet::new();
        for a in &self.accepted {
            all.union_with(a);
        }
        all
    }

    fn minor(&mut self, m: &MatroidOracle, level: usize) -> Result<&MatroidOracle> {
        if self.minors[level].is_none() {
            let below =
                self.chain.links().get(level + 1).ok_or_else(|| {
                    OcrsError::Internal("element sits in the terminal link".into())
                })?;
            let minor = m.restrict(self.chain.link(level))?.contract(below)?;
            self.minors[level] = Some(minor);
        }
        Ok(self.minors[level].as_ref().expect("just built"))
    }
}

/// Feeds `e` to the greedy rule: with `i` the level of `e`, accept iff the
/// level-`i` accepted set plus `e` is independent in `(M|C_i)/C_{i+1}`.
pub fn greedy_step(state: &mut OcrsState<'_>, m: &MatroidOracle, e: ElementId) -> Result<bool> {
    m.check_element(e)?;
    let level = state
        .chain
        .level_of(e)
        .ok_or_else(|| OcrsError::Internal(format!("element {e} lies in no link")))?;
    let grown = state.accepted[level].with(e);
    let accept = state.minor(m, level)?.is_independent(&grown)?;
    if accept {
        state.accepted[level] = grown;
    }
    Ok(accept)
}

/// Runs the greedy rule over `actives` in `order`; the result is checked to
/// be independent in `m`.
pub fn run_selection(
    m: &MatroidOracle,
    chain: &SpanningChain,
    actives: &ActiveSet,
    order: &ArrivalOrder,
) -> Result<ElemSet> {
    let order = ArrivalOrder::new(order.0.clone(), actives)?;
    let mut state = OcrsState::new(chain);
    for &e in order.as_slice() {
        greedy_step(&mut state, m, e)?;
    }
    let accepted = state.accepted();
    if !m.is_independent(&accepted)? {
        return Err(OcrsError::Internal(format!(
            "greedy accepted a dependent set {accepted:?}"
        )));
    }
    Ok(accepted)
}

/// Whether `target` is accepted when it arrives last among `actives`.
pub fn accepted_when_last(
    m: &MatroidOracle,
    chain: &SpanningChain,
    actives: &ActiveSet,
    target: ElementId,
) -> Result<bool> {
    let order = ArrivalOrder::target_last(actives, target)?;
    Ok(run_selection(m, chain, actives, &order)?.contains(target))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryModel {
    /// Per target, the order that presents it last.
    ElementLast,
    /// Per target, a search over every order; cross-checks `ElementLast`.
    ExhaustiveWorst,
    /// One uniformly random order per trial.
    RandomOrder,
    /// Increasing id order.
    Fixed,
}

/// An order minimizing the acceptance of `target`.
///
/// `ElementLast` returns the target-last order. `ExhaustiveWorst` tries
/// every permutation (at most 7 actives) and fails if the minimum differs
/// from the target-last outcome.
pub fn worst_case_order(
    m: &MatroidOracle,
    chain: &SpanningChain,
    actives: &ActiveSet,
    target: ElementId,
    adversary: AdversaryModel,
) -> Result<ArrivalOrder> {
    let last = ArrivalOrder::target_last(actives, target)?;
    match adversary {
        AdversaryModel::ElementLast => Ok(last),
        AdversaryModel::ExhaustiveWorst => {
            if actives.len() > EXHAUSTIVE_MAX_ACTIVES {
                return Err(OcrsError::TooLarge {
                    what: "active set for exhaustive order search",
                    n: actives.len(),
                    max: EXHAUSTIVE_MAX_ACTIVES,
                });
            }
            let last_accepts = run_selection(m, chain, actives, &last)?.contains(target);
            let members = actives.to_vec();
            let mut worst: Option<ArrivalOrder> = None;
            for perm in members.iter().copied().permutations(members.len()) {
                let order = ArrivalOrder(perm);
                if !run_selection(m, chain, actives, &order)?.contains(target) {
                    worst = Some(order);
                    break;
                }
            }
            let exhaustive_accepts = worst.is_none();
            if exhaustive_accepts != last_accepts {
                return Err(OcrsError::Internal(format!(
                    "exhaustive search ({exhaustive_accepts}) disagrees with target-last ({last_accepts}) for {target}"
                )));
            }
            Ok(worst.unwrap_or(last))
        }
        AdversaryModel::RandomOrder | AdversaryModel::Fixed => Err(domain(format!(
            "{adversary:?} does not choose orders per target"
        ))),
    }
}

/// Whether `target` is free of `actives`: not spanned by
/// `((actives ∖ {target}) ∩ C_i) ∪ C_{i+1}` at its level `i`.
pub fn free_of(
    m: &MatroidOracle,
    chain: &SpanningChain,
    actives: &ActiveSet,
    target: ElementId,
) -> Result<bool> {
    let level = chain
        .level_of(target)
        .ok_or_else(|| OcrsError::Internal(format!("element {target} lies in no link")))?;
    let below = chain
        .links()
        .get(level + 1)
        .ok_or_else(|| OcrsError::Internal("element sits in the terminal link".into()))?;
    let mut s = actives.without(target).intersection(chain.link(level));
    s.union_with(below);
    Ok(!m.span_unchecked(&s).contains(target))
}

/// Counts from [`verify_adversary_soundness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SoundnessSummary {
    /// `(active set, target)` pairs examined.
    pub pairs: usize,
    /// Pairs where the target survives its worst order.
    pub accepted: usize,
}

/// For every active set and target: the exhaustive worst order rejects the
/// target exactly when target-last does, and target-last accepts exactly
/// when the target is free of the other actives. Ground sets above 7 are
/// refused.
pub fn verify_adversary_soundness(
    m: &MatroidOracle,
    chain: &SpanningChain,
) -> Result<SoundnessSummary> {
    chain.validate(m.ground_set())?;
    let n = m.ground_set().len();
    if n > EXHAUSTIVE_MAX_ACTIVES {
        return Err(OcrsError::TooLarge {
            what: "ground set for exhaustive adversary audit",
            n,
            max: EXHAUSTIVE_MAX_ACTIVES,
        });
    }
    let mut summary = SoundnessSummary {
        pairs: 0,
        accepted: 0,
    };
    for actives in m.ground_set().subsets() {
        for target in &actives {
            let worst =
                worst_case_order(m, chain, &actives, target, AdversaryModel::ExhaustiveWorst)?;
            let survives = run_selection(m, chain, &actives, &worst)?.contains(target);
            let last = accepted_when_last(m, chain, &actives, target)?;
            let free = free_of(m, chain, &actives, target)?;
            if survives != last || last != free {
                return Err(OcrsError::Internal(format!(
                    "actives {actives:?}, target {target}: worst {survives}, last {last}, free {free}"
                )));
            }
            summary.pairs += 1;
            summary.accepted += usize::from(last);
        }
    }
    Ok(summary)
}

/// A uniformly random arrival order of `actives`.
pub fn shuffled(actives: &ActiveSet, rng: &mut RngStream) -> ArrivalOrder {
    let mut seq = actives.to_vec();
    seq.shuffle(rng);
    ArrivalOrder(seq)
}

/// `Pr[target accepted when last | target ∈ R]` for `R ~ D(x)`, by
/// enumeration of the other elements.
pub fn exact_last_acceptance(
    m: &MatroidOracle,
    chain: &SpanningChain,
    x: &MarginalVector,
    target: ElementId,
) -> Result<f64> {
    m.check_element(target)?;
    let mut forced = x.restrict(m.ground_set()).as_slice().to_vec();
    forced[target] = 1.0;
    let forced = MarginalVector::new(forced)?;
    let mut failure = None;
    let p = crate::stochastic::exact_event_probability(&forced, |r| {
        match accepted_when_last(m, chain, r, target) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                false
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(p),
    }
}
