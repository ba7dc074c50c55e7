use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::chain::{ocrs_chain_with, BuildTrace, ChainParams, SpanningChain, EPS_MAX};
use crate::error::{domain, Result};
use crate::matroid::MatroidOracle;
use crate::set::{ElemSet, ElementId};
use crate::stochastic::{
    check_unit, filter_actives, in_scaled_polytope, scale, ActiveSampler, FilteredSampler,
    MarginalVector, RngStream, EXACT_MAX_N,
};

use super::{
    accepted_when_last, exact_last_acceptance, run_selection, shuffled, worst_case_order,
    AdversaryModel, ArrivalOrder,
};

pub const WILSON_CONFIDENCE: f64 = 0.99;

/// Two-sided Wilson score interval for `successes` out of `trials`.
/// `(0, 1)` when there are no trials.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// What happened in one trial.
#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    /// `R(x)`, before the `λ` filter.
    pub active: ElemSet,
    /// Actives that survived the filter and reached the greedy rule.
    pub fed: ElemSet,
    /// Elements of `fed` the rule accepted under the adversary's order.
    pub selected: ElemSet,
    pub draw_count: usize,
    pub link_sizes: Vec<usize>,
}

impl TrialOutcome {
    /// `C_ζ = ∅`, the second-to-last link being empty.
    pub fn penultimate_link_empty(&self) -> bool {
        self.link_sizes.len() < 2 || self.link_sizes[self.link_sizes.len() - 2] == 0
    }
}

/// Draws a chain, then `R(x)`, then the filter coins, then lets the
/// adversary order the fed elements and runs the greedy rule.
///
/// With a per-target adversary each fed element is judged under its own
/// worst order; the recorded selection is that per-target outcome.
pub fn chain_ocrs_trial<F>(
    m: &MatroidOracle,
    x: &MarginalVector,
    lambda: f64,
    chain_sampler: F,
    adversary: AdversaryModel,
    rng: &mut RngStream,
) -> Result<TrialOutcome>
where
    F: FnOnce(&mut RngStream) -> Result<(SpanningChain, BuildTrace)>,
{
    check_unit(lambda, "λ")?;
    let (chain, trace) = chain_sampler(rng)?;
    chain.validate(m.ground_set())?;
    let active = x.restrict(m.ground_set()).sampler().draw(rng);
    let fed = filter_actives(&active, lambda, rng)?;

    let selected = match adversary {
        AdversaryModel::ElementLast => {
            let mut out = ElemSet::new();
            for e in &fed {
                if accepted_when_last(m, &chain, &fed, e)? {
                    out.insert(e);
                }
            }
            out
        }
        AdversaryModel::ExhaustiveWorst => {
            let mut out = ElemSet::new();
            for e in &fed {
                let order = worst_case_order(m, &chain, &fed, e, adversary)?;
                if run_selection(m, &chain, &fed, &order)?.contains(e) {
                    out.insert(e);
                }
            }
            out
        }
        AdversaryModel::RandomOrder => run_selection(m, &chain, &fed, &shuffled(&fed, rng))?,
        AdversaryModel::Fixed => run_selection(m, &chain, &fed, &ArrivalOrder::ascending(&fed))?,
    };

    Ok(TrialOutcome {
        active,
        fed,
        selected,
        draw_count: trace.draw_count,
        link_sizes: chain.links().iter().map(ElemSet::len).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementTally {
    pub element_id: ElementId,
    pub activations: u64,
    pub selections: u64,
    /// `selections / activations`, or 0 with no activations.
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ElementTally {
    fn new(element_id: ElementId, activations: u64, selections: u64) -> Self {
        let frequency = if activations == 0 {
            0.0
        } else {
            selections as f64 / activations as f64
        };
        let (ci_low, ci_high) = wilson_interval(selections, activations, WILSON_CONFIDENCE);
        Self {
            element_id,
            activations,
            selections,
            frequency,
            ci_low,
            ci_high,
        }
    }
}

/// Per-element selection counts conditioned on activation in `R(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectabilityReport {
    pub seed: u64,
    pub trials: u64,
    pub lambda: f64,
    pub adversary: AdversaryModel,
    pub chain: Option<ChainParams>,
    pub elements: Vec<ElementTally>,
    /// Smallest frequency among elements with at least one activation;
    /// `None` when nothing was ever active.
    pub min_frequency: Option<f64>,
    pub argmin: Option<ElementId>,
    pub draw_count_total: u64,
    /// Trials whose chain had `C_ζ = ∅`.
    pub penultimate_empty: u64,
}

impl SelectabilityReport {
    /// Tallies `outcomes` over the elements of `ground`.
    pub fn from_outcomes<'a, I>(ground: &ElemSet, outcomes: I) -> Self
    where
        I: IntoIterator<Item = &'a TrialOutcome>,
    {
        let n = ground.iter().last().map_or(0, |e| e + 1);
        let mut act = vec![0u64; n];
        let mut sel = vec![0u64; n];
        let (mut trials, mut draws, mut empty) = (0, 0, 0);
        for o in outcomes {
            trials += 1;
            draws += o.draw_count as u64;
            empty += u64::from(o.penultimate_link_empty());
            for e in &o.active {
                act[e] += 1;
                sel[e] += u64::from(o.selected.contains(e));
            }
        }
        let mut report = Self {
            seed: 0,
            trials,
            lambda: 0.0,
            adversary: AdversaryModel::ElementLast,
            chain: None,
            elements: ground
                .iter()
                .map(|e| ElementTally::new(e, act[e], sel[e]))
                .collect(),
            min_frequency: None,
            argmin: None,
            draw_count_total: draws,
            penultimate_empty: empty,
        };
        report.refresh_min();
        report
    }

    fn refresh_min(&mut self) {
        let best = self
            .elements
            .iter()
            .filter(|t| t.activations > 0)
            .min_by(|a, b| a.frequency.total_cmp(&b.frequency));
        self.min_frequency = best.map(|t| t.frequency);
        self.argmin = best.map(|t| t.element_id);
    }

    /// Adds the counts of `other`, which must cover the same elements.
    /// Commutative in the counts.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        let same = self.elements.len() == other.elements.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.element_id == b.element_id);
        if !same {
            return Err(domain("merging reports over different element sets"));
        }
        for (a, b) in self.elements.iter_mut().zip(&other.elements) {
            *a = ElementTally::new(
                a.element_id,
                a.activations + b.activations,
                a.selections + b.selections,
            );
        }
        self.trials += other.trials;
        self.draw_count_total += other.draw_count_total;
        self.penultimate_empty += other.penultimate_empty;
        self.refresh_min();
        Ok(())
    }

    /// True when no element was ever active.
    pub fn is_vacuous(&self) -> bool {
        self.min_frequency.is_none()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("element_id,activations,selections,frequency,ci_low,ci_high\n");
        for t in &self.elements {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t.element_id, t.activations, t.selections, t.frequency, t.ci_low, t.ci_high
            ));
        }
        out
    }
}

/// The chain-based OCRS on `x ∈ P_M` with filter `λ`, chains built from
/// `D(λx)` with `τ = λ + 4ε`.
pub fn selectability_experiment(
    m: &MatroidOracle,
    x: &MarginalVector,
    lambda: f64,
    eps: f64,
    trials: usize,
    adversary: AdversaryModel,
    seed: u64,
) -> Result<SelectabilityReport> {
    if !(eps > 0.0 && eps <= EPS_MAX) {
        return Err(domain(format!("ε = {eps} must lie in (0, 1/20]")));
    }
    if !(lambda > 0.0 && lambda <= 1.0 - 4.0 * eps) {
        return Err(domain(format!("λ = {lambda} must lie in (0, 1 − 4ε]")));
    }
    let params = ChainParams::new(m, lambda + 4.0 * eps, eps)?;
    selectability_experiment_with(m, x, lambda, &params, trials, adversary, seed)
}

/// [`selectability_experiment`] with explicit chain parameters.
pub fn selectability_experiment_with(
    m: &MatroidOracle,
    x: &MarginalVector,
    lambda: f64,
    params: &ChainParams,
    trials: usize,
    adversary: AdversaryModel,
    seed: u64,
) -> Result<SelectabilityReport> {
    if trials == 0 {
        return Err(domain("trials must be at least 1"));
    }
    check_unit(lambda, "λ")?;
    let x = x.restrict(m.ground_set());
    if m.universe_size() <= EXACT_MAX_N && !in_scaled_polytope(m, &x, 1.0)? {
        return Err(domain("x lies outside the matroid polytope"));
    }
    let scaled = FilteredSampler::new(x.sampler(), lambda)?;
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::new(seed, t);
            chain_ocrs_trial(
                m,
                &x,
                lambda,
                |r| ocrs_chain_with(m, &scaled, params, r),
                adversary,
                &mut rng,
            )
        })
        .collect::<Result<_>>()?;
    let mut report = SelectabilityReport::from_outcomes(m.ground_set(), &outcomes);
    report.seed = seed;
    report.lambda = lambda;
    report.adversary = adversary;
    report.chain = Some(*params);
    Ok(report)
}

/// `Pr[e selected | e ∈ R(x)]` for a fixed chain under the target-last
/// order, with `R(x)` and the filter coins enumerated exactly:
/// `λ · Pr[e accepted last | e fed]`, other elements fed with `λx`.
pub fn exact_chain_selectability(
    m: &MatroidOracle,
    chain: &SpanningChain,
    x: &MarginalVector,
    lambda: f64,
    e: ElementId,
) -> Result<f64> {
    Ok(lambda * exact_last_acceptance(m, chain, &scale(x, lambda)?, e)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(
        chain: &SpanningChain,
    ) -> impl Fn(&mut RngStream) -> Result<(SpanningChain, BuildTrace)> + '_ {
        move |_| Ok((chain.clone(), BuildTrace::from_links(vec![])))
    }

    #[test]
    fn wilson_reference() {
        // 7/10 at 99%: centre (0.7 + z²/20) / (1 + z²/10).
        let (lo, hi) = wilson_interval(7, 10, 0.99);
        let z: f64 = 2.5758293035489004;
        let d = 1.0 + z * z / 10.0;
        let c = (0.7 + z * z / 20.0) / d;
        let h = z * (0.21 / 10.0 + z * z / 400.0).sqrt() / d;
        assert!((lo - (c - h)).abs() < 1e-9 && (hi - (c + h)).abs() < 1e-9);
        assert_eq!(wilson_interval(0, 0, 0.99), (0.0, 1.0));
    }

    #[test]
    fn certain_single_element_always_selected() {
        let m = MatroidOracle::uniform(1, 1);
        let chain = SpanningChain::trivial(m.ground_set());
        let x = MarginalVector::constant(1, 1.0).unwrap();
        for t in 0..20 {
            let o = chain_ocrs_trial(
                &m,
                &x,
                1.0,
                fixed(&chain),
                AdversaryModel::ElementLast,
                &mut RngStream::new(0, t),
            )
            .unwrap();
            assert_eq!(o.selected, ElemSet::singleton(0));
        }
    }

    #[test]
    fn zero_lambda_feeds_nothing() {
        let m = MatroidOracle::uniform(3, 2);
        let chain = SpanningChain::trivial(m.ground_set());
        let x = MarginalVector::constant(3, 0.6).unwrap();
        let outcomes: Vec<_> = (0..200)
            .map(|t| {
                chain_ocrs_trial(
                    &m,
                    &x,
                    0.0,
                    fixed(&chain),
                    AdversaryModel::RandomOrder,
                    &mut RngStream::new(1, t),
                )
                .unwrap()
            })
            .collect();
        assert!(outcomes
            .iter()
            .all(|o| o.fed.is_empty() && o.selected.is_empty()));
        let report = SelectabilityReport::from_outcomes(m.ground_set(), &outcomes);
        assert!(report
            .elements
            .iter()
            .all(|t| t.activations > 0 && t.selections == 0));
        assert_eq!(report.min_frequency, Some(0.0));
    }

    #[test]
    fn rank_one_element_last_matches_enumeration() {
        let m = MatroidOracle::uniform(2, 1);
        let chain = SpanningChain::trivial(m.ground_set());
        let x = MarginalVector::new(vec![0.3, 0.3]).unwrap();
        let outcomes: Vec<_> = (0..40_000)
            .map(|t| {
                chain_ocrs_trial(
                    &m,
                    &x,
                    1.0,
                    fixed(&chain),
                    AdversaryModel::ElementLast,
                    &mut RngStream::new(2, t),
                )
                .unwrap()
            })
            .collect();
        let report = SelectabilityReport::from_outcomes(m.ground_set(), &outcomes);
        let exact = exact_chain_selectability(&m, &chain, &x, 1.0, 0).unwrap();
        assert!((exact - 0.7).abs() < 1e-15);
        let t = &report.elements[0];
        let sigma = (0.7 * 0.3 / t.activations as f64).sqrt();
        assert!((t.frequency - 0.7).abs() < 3.0 * sigma, "{}", t.frequency);
    }

    #[test]
    fn zero_vector_is_vacuous() {
        let m = MatroidOracle::uniform(2, 1);
        let params = ChainParams::new(&m, 0.7, 0.05).unwrap().scaled_down(10);
        let report = selectability_experiment_with(
            &m,
            &MarginalVector::zeros(2),
            0.5,
            &params,
            10,
            AdversaryModel::ElementLast,
            3,
        )
        .unwrap();
        assert!(report.is_vacuous());
        assert!(report.elements.iter().all(|t| t.activations == 0));
    }

    #[test]
    fn merge_is_commutative() {
        let m = MatroidOracle::uniform(3, 1);
        let chain = SpanningChain::trivial(m.ground_set());
        let x = MarginalVector::constant(3, 0.3).unwrap();
        let run = |seed| {
            let outcomes: Vec<_> = (0..300)
                .map(|t| {
                    chain_ocrs_trial(
                        &m,
                        &x,
                        0.8,
                        fixed(&chain),
                        AdversaryModel::Fixed,
                        &mut RngStream::new(seed, t),
                    )
                    .unwrap()
                })
                .collect();
            SelectabilityReport::from_outcomes(m.ground_set(), &outcomes)
        };
        let (a, b) = (run(1), run(2));
        let mut ab = a.clone();
        ab.merge(&b).unwrap();
        let mut ba = b.clone();
        ba.merge(&a).unwrap();
        assert_eq!(ab, ba);
        assert!(ab.elements.iter().all(|t| t.selections <= t.activations));
    }

    #[test]
    fn parameter_domain() {
        let m = MatroidOracle::uniform(2, 1);
        let x = MarginalVector::constant(2, 0.5).unwrap();
        let run = |lambda, eps| {
            selectability_experiment(&m, &x, lambda, eps, 1, AdversaryModel::ElementLast, 0)
        };
        assert!(run(0.5, 0.06).is_err());
        assert!(run(0.0, 0.05).is_err());
        assert!(run(0.81, 0.05).is_err());
        let outside = MarginalVector::constant(2, 0.9).unwrap();
        assert!(selectability_experiment(
            &m,
            &outside,
            0.5,
            0.05,
            1,
            AdversaryModel::ElementLast,
            0
        )
        .is_err());
    }

    #[test]
    fn csv_layout() {
        let m = MatroidOracle::uniform(2, 1);
        let report = SelectabilityReport::from_outcomes(m.ground_set(), &[]);
        let csv = report.to_csv();
        assert!(csv.starts_with(
            "element_id,activations,selections,frequency,ci_low,ci_high\n0,0,0,0,0,1\n"
        ));
    }
}
