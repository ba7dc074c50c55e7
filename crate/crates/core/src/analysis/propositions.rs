use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{
    chain_freeness, ocrs_chain_with, single_ocrs_link, ChainParams, EstimateMode, LinkParams,
    Overrides, SpanningChain, EPS_MAX,
};
use crate::engine::SelectabilityReport;
use crate::error::{domain, Result};
use crate::matroid::MatroidOracle;
use crate::stochastic::{in_scaled_polytope, MarginalVector, RngStream};

use super::{bonferroni_z, mean_sd, Direction, ElementCheck, Verdict, SIGMA_LEVEL};

/// `(1 + λ − (1 − 3ε)τ) · rank`.
pub fn progress_bound(lambda: f64, tau: f64, eps: f64, rank: usize) -> f64 {
    (1.0 + lambda - (1.0 - 3.0 * eps) * tau) * rank as f64
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= EPS_MAX {
        Ok(())
    } else {
        Err(domain(format!("ε = {eps} must lie in (0, 1/20]")))
    }
}

fn check_lambda(lambda: f64, eps: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 - 4.0 * eps {
        Ok(())
    } else {
        Err(domain(format!("λ = {lambda} must lie in (0, 1 − 4ε]")))
    }
}

fn check_polytope(m: &MatroidOracle, x: &MarginalVector, lambda: f64) -> Result<()> {
    if in_scaled_polytope(m, x, lambda)? {
        Ok(())
    } else {
        Err(domain(format!("x lies outside {lambda}·P_M")))
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(domain("trials must be at least 1"))
    } else {
        Ok(())
    }
}

/// Mean rank of single links built with threshold `(1 − ε)τ`, against
/// `(1 + λ − (1 − 3ε)τ)·rank(M)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_progress(
    m: &MatroidOracle,
    x: &MarginalVector,
    lambda: f64,
    rho: usize,
    tau: f64,
    eps: f64,
    trials: usize,
    seed: u64,
    overrides: &Overrides,
) -> Result<Verdict> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(domain(format!("λ = {lambda} must lie in (0, 1)")));
    }
    if !(tau > lambda && tau <= 1.0) {
        return Err(domain(format!("τ = {tau} must lie in (λ, 1]")));
    }
    check_eps(eps)?;
    check_trials(trials)?;
    let x = x.restrict(m.ground_set());
    check_polytope(m, &x, lambda)?;

    let params = overrides.apply_link(LinkParams::new(rho, (1.0 - eps) * tau, eps)?);
    let sampler = x.sampler();
    let ranks: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (a, _) = single_ocrs_link(m, &sampler, &params, &mut RngStream::new(seed, t))?;
            Ok(m.rank_unchecked(&a) as f64)
        })
        .collect::<Result<_>>()?;
    let (mean, sd, n) = mean_sd(ranks);
    let bound = progress_bound(lambda, tau, eps, m.matroid_rank());
    let tolerance = SIGMA_LEVEL * sd / (n as f64).sqrt();
    Ok(Verdict::scalar(
        "progress",
        Direction::AtMost,
        mean,
        bound,
        tolerance,
        seed,
        trials as u64,
    )
    .with_conforming(params.conforming))
}

fn chain_params(
    m: &MatroidOracle,
    lambda: f64,
    eps: f64,
    overrides: &Overrides,
) -> Result<ChainParams> {
    Ok(overrides.apply_chain(ChainParams::new(m, lambda + 4.0 * eps, eps)?))
}

fn build_chains(
    m: &MatroidOracle,
    x: &MarginalVector,
    params: &ChainParams,
    trials: usize,
    seed: u64,
) -> Result<Vec<SpanningChain>> {
    let sampler = x.sampler();
    (0..trials as u64)
        .into_par_iter()
        .map(|t| Ok(ocrs_chain_with(m, &sampler, params, &mut RngStream::new(seed, t))?.0))
        .collect()
}

/// `C_ζ`: the link just before the terminal empty one.
fn penultimate(chain: &SpanningChain) -> &crate::set::ElemSet {
    chain.link(chain.len() - 2)
}

/// Fraction of chains built with `τ = λ + 4ε` whose `C_ζ` is empty,
/// against `1 − ε`.
pub fn verify_spanning(
    m: &MatroidOracle,
    x: &MarginalVector,
    lambda: f64,
    eps: f64,
    trials: usize,
    seed: u64,
    overrides: &Overrides,
) -> Result<Verdict> {
    check_eps(eps)?;
    check_lambda(lambda, eps)?;
    check_trials(trials)?;
    let x = x.restrict(m.ground_set());
    check_polytope(m, &x, lambda)?;
    let params = chain_params(m, lambda, eps, overrides)?;
    let chains = build_chains(m, &x, &params, trials, seed)?;
    let empty = chains.iter().filter(|c| penultimate(c).is_empty()).count();
    let fraction = empty as f64 / trials as f64;
    let bound = 1.0 - eps;
    let tolerance = SIGMA_LEVEL * (bound * eps / trials as f64).sqrt();
    Ok(Verdict::scalar(
        "spanning",
        Direction::AtLeast,
        fraction,
        bound,
        tolerance,
        seed,
        trials as u64,
    )
    .with_conforming(params.conforming()))
}

/// Per-chain data behind [`verify_freeness_likely`].
#[derive(Debug, Clone, Serialize)]
pub struct FreenessLikelyRun {
    pub verdict: Verdict,
    /// Per element id, chains with `e ∉ C_ζ`.
    pub outside_last: Vec<u64>,
    /// Per element id, chains with `e ∉ C_ζ` and freeness at least `1 − λ − 4ε`.
    pub free_enough: Vec<u64>,
}

/// Per element, `Pr[freeness ≥ 1 − λ − 4ε | e ∉ C_ζ]` against
/// `1 − ε − 2ε / Pr[e ∉ C_ζ]`, with exact freeness for every sampled chain.
pub fn verify_freeness_likely(
    m: &MatroidOracle,
    x: &MarginalVector,
    lambda: f64,
    eps: f64,
    trials: usize,
    seed: u64,
    overrides: &Overrides,
) -> Result<FreenessLikelyRun> {
    check_eps(eps)?;
    check_lambda(lambda, eps)?;
    check_trials(trials)?;
    let x = x.restrict(m.ground_set());
    check_polytope(m, &x, lambda)?;
    let params = chain_params(m, lambda, eps, overrides)?;
    let chains = build_chains(m, &x, &params, trials, seed)?;
    let threshold = 1.0 - lambda - 4.0 * eps;

    let n = m.universe_size();
    let rows: Vec<Vec<(bool, bool)>> = chains
        .par_iter()
        .map(|chain| {
            let mut row = vec![(false, false); n];
            for e in m.ground_set() {
                if penultimate(chain).contains(e) {
                    continue;
                }
                let f = chain_freeness(
                    m,
                    &x,
                    chain,
                    e,
                    EstimateMode::Exact,
                    &mut RngStream::new(seed, 0),
                )?;
                row[e] = (true, f >= threshold - 1e-12);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut outside_last = vec![0u64; n];
    let mut free_enough = vec![0u64; n];
    for row in &rows {
        for (e, &(outside, free)) in row.iter().enumerate() {
            outside_last[e] += u64::from(outside);
            free_enough[e] += u64::from(outside && free);
        }
    }

    let z = bonferroni_z(m.ground_set().len());
    let checks = m
        .ground_set()
        .iter()
        .map(|e| {
            let k = outside_last[e];
            if k == 0 {
                return ElementCheck {
                    element_id: e,
                    measured: 0.0,
                    bound: 0.0,
                    tolerance: 0.0,
                    samples: 0,
                    vacuous: true,
                    pass: true,
                };
            }
            let measured = free_enough[e] as f64 / k as f64;
            let bound = 1.0 - eps - 2.0 * eps / (k as f64 / trials as f64);
            let b = bound.clamp(0.0, 1.0);
            let tolerance = z * (b * (1.0 - b) / k as f64).sqrt();
            ElementCheck {
                element_id: e,
                measured,
                bound,
                tolerance,
                samples: k,
                vacuous: false,
                pass: Direction::AtLeast.holds(measured, bound, tolerance),
            }
        })
        .collect();
    let verdict = Verdict::per_element(
        "freeness-likely",
        Direction::AtLeast,
        checks,
        seed,
        trials as u64,
    )
    .with_conforming(params.conforming());
    Ok(FreenessLikelyRun {
        verdict,
        outside_last,
        free_enough,
    })
}

/// `λ(1 − λ − 8ε)`: balancedness of the built chains times the filter rate.
pub fn selectability_floor(lambda: f64, eps: f64) -> f64 {
    lambda * (1.0 - lambda - 8.0 * eps)
}

/// Per element, the conditional selection frequency against
/// `λ(1 − λ − 8ε)`; elements never active pass vacuously.
pub fn verify_selectability_floor(report: &SelectabilityReport, eps: f64) -> Verdict {
    let floor = selectability_floor(report.lambda, eps);
    let b = floor.clamp(0.0, 1.0);
    let z = bonferroni_z(report.elements.len());
    let checks = report
        .elements
        .iter()
        .map(|t| {
            let vacuous = t.activations == 0;
            let tolerance = if vacuous {
                0.0
            } else {
                z * (b * (1.0 - b) / t.activations as f64).sqrt()
            };
            ElementCheck {
                element_id: t.element_id,
                measured: t.frequency,
                bound: floor,
                tolerance,
                samples: t.activations,
                vacuous,
                pass: vacuous || Direction::AtLeast.holds(t.frequency, floor, tolerance),
            }
        })
        .collect();
    let conforming = report.chain.is_none_or(|p| p.conforming());
    Verdict::per_element(
        "selectability-floor",
        Direction::AtLeast,
        checks,
        report.seed,
        report.trials,
    )
    .with_conforming(conforming)
}
