use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OcrsError, Result};
use crate::matroid::MatroidOracle;
use crate::set::{ElemSet, ElementId};
use crate::stochastic::{exact_event_probability, ActiveSampler, MarginalVector, RngStream};

use super::SpanningChain;

/// How a probability over `R(x)` is evaluated: by enumerating every
/// realization, or from `q` fresh samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo(usize),
}

/// `Pr[e ∉ span(((R(x) ∖ {e}) ∩ C_i) ∪ C_{i+1})]` where `i` is the level of `e`.
pub fn chain_freeness(
    m: &MatroidOracle,
    x: &MarginalVector,
    chain: &SpanningChain,
    e: ElementId,
    mode: EstimateMode,
    rng: &mut RngStream,
) -> Result<f64> {
    m.check_element(e)?;
    let level = chain
        .level_of(e)
        .ok_or(OcrsError::ElementOutsideGround(e))?;
    let ci = chain.link(level);
    let below = chain
        .links()
        .get(level + 1)
        .ok_or_else(|| OcrsError::Internal("element sits in the terminal link".into()))?;
    let free = |r: &ElemSet| {
        let mut s = r.without(e).intersection(ci);
        s.union_with(below);
        !m.span_unchecked(&s).contains(e)
    };
    match mode {
        EstimateMode::Exact => exact_event_probability(x, free),
        EstimateMode::MonteCarlo(q) => {
            let sampler = x.sampler();
            let hits = (0..q).filter(|_| free(&sampler.draw(rng))).count();
            Ok(hits as f64 / q.max(1) as f64)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BalancednessReport {
    pub trials: usize,
    /// Mean freeness per element id.
    pub mean: Vec<f64>,
    /// Standard error of the mean per element id.
    pub std_error: Vec<f64>,
}

impl BalancednessReport {
    /// `(element, mean)` with the smallest mean.
    pub fn min(&self) -> Option<(ElementId, f64)> {
        self.mean
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Expected chain freeness of every ground element over `trials` chains
/// drawn by `chain_sampler` (trial `t` uses stream `t` of `seed`).
pub fn balancedness_estimate<F>(
    m: &MatroidOracle,
    x: &MarginalVector,
    chain_sampler: F,
    trials: usize,
    seed: u64,
    mode: EstimateMode,
) -> Result<BalancednessReport>
where
    F: Fn(&mut RngStream) -> Result<SpanningChain> + Sync,
{
    let n = m.universe_size();
    let per_trial: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::new(seed, t);
            let chain = chain_sampler(&mut rng)?;
            let mut row = vec![0.0; n];
            for e in m.ground_set() {
                row[e] = chain_freeness(m, x, &chain, e, mode, &mut rng)?;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut mean = vec![0.0; n];
    let mut std_error = vec![0.0; n];
    for e in m.ground_set() {
        let vals: Vec<f64> = per_trial.iter().map(|r| r[e]).collect();
        let mu = vals.iter().sum::<f64>() / trials as f64;
        let var = if trials > 1 {
            vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (trials - 1) as f64
        } else {
            0.0
        };
        mean[e] = mu;
        std_error[e] = (var / trials as f64).sqrt();
    }
    Ok(BalancednessReport {
        trials,
        mean,
        std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_trivial_chain() {
        let m = MatroidOracle::uniform(2, 1);
        let x = MarginalVector::constant(2, 0.3).unwrap();
        let chain = SpanningChain::trivial(m.ground_set());
        let mut rng = RngStream::new(0, 0);
        let f = chain_freeness(&m, &x, &chain, 0, EstimateMode::Exact, &mut rng).unwrap();
        assert!((f - 0.7).abs() < 1e-15);
        let mc = chain_freeness(
            &m,
            &x,
            &chain,
            0,
            EstimateMode::MonteCarlo(100_000),
            &mut rng,
        )
        .unwrap();
        assert!((mc - 0.7).abs() < 0.01);
    }

    #[test]
    fn zero_vector_is_fully_free() {
        let m = MatroidOracle::complete_graph(4);
        let chain = SpanningChain::trivial(m.ground_set());
        for e in 0..6 {
            let f = chain_freeness(
                &m,
                &MarginalVector::zeros(6),
                &chain,
                e,
                EstimateMode::Exact,
                &mut RngStream::new(0, 0),
            )
            .unwrap();
            assert_eq!(f, 1.0);
        }
    }

    #[test]
    fn spanned_by_lower_link_is_never_free() {
        // Triangle: edge 2 is spanned by {0, 1} = C_1.
        let m = MatroidOracle::complete_graph(3);
        let g = m.ground_set().clone();
        let chain = SpanningChain::new(
            &g,
            vec![g.clone(), [0, 1].into_iter().collect(), ElemSet::new()],
        )
        .unwrap();
        let x = MarginalVector::constant(3, 0.4).unwrap();
        let f = chain_freeness(
            &m,
            &x,
            &chain,
            2,
            EstimateMode::Exact,
            &mut RngStream::new(0, 0),
        )
        .unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn fixed_sampler_matches_fixed_chain() {
        let m = MatroidOracle::uniform(3, 1);
        let x = MarginalVector::new(vec![0.2, 0.3, 0.1]).unwrap();
        let chain = SpanningChain::trivial(m.ground_set());
        let report =
            balancedness_estimate(&m, &x, |_| Ok(chain.clone()), 5, 1, EstimateMode::Exact)
                .unwrap();
        for e in 0..3 {
            let f = chain_freeness(
                &m,
                &x,
                &chain,
                e,
                EstimateMode::Exact,
                &mut RngStream::new(0, 0),
            )
            .unwrap();
            assert!((report.mean[e] - f).abs() < 1e-15);
            assert_eq!(report.std_error[e], 0.0);
        }
    }
}
