//! Sample-based construction of a single link.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::matroid::MatroidOracle;
use crate::set::ElemSet;
use crate::stochastic::{ActiveSampler, RngStream};

use super::truncation::{truncation_ceiling, TruncationDistribution};

/// Largest `ε` the link and chain builders accept.
pub const EPS_MAX: f64 = 0.05;

/// `q = ⌈(6 / (τ ε²)) · ln(ln ρ / ε)⌉` for spanning threshold `τ`.
pub fn samples_per_estimate(threshold: f64, eps: f64, rho: usize) -> usize {
    let rho = rho as f64;
    (6.0 / (threshold * eps * eps) * (rho.ln() / eps).ln()).ceil() as usize
}

/// Parameters of one link build. `threshold` is compared against the
/// empirical spanning frequencies verbatim (strictly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkParams {
    pub rho: usize,
    pub threshold: f64,
    pub eps: f64,
    pub q: usize,
    pub eta: usize,
    /// False once `q` or `η` is overridden.
    pub conforming: bool,
}

impl LinkParams {
    pub fn new(rho: usize, threshold: f64, eps: f64) -> Result<Self> {
        if rho < 3 {
            return Err(domain(format!("ρ = {rho} must be at least 3")));
        }
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(domain(format!("threshold {threshold} must lie in (0, 1]")));
        }
        if !(eps > 0.0 && eps <= EPS_MAX) {
            return Err(domain(format!("ε = {eps} must lie in (0, 1/20]")));
        }
        Ok(Self {
            rho,
            threshold,
            eps,
            q: samples_per_estimate(threshold, eps, rho),
            eta: truncation_ceiling(eps, rho),
            conforming: true,
        })
    }

    pub fn with_q(mut self, q: usize) -> Self {
        self.conforming &= q == self.q;
        self.q = q.max(1);
        self
    }

    pub fn with_eta(mut self, eta: usize) -> Self {
        self.conforming &= eta == self.eta;
        self.eta = eta.max(1);
        self
    }

    pub fn truncation(&self) -> Result<TruncationDistribution> {
        TruncationDistribution::with_ceiling(self.eps, self.rho, self.eta)
    }
}

/// What one link build did: the truncation draw, every intermediate set,
/// and how many samples it consumed.
#[derive(Debug, Clone, Serialize)]
pub struct LinkTrace {
    pub h_bar: usize,
    /// `A_1, …, A_{h̄}`.
    #[serde(skip)]
    pub sets: Vec<ElemSet>,
    pub samples_drawn: usize,
    pub output_size: usize,
}

impl LinkTrace {
    pub fn is_monotone(&self) -> bool {
        self.sets.windows(2).all(|w| w[0].is_subset(&w[1]))
    }
}

/// Per-element counts of `e ∈ span(A ∪ S_p)` over `q` fresh samples.
pub(crate) fn span_counts<S: ActiveSampler + ?Sized>(
    m: &MatroidOracle,
    sampler: &S,
    a: &ElemSet,
    q: usize,
    rng: &mut RngStream,
) -> Vec<u32> {
    let ground = m.ground_set();
    let mut counts = vec![0u32; m.universe_size()];
    let mut tally = |span: &ElemSet, times: u32| {
        for e in span {
            counts[e] += times;
        }
    };

    if ground.is_empty() || sampler.always_empty() {
        tally(&m.span_unchecked(a), q as u32);
        return counts;
    }

    // Small universes: tally each distinct realization once.
    if m.universe_size() <= HISTOGRAM_MAX_N {
        let ground_bits = ground.low_bits();
        let hist = sampler.draw_histogram(q, rng).unwrap_or_else(|| {
            let mut dense = vec![0u64; 1 << m.universe_size()];
            for _ in 0..q {
                dense[(sampler.draw_word(rng) & ground_bits) as usize] += 1;
            }
            dense
                .into_iter()
                .enumerate()
                .filter(|&(_, k)| k > 0)
                .map(|(key, k)| (key as u64, k))
                .collect()
        });
        let mut merged = vec![0u64; 1 << m.universe_size()];
        for (mask, k) in hist {
            merged[(mask & ground_bits) as usize] += k;
        }
        for (key, &k) in merged.iter().enumerate().filter(|(_, &k)| k > 0) {
            let s = ElemSet::from_bits(key as u64);
            tally(&m.span_unchecked(&a.union(&s)), k as u32);
        }
    } else {
        for _ in 0..q {
            let s = sampler.draw(rng).intersection(ground);
            tally(&m.span_unchecked(&a.union(&s)), 1);
        }
    }
    counts
}

const HISTOGRAM_MAX_N: usize = 12;

/// Builds one link: draws `h̄`, then for `h = 1..=h̄` sets
/// `A_h = {e : P̂r[e ∈ span(A_{h−1} ∪ S)] > threshold}` over `q` fresh
/// samples, and returns `A_{h̄}`.
///
/// `sampler` is only ever used for fresh draws, intersected with the ground
/// set of `m`.
pub fn single_ocrs_link<S: ActiveSampler + ?Sized>(
    m: &MatroidOracle,
    sampler: &S,
    params: &LinkParams,
    rng: &mut RngStream,
) -> Result<(ElemSet, LinkTrace)> {
    let truncation = params.truncation()?;
    let h_bar = truncation.sample(rng);
    let q = params.q;
    let ground = m.ground_set();

    let mut a = ElemSet::new();
    let mut sets = Vec::with_capacity(h_bar);
    for _ in 0..h_bar {
        let counts = span_counts(m, sampler, &a, q, rng);
        a = ground
            .iter()
            .filter(|&e| counts[e] as f64 / q as f64 > params.threshold)
            .collect();
        sets.push(a.clone());
    }

    let trace = LinkTrace {
        h_bar,
        sets,
        samples_drawn: h_bar * q,
        output_size: a.len(),
    };
    Ok((a, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::MarginalVector;

    #[test]
    fn formula_values() {
        let p = LinkParams::new(3, 0.95 * 0.7, 0.05).unwrap();
        assert_eq!(p.eta, 188);
        // 6 / (0.665 · 0.0025) · ln(ln 3 / 0.05)
        let expected = (6.0 / (0.665 * 0.0025) * (3f64.ln() / 0.05).ln()).ceil() as usize;
        assert_eq!(p.q, expected);
        assert!(p.conforming);
        assert!(!p.with_q(10).conforming);
        assert!(p.with_q(p.q).conforming);
        assert!(!p.with_eta(3).conforming);
    }

    #[test]
    fn parameter_domain() {
        assert!(LinkParams::new(2, 0.5, 0.05).is_err());
        assert!(LinkParams::new(3, 0.0, 0.05).is_err());
        assert!(LinkParams::new(3, 1.1, 0.05).is_err());
        assert!(LinkParams::new(3, 0.5, 0.06).is_err());
        assert!(LinkParams::new(3, 0.5, 0.0).is_err());
    }

    #[test]
    fn zero_marginals_give_empty_link() {
        let m = MatroidOracle::complete_graph(4);
        let x = MarginalVector::zeros(6);
        let params = LinkParams::new(3, 0.5, 0.05)
            .unwrap()
            .with_q(50)
            .with_eta(5);
        let (a, trace) =
            single_ocrs_link(&m, &x.sampler(), &params, &mut RngStream::new(1, 0)).unwrap();
        assert!(a.is_empty());
        assert!(trace.sets.iter().all(ElemSet::is_empty));
        assert_eq!(trace.samples_drawn, trace.h_bar * 50);
    }

    #[test]
    fn rank_one_certain_activation_spans_everything() {
        let m = MatroidOracle::uniform(2, 1);
        let x = MarginalVector::constant(2, 1.0).unwrap();
        let params = LinkParams::new(3, 0.5, 0.05)
            .unwrap()
            .with_q(20)
            .with_eta(4);
        let (a, trace) =
            single_ocrs_link(&m, &x.sampler(), &params, &mut RngStream::new(2, 0)).unwrap();
        assert_eq!(trace.sets[0], ElemSet::full(2));
        assert_eq!(a, ElemSet::full(2));
    }

    #[test]
    fn traces_are_monotone() {
        let m = MatroidOracle::uniform(6, 2);
        let x = MarginalVector::constant(6, 0.3).unwrap();
        let params = LinkParams::new(3, 0.4, 0.05)
            .unwrap()
            .with_q(40)
            .with_eta(8);
        for seed in 0..30 {
            let (_, trace) =
                single_ocrs_link(&m, &x.sampler(), &params, &mut RngStream::new(seed, 0)).unwrap();
            assert!(trace.is_monotone());
        }
    }

    /// Hides the batch shortcut so every draw goes through `draw`.
    struct OneAtATime<S>(S);

    impl<S: ActiveSampler> ActiveSampler for OneAtATime<S> {
        fn draw(&self, rng: &mut RngStream) -> ElemSet {
            self.0.draw(rng)
        }
    }

    #[test]
    fn dense_path_matches_direct_draws() {
        let m = MatroidOracle::complete_graph(4);
        let x = MarginalVector::new(vec![0.3, 0.6, 0.1, 0.5, 0.2, 0.9]).unwrap();
        let a = ElemSet::singleton(2);
        let fast = span_counts(
            &m,
            &OneAtATime(x.sampler()),
            &a,
            500,
            &mut RngStream::new(5, 1),
        );
        let mut rng = RngStream::new(5, 1);
        let mut slow = vec![0u32; 6];
        for _ in 0..500 {
            let s = x.sampler().draw(&mut rng);
            for e in m.span_unchecked(&a.union(&s)).iter() {
                slow[e] += 1;
            }
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn batch_tally_has_the_same_law() {
        // Mean span counts per element agree between the batch and the
        // one-at-a-time paths within a few standard errors.
        let m = MatroidOracle::complete_graph(4);
        let x = MarginalVector::new(vec![0.3, 0.6, 0.1, 0.5, 0.2, 0.9]).unwrap();
        let sampler = crate::stochastic::FilteredSampler::new(x.sampler(), 0.7).unwrap();
        let a = ElemSet::new();
        let q = 200_000;
        let batch = span_counts(&m, &sampler, &a, q, &mut RngStream::new(9, 0));
        let single = span_counts(&m, &OneAtATime(&sampler), &a, q, &mut RngStream::new(9, 1));
        for e in 0..6 {
            let (p1, p2) = (batch[e] as f64 / q as f64, single[e] as f64 / q as f64);
            let se = (p1 * (1.0 - p1) * 2.0 / q as f64).sqrt().max(1e-9);
            assert!((p1 - p2).abs() < 5.0 * se, "e={e}: {p1} vs {p2}");
        }
    }
}
