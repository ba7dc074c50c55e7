//! Spanning chains: the sample-based chain builder, the known-`x` baseline,
//! and freeness/balancedness measurement.

mod freeness;
mod link;
mod minimal;
mod truncation;

use serde::{Deserialize, Serialize};

use crate::error::{domain, OcrsError, Result};
use crate::matroid::MatroidOracle;
use crate::set::{ElemSet, ElementId};
use crate::stochastic::{ActiveSampler, RngStream};

pub use freeness::{balancedness_estimate, chain_freeness, BalancednessReport, EstimateMode};
pub use link::{samples_per_estimate, single_ocrs_link, LinkParams, LinkTrace, EPS_MAX};
pub use minimal::{minimal_link_construction, minimal_spanning_chain, MinimalLink};
pub use truncation::{truncation_ceiling, TruncationDistribution};

/// `N = C_0 ⊇ C_1 ⊇ … ⊇ C_k = ∅`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpanningChain {
    links: Vec<ElemSet>,
}

impl SpanningChain {
    /// Checks that `links` starts at `ground`, is nested, and ends empty.
    pub fn new(ground: &ElemSet, links: Vec<ElemSet>) -> Result<Self> {
        let chain = Self { links };
        chain.validate(ground)?;
        Ok(chain)
    }

    /// `(N, ∅)`.
    pub fn trivial(ground: &ElemSet) -> Self {
        Self {
            links: vec![ground.clone(), ElemSet::new()],
        }
    }

    pub fn validate(&self, ground: &ElemSet) -> Result<()> {
        if self.links.first() != Some(ground) {
            return Err(domain("the first link must be the ground set"));
        }
        if !self.links.last().is_some_and(ElemSet::is_empty) {
            return Err(domain("the last link must be empty"));
        }
        if !self.is_nested() {
            return Err(domain("links are not nested"));
        }
        Ok(())
    }

    pub fn is_nested(&self) -> bool {
        self.links.windows(2).all(|w| w[1].is_subset(&w[0]))
    }

    pub fn links(&self) -> &[ElemSet] {
        &self.links
    }

    pub fn link(&self, i: usize) -> &ElemSet {
        &self.links[i]
    }

    /// Number of links, `k + 1`.
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// The level of `e`: `max{j : e ∈ C_j}`, so that `e ∈ C_j ∖ C_{j+1}`.
    pub fn level_of(&self, e: ElementId) -> Option<usize> {
        self.links.iter().rposition(|c| c.contains(e))
    }
}

/// Parameters of a full chain build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainParams {
    pub rho: usize,
    pub tau: f64,
    pub eps: f64,
    pub zeta: usize,
    /// Passed to every link build; its threshold is `(1 − ε)τ`.
    pub link: LinkParams,
    /// False once `ζ` is overridden or the link parameters are.
    pub zeta_conforming: bool,
}

/// `ζ = ⌈(1/ε) ln(ρ/ε)⌉`.
pub fn chain_length(eps: f64, rho: usize) -> usize {
    ((rho as f64 / eps).ln() / eps).ceil() as usize
}

impl ChainParams {
    /// Formula values for `m`: `ρ = max{rank(M), 3}`.
    pub fn new(m: &MatroidOracle, tau: f64, eps: f64) -> Result<Self> {
        Self::for_rank(m.matroid_rank(), tau, eps)
    }

    pub fn for_rank(rank: usize, tau: f64, eps: f64) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(domain(format!("τ = {tau} must lie in (0, 1]")));
        }
        if !(eps > 0.0 && eps <= EPS_MAX) {
            return Err(domain(format!("ε = {eps} must lie in (0, 1/20]")));
        }
        let rho = rank.max(3);
        Ok(Self {
            rho,
            tau,
            eps,
            zeta: chain_length(eps, rho),
            link: LinkParams::new(rho, (1.0 - eps) * tau, eps)?,
            zeta_conforming: true,
        })
    }

    pub fn with_zeta(mut self, zeta: usize) -> Self {
        self.zeta_conforming &= zeta == self.zeta;
        self.zeta = zeta.max(1);
        self
    }

    pub fn with_q(mut self, q: usize) -> Self {
        self.link = self.link.with_q(q);
        self
    }

    pub fn with_eta(mut self, eta: usize) -> Self {
        self.link = self.link.with_eta(eta);
        self
    }

    /// `q`, `η`, and `ζ` divided by `factor` (at least 1 each); never conforming.
    pub fn scaled_down(self, factor: usize) -> Self {
        let (q, eta, zeta) = (self.link.q, self.link.eta, self.zeta);
        let mut p = self
            .with_q((q / factor).max(1))
            .with_eta((eta / factor).max(1))
            .with_zeta((zeta / factor).max(1));
        p.zeta_conforming = false;
        p
    }

    pub fn conforming(&self) -> bool {
        self.zeta_conforming && self.link.conforming
    }

    /// `ζ·η·q`, the largest possible sample count of one chain.
    pub fn draw_bound(&self) -> usize {
        self.zeta * self.link.eta * self.link.q
    }
}

/// Replacement values for `q`, `η`, `ζ`. Any override makes a run
/// non-conforming, even one equal to the formula value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub q: Option<usize>,
    pub eta: Option<usize>,
    pub zeta: Option<usize>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self.q.is_none() && self.eta.is_none() && self.zeta.is_none()
    }

    pub fn apply_link(&self, mut params: LinkParams) -> LinkParams {
        if let Some(q) = self.q {
            params = params.with_q(q);
        }
        if let Some(eta) = self.eta {
            params = params.with_eta(eta);
        }
        params.conforming &= self.q.is_none() && self.eta.is_none();
        params
    }

    pub fn apply_chain(&self, mut params: ChainParams) -> ChainParams {
        params.link = self.apply_link(params.link);
        if let Some(zeta) = self.zeta {
            params = params.with_zeta(zeta);
            params.zeta_conforming = false;
        }
        params
    }

    /// `q`, `η`, `ζ` of `params` divided by `factor`.
    pub fn scaled_down(params: &ChainParams, factor: usize) -> Self {
        Self {
            q: Some((params.link.q / factor).max(1)),
            eta: Some((params.link.eta / factor).max(1)),
            zeta: Some((params.zeta / factor).max(1)),
        }
    }
}

/// Aggregate trace of one chain build.
#[derive(Debug, Clone, Serialize)]
pub struct BuildTrace {
    pub links: Vec<LinkTrace>,
    pub draw_count: usize,
}

impl BuildTrace {
    pub fn from_links(links: Vec<LinkTrace>) -> Self {
        let draw_count = links.iter().map(|l| l.samples_drawn).sum();
        Self { links, draw_count }
    }

    pub fn is_monotone(&self) -> bool {
        self.links.iter().all(LinkTrace::is_monotone)
    }
}

/// Builds a spanning chain of length `ζ + 2` from samples only.
///
/// `C_0 = N`, `C_{ζ+1} = ∅`, and for `i = 1..=ζ`, `C_i` is a link built on
/// `M|_{C_{i−1}}` with threshold `(1 − ε)τ` and `ρ = max{rank(M), 3}` fixed
/// throughout. `sampler` provides draws of `D(x)` over the full ground set.
pub fn ocrs_chain<S: ActiveSampler + ?Sized>(
    m: &MatroidOracle,
    sampler: &S,
    tau: f64,
    eps: f64,
    rng: &mut RngStream,
) -> Result<(SpanningChain, BuildTrace)> {
    let params = ChainParams::new(m, tau, eps)?;
    ocrs_chain_with(m, sampler, &params, rng)
}

/// [`ocrs_chain`] with explicit (possibly overridden) parameters.
pub fn ocrs_chain_with<S: ActiveSampler + ?Sized>(
    m: &MatroidOracle,
    sampler: &S,
    params: &ChainParams,
    rng: &mut RngStream,
) -> Result<(SpanningChain, BuildTrace)> {
    let mut links = Vec::with_capacity(params.zeta + 2);
    let mut traces = Vec::with_capacity(params.zeta);
    links.push(m.ground_set().clone());
    for _ in 1..=params.zeta {
        let previous = links.last().expect("C_0 is present");
        let restricted = m.restrict(previous)?;
        let (link, trace) = single_ocrs_link(&restricted, sampler, &params.link, rng)?;
        links.push(link);
        traces.push(trace);
    }
    links.push(ElemSet::new());
    let chain = SpanningChain { links };
    if !chain.is_nested() {
        return Err(OcrsError::Internal(
            "chain builder produced non-nested links".into(),
        ));
    }
    Ok((chain, BuildTrace::from_links(traces)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::MarginalVector;

    #[test]
    fn chain_length_reference() {
        // ⌈20 · ln 60⌉
        assert_eq!(chain_length(0.05, 3), 82);
        let p = ChainParams::for_rank(1, 0.7, 0.05).unwrap();
        assert_eq!((p.rho, p.zeta, p.link.eta), (3, 82, 188));
        assert!((p.link.threshold - 0.665).abs() < 1e-15);
        assert!(p.conforming());
        assert!(!p.scaled_down(10).conforming());
        let o = Overrides {
            q: Some(p.link.q),
            ..Overrides::default()
        };
        assert!(!o.apply_chain(p).conforming());
        assert!(Overrides::default().apply_chain(p).conforming());
        let small = Overrides::scaled_down(&p, 10).apply_chain(p);
        assert_eq!(small, p.scaled_down(10));
    }

    #[test]
    fn level_is_highest_containing_link() {
        let g = ElemSet::full(3);
        let c = SpanningChain::new(
            &g,
            vec![
                g.clone(),
                [0, 1].into_iter().collect(),
                [0, 1].into_iter().collect(),
                ElemSet::singleton(0),
                ElemSet::new(),
            ],
        )
        .unwrap();
        assert_eq!(c.level_of(2), Some(0));
        assert_eq!(c.level_of(1), Some(2));
        assert_eq!(c.level_of(0), Some(3));
        assert_eq!(c.level_of(7), None);
    }

    #[test]
    fn malformed_chains_rejected() {
        let g = ElemSet::full(3);
        assert!(SpanningChain::new(&g, vec![g.clone()]).is_err());
        assert!(SpanningChain::new(&g, vec![ElemSet::singleton(0), ElemSet::new()]).is_err());
        assert!(SpanningChain::new(
            &g,
            vec![
                g.clone(),
                ElemSet::singleton(0),
                ElemSet::full(2),
                ElemSet::new()
            ]
        )
        .is_err());
    }

    #[test]
    fn zero_vector_chain_is_empty_after_ground() {
        let m = MatroidOracle::complete_graph(4);
        let params = ChainParams::new(&m, 0.7, 0.05).unwrap().scaled_down(10);
        let (chain, trace) = ocrs_chain_with(
            &m,
            &MarginalVector::zeros(6).sampler(),
            &params,
            &mut RngStream::new(0, 0),
        )
        .unwrap();
        assert_eq!(chain.len(), params.zeta + 2);
        assert!(chain.links()[1..].iter().all(ElemSet::is_empty));
        assert!(trace.draw_count <= params.draw_bound());
    }

    #[test]
    fn chain_serializes_as_nested_arrays() {
        let g = ElemSet::full(2);
        let c = SpanningChain::trivial(&g);
        assert_eq!(serde_json::to_string(&c).unwrap(), "[[0,1],[]]");
    }
}
