//! Known-`x` link construction with exact probabilities.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::matroid::MatroidOracle;
use crate::set::ElemSet;
use crate::stochastic::{exact_event_probability, MarginalVector};

use super::SpanningChain;

#[derive(Debug, Clone, Serialize)]
pub struct MinimalLink {
    /// The stabilized set.
    pub link: ElemSet,
    /// `A_1, A_2, …` up to and including the first repeat.
    pub iterates: Vec<ElemSet>,
}

/// Iterates `A_i = {e ∈ N : Pr[e ∈ span((R(x) ∪ A_{i−1}) ∖ {e})] > τ}` from
/// `A_0 = ∅` until it stabilizes. Exact; refuses more than 20 elements.
pub fn minimal_link_construction(
    m: &MatroidOracle,
    x: &MarginalVector,
    tau: f64,
) -> Result<MinimalLink> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(domain(format!("τ = {tau} must lie in (0, 1)")));
    }
    let ground = m.ground_set();
    let x = x.restrict(ground);
    let mut prev = ElemSet::new();
    let mut iterates = Vec::new();
    // A_i stabilizes within |N| + 1 steps.
    for _ in 0..=ground.len() {
        let next = spanned_above(m, &x, &prev, tau)?;
        iterates.push(next.clone());
        if next == prev {
            return Ok(MinimalLink {
                link: next,
                iterates,
            });
        }
        prev = next;
    }
    Ok(MinimalLink {
        link: prev,
        iterates,
    })
}

/// `{e : Pr[e ∈ span((R ∪ A) ∖ {e})] > τ}`.
pub(crate) fn spanned_above(
    m: &MatroidOracle,
    x: &MarginalVector,
    a: &ElemSet,
    tau: f64,
) -> Result<ElemSet> {
    let mut out = ElemSet::new();
    for e in m.ground_set() {
        let p = exact_event_probability(x, |r| {
            let s = r.union(a).without(e);
            m.span_unchecked(&s).contains(e)
        })?;
        if p > tau {
            out.insert(e);
        }
    }
    Ok(out)
}

/// The known-`x` chain: apply [`minimal_link_construction`] to successive
/// restrictions until a link comes out empty. Fails if a link stops shrinking.
pub fn minimal_spanning_chain(
    m: &MatroidOracle,
    x: &MarginalVector,
    tau: f64,
) -> Result<SpanningChain> {
    let mut links = vec![m.ground_set().clone()];
    loop {
        let current = links.last().expect("nonempty");
        if current.is_empty() {
            break;
        }
        let next = minimal_link_construction(&m.restrict(current)?, x, tau)?.link;
        if &next == current {
            return Err(domain(format!(
                "known-x chain stalls at a link of size {}; τ is too small for x",
                next.len()
            )));
        }
        links.push(next);
    }
    SpanningChain::new(m.ground_set(), links)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vector_gives_empty_link() {
        let m = MatroidOracle::uniform(4, 2);
        let out = minimal_link_construction(&m, &MarginalVector::zeros(4), 0.5).unwrap();
        assert!(out.link.is_empty());
    }

    #[test]
    fn rank_one_pair() {
        // Each element is spanned by the other with probability 0.6 > 0.5.
        let m = MatroidOracle::uniform(2, 1);
        let x = MarginalVector::constant(2, 0.6).unwrap();
        let out = minimal_link_construction(&m, &x, 0.5).unwrap();
        assert_eq!(out.iterates[0], ElemSet::full(2));
        assert_eq!(out.link, ElemSet::full(2));
    }

    #[test]
    fn output_is_a_fixed_point_and_dominates_iterates() {
        let m = MatroidOracle::complete_graph(4);
        let x = MarginalVector::new(vec![0.5, 0.5, 0.2, 0.5, 0.3, 0.4]).unwrap();
        for tau in [0.2, 0.3, 0.45, 0.6] {
            let out = minimal_link_construction(&m, &x, tau).unwrap();
            assert_eq!(spanned_above(&m, &x, &out.link, tau).unwrap(), out.link);
            assert!(out.iterates.iter().all(|a| a.is_subset(&out.link)));
            assert!(out.iterates.windows(2).all(|w| w[0].is_subset(&w[1])));
        }
    }

    #[test]
    fn baseline_chain_terminates() {
        let m = MatroidOracle::uniform(4, 2);
        let x = MarginalVector::constant(4, 0.25).unwrap();
        let chain = minimal_spanning_chain(&m, &x, 0.7).unwrap();
        assert!(chain.is_nested());
        assert!(chain.links().last().unwrap().is_empty());
    }
}
