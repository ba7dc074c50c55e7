use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{single_ocrs_link, EstimateMode, LinkParams, Overrides};
use crate::error::{domain, Result};
use crate::matroid::MatroidOracle;
use crate::set::{ElemSet, ElementId};
use crate::stochastic::{exact_event_probability, ActiveSampler, MarginalVector, RngStream};

use super::{bonferroni_z, mean_sd, Direction, ElementCheck, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Good,
    Bad,
    MemberOfA,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodBadVerdict {
    pub element: ElementId,
    pub status: Status,
    /// `Pr[e ∈ span(A ∪ R(x))]`; absent for members of `A`.
    pub probability: Option<f64>,
}

/// `(A, τ)`-classification of `e`: bad when `Pr[e ∈ span(A ∪ R(x))] > τ`,
/// good otherwise, and neither when `e ∈ A`.
pub fn classify_element(
    m: &MatroidOracle,
    x: &MarginalVector,
    a: &ElemSet,
    tau: f64,
    e: ElementId,
    mode: EstimateMode,
    rng: &mut RngStream,
) -> Result<GoodBadVerdict> {
    m.check_element(e)?;
    if a.contains(e) {
        return Ok(GoodBadVerdict {
            element: e,
            status: Status::MemberOfA,
            probability: None,
        });
    }
    let x = x.restrict(m.ground_set());
    let spans = |r: &ElemSet| m.span_unchecked(&a.union(r)).contains(e);
    let p = match mode {
        EstimateMode::Exact => exact_event_probability(&x, spans)?,
        EstimateMode::MonteCarlo(q) => {
            if q == 0 {
                return Err(domain(
                    "Monte Carlo classification needs at least one sample",
                ));
            }
            let sampler = x.sampler();
            (0..q).filter(|_| spans(&sampler.draw(rng))).count() as f64 / q as f64
        }
    };
    Ok(GoodBadVerdict {
        element: e,
        status: if p > tau { Status::Bad } else { Status::Good },
        probability: Some(p),
    })
}

/// Runs the sample-based link builder with threshold `(1 − ε)τ` and checks,
/// per element, `Pr[bad] ≤ ε·Pr[good] + 2ε³/ln ρ` against the output `A`.
#[allow(clippy::too_many_arguments)]
pub fn verify_in_link_loss(
    m: &MatroidOracle,
    x: &MarginalVector,
    rho: usize,
    tau: f64,
    eps: f64,
    trials: usize,
    seed: u64,
    overrides: &Overrides,
) -> Result<Verdict> {
    let params = overrides.apply_link(LinkParams::new(rho, (1.0 - eps) * tau, eps)?);
    let sampler = x.restrict(m.ground_set()).sampler();
    let verdict = verify_in_link_loss_with(m, x, rho, tau, eps, trials, seed, |rng| {
        Ok(single_ocrs_link(m, &sampler, &params, rng)?.0)
    })?;
    Ok(verdict.with_conforming(params.conforming))
}

/// [`verify_in_link_loss`] against any link builder. Each distinct output is
/// classified once, exactly.
#[allow(clippy::too_many_arguments)]
pub fn verify_in_link_loss_with<F>(
    m: &MatroidOracle,
    x: &MarginalVector,
    rho: usize,
    tau: f64,
    eps: f64,
    trials: usize,
    seed: u64,
    builder: F,
) -> Result<Verdict>
where
    F: Fn(&mut RngStream) -> Result<ElemSet> + Sync,
{
    if rho < 3 {
        return Err(domain(format!("ρ = {rho} must be at least 3")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(domain(format!("τ = {tau} must lie in (0, 1]")));
    }
    if !(eps > 0.0 && eps <= tau) {
        return Err(domain(format!("ε = {eps} must lie in (0, τ]")));
    }
    if trials == 0 {
        return Err(domain("trials must be at least 1"));
    }

    let outputs: Vec<ElemSet> = (0..trials as u64)
        .into_par_iter()
        .map(|t| builder(&mut RngStream::new(seed, t)))
        .collect::<Result<_>>()?;

    let ground = m.ground_set();
    let mut classes: BTreeMap<&ElemSet, Vec<(ElementId, Status)>> = BTreeMap::new();
    for a in &outputs {
        if !classes.contains_key(a) {
            let mut row = Vec::with_capacity(ground.len());
            for e in ground {
                let v = classify_element(
                    m,
                    x,
                    a,
                    tau,
                    e,
                    EstimateMode::Exact,
                    &mut RngStream::new(seed, 0),
                )?;
                row.push((e, v.status));
            }
            classes.insert(a, row);
        }
    }

    let z = bonferroni_z(ground.len());
    let slack = 2.0 * eps.powi(3) / (rho as f64).ln();
    let checks = ground
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let statuses = || outputs.iter().map(|a| classes[a][idx].1);
            let bad = statuses().filter(|&s| s == Status::Bad).count() as f64 / trials as f64;
            let good = statuses().filter(|&s| s == Status::Good).count() as f64 / trials as f64;
            // Per-trial 1[bad] − ε·1[good]; its mean must stay under the slack.
            let (_, sd, _) = mean_sd(statuses().map(|s| match s {
                Status::Bad => 1.0,
                Status::Good => -eps,
                Status::MemberOfA => 0.0,
            }));
            let tolerance = z * sd / (trials as f64).sqrt();
            let bound = eps * good + slack;
            ElementCheck {
                element_id: e,
                measured: bad,
                bound,
                tolerance,
                samples: trials as u64,
                vacuous: bad == 0.0 && good == 0.0,
                pass: Direction::AtMost.holds(bad, bound, tolerance),
            }
        })
        .collect();
    Ok(Verdict::per_element(
        "in-link-loss",
        Direction::AtMost,
        checks,
        seed,
        trials as u64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> RngStream {
        RngStream::new(0, 0)
    }

    #[test]
    fn members_are_neither() {
        let m = MatroidOracle::uniform(3, 2);
        let x = MarginalVector::constant(3, 0.2).unwrap();
        let a = ElemSet::singleton(1);
        let v = classify_element(&m, &x, &a, 0.5, 1, EstimateMode::Exact, &mut rng()).unwrap();
        assert_eq!(v.status, Status::MemberOfA);
    }

    #[test]
    fn zero_vector_is_good() {
        let m = MatroidOracle::complete_graph(4);
        let v = classify_element(
            &m,
            &MarginalVector::zeros(6),
            &ElemSet::new(),
            0.01,
            3,
            EstimateMode::Exact,
            &mut rng(),
        )
        .unwrap();
        assert_eq!(v.status, Status::Good);
        assert_eq!(v.probability, Some(0.0));
    }

    #[test]
    fn rank_one_is_bad_above_half() {
        let m = MatroidOracle::uniform(2, 1);
        let x = MarginalVector::constant(2, 0.6).unwrap();
        let v = classify_element(
            &m,
            &x,
            &ElemSet::new(),
            0.5,
            0,
            EstimateMode::Exact,
            &mut rng(),
        )
        .unwrap();
        // Spanned unless both are inactive: 1 − 0.16.
        assert_eq!(v.status, Status::Bad);
        assert!((v.probability.unwrap() - 0.84).abs() < 1e-12);
        let mc = classify_element(
            &m,
            &x,
            &ElemSet::new(),
            0.5,
            0,
            EstimateMode::MonteCarlo(50_000),
            &mut rng(),
        )
        .unwrap();
        assert!((mc.probability.unwrap() - 0.84).abs() < 0.01);
    }

    #[test]
    fn zero_vector_passes() {
        let m = MatroidOracle::uniform(4, 2);
        let o = Overrides {
            q: Some(20),
            eta: Some(10),
            zeta: None,
        };
        let v =
            verify_in_link_loss(&m, &MarginalVector::zeros(4), 3, 0.54, 0.05, 50, 1, &o).unwrap();
        assert!(v.pass);
        assert!(!v.conforming);
        assert!(v.elements.iter().all(|c| c.measured == 0.0));
    }

    #[test]
    fn always_included_is_vacuous() {
        let m = MatroidOracle::uniform(3, 1);
        let x = MarginalVector::constant(3, 0.3).unwrap();
        let v = verify_in_link_loss_with(&m, &x, 3, 0.5, 0.05, 40, 2, |_| Ok(ElemSet::full(3)))
            .unwrap();
        assert!(v.pass && v.vacuous);
    }

    #[test]
    fn never_including_builder_fails() {
        // Each element is spanned by R with probability 0.75 > τ but never
        // enters A.
        let m = MatroidOracle::uniform(2, 1);
        let x = MarginalVector::constant(2, 0.5).unwrap();
        let v =
            verify_in_link_loss_with(&m, &x, 3, 0.4, 0.05, 200, 3, |_| Ok(ElemSet::new())).unwrap();
        assert!(!v.pass);
        assert_eq!(v.measured, 1.0);
    }

    #[test]
    fn preconditions() {
        let m = MatroidOracle::uniform(2, 1);
        let x = MarginalVector::constant(2, 0.5).unwrap();
        let b = |_: &mut RngStream| Ok(ElemSet::new());
        assert!(verify_in_link_loss_with(&m, &x, 2, 0.5, 0.05, 1, 0, b).is_err());
        assert!(verify_in_link_loss_with(&m, &x, 3, 0.0, 0.05, 1, 0, b).is_err());
        assert!(verify_in_link_loss_with(&m, &x, 3, 0.04, 0.05, 1, 0, b).is_err());
        assert!(verify_in_link_loss_with(&m, &x, 3, 0.5, 0.05, 0, 0, b).is_err());
    }
}
