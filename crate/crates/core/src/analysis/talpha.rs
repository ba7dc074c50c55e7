use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, OcrsError, Result};
use crate::matroid::MatroidOracle;
use crate::set::ElemSet;
use crate::stochastic::{for_each_realization, KahanSum, MarginalVector};

/// Largest ground set `brute_force_t_alpha` enumerates.
pub const T_ALPHA_MAX_N: usize = 12;

/// Objective ties closer than this go to the smaller, then lexicographically
/// smaller, candidate.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TAlphaResult {
    pub b: ElemSet,
    pub alpha: f64,
    pub t: ElemSet,
    pub objective: f64,
}

/// `lhs ≤ rhs`, evaluated without tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Every realization of `R(x)` on the ground set with its probability.
fn realizations(m: &MatroidOracle, x: &MarginalVector) -> Result<Vec<(ElemSet, f64)>> {
    let n = m.ground_set().len();
    if n > T_ALPHA_MAX_N {
        return Err(OcrsError::TooLarge {
            what: "ground set for T_α enumeration",
            n,
            max: T_ALPHA_MAX_N,
        });
    }
    let mut out = Vec::new();
    for_each_realization(&x.restrict(m.ground_set()), |r, p| out.push((r.clone(), p)))?;
    Ok(out)
}

fn expectation(realizations: &[(ElemSet, f64)], mut f: impl FnMut(&ElemSet) -> f64) -> f64 {
    let mut sum = KahanSum::default();
    for (r, p) in realizations {
        sum.add(p * f(r));
    }
    sum.value()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(domain(format!("α = {alpha} must lie in [0, 1)")))
    }
}

/// `argmax_{T̄ ⊇ B} r(T̄ | B) − E[r(T̄ | B ∪ R(x))] / (1 − α)` by exhaustive
/// search. Ties go to the smallest cardinality, then lexicographic order.
pub fn brute_force_t_alpha(
    m: &MatroidOracle,
    x: &MarginalVector,
    b: &ElemSet,
    alpha: f64,
) -> Result<TAlphaResult> {
    check_alpha(alpha)?;
    if !b.is_subset(m.ground_set()) {
        return Err(OcrsError::NotASubset);
    }
    let reals = realizations(m, x)?;
    Ok(search(m, &reals, b, alpha))
}

fn search(m: &MatroidOracle, reals: &[(ElemSet, f64)], b: &ElemSet, alpha: f64) -> TAlphaResult {
    let r_b = m.rank_unchecked(b) as f64;
    // r(B ∪ R) per realization, shared by every candidate.
    let base: Vec<f64> = reals
        .iter()
        .map(|(r, _)| m.rank_unchecked(&b.union(r)) as f64)
        .collect();
    let scale = 1.0 / (1.0 - alpha);

    let mut best: Option<(f64, ElemSet)> = None;
    for extra in m.ground_set().difference(b).subsets() {
        let t = b.union(&extra);
        let gain = m.rank_unchecked(&t) as f64 - r_b;
        let mut loss = KahanSum::default();
        for ((r, p), rb) in reals.iter().zip(&base) {
            loss.add(p * (m.rank_unchecked(&t.union(r)) as f64 - rb));
        }
        let value = gain - scale * loss.value();
        let better = match &best {
            None => true,
            Some((v, s)) => value > v + TIE || ((value - v).abs() <= TIE && t < *s),
        };
        if better {
            best = Some((value, t));
        }
    }
    let (objective, t) = best.expect("B itself is a candidate");
    TAlphaResult {
        b: b.clone(),
        alpha,
        t,
        objective,
    }
}

/// [`brute_force_t_alpha`] for many `B`, sharing the realization table.
pub fn t_alpha_batch(
    m: &MatroidOracle,
    x: &MarginalVector,
    bs: &[ElemSet],
    alpha: f64,
) -> Result<Vec<TAlphaResult>> {
    check_alpha(alpha)?;
    if bs.iter().any(|b| !b.is_subset(m.ground_set())) {
        return Err(OcrsError::NotASubset);
    }
    let reals = realizations(m, x)?;
    Ok(bs.par_iter().map(|b| search(m, &reals, b, alpha)).collect())
}

/// `E[r(T | B ∪ R(x))] ≤ (1 − α)·r(T | B)` for `T ⊇ B`.
pub fn t_alpha_bullet_one(
    m: &MatroidOracle,
    x: &MarginalVector,
    b: &ElemSet,
    t: &ElemSet,
    alpha: f64,
) -> Result<Inequality> {
    if !b.is_subset(t) || !t.is_subset(m.ground_set()) {
        return Err(OcrsError::NotASubset);
    }
    let reals = realizations(m, x)?;
    let lhs = expectation(&reals, |r| {
        let br = b.union(r);
        (m.rank_unchecked(&t.union(&br)) - m.rank_unchecked(&br)) as f64
    });
    let rhs = (1.0 - alpha) * (m.rank_unchecked(t) - m.rank_unchecked(b)) as f64;
    Ok(Inequality { lhs, rhs })
}

/// `E[r(Q ∩ span(T ∪ R(x)) | T)] ≤ α·r(Q | T)` for `Q` disjoint from `T`.
pub fn t_alpha_bullet_two(
    m: &MatroidOracle,
    x: &MarginalVector,
    t: &ElemSet,
    q: &ElemSet,
    alpha: f64,
) -> Result<Inequality> {
    if !q.is_disjoint(t) || !q.union(t).is_subset(m.ground_set()) {
        return Err(domain("Q must be a subset of N ∖ T"));
    }
    let reals = realizations(m, x)?;
    let r_t = m.rank_unchecked(t);
    let lhs = expectation(&reals, |r| {
        let overlap = q.intersection(&m.span_unchecked(&t.union(r)));
        (m.rank_unchecked(&overlap.union(t)) - r_t) as f64
    });
    let rhs = alpha * (m.rank_unchecked(&q.union(t)) - r_t) as f64;
    Ok(Inequality { lhs, rhs })
}
