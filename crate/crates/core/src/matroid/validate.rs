//! Exhaustive axiom checks for small independence systems.

use serde::Serialize;

use crate::error::{OcrsError, Result};
use crate::set::ElemSet;

pub const VALIDATE_MAX_N: usize = 12;

/// Anything that can answer "is this subset of the ground set independent?".
pub trait IndependenceSystem {
    fn ground(&self) -> &ElemSet;
    fn is_independent_set(&self, s: &ElemSet) -> bool;
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ValidationReport {
    pub ground_size: usize,
    pub contains_empty: bool,
    pub downward_closed: bool,
    pub exchange: bool,
    pub submodular: bool,
    /// Human-readable witnesses, at most one per failed axiom.
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.contains_empty && self.downward_closed && self.exchange && self.submodular
    }
}

/// Checks non-emptiness, downward closure, the exchange axiom, and
/// submodularity of the rank function induced by the independent sets.
///
/// Refuses ground sets larger than [`VALIDATE_MAX_N`].
pub fn validate_axioms<S: IndependenceSystem + ?Sized>(system: &S) -> Result<ValidationReport> {
    let members = system.ground().to_vec();
    let m = members.len();
    if m > VALIDATE_MAX_N {
        return Err(OcrsError::TooLarge {
            what: "axiom validation",
            n: m,
            max: VALIDATE_MAX_N,
        });
    }
    let size = 1usize << m;
    let indep: Vec<bool> = (0..size)
        .map(|mask| system.is_independent_set(&ElemSet::select(&members, mask as u64)))
        .collect();
    let name = |mask: usize| format!("{:?}", ElemSet::select(&members, mask as u64));

    let mut violations = Vec::new();
    let contains_empty = indep[0];
    if !contains_empty {
        violations.push("the empty set is not independent".to_string());
    }

    let mut downward_closed = true;
    'down: for mask in 0..size {
        if !indep[mask] {
            continue;
        }
        let mut bits = mask;
        while bits != 0 {
            let bit = bits & bits.wrapping_neg();
            if !indep[mask ^ bit] {
                downward_closed = false;
                violations.push(format!(
                    "downward closure: {} is independent but {} is not",
                    name(mask),
                    name(mask ^ bit)
                ));
                break 'down;
            }
            bits ^= bit;
        }
    }

    let independent: Vec<usize> = (0..size).filter(|&mask| indep[mask]).collect();
    let mut exchange = true;
    'exch: for &i in &independent {
        for &j in &independent {
            if j.count_ones() <= i.count_ones() {
                continue;
            }
            let mut extra = j & !i;
            let mut ok = false;
            while extra != 0 {
                let bit = extra & extra.wrapping_neg();
                if indep[i | bit] {
                    ok = true;
                    break;
                }
                extra ^= bit;
            }
            if !ok {
                exchange = false;
                violations.push(format!(
                    "exchange: no element of {} extends {}",
                    name(j),
                    name(i)
                ));
                break 'exch;
            }
        }
    }

    let rank = induced_rank_table(&indep, m);
    let mut submodular = true;
    'sub: for s in 0..size {
        for t in s + 1..size {
            if rank[s | t] + rank[s & t] > rank[s] + rank[t] {
                submodular = false;
                violations.push(format!(
                    "submodularity: r({0} ∪ {1}) + r({0} ∩ {1}) > r({0}) + r({1})",
                    name(s),
                    name(t)
                ));
                break 'sub;
            }
        }
    }

    Ok(ValidationReport {
        ground_size: m,
        contains_empty,
        downward_closed,
        exchange,
        submodular,
        violations,
    })
}

/// `r(S) = max{|I| : I ⊆ S, I independent}` for every packed subset `S`.
pub(crate) fn induced_rank_table(indep: &[bool], m: usize) -> Vec<usize> {
    let size = 1usize << m;
    let mut rank = vec![0usize; size];
    for mask in 1..size {
        rank[mask] = if indep[mask] {
            mask.count_ones() as usize
        } else {
            let mut best = 0;
            let mut bits = mask;
            while bits != 0 {
                let bit = bits & bits.wrapping_neg();
                best = best.max(rank[mask ^ bit]);
                bits ^= bit;
            }
            best
        };
    }
    rank
}
