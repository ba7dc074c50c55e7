use crate::error::{OcrsError, Result};
use crate::set::ElemSet;

use super::validate::{validate_axioms, IndependenceSystem};

pub const EXPLICIT_MAX_N: usize = 12;

/// A listed family of independent sets, with no axiom checks.
///
/// This is the raw input to [`Explicit::new`]; it exists on its own so that
/// malformed families can still be handed to [`validate_axioms`].
#[derive(Debug, Clone)]
pub struct ExplicitFamily {
    ground: ElemSet,
    independent: Vec<bool>,
}

impl ExplicitFamily {
    pub fn new(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        if n > EXPLICIT_MAX_N {
            return Err(OcrsError::TooLarge {
                what: "explicit matroid",
                n,
                max: EXPLICIT_MAX_N,
            });
        }
        let mut independent = vec![false; 1 << n];
        for s in sets {
            let mut mask = 0usize;
            for &e in s {
                if e >= n {
                    return Err(OcrsError::InvalidMatroid(format!(
                        "listed set mentions element {e} outside 0..{n}"
                    )));
                }
                mask |= 1 << e;
            }
            independent[mask] = true;
        }
        Ok(Self {
            ground: ElemSet::full(n),
            independent,
        })
    }
}

impl IndependenceSystem for ExplicitFamily {
    fn ground(&self) -> &ElemSet {
        &self.ground
    }

    fn is_independent_set(&self, s: &ElemSet) -> bool {
        self.independent[s.low_bits() as usize]
    }
}

/// Validated explicit matroid with a precomputed rank table.
#[derive(Debug, Clone)]
pub struct Explicit {
    pub(crate) n: usize,
    rank_table: Vec<u8>,
}

impl Explicit {
    pub fn new(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let family = ExplicitFamily::new(n, sets)?;
        let report = validate_axioms(&family)?;
        if !report.passed() {
            return Err(OcrsError::InvalidMatroid(format!(
                "explicit family fails the matroid axioms: {}",
                report.violations.join("; ")
            )));
        }
        let mut rank_table = vec![0u8; 1 << n];
        for mask in 1usize..(1 << n) {
            rank_table[mask] = if family.independent[mask] {
                mask.count_ones() as u8
            } else {
                let mut best = 0;
                let mut m = mask;
                while m != 0 {
                    let bit = m & m.wrapping_neg();
                    best = best.max(rank_table[mask ^ bit]);
                    m ^= bit;
                }
                best
            };
        }
        Ok(Self { n, rank_table })
    }

    pub(crate) fn rank(&self, s: &ElemSet) -> usize {
        self.rank_table[s.low_bits() as usize] as usize
    }

    pub(crate) fn span(&self, s: &ElemSet) -> ElemSet {
        let mask = s.low_bits() as usize;
        let r = self.rank_table[mask];
        (0..self.n)
            .filter(|&e| self.rank_table[mask | (1 << e)] == r)
            .collect()
    }
}
