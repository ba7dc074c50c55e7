use crate::error::{OcrsError, Result};
use crate::set::ElemSet;

/// Capacities on a laminar family: `I` is independent iff `|I ∩ L| ≤ c_L` for
/// every member `L`. Elements outside every member are free.
#[derive(Debug, Clone)]
pub struct Laminar {
    pub(crate) n: usize,
    pub(crate) sets: Vec<ElemSet>,
    pub(crate) capacities: Vec<usize>,
    /// For each element, the indices of the members containing it.
    containing: Vec<Vec<usize>>,
}

impl Laminar {
    pub fn new(n: usize, sets: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        if sets.len() != capacities.len() {
            return Err(OcrsError::InvalidMatroid(format!(
                "{} laminar sets but {} capacities",
                sets.len(),
                capacities.len()
            )));
        }
        let ground = ElemSet::full(n);
        let sets: Vec<ElemSet> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        for (i, a) in sets.iter().enumerate() {
            if !a.is_subset(&ground) {
                return Err(OcrsError::InvalidMatroid(format!(
                    "laminar set {i} leaves the ground set 0..{n}"
                )));
            }
            for (j, b) in sets.iter().enumerate().skip(i + 1) {
                if !(a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)) {
                    return Err(OcrsError::InvalidMatroid(format!(
                        "sets {i} and {j} cross; the family is not laminar"
                    )));
                }
            }
        }
        let mut containing = vec![Vec::new(); n];
        for (i, s) in sets.iter().enumerate() {
            for e in s {
                containing[e].push(i);
            }
        }
        Ok(Self {
            n,
            sets,
            capacities,
            containing,
        })
    }

    /// Greedy basis of `s` and the per-member load it induces.
    fn greedy(&self, s: &ElemSet) -> (usize, Vec<usize>) {
        let mut load = vec![0usize; self.sets.len()];
        let mut rank = 0;
        for e in s {
            let fits = self.containing[e]
                .iter()
                .all(|&l| load[l] < self.capacities[l]);
            if fits {
                for &l in &self.containing[e] {
                    load[l] += 1;
                }
                rank += 1;
            }
        }
        (rank, load)
    }

    pub(crate) fn rank(&self, s: &ElemSet) -> usize {
        self.greedy(s).0
    }

    pub(crate) fn span(&self, s: &ElemSet) -> ElemSet {
        let (_, load) = self.greedy(s);
        (0..self.n)
            .filter(|&e| {
                s.contains(e)
                    || self.containing[e]
                        .iter()
                        .any(|&l| load[l] >= self.capacities[l])
            })
            .collect()
    }
}
