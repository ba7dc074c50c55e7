use crate::error::{OcrsError, Result};
use crate::set::ElemSet;

/// Blocks partition the ground set; a set is independent iff it takes at most
/// `capacity[j]` elements from block `j`.
#[derive(Debug, Clone)]
pub struct Partition {
    pub(crate) n: usize,
    pub(crate) blocks: Vec<ElemSet>,
    pub(crate) capacities: Vec<usize>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return Err(OcrsError::InvalidMatroid(format!(
                "{} blocks but {} capacities",
                blocks.len(),
                capacities.len()
            )));
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = ElemSet::new();
        let mut sets = Vec::with_capacity(blocks.len());
        for block in blocks {
            for &e in &block {
                if e >= n || !seen.insert(e) {
                    return Err(OcrsError::InvalidMatroid(format!(
                        "partition blocks must cover 0..{n} exactly once (element {e})"
                    )));
                }
            }
            sets.push(block.into_iter().collect());
        }
        Ok(Self {
            n,
            blocks: sets,
            capacities,
        })
    }

    pub(crate) fn rank(&self, s: &ElemSet) -> usize {
        self.blocks
            .iter()
            .zip(&self.capacities)
            .map(|(b, &c)| b.intersection(s).len().min(c))
            .sum()
    }

    pub(crate) fn span(&self, s: &ElemSet) -> ElemSet {
        let mut out = ElemSet::new();
        for (b, &c) in self.blocks.iter().zip(&self.capacities) {
            let hit = b.intersection(s);
            if hit.len() >= c {
                out.union_with(b);
            } else {
                out.union_with(&hit);
            }
        }
        out
    }
}
