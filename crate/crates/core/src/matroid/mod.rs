//! Finite matroids behind a rank/independence/span oracle, with restriction
//! and contraction as lightweight views over a shared base family.

mod explicit;
mod graphic;
mod laminar;
mod partition;
mod uniform;
pub mod validate;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{OcrsError, Result};
use crate::set::{ElemSet, ElementId};

pub use explicit::{Explicit, ExplicitFamily, EXPLICIT_MAX_N};
pub use graphic::{DisjointSets, Graphic};
pub use laminar::Laminar;
pub use partition::Partition;
pub use uniform::Uniform;
pub use validate::{validate_axioms, IndependenceSystem, ValidationReport};

/// The concrete matroid a view delegates to.
#[derive(Debug, Clone)]
pub enum Family {
    Uniform(Uniform),
    Partition(Partition),
    Graphic(Graphic),
    Laminar(Laminar),
    Explicit(Explicit),
}

impl Family {
    pub fn size(&self) -> usize {
        match self {
            Family::Uniform(m) => m.n,
            Family::Partition(m) => m.n,
            Family::Graphic(m) => m.edges.len(),
            Family::Laminar(m) => m.n,
            Family::Explicit(m) => m.n,
        }
    }

    fn rank(&self, s: &ElemSet) -> usize {
        match self {
            Family::Uniform(m) => m.rank(s),
            Family::Partition(m) => m.rank(s),
            Family::Graphic(m) => m.rank(s),
            Family::Laminar(m) => m.rank(s),
            Family::Explicit(m) => m.rank(s),
        }
    }

    fn span(&self, s: &ElemSet) -> ElemSet {
        match self {
            Family::Uniform(m) => m.span(s),
            Family::Partition(m) => m.span(s),
            Family::Graphic(m) => m.span(s),
            Family::Laminar(m) => m.span(s),
            Family::Explicit(m) => m.span(s),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Family::Uniform(_) => "uniform",
            Family::Partition(_) => "partition",
            Family::Graphic(_) => "graphic",
            Family::Laminar(_) => "laminar",
            Family::Explicit(_) => "explicit",
        }
    }
}

/// A matroid `(M / contracted) | ground` over a base family.
///
/// Element ids are those of the base family and stay stable across minors.
/// Values are immutable and cheap to clone; the base family is shared.
#[derive(Clone)]
pub struct MatroidOracle {
    base: Arc<Family>,
    ground: ElemSet,
    contracted: ElemSet,
    contracted_rank: usize,
}

impl fmt::Debug for MatroidOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatroidOracle")
            .field("family", &self.base.kind())
            .field("ground", &self.ground)
            .field("contracted", &self.contracted)
            .finish()
    }
}

impl From<Family> for MatroidOracle {
    fn from(family: Family) -> Self {
        let ground = ElemSet::full(family.size());
        Self {
            base: Arc::new(family),
            ground,
            contracted: ElemSet::new(),
            contracted_rank: 0,
        }
    }
}

impl MatroidOracle {
    pub fn uniform(n: usize, k: usize) -> Self {
        Family::Uniform(Uniform { n, k }).into()
    }

    pub fn partition(blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        Ok(Family::Partition(Partition::new(blocks, capacities)?).into())
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Ok(Family::Graphic(Graphic::new(vertices, edges)?).into())
    }

    pub fn complete_graph(m: usize) -> Self {
        Family::Graphic(Graphic::complete(m)).into()
    }

    pub fn laminar(n: usize, sets: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        Ok(Family::Laminar(Laminar::new(n, sets, capacities)?).into())
    }

    /// Fails unless the listed family satisfies the matroid axioms; refuses `n > 12`.
    pub fn explicit(n: usize, independent_sets: &[Vec<usize>]) -> Result<Self> {
        Ok(Family::Explicit(Explicit::new(n, independent_sets)?).into())
    }

    pub fn family(&self) -> &Family {
        &self.base
    }

    pub fn ground_set(&self) -> &ElemSet {
        &self.ground
    }

    pub fn contracted(&self) -> &ElemSet {
        &self.contracted
    }

    /// Size of the id universe of the base family (not of this view).
    pub fn universe_size(&self) -> usize {
        self.base.size()
    }

    fn check(&self, s: &ElemSet) -> Result<()> {
        match s.difference(&self.ground).iter().next() {
            Some(e) => Err(OcrsError::ElementOutsideGround(e)),
            None => Ok(()),
        }
    }

    pub fn check_element(&self, e: ElementId) -> Result<()> {
        if self.ground.contains(e) {
            Ok(())
        } else {
            Err(OcrsError::ElementOutsideGround(e))
        }
    }

    /// `r(S)` for `S` inside the ground set; no membership check.
    #[inline]
    pub fn rank_unchecked(&self, s: &ElemSet) -> usize {
        if self.contracted.is_empty() {
            self.base.rank(s)
        } else {
            self.base.rank(&s.union(&self.contracted)) - self.contracted_rank
        }
    }

    pub fn rank(&self, s: &ElemSet) -> Result<usize> {
        self.check(s)?;
        Ok(self.rank_unchecked(s))
    }

    /// Rank of the whole view.
    pub fn matroid_rank(&self) -> usize {
        self.rank_unchecked(&self.ground)
    }

    pub fn is_independent(&self, s: &ElemSet) -> Result<bool> {
        Ok(self.rank(s)? == s.len())
    }

    /// `{e ∈ ground : r(S ∪ {e}) = r(S)}`; no membership check.
    #[inline]
    pub fn span_unchecked(&self, s: &ElemSet) -> ElemSet {
        if self.contracted.is_empty() {
            self.base.span(s).intersection(&self.ground)
        } else {
            self.base
                .span(&s.union(&self.contracted))
                .intersection(&self.ground)
        }
    }

    pub fn span(&self, s: &ElemSet) -> Result<ElemSet> {
        self.check(s)?;
        Ok(self.span_unchecked(s))
    }

    /// `M|C`: drop every element outside `C`.
    pub fn restrict(&self, c: &ElemSet) -> Result<Self> {
        if !c.is_subset(&self.ground) {
            return Err(OcrsError::NotASubset);
        }
        Ok(Self {
            base: Arc::clone(&self.base),
            ground: c.clone(),
            contracted: self.contracted.clone(),
            contracted_rank: self.contracted_rank,
        })
    }

    /// `M/A`: ground set `N∖A`, rank `r(S ∪ A) − r(A)`.
    pub fn contract(&self, a: &ElemSet) -> Result<Self> {
        if !a.is_subset(&self.ground) {
            return Err(OcrsError::NotASubset);
        }
        let contracted = self.contracted.union(a);
        let contracted_rank = self.base.rank(&contracted);
        Ok(Self {
            base: Arc::clone(&self.base),
            ground: self.ground.difference(a),
            contracted,
            contracted_rank,
        })
    }

    /// A maximal independent subset of `s`, built greedily in the given order.
    pub fn greedy_basis<I: IntoIterator<Item = ElementId>>(&self, order: I) -> ElemSet {
        let mut basis = ElemSet::new();
        for e in order {
            let grown = basis.with(e);
            if self.rank_unchecked(&grown) == grown.len() {
                basis = grown;
            }
        }
        basis
    }

    /// Elements with `r({e}) = 0`.
    pub fn loops(&self) -> ElemSet {
        self.ground
            .iter()
            .filter(|&e| self.rank_unchecked(&ElemSet::singleton(e)) == 0)
            .collect()
    }
}

impl IndependenceSystem for MatroidOracle {
    fn ground(&self) -> &ElemSet {
        &self.ground
    }

    fn is_independent_set(&self, s: &ElemSet) -> bool {
        self.rank_unchecked(s) == s.len()
    }
}

/// JSON matroid descriptor, tagged by `"family"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidDescriptor {
    Uniform {
        n: usize,
        rank: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    Laminar {
        n: usize,
        sets: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Explicit {
        n: usize,
        independent_sets: Vec<Vec<usize>>,
    },
}

impl MatroidDescriptor {
    pub fn build(&self) -> Result<MatroidOracle> {
        match self {
            MatroidDescriptor::Uniform { n, rank } => Ok(MatroidOracle::uniform(*n, *rank)),
            MatroidDescriptor::Partition { blocks, capacities } => {
                MatroidOracle::partition(blocks.clone(), capacities.clone())
            }
            MatroidDescriptor::Graphic { vertices, edges } => {
                MatroidOracle::graphic(*vertices, edges.clone())
            }
            MatroidDescriptor::Laminar {
                n,
                sets,
                capacities,
            } => MatroidOracle::laminar(*n, sets.clone(), capacities.clone()),
            MatroidDescriptor::Explicit {
                n,
                independent_sets,
            } => MatroidOracle::explicit(*n, independent_sets),
        }
    }
}
