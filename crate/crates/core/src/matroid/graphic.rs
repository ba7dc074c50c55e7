use crate::error::{OcrsError, Result};
use crate::set::ElemSet;

/// Cycle matroid of a multigraph; element `i` is edge `i`.
#[derive(Debug, Clone)]
pub struct Graphic {
    pub(crate) vertices: usize,
    pub(crate) edges: Vec<(usize, usize)>,
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false when `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

impl Graphic {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|(u, v)| *u >= vertices || *v >= vertices) {
            return Err(OcrsError::InvalidMatroid(format!(
                "edge ({u}, {v}) references a vertex outside 0..{vertices}"
            )));
        }
        Ok(Self { vertices, edges })
    }

    /// Complete graph `K_m`, edges in lexicographic order of endpoints.
    pub fn complete(m: usize) -> Self {
        let edges = (0..m)
            .flat_map(|u| (u + 1..m).map(move |v| (u, v)))
            .collect();
        Self { vertices: m, edges }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn forest(&self, s: &ElemSet) -> (DisjointSets, usize) {
        let mut dsu = DisjointSets::new(self.vertices);
        let mut rank = 0;
        for e in s {
            let (u, v) = self.edges[e];
            if dsu.union(u, v) {
                rank += 1;
            }
        }
        (dsu, rank)
    }

    pub(crate) fn rank(&self, s: &ElemSet) -> usize {
        self.forest(s).1
    }

    pub(crate) fn span(&self, s: &ElemSet) -> ElemSet {
        let (mut dsu, _) = self.forest(s);
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| dsu.find(u) == dsu.find(v))
            .map(|(i, _)| i)
            .collect()
    }
}
