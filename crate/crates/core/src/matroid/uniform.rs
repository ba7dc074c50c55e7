use crate::set::ElemSet;

/// `U_{k,n}`: every set of at most `k` elements is independent.
#[derive(Debug, Clone)]
pub struct Uniform {
    pub n: usize,
    pub k: usize,
}

impl Uniform {
    pub(crate) fn rank(&self, s: &ElemSet) -> usize {
        s.len().min(self.k)
    }

    pub(crate) fn span(&self, s: &ElemSet) -> ElemSet {
        if s.len() >= self.k {
            ElemSet::full(self.n)
        } else {
            s.clone()
        }
    }
}
