//! Element identifiers and bitset-backed element sets.
//!
//! Ground sets of up to 64 elements live in a single inline word, so the
//! span/rank hot loops reduce to word operations. Larger ground sets spill
//! into additional words.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

/// Dense index of an element in `[0, n)`.
pub type ElementId = usize;

const WORD: usize = 64;

/// A finite set of element ids.
///
/// The representation is canonical (no trailing zero words), so the derived
/// equality and hashing agree with set equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ElemSet {
    words: SmallVec<[u64; 1]>,
}

impl ElemSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{0, 1, …, n-1}`.
    pub fn full(n: usize) -> Self {
        let mut words: SmallVec<[u64; 1]> = SmallVec::new();
        let full_words = n / WORD;
        words.extend(std::iter::repeat_n(u64::MAX, full_words));
        let rem = n % WORD;
        if rem > 0 {
            words.push((1u64 << rem) - 1);
        }
        Self { words }
    }

    pub fn singleton(e: ElementId) -> Self {
        let mut s = Self::new();
        s.insert(e);
        s
    }

    /// Builds a set from the low `n` bits of `bits`.
    pub fn from_bits(bits: u64) -> Self {
        let mut s = Self {
            words: SmallVec::from_elem(bits, 1),
        };
        s.trim();
        s
    }

    pub fn from_words(words: SmallVec<[u64; 1]>) -> Self {
        let mut s = Self { words };
        s.trim();
        s
    }

    /// The first 64 membership bits. Exact for sets whose members are all below 64.
    #[inline]
    pub fn low_bits(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    #[inline]
    pub fn contains(&self, e: ElementId) -> bool {
        self.words
            .get(e / WORD)
            .is_some_and(|w| (w >> (e % WORD)) & 1 == 1)
    }

    pub fn insert(&mut self, e: ElementId) -> bool {
        let idx = e / WORD;
        if idx >= self.words.len() {
            self.words.resize(idx + 1, 0);
        }
        let mask = 1u64 << (e % WORD);
        let fresh = self.words[idx] & mask == 0;
        self.words[idx] |= mask;
        fresh
    }

    pub fn remove(&mut self, e: ElementId) -> bool {
        let idx = e / WORD;
        let Some(w) = self.words.get_mut(idx) else {
            return false;
        };
        let mask = 1u64 << (e % WORD);
        let present = *w & mask != 0;
        *w &= !mask;
        self.trim();
        present
    }

    pub fn with(&self, e: ElementId) -> Self {
        let mut s = self.clone();
        s.insert(e);
        s
    }

    pub fn without(&self, e: ElementId) -> Self {
        let mut s = self.clone();
        s.remove(e);
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, o) in words.iter_mut().zip(short.words.iter()) {
            *w |= o;
        }
        Self { words }
    }

    pub fn union_with(&mut self, other: &Self) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w |= o;
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = Self {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a & b)
                .collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = Self {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<ElementId> {
        self.iter().collect()
    }

    /// Every subset of `self`, in increasing order of the packed index.
    ///
    /// Panics if `self` has more than 30 members.
    pub fn subsets(&self) -> Subsets {
        let members = self.to_vec();
        assert!(
            members.len() <= 30,
            "refusing to enumerate 2^{} subsets",
            members.len()
        );
        Subsets {
            total: 1u64 << members.len(),
            next: 0,
            members,
        }
    }

    /// Picks the subset of `self` selected by the low bits of `mask`
    /// (bit `j` selects the `j`-th smallest member).
    pub fn select(members: &[ElementId], mask: u64) -> Self {
        let mut s = Self::new();
        let mut m = mask;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            s.insert(members[j]);
            m &= m - 1;
        }
        s
    }
}

impl Ord for ElemSet {
    /// Size first, then lexicographic on the sorted member list.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<ElementId> for ElemSet {
    fn from_iter<T: IntoIterator<Item = ElementId>>(iter: T) -> Self {
        let mut s = Self::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl<'a> IntoIterator for &'a ElemSet {
    type Item = ElementId;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl Serialize for ElemSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElemSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ids = Vec::<ElementId>::deserialize(deserializer)?;
        Ok(ids.into_iter().collect())
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = ElementId;

    #[inline]
    fn next(&mut self) -> Option<ElementId> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + bit);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

pub struct Subsets {
    members: Vec<ElementId>,
    total: u64,
    next: u64,
}

impl Iterator for Subsets {
    type Item = ElemSet;

    fn next(&mut self) -> Option<ElemSet> {
        if self.next >= self.total {
            return None;
        }
        let s = ElemSet::select(&self.members, self.next);
        self.next += 1;
        Some(s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Subsets {}
