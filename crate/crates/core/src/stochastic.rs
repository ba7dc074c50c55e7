//! Product distributions `D(x)`: sampling, exact enumeration, empirical
//! estimation, and brute-force matroid polytope membership.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{domain, OcrsError, Result};
use crate::matroid::MatroidOracle;
use crate::set::{ElemSet, ElementId};

/// Enumeration ceiling for exact probabilities and polytope checks.
pub const EXACT_MAX_N: usize = 20;

/// Tolerance for the polytope inequalities `Σ_{e∈S} x_e ≤ λ·r(S)`.
pub const POLYTOPE_TOL: f64 = 1e-12;

/// One realization `R(x)`.
pub type ActiveSet = ElemSet;

/// A counter-based random stream: `(seed, stream)` fixes the draw sequence.
///
/// Trial `i` of an experiment uses stream `i`, so results do not depend on
/// how trials are spread over workers.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Per-element activation probabilities, indexed by element id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MarginalVector(Vec<f64>);

impl TryFrom<Vec<f64>> for MarginalVector {
    type Error = OcrsError;

    fn try_from(x: Vec<f64>) -> Result<Self> {
        Self::new(x)
    }
}

impl From<MarginalVector> for Vec<f64> {
    fn from(x: MarginalVector) -> Self {
        x.0
    }
}

impl MarginalVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some((e, v)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(domain(format!("x[{e}] = {v} is not a probability")));
        }
        Ok(Self(x))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: ElementId) -> f64 {
        self.0.get(e).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `x|_C`, kept on the same id universe with zeros outside `C`.
    pub fn restrict(&self, c: &ElemSet) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .map(|(e, &v)| if c.contains(e) { v } else { 0.0 })
                .collect(),
        )
    }

    pub fn sum_over(&self, s: &ElemSet) -> f64 {
        s.iter().map(|e| self.get(e)).sum()
    }

    pub fn sampler(&self) -> ProductSampler {
        ProductSampler::new(self)
    }
}

/// Sample access to a distribution over active sets.
///
/// Chain construction only ever sees its input through this trait.
pub trait ActiveSampler: Sync {
    fn draw(&self, rng: &mut RngStream) -> ActiveSet;

    /// The first 64 membership bits of a fresh draw. Callers use this only
    /// when every id is below 64.
    fn draw_word(&self, rng: &mut RngStream) -> u64 {
        self.draw(rng).low_bits()
    }

    /// The multiset of `q` fresh draws as `(membership bits, multiplicity)`
    /// pairs with positive multiplicity, for samplers whose draws live in
    /// the first 64 ids and that can produce the tally without drawing one
    /// set at a time. `None` means "draw them individually".
    fn draw_histogram(&self, _q: usize, _rng: &mut RngStream) -> Option<Histogram> {
        None
    }

    /// True when every draw is certainly empty; lets callers skip drawing.
    fn always_empty(&self) -> bool {
        false
    }
}

/// Realizations of a batch of draws with their multiplicities.
pub type Histogram = Vec<(u64, u64)>;

/// Splits every cell of `hist` on an independent coin for `bit`: of a cell's
/// `k` draws, `Binomial(k, p)` gain `bit`.
fn split_cells(hist: Histogram, bit: u64, p: f64, rng: &mut RngStream) -> Histogram {
    let mut out = Vec::with_capacity(hist.len() * 2);
    for (mask, k) in hist {
        let hits = if p >= 1.0 {
            k
        } else {
            Binomial::new(k, p).expect("p in [0, 1]").sample(rng)
        };
        if hits > 0 {
            out.push((mask | bit, hits));
        }
        if hits < k {
            out.push((mask, k - hits));
        }
    }
    out
}

/// An independent coin with success probability `p`, resolved against one
/// 64-bit word: `word < ⌊p·2⁶⁴⌋`, or always true when `p = 1`.
#[derive(Debug, Clone, Copy)]
struct Coin {
    threshold: u64,
    certain: bool,
}

impl Coin {
    fn new(p: f64) -> Self {
        Self {
            threshold: (p * 18_446_744_073_709_551_616.0) as u64,
            certain: p >= 1.0,
        }
    }

    #[inline]
    fn flip(&self, rng: &mut RngStream) -> bool {
        let word = rng.next_u64();
        self.certain || word < self.threshold
    }
}

/// Draws from `D(x)`: each element independently with probability `x_e`.
#[derive(Debug, Clone)]
pub struct ProductSampler {
    coins: Vec<(ElementId, Coin)>,
    probs: Vec<f64>,
    words: usize,
}

impl ProductSampler {
    pub fn new(x: &MarginalVector) -> Self {
        let coins: Vec<_> =
            x.0.iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(e, &p)| (e, Coin::new(p)))
                .collect();
        let probs = x.0.iter().copied().filter(|&p| p > 0.0).collect();
        let words = coins.last().map_or(0, |(e, _)| e / 64 + 1);
        Self {
            coins,
            probs,
            words,
        }
    }
}

impl ActiveSampler for ProductSampler {
    #[inline]
    fn draw(&self, rng: &mut RngStream) -> ActiveSet {
        let mut words: SmallVec<[u64; 1]> = SmallVec::from_elem(0, self.words);
        for (e, coin) in &self.coins {
            if coin.flip(rng) {
                words[e / 64] |= 1 << (e % 64);
            }
        }
        ElemSet::from_words(words)
    }

    #[inline]
    fn draw_word(&self, rng: &mut RngStream) -> u64 {
        let mut word = 0u64;
        for (e, coin) in &self.coins {
            if coin.flip(rng) {
                word |= 1 << (e % 64);
            }
        }
        word
    }

    fn draw_histogram(&self, q: usize, rng: &mut RngStream) -> Option<Histogram> {
        if self.words > 1 {
            return None;
        }
        let mut hist = vec![(0, q as u64)];
        for ((e, _), &p) in self.coins.iter().zip(&self.probs) {
            hist = split_cells(hist, 1 << e, p, rng);
        }
        Some(hist)
    }

    fn always_empty(&self) -> bool {
        self.coins.is_empty()
    }
}

/// `D(λx)` simulated from `D(x)` by discarding each draw's members with
/// probability `1 − λ`.
#[derive(Debug, Clone)]
pub struct FilteredSampler<S> {
    inner: S,
    lambda: f64,
    keep: Coin,
}

impl<S: ActiveSampler> FilteredSampler<S> {
    pub fn new(inner: S, lambda: f64) -> Result<Self> {
        check_unit(lambda, "λ")?;
        Ok(Self {
            inner,
            lambda,
            keep: Coin::new(lambda),
        })
    }
}

impl<S: ActiveSampler> ActiveSampler for FilteredSampler<S> {
    fn draw(&self, rng: &mut RngStream) -> ActiveSet {
        let raw = self.inner.draw(rng);
        raw.iter().filter(|_| self.keep.flip(rng)).collect()
    }

    #[inline]
    fn draw_word(&self, rng: &mut RngStream) -> u64 {
        let mut raw = self.inner.draw_word(rng);
        let mut kept = 0u64;
        while raw != 0 {
            let bit = raw & raw.wrapping_neg();
            if self.keep.flip(rng) {
                kept |= bit;
            }
            raw ^= bit;
        }
        kept
    }

    fn draw_histogram(&self, q: usize, rng: &mut RngStream) -> Option<Histogram> {
        let raw = self.inner.draw_histogram(q, rng)?;
        // Each cell splits independently over its own members' keep coins.
        let mut out = Vec::with_capacity(raw.len());
        for (mask, k) in raw {
            let mut cell = vec![(0, k)];
            let mut bits = mask;
            while bits != 0 {
                let bit = bits & bits.wrapping_neg();
                cell = split_cells(cell, bit, self.lambda, rng);
                bits ^= bit;
            }
            out.extend(cell);
        }
        Some(out)
    }

    fn always_empty(&self) -> bool {
        self.lambda == 0.0 || self.inner.always_empty()
    }
}

impl<S: ActiveSampler + ?Sized> ActiveSampler for &S {
    fn draw(&self, rng: &mut RngStream) -> ActiveSet {
        (**self).draw(rng)
    }

    fn draw_word(&self, rng: &mut RngStream) -> u64 {
        (**self).draw_word(rng)
    }

    fn draw_histogram(&self, q: usize, rng: &mut RngStream) -> Option<Histogram> {
        (**self).draw_histogram(q, rng)
    }

    fn always_empty(&self) -> bool {
        (**self).always_empty()
    }
}

/// `q` independent draws.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub samples: Vec<ActiveSet>,
    pub draw_count: usize,
}

impl SampleBatch {
    pub fn draw<S: ActiveSampler + ?Sized>(sampler: &S, q: usize, rng: &mut RngStream) -> Self {
        let samples: Vec<_> = (0..q).map(|_| sampler.draw(rng)).collect();
        Self {
            draw_count: samples.len(),
            samples,
        }
    }

    pub fn from_samples(samples: Vec<ActiveSet>) -> Self {
        Self {
            draw_count: samples.len(),
            samples,
        }
    }
}

pub(crate) fn check_unit(v: f64, name: &str) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(domain(format!("{name} = {v} must lie in [0, 1]")))
    }
}

pub fn sample_active_set(x: &MarginalVector, rng: &mut RngStream) -> ActiveSet {
    ProductSampler::new(x).draw(rng)
}

/// Keeps each member of `r` independently with probability `λ`.
pub fn filter_actives(r: &ActiveSet, lambda: f64, rng: &mut RngStream) -> Result<ActiveSet> {
    check_unit(lambda, "λ")?;
    let keep = Coin::new(lambda);
    Ok(r.iter().filter(|_| keep.flip(rng)).collect())
}

/// `λ·x` componentwise.
pub fn scale(x: &MarginalVector, lambda: f64) -> Result<MarginalVector> {
    check_unit(lambda, "λ")?;
    Ok(MarginalVector(x.0.iter().map(|v| v * lambda).collect()))
}

/// Compensated (Kahan) summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Calls `visit(R, Pr[R(x) = R])` for every realization of positive probability.
///
/// Refuses vectors longer than [`EXACT_MAX_N`].
pub fn for_each_realization<F: FnMut(&ActiveSet, f64)>(
    x: &MarginalVector,
    mut visit: F,
) -> Result<()> {
    if x.len() > EXACT_MAX_N {
        return Err(OcrsError::TooLarge {
            what: "exact enumeration",
            n: x.len(),
            max: EXACT_MAX_N,
        });
    }
    fn walk<F: FnMut(&ActiveSet, f64)>(
        x: &[f64],
        e: usize,
        prob: f64,
        current: &mut ElemSet,
        visit: &mut F,
    ) {
        if e == x.len() {
            visit(current, prob);
            return;
        }
        let p = x[e];
        if p < 1.0 {
            walk(x, e + 1, prob * (1.0 - p), current, visit);
        }
        if p > 0.0 {
            current.insert(e);
            walk(x, e + 1, prob * p, current, visit);
            current.remove(e);
        }
    }
    let mut current = ElemSet::new();
    walk(&x.0, 0, 1.0, &mut current, &mut visit);
    Ok(())
}

/// `Pr_{R∼D(x)}[predicate(R)]` by full enumeration.
pub fn exact_event_probability<P: FnMut(&ActiveSet) -> bool>(
    x: &MarginalVector,
    mut predicate: P,
) -> Result<f64> {
    let mut acc = KahanSum::default();
    for_each_realization(x, |r, p| {
        if predicate(r) {
            acc.add(p);
        }
    })?;
    Ok(acc.value())
}

/// `E_{R∼D(x)}[f(R)]` by full enumeration.
pub fn exact_expectation<F: FnMut(&ActiveSet) -> f64>(x: &MarginalVector, mut f: F) -> Result<f64> {
    let mut acc = KahanSum::default();
    for_each_realization(x, |r, p| acc.add(p * f(r)))?;
    Ok(acc.value())
}

/// Fraction of the batch satisfying `predicate`.
pub fn empirical_probability<P: FnMut(&ActiveSet) -> bool>(
    batch: &SampleBatch,
    mut predicate: P,
) -> Result<f64> {
    if batch.samples.is_empty() {
        return Err(domain("empirical probability of an empty batch"));
    }
    let hits = batch.samples.iter().filter(|s| predicate(s)).count();
    Ok(hits as f64 / batch.samples.len() as f64)
}

/// Whether `Σ_{e∈S} x_e ≤ λ·r(S)` for every nonempty `S` of the ground set
/// (and `x` vanishes off the ground set).
pub fn in_scaled_polytope(m: &MatroidOracle, x: &MarginalVector, lambda: f64) -> Result<bool> {
    let ground = m.ground_set();
    if ground.len() > EXACT_MAX_N {
        return Err(OcrsError::TooLarge {
            what: "polytope membership",
            n: ground.len(),
            max: EXACT_MAX_N,
        });
    }
    if x.0
        .iter()
        .enumerate()
        .any(|(e, &v)| v > 0.0 && !ground.contains(e))
    {
        return Ok(false);
    }
    Ok(ground
        .subsets()
        .skip(1)
        .all(|s| x.sum_over(&s) <= lambda * m.rank_unchecked(&s) as f64 + POLYTOPE_TOL))
}
