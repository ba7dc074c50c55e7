//! The random iteration count `h̄` of a single link build.

use rand::distributions::{Distribution, WeightedIndex};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::stochastic::RngStream;

/// `η = ⌈1 + log_{1+ε}(ln ρ / ε³)⌉`.
pub fn truncation_ceiling(eps: f64, rho: usize) -> usize {
    let rho = rho as f64;
    (1.0 + (rho.ln() / eps.powi(3)).ln() / eps.ln_1p()).ceil() as usize
}

/// Distribution of `h̄` over `{1, …, η}` with `Pr[h̄ = 1] = (1+ε)^{−(η−1)}`
/// and `Pr[h̄ = h] = ε·Pr[h̄ < h]` for `h ≥ 2`.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationDistribution {
    pub eps: f64,
    pub rho: usize,
    pub eta: usize,
    /// `pmf[h - 1] = Pr[h̄ = h]`.
    pub pmf: Vec<f64>,
    #[serde(skip)]
    index: WeightedIndex<f64>,
}

impl TruncationDistribution {
    /// The distribution with `η` from [`truncation_ceiling`].
    pub fn new(eps: f64, rho: usize) -> Result<Self> {
        Self::check(eps, rho)?;
        Self::with_ceiling(eps, rho, truncation_ceiling(eps, rho))
    }

    /// Same recurrence on an arbitrary ceiling (for non-conforming smoke runs).
    pub fn with_ceiling(eps: f64, rho: usize, eta: usize) -> Result<Self> {
        Self::check(eps, rho)?;
        if eta == 0 {
            return Err(domain("η must be at least 1"));
        }
        let mut pmf = Vec::with_capacity(eta);
        let first = (1.0 + eps).powi(-(eta as i32 - 1));
        pmf.push(first);
        let mut below = first;
        for _ in 2..=eta {
            let p = eps * below;
            pmf.push(p);
            below += p;
        }
        let index = WeightedIndex::new(&pmf).map_err(|e| domain(e.to_string()))?;
        Ok(Self {
            eps,
            rho,
            eta,
            pmf,
            index,
        })
    }

    fn check(eps: f64, rho: usize) -> Result<()> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(domain(format!("ε = {eps} must lie in (0, 1)")));
        }
        if rho < 3 {
            return Err(domain(format!("ρ = {rho} must be at least 3")));
        }
        Ok(())
    }

    /// `Pr[h̄ ≤ h]`.
    pub fn cdf(&self, h: usize) -> f64 {
        self.pmf.iter().take(h).sum()
    }

    pub fn sample(&self, rng: &mut RngStream) -> usize {
        self.index.sample(rng) + 1
    }

    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }
}
