//! Executable checks of the chain builder's guarantees: good/bad
//! classification, the in-link loss and progress bounds, spanning and
//! freeness likelihood, the `T_α(B)` extension, and the sample audit.

mod audit;
mod goodbad;
mod propositions;
mod talpha;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::set::ElementId;

pub use audit::{
    reference_curve, sample_complexity_audit, AuditInput, AuditRow, AuditTable, AUDIT_BAND,
};
pub use goodbad::{
    classify_element, verify_in_link_loss, verify_in_link_loss_with, GoodBadVerdict, Status,
};
pub use propositions::{
    progress_bound, selectability_floor, verify_freeness_likely, verify_progress,
    verify_selectability_floor, verify_spanning, FreenessLikelyRun,
};
pub use talpha::{
    brute_force_t_alpha, t_alpha_batch, t_alpha_bullet_one, t_alpha_bullet_two, Inequality,
    TAlphaResult, T_ALPHA_MAX_N,
};

/// Standard errors allowed per single check.
pub const SIGMA_LEVEL: f64 = 3.0;

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// One-sided critical value for `checks` simultaneous tests at a family-wise
/// level equal to a single `3σ` test.
pub fn bonferroni_z(checks: usize) -> f64 {
    if checks <= 1 {
        return SIGMA_LEVEL;
    }
    let n = standard_normal();
    let tail = 1.0 - n.cdf(SIGMA_LEVEL);
    n.inverse_cdf(1.0 - tail / checks as f64)
}

/// Which side of the bound a measurement must fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AtMost,
    AtLeast,
}

impl Direction {
    fn holds(self, measured: f64, bound: f64, tolerance: f64) -> bool {
        match self {
            Direction::AtMost => measured <= bound + tolerance,
            Direction::AtLeast => measured >= bound - tolerance,
        }
    }

    /// Distance to failing; negative when failing.
    fn margin(self, measured: f64, bound: f64, tolerance: f64) -> f64 {
        match self {
            Direction::AtMost => bound + tolerance - measured,
            Direction::AtLeast => measured - (bound - tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementCheck {
    pub element_id: ElementId,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    /// Trials that bear on this element.
    pub samples: u64,
    pub vacuous: bool,
    pub pass: bool,
}

/// Outcome of one statistical check. Per-element checks report their
/// tightest element at the top level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub direction: Direction,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub trials: u64,
    pub conforming: bool,
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<ElementCheck>,
}

impl Verdict {
    pub fn scalar(
        check: &str,
        direction: Direction,
        measured: f64,
        bound: f64,
        tolerance: f64,
        seed: u64,
        trials: u64,
    ) -> Self {
        Self {
            check: check.to_string(),
            pass: direction.holds(measured, bound, tolerance),
            direction,
            measured,
            bound,
            tolerance,
            seed,
            trials,
            conforming: true,
            vacuous: false,
            elements: Vec::new(),
        }
    }

    /// Combines per-element checks; vacuous elements pass and never become
    /// the headline.
    pub fn per_element(
        check: &str,
        direction: Direction,
        elements: Vec<ElementCheck>,
        seed: u64,
        trials: u64,
    ) -> Self {
        let pass = elements.iter().all(|c| c.pass);
        let tightest = elements.iter().filter(|c| !c.vacuous).min_by(|a, b| {
            direction
                .margin(a.measured, a.bound, a.tolerance)
                .total_cmp(&direction.margin(b.measured, b.bound, b.tolerance))
        });
        let (measured, bound, tolerance) =
            tightest.map_or((0.0, 0.0, 0.0), |c| (c.measured, c.bound, c.tolerance));
        Self {
            check: check.to_string(),
            pass,
            direction,
            measured,
            bound,
            tolerance,
            seed,
            trials,
            conforming: true,
            vacuous: tightest.is_none(),
            elements,
        }
    }

    pub fn with_conforming(mut self, conforming: bool) -> Self {
        self.conforming = conforming;
        self
    }
}

/// Mean and sample standard deviation.
pub(crate) fn mean_sd(values: impl IntoIterator<Item = f64>) -> (f64, f64, usize) {
    let values: Vec<f64> = values.into_iter().collect();
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0, 0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    (mean, var.sqrt(), n)
}
