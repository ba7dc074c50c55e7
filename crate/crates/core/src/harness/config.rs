use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::{Overrides, EPS_MAX};
use crate::engine::AdversaryModel;
use crate::error::{OcrsError, Result};
use crate::matroid::{MatroidDescriptor, MatroidOracle};
use crate::stochastic::{in_scaled_polytope, MarginalVector, EXACT_MAX_N};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Chain,
    Ocrs,
    VerifyInlink,
    VerifyProgress,
    VerifySpanning,
    VerifyFreeness,
    VerifyTalpha,
    Audit,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Chain => "chain",
            Mode::Ocrs => "ocrs",
            Mode::VerifyInlink => "verify-inlink",
            Mode::VerifyProgress => "verify-progress",
            Mode::VerifySpanning => "verify-spanning",
            Mode::VerifyFreeness => "verify-freeness",
            Mode::VerifyTalpha => "verify-talpha",
            Mode::Audit => "audit",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| OcrsError::Config(format!("unknown mode {s:?}")))
    }

    /// Whether `x` is the OCRS input in `P_M` rather than a point of `λ·P_M`.
    fn marginals_in_polytope(self) -> bool {
        self == Mode::Ocrs
    }
}

/// How to obtain `x`. `scale` defaults to `1` in `ocrs` mode and to `λ`
/// otherwise; the result must lie in `scale · P_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MarginalSpec {
    /// `scale` times the average of greedy-basis indicators over every
    /// cyclic rotation of the id order.
    UniformScaled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    /// `scale` times the indicator of the greedy basis in id order.
    BasisIndicatorScaled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    Custom {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
}

impl MarginalSpec {
    fn scale(&self) -> Option<f64> {
        match self {
            MarginalSpec::UniformScaled { scale }
            | MarginalSpec::BasisIndicatorScaled { scale }
            | MarginalSpec::Custom { scale, .. } => *scale,
        }
    }
}

/// Builds `x` per `spec` and checks it lies in `scale · P_M`: by enumeration
/// up to 20 elements, by construction above that. Custom vectors above 20
/// elements cannot be checked and are refused.
pub fn generate_marginal(
    spec: &MarginalSpec,
    m: &MatroidOracle,
    scale: f64,
) -> Result<MarginalVector> {
    if !(0.0..=1.0).contains(&scale) {
        return Err(OcrsError::Config(format!(
            "scale {scale} must lie in [0, 1]"
        )));
    }
    let n = m.universe_size();
    let ground = m.ground_set();
    let x = match spec {
        MarginalSpec::BasisIndicatorScaled { .. } => {
            let basis = m.greedy_basis(ground.iter());
            MarginalVector::new(
                (0..n)
                    .map(|e| if basis.contains(e) { scale } else { 0.0 })
                    .collect(),
            )?
        }
        MarginalSpec::UniformScaled { .. } => {
            let ids = ground.to_vec();
            let mut hits = vec![0usize; n];
            for r in 0..ids.len() {
                let order = ids[r..].iter().chain(&ids[..r]).copied();
                for e in &m.greedy_basis(order) {
                    hits[e] += 1;
                }
            }
            let rotations = ids.len().max(1) as f64;
            MarginalVector::new(hits.iter().map(|&h| scale * h as f64 / rotations).collect())?
        }
        MarginalSpec::Custom { values, .. } => {
            if values.len() != n {
                return Err(OcrsError::Config(format!(
                    "custom x has {} entries for a universe of {n}",
                    values.len()
                )));
            }
            if n > EXACT_MAX_N {
                return Err(OcrsError::Config(format!(
                    "custom x over {n} elements cannot be checked against the polytope"
                )));
            }
            MarginalVector::new(values.clone()).map_err(|e| OcrsError::Config(e.to_string()))?
        }
    };
    if n <= EXACT_MAX_N && !in_scaled_polytope(m, &x, scale)? {
        return Err(OcrsError::Config(format!("x lies outside {scale}·P_M")));
    }
    Ok(x)
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub mode: Mode,
    pub matroid: MatroidDescriptor,
    pub marginals: MarginalSpec,
    pub lambda: f64,
    pub eps: f64,
    /// Replaces the default `τ = λ + 4ε`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_adversary")]
    pub adversary: AdversaryModel,
    #[serde(default, skip_serializing_if = "Overrides::is_empty")]
    pub overrides: Overrides,
    /// Must be false (or absent) when overrides are present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conforming: Option<bool>,
    /// Ranks for `audit` mode; each builds `U_{ρ, ρ+4}`. Empty audits the
    /// configured matroid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub audit_ranks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Adds elapsed seconds to the report, which then stops being
    /// reproducible byte for byte.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub record_wall_clock: bool,
}

fn default_adversary() -> AdversaryModel {
    AdversaryModel::ElementLast
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| OcrsError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| OcrsError::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// `τ`, defaulting to `λ + 4ε`.
    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(self.lambda + 4.0 * self.eps)
    }

    pub fn is_conforming(&self) -> bool {
        self.overrides.is_empty()
    }

    /// Scale of the polytope `x` must lie in.
    pub fn marginal_scale(&self) -> f64 {
        self.marginals
            .scale()
            .unwrap_or(if self.mode.marginals_in_polytope() {
                1.0
            } else {
                self.lambda
            })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(OcrsError::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.eps > 0.0 && self.eps <= EPS_MAX) {
            return bad(format!("eps = {} must lie in (0, 1/20]", self.eps));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0 - 4.0 * self.eps) {
            return bad(format!(
                "lambda = {} must lie in (0, 1 - 4 eps]",
                self.lambda
            ));
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau <= 1.0) {
                return bad(format!("tau = {tau} must lie in (0, 1]"));
            }
        }
        if self.conforming == Some(true) && !self.overrides.is_empty() {
            return bad("a conforming run cannot override q, eta or zeta".into());
        }
        if self.overrides.q == Some(0)
            || self.overrides.eta == Some(0)
            || self.overrides.zeta == Some(0)
        {
            return bad("overrides must be positive".into());
        }
        if self.mode == Mode::Audit && self.audit_ranks.iter().any(|&r| r < 1) {
            return bad("audit ranks must be positive".into());
        }
        if self.mode == Mode::Audit
            && !self.audit_ranks.is_empty()
            && matches!(self.marginals, MarginalSpec::Custom { .. })
        {
            return bad("audit over several ranks needs a generated x".into());
        }
        Ok(())
    }
}
