//! Experiment orchestration: JSON configs in, JSON and CSV reports out.

mod config;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    brute_force_t_alpha, sample_complexity_audit, t_alpha_bullet_one, t_alpha_bullet_two,
    verify_freeness_likely, verify_in_link_loss, verify_progress, verify_selectability_floor,
    verify_spanning, AuditInput, AuditTable, Direction, Inequality, Verdict,
};
use crate::chain::{ocrs_chain_with, BuildTrace, ChainParams, SpanningChain};
use crate::engine::{selectability_experiment_with, SelectabilityReport};
use crate::error::{OcrsError, Result};
use crate::matroid::MatroidOracle;
use crate::set::ElemSet;
use crate::stochastic::{MarginalVector, RngStream};

pub use config::{generate_marginal, ExperimentConfig, MarginalSpec, Mode, SCHEMA_VERSION};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CONFIG: i32 = 1;
pub const EXIT_VERIFICATION_FAILED: i32 = 2;

/// Random `Q` sets checked per `T_α(B)` case.
pub const T_ALPHA_QUERIES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawAudit {
    pub total: u64,
    pub mean: f64,
    pub max: u64,
    /// `ζ·η·q`.
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStats {
    pub chains: u64,
    /// Mean `|C_i|` for `i = 0..=ζ+1`.
    pub mean_link_sizes: Vec<f64>,
    /// Fraction of chains with `C_ζ = ∅`.
    pub penultimate_empty_rate: f64,
    pub draws: DrawAudit,
}

impl ChainStats {
    fn from_builds(chains: &[(SpanningChain, BuildTrace)], params: &ChainParams) -> Self {
        let len = chains.first().map_or(0, |(c, _)| c.len());
        let k = chains.len().max(1) as f64;
        let mut sizes = vec![0.0; len];
        for (c, _) in chains {
            for (i, link) in c.links().iter().enumerate() {
                sizes[i] += link.len() as f64;
            }
        }
        let draws: Vec<u64> = chains.iter().map(|(_, t)| t.draw_count as u64).collect();
        let total: u64 = draws.iter().sum();
        Self {
            chains: chains.len() as u64,
            mean_link_sizes: sizes.into_iter().map(|s| s / k).collect(),
            penultimate_empty_rate: chains
                .iter()
                .filter(|(c, _)| c.link(c.len() - 2).is_empty())
                .count() as f64
                / k,
            draws: DrawAudit {
                total,
                mean: total as f64 / k,
                max: draws.iter().copied().max().unwrap_or(0),
                bound: params.draw_bound() as u64,
            },
        }
    }
}

/// Per-element chain statistics in `chain` mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementLevels {
    pub element_id: usize,
    /// Mean of `max{i : e ∈ C_i}`.
    pub mean_level: f64,
    /// Fraction of chains with `e ∈ C_ζ`.
    pub in_penultimate_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TAlphaCase {
    pub b: ElemSet,
    pub t: ElemSet,
    pub objective: f64,
    pub bullet_one: Inequality,
    /// The `Q` with the least slack in the second bullet.
    pub tightest_bullet_two: Option<Inequality>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub conforming: bool,
    pub x: MarginalVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_params: Option<ChainParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_stats: Option<ChainStats>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub element_levels: Vec<ElementLevels>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selectability: Option<SelectabilityReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub t_alpha: Vec<TAlphaCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditTable>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_VERIFICATION_FAILED
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// The per-element table of the mode that produced the report.
    pub fn to_csv(&self) -> String {
        if let Some(s) = &self.selectability {
            return s.to_csv();
        }
        if let Some(a) = &self.audit {
            let mut out = String::from(
                "rho,builds,draw_count,draw_bound,reference,ratio,within_bound,conforming\n",
            );
            for r in &a.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.rho,
                    r.builds,
                    r.draw_count,
                    r.draw_bound,
                    r.reference,
                    r.ratio,
                    r.within_bound,
                    r.conforming
                ));
            }
            return out;
        }
        if !self.element_levels.is_empty() {
            let mut out = String::from("element_id,mean_level,in_penultimate_rate\n");
            for l in &self.element_levels {
                out.push_str(&format!(
                    "{},{},{}\n",
                    l.element_id, l.mean_level, l.in_penultimate_rate
                ));
            }
            return out;
        }
        let mut out = String::from("check,element_id,measured,bound,tolerance,samples,pass\n");
        for v in &self.verdicts {
            if v.elements.is_empty() {
                out.push_str(&format!(
                    "{},,{},{},{},{},{}\n",
                    v.check, v.measured, v.bound, v.tolerance, v.trials, v.pass
                ));
            }
            for c in &v.elements {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    v.check, c.element_id, c.measured, c.bound, c.tolerance, c.samples, c.pass
                ));
            }
        }
        out
    }

    /// Writes the JSON report to `path` and the CSV table next to it.
    pub fn write(&self, path: &Path) -> Result<(PathBuf, PathBuf)> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let csv = path.with_extension("csv");
        std::fs::write(path, self.to_json()?)?;
        std::fs::write(&csv, self.to_csv())?;
        Ok((path.to_path_buf(), csv))
    }
}

/// Runs one experiment. Everything except the optional wall-clock field is
/// a function of the config (including its seed).
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let m = config
        .matroid
        .build()
        .map_err(|e| OcrsError::Config(e.to_string()))?;
    let x = generate_marginal(&config.marginals, &m, config.marginal_scale())?;
    let mut report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        conforming: config.is_conforming(),
        x: x.clone(),
        chain_params: None,
        chain_stats: None,
        element_levels: Vec::new(),
        selectability: None,
        t_alpha: Vec::new(),
        audit: None,
        verdicts: Vec::new(),
        wall_clock_seconds: None,
    };
    let (seed, trials, eps, lambda, tau) = (
        config.seed,
        config.trials,
        config.eps,
        config.lambda,
        config.tau(),
    );
    let overrides = &config.overrides;
    let rho = m.matroid_rank().max(3);

    match config.mode {
        Mode::Chain => {
            let params = overrides.apply_chain(ChainParams::new(&m, tau, eps)?);
            let chains = build_chains(&m, &x, &params, trials, seed, 0)?;
            let stats = ChainStats::from_builds(&chains, &params);
            report.verdicts.push(
                Verdict::scalar(
                    "draw-bound",
                    Direction::AtMost,
                    stats.draws.max as f64,
                    stats.draws.bound as f64,
                    0.0,
                    seed,
                    trials as u64,
                )
                .with_conforming(params.conforming()),
            );
            report.element_levels = m
                .ground_set()
                .iter()
                .map(|e| {
                    let k = chains.len() as f64;
                    let level: usize = chains.iter().map(|(c, _)| c.level_of(e).unwrap_or(0)).sum();
                    let last = chains
                        .iter()
                        .filter(|(c, _)| c.link(c.len() - 2).contains(e))
                        .count();
                    ElementLevels {
                        element_id: e,
                        mean_level: level as f64 / k,
                        in_penultimate_rate: last as f64 / k,
                    }
                })
                .collect();
            report.chain_stats = Some(stats);
            report.chain_params = Some(params);
        }
        Mode::Ocrs => {
            let params = overrides.apply_chain(ChainParams::new(&m, tau, eps)?);
            let s = selectability_experiment_with(
                &m,
                &x,
                lambda,
                &params,
                trials,
                config.adversary,
                seed,
            )?;
            report.verdicts.push(verify_selectability_floor(&s, eps));
            report.selectability = Some(s);
            report.chain_params = Some(params);
        }
        Mode::VerifyInlink => {
            report.verdicts.push(verify_in_link_loss(
                &m, &x, rho, tau, eps, trials, seed, overrides,
            )?);
        }
        Mode::VerifyProgress => {
            report.verdicts.push(verify_progress(
                &m, &x, lambda, rho, tau, eps, trials, seed, overrides,
            )?);
        }
        Mode::VerifySpanning => {
            report.verdicts.push(verify_spanning(
                &m, &x, lambda, eps, trials, seed, overrides,
            )?);
        }
        Mode::VerifyFreeness => {
            report.verdicts.push(
                verify_freeness_likely(&m, &x, lambda, eps, trials, seed, overrides)?.verdict,
            );
        }
        Mode::VerifyTalpha => {
            let alpha = tau * (1.0 - 2.0 * eps);
            report.t_alpha = t_alpha_cases(&m, &x, alpha, trials, seed)?;
            let violations: usize = report.t_alpha.iter().map(|c| c.violations).sum();
            report.verdicts.push(Verdict::scalar(
                "t-alpha-bullets",
                Direction::AtMost,
                violations as f64,
                0.0,
                0.0,
                seed,
                trials as u64,
            ));
        }
        Mode::Audit => {
            let table = run_audit(config, &m, &x, seed)?;
            report.verdicts.push(table.verdict(seed));
            report.audit = Some(table);
        }
    }

    report.conforming &= report.verdicts.iter().all(|v| v.conforming);
    if config.record_wall_clock {
        report.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    }
    Ok(report)
}

/// `trials` chain builds on stream block `block` of `seed`.
fn build_chains(
    m: &MatroidOracle,
    x: &MarginalVector,
    params: &ChainParams,
    trials: usize,
    seed: u64,
    block: u64,
) -> Result<Vec<(SpanningChain, BuildTrace)>> {
    let sampler = x.sampler();
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            ocrs_chain_with(
                m,
                &sampler,
                params,
                &mut RngStream::new(seed, (block << 32) | t),
            )
        })
        .collect()
}

/// Random `B` per case (each element with probability 1/2), its `T_α(B)`,
/// both bullets, and the second bullet on random `Q ⊆ N ∖ T`.
pub fn t_alpha_cases(
    m: &MatroidOracle,
    x: &MarginalVector,
    alpha: f64,
    cases: usize,
    seed: u64,
) -> Result<Vec<TAlphaCase>> {
    (0..cases as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::new(seed, t);
            let b: ElemSet = m
                .ground_set()
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            let res = brute_force_t_alpha(m, x, &b, alpha)?;
            let one = t_alpha_bullet_one(m, x, &b, &res.t, alpha)?;
            let outside = m.ground_set().difference(&res.t);
            let mut violations = usize::from(!one.holds());
            let mut tightest: Option<Inequality> = None;
            for _ in 0..T_ALPHA_QUERIES {
                let q: ElemSet = outside.iter().filter(|_| rng.gen_bool(0.5)).collect();
                let two = t_alpha_bullet_two(m, x, &res.t, &q, alpha)?;
                violations += usize::from(!two.holds());
                if tightest.is_none_or(|w| two.slack() < w.slack()) {
                    tightest = Some(two);
                }
            }
            Ok(TAlphaCase {
                b,
                t: res.t,
                objective: res.objective,
                bullet_one: one,
                tightest_bullet_two: tightest,
                violations,
            })
        })
        .collect()
}

fn run_audit(
    config: &ExperimentConfig,
    m: &MatroidOracle,
    x: &MarginalVector,
    seed: u64,
) -> Result<AuditTable> {
    let mut inputs = Vec::new();
    let targets: Vec<(MatroidOracle, MarginalVector)> = if config.audit_ranks.is_empty() {
        vec![(m.clone(), x.clone())]
    } else {
        config
            .audit_ranks
            .iter()
            .map(|&rank| {
                let u = MatroidOracle::uniform(rank + 4, rank);
                let xu = generate_marginal(&config.marginals, &u, config.marginal_scale())?;
                Ok((u, xu))
            })
            .collect::<Result<_>>()?
    };
    for (block, (target, xt)) in targets.iter().enumerate() {
        let params =
            config
                .overrides
                .apply_chain(ChainParams::new(target, config.tau(), config.eps)?);
        for (_, trace) in build_chains(target, xt, &params, config.trials, seed, block as u64)? {
            inputs.push(AuditInput { params, trace });
        }
    }
    Ok(sample_complexity_audit(&inputs))
}
