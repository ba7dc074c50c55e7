use std::collections::BTreeMap;

use serde::Serialize;

use crate::chain::{BuildTrace, ChainParams};

use super::{Direction, Verdict};

/// Largest allowed spread (max / min) of the normalized draw counts.
pub const AUDIT_BAND: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct AuditInput {
    pub params: ChainParams,
    pub trace: BuildTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub rho: usize,
    pub builds: usize,
    /// Mean draw count over the builds at this `ρ`.
    pub draw_count: f64,
    /// `ζ·η·q`.
    pub draw_bound: usize,
    /// `ln ρ · (ln ln ρ)²`.
    pub reference: f64,
    /// `draw_count / reference`.
    pub ratio: f64,
    /// Every build at this `ρ` stayed within `ζ·η·q`.
    pub within_bound: bool,
    pub conforming: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditTable {
    pub rows: Vec<AuditRow>,
    /// `max ratio / min ratio`.
    pub band: f64,
    pub band_limit: f64,
}

impl AuditTable {
    pub fn within_bounds(&self) -> bool {
        self.rows.iter().all(|r| r.within_bound)
    }

    pub fn conforming(&self) -> bool {
        self.rows.iter().all(|r| r.conforming)
    }

    /// Passes when every build is within its bound, every build is
    /// conforming, and the normalized counts stay within the band.
    pub fn verdict(&self, seed: u64) -> Verdict {
        let builds = self.rows.iter().map(|r| r.builds as u64).sum();
        let mut v = Verdict::scalar(
            "sample-audit",
            Direction::AtMost,
            self.band,
            self.band_limit,
            0.0,
            seed,
            builds,
        )
        .with_conforming(self.conforming());
        v.pass &= self.within_bounds() && v.conforming;
        v
    }
}

/// `ln ρ · (ln ln ρ)²`.
pub fn reference_curve(rho: usize) -> f64 {
    let l = (rho as f64).ln();
    l * l.ln().powi(2)
}

/// Groups builds by `ρ` and compares their draw counts with `ζ·η·q` and with
/// the `ln ρ · (ln ln ρ)²` shape.
pub fn sample_complexity_audit(builds: &[AuditInput]) -> AuditTable {
    let mut by_rho: BTreeMap<usize, Vec<&AuditInput>> = BTreeMap::new();
    for b in builds {
        by_rho.entry(b.params.rho).or_default().push(b);
    }
    let rows: Vec<AuditRow> = by_rho
        .into_iter()
        .map(|(rho, group)| {
            let draw_count =
                group.iter().map(|b| b.trace.draw_count as f64).sum::<f64>() / group.len() as f64;
            let reference = reference_curve(rho);
            AuditRow {
                rho,
                builds: group.len(),
                draw_count,
                draw_bound: group
                    .iter()
                    .map(|b| b.params.draw_bound())
                    .max()
                    .unwrap_or(0),
                reference,
                ratio: draw_count / reference,
                within_bound: group
                    .iter()
                    .all(|b| b.trace.draw_count <= b.params.draw_bound()),
                conforming: group.iter().all(|b| b.params.conforming()),
            }
        })
        .collect();
    let max = rows
        .iter()
        .map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let band = if rows.is_empty() { 1.0 } else { max / min };
    AuditTable {
        rows,
        band,
        band_limit: AUDIT_BAND,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{single_ocrs_link, LinkParams};
    use crate::matroid::MatroidOracle;
    use crate::stochastic::{MarginalVector, RngStream};

    #[test]
    fn single_link_with_one_round_draws_q() {
        let m = MatroidOracle::uniform(3, 1);
        let x = MarginalVector::constant(3, 0.2).unwrap();
        let params = LinkParams::new(3, 0.5, 0.05)
            .unwrap()
            .with_eta(1)
            .with_q(77);
        let (_, trace) =
            single_ocrs_link(&m, &x.sampler(), &params, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(trace.h_bar, 1);
        assert_eq!(BuildTrace::from_links(vec![trace]).draw_count, 77);
    }

    #[test]
    fn rows_group_and_flag() {
        let p8 = ChainParams::for_rank(8, 0.7, 0.05).unwrap();
        let p64 = ChainParams::for_rank(64, 0.7, 0.05).unwrap();
        let trace = |draws| BuildTrace {
            links: vec![],
            draw_count: draws,
        };
        let table = sample_complexity_audit(&[
            AuditInput {
                params: p8,
                trace: trace(100),
            },
            AuditInput {
                params: p8,
                trace: trace(300),
            },
            AuditInput {
                params: p64,
                trace: trace(p64.draw_bound() + 1),
            },
        ]);
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].draw_count, 200.0);
        assert!(table.rows[0].within_bound && !table.rows[1].within_bound);
        assert!(!table.verdict(0).pass);
    }

    #[test]
    fn reference_values() {
        let l = 8f64.ln();
        assert!((reference_curve(8) - l * l.ln() * l.ln()).abs() < 1e-12);
    }
}
