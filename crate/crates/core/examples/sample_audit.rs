//! Draw counts of chain builds against `ζ·η·q` and the `ln ρ (ln ln ρ)²` shape.

use ocrs::analysis::{sample_complexity_audit, AuditInput};
use ocrs::chain::{ocrs_chain_with, ChainParams};
use ocrs::{MarginalVector, MatroidOracle, Result, RngStream};

fn main() -> Result<()> {
    let (lambda, eps) = (0.5, 0.05);
    let mut inputs = Vec::new();
    for rank in [4, 8, 16] {
        let m = MatroidOracle::uniform(rank + 4, rank);
        let x = MarginalVector::constant(rank + 4, lambda * rank as f64 / (rank + 4) as f64)?;
        let params = ChainParams::new(&m, lambda + 4.0 * eps, eps)?;
        for t in 0..3 {
            let (_, trace) = ocrs_chain_with(
                &m,
                &x.sampler(),
                &params,
                &mut RngStream::new(rank as u64, t),
            )?;
            inputs.push(AuditInput { params, trace });
        }
    }
    let table = sample_complexity_audit(&inputs);
    println!(
        "{:>4} {:>14} {:>14} {:>10} {:>12}",
        "rho", "draws", "bound", "ref", "ratio"
    );
    for r in &table.rows {
        println!(
            "{:>4} {:>14.0} {:>14} {:>10.4} {:>12.4e}",
            r.rho, r.draw_count, r.draw_bound, r.reference, r.ratio
        );
    }
    println!("spread {:.3} (limit {})", table.band, table.band_limit);
    Ok(())
}
