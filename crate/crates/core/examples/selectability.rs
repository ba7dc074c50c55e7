//! Monte Carlo selectability of the full scheme against the element-last adversary.

use ocrs::analysis::{selectability_floor, verify_selectability_floor};
use ocrs::chain::SpanningChain;
use ocrs::engine::{exact_chain_selectability, selectability_experiment, AdversaryModel};
use ocrs::{MarginalVector, MatroidOracle, Result};

fn main() -> Result<()> {
    let (lambda, eps) = (0.5, 0.05);
    let m = MatroidOracle::uniform(2, 1);
    let x = MarginalVector::new(vec![0.25, 0.25])?;

    let report =
        selectability_experiment(&m, &x, lambda, eps, 2_000, AdversaryModel::ElementLast, 1)?;
    for t in &report.elements {
        println!(
            "element {}: {}/{} selected, {:.4} in [{:.4}, {:.4}]",
            t.element_id, t.selections, t.activations, t.frequency, t.ci_low, t.ci_high
        );
    }
    println!(
        "C_zeta empty in {} of {} trials",
        report.penultimate_empty, report.trials
    );

    let trivial = SpanningChain::trivial(m.ground_set());
    println!(
        "exact value on the chain (N, empty): {:.4}",
        exact_chain_selectability(&m, &trivial, &x, lambda, 0)?
    );
    println!("floor {:.4}", selectability_floor(lambda, eps));
    let v = verify_selectability_floor(&report, eps);
    println!(
        "{}: measured {:.4} >= {:.4} - {:.4}",
        if v.pass { "PASS" } else { "FAIL" },
        v.measured,
        v.bound,
        v.tolerance
    );
    print!("{}", report.to_csv());
    Ok(())
}
