//! Good/bad classification and the Monte Carlo checks on the chain builder.

use ocrs::analysis::{
    classify_element, verify_freeness_likely, verify_in_link_loss, verify_progress,
    verify_spanning, Verdict,
};
use ocrs::chain::{ChainParams, EstimateMode, Overrides};
use ocrs::stochastic::scale;
use ocrs::{ElemSet, MarginalVector, MatroidOracle, Result, RngStream};

fn show(v: &Verdict) {
    println!(
        "{:<22} {} measured {:.5} bound {:.5} tol {:.5} ({} trials, conforming {})",
        v.check,
        if v.pass { "PASS" } else { "FAIL" },
        v.measured,
        v.bound,
        v.tolerance,
        v.trials,
        v.conforming
    );
}

fn main() -> Result<()> {
    let (lambda, eps) = (0.5, 0.05);
    let tau = lambda + 4.0 * eps;

    let u12 = MatroidOracle::uniform(2, 1);
    let hot = MarginalVector::new(vec![0.6, 0.6])?;
    let mut rng = RngStream::new(0, 0);
    let verdict = classify_element(
        &u12,
        &hot,
        &ElemSet::new(),
        0.5,
        0,
        EstimateMode::Exact,
        &mut rng,
    )?;
    println!(
        "U(1,2), x = 0.6, tau = 0.5: element 0 is {:?} (p = {:?})",
        verdict.status, verdict.probability
    );

    let u24 = MatroidOracle::uniform(4, 2);
    let x = MarginalVector::constant(4, 0.25)?;
    show(&verify_in_link_loss(
        &u24,
        &x,
        3,
        0.54,
        eps,
        2_000,
        1,
        &Overrides::default(),
    )?);

    // Full-size parameters on K4 take minutes; these runs shrink q, eta and
    // zeta tenfold and are marked non-conforming.
    let k4 = MatroidOracle::complete_graph(4);
    let basis = k4.greedy_basis(k4.ground_set().iter());
    let x = scale(
        &MarginalVector::new(
            (0..6)
                .map(|e| f64::from(u8::from(basis.contains(e))))
                .collect(),
        )?,
        lambda,
    )?;
    let small = Overrides::scaled_down(&ChainParams::new(&k4, tau, eps)?, 10);
    show(&verify_progress(
        &k4, &x, lambda, 3, tau, eps, 200, 2, &small,
    )?);
    show(&verify_spanning(&k4, &x, lambda, eps, 200, 3, &small)?);
    show(&verify_freeness_likely(&k4, &x, lambda, eps, 200, 4, &small)?.verdict);
    Ok(())
}
