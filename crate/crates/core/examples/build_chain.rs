//! Building a spanning chain from samples of `D(x)` and inspecting it.

use ocrs::chain::{
    chain_freeness, minimal_spanning_chain, ocrs_chain, single_ocrs_link, ChainParams,
    EstimateMode, TruncationDistribution,
};
use ocrs::stochastic::scale;
use ocrs::{MarginalVector, MatroidOracle, Result, RngStream};

fn main() -> Result<()> {
    let (lambda, eps) = (0.5, 0.05);
    let tau = lambda + 4.0 * eps;
    let m = MatroidOracle::complete_graph(4);
    let basis = m.greedy_basis(m.ground_set().iter());
    let x = scale(
        &MarginalVector::new(
            (0..6)
                .map(|e| f64::from(u8::from(basis.contains(e))))
                .collect(),
        )?,
        lambda,
    )?;

    let params = ChainParams::new(&m, tau, eps)?;
    println!(
        "rho {} zeta {} eta {} q {} (draw bound {})",
        params.rho,
        params.zeta,
        params.link.eta,
        params.link.q,
        params.draw_bound()
    );
    let h = TruncationDistribution::new(eps, params.rho)?;
    println!("Pr[h = 1] = {:.3e}, E[h] = {:.2}", h.pmf[0], h.mean());

    let mut rng = RngStream::new(7, 0);
    let (link, trace) = single_ocrs_link(&m, &x.sampler(), &params.link, &mut rng)?;
    println!(
        "one link: {:?} after {} rounds and {} draws",
        link, trace.h_bar, trace.samples_drawn
    );

    let (chain, trace) = ocrs_chain(&m, &x.sampler(), tau, eps, &mut rng)?;
    let sizes: Vec<usize> = chain.links().iter().map(|c| c.len()).collect();
    println!("chain link sizes {sizes:?}, {} draws", trace.draw_count);
    for e in m.ground_set() {
        let f = chain_freeness(&m, &x, &chain, e, EstimateMode::Exact, &mut rng)?;
        println!("  edge {e}: level {:?}, freeness {f:.4}", chain.level_of(e));
    }

    // The exact counterpart on the same instance.
    println!(
        "minimal chain {:?}",
        minimal_spanning_chain(&m, &x, tau)?.links()
    );
    Ok(())
}
