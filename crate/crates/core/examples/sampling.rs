//! Product distributions: seeded draws, exact enumeration and the polytope check.

use ocrs::stochastic::{exact_event_probability, filter_actives, in_scaled_polytope, SampleBatch};
use ocrs::{ActiveSampler, MarginalVector, MatroidOracle, Result, RngStream};

fn main() -> Result<()> {
    let m = MatroidOracle::uniform(4, 2);
    let x = MarginalVector::new(vec![0.5, 0.25, 0.25, 0.5])?;
    println!(
        "x in P_M: {}, x in 0.6 P_M: {}",
        in_scaled_polytope(&m, &x, 1.0)?,
        in_scaled_polytope(&m, &x, 0.6)?
    );

    // The same (seed, stream) pair always replays the same draws.
    let sampler = x.sampler();
    let mut rng = RngStream::new(42, 0);
    for _ in 0..3 {
        println!("draw {:?}", sampler.draw(&mut rng));
    }

    let full = |r: &ocrs::ActiveSet| r.len() > m.matroid_rank();
    let exact = exact_event_probability(&x, full)?;
    let batch = SampleBatch::draw(&sampler, 100_000, &mut RngStream::new(42, 1));
    let hits = batch.samples.iter().filter(|r| full(r)).count();
    println!(
        "Pr[|R| > rank]: exact {exact:.5}, sampled {:.5}",
        hits as f64 / batch.samples.len() as f64
    );

    let r = sampler.draw(&mut rng);
    println!(
        "{:?} thinned at 0.5 -> {:?}",
        r,
        filter_actives(&r, 0.5, &mut rng)?
    );
    Ok(())
}
