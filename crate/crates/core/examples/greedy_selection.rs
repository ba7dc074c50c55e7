//! The chain-based greedy rule under different arrival orders.

use ocrs::chain::SpanningChain;
use ocrs::engine::{
    accepted_when_last, free_of, run_selection, verify_adversary_soundness, worst_case_order,
    AdversaryModel, ArrivalOrder,
};
use ocrs::{ElemSet, MatroidOracle, Result};

fn main() -> Result<()> {
    // Triangle: edges 0, 1, 2 form a cycle.
    let m = MatroidOracle::complete_graph(3);
    let ground = m.ground_set().clone();
    let trivial = SpanningChain::trivial(&ground);
    let actives = ground.clone();

    let picked = run_selection(&m, &trivial, &actives, &ArrivalOrder::ascending(&actives))?;
    println!("ascending order accepts {picked:?}");
    for target in &actives {
        let order = worst_case_order(
            &m,
            &trivial,
            &actives,
            target,
            AdversaryModel::ExhaustiveWorst,
        )?;
        println!(
            "target {target}: worst order {:?}, accepted last {}, free {}",
            order.as_slice(),
            accepted_when_last(&m, &trivial, &actives, target)?,
            free_of(&m, &trivial, &actives, target)?
        );
    }

    // A three-level chain: edge 2 is decided apart from the others.
    let chain = SpanningChain::new(
        &ground,
        vec![ground.clone(), ElemSet::singleton(2), ElemSet::new()],
    )?;
    let picked = run_selection(
        &m,
        &chain,
        &actives,
        &ArrivalOrder::new(vec![2, 0, 1], &actives)?,
    )?;
    println!("levelled chain accepts {picked:?}");

    let summary = verify_adversary_soundness(&m, &chain)?;
    println!(
        "soundness over {} (set, target) pairs: {} accepted",
        summary.pairs, summary.accepted
    );
    Ok(())
}
