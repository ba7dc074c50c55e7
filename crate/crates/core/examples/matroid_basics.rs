//! Rank, span, minors and axiom validation on the built-in families.

use ocrs::matroid::validate_axioms;
use ocrs::{ElemSet, MatroidOracle, Result};

fn main() -> Result<()> {
    // K4: six edges, rank 3.
    let k4 = MatroidOracle::complete_graph(4);
    let triangle: ElemSet = [0, 1, 3].into_iter().collect();
    println!(
        "K4 ground {:?}, rank {}",
        k4.ground_set(),
        k4.matroid_rank()
    );
    println!(
        "triangle {:?}: rank {}, independent {}",
        triangle,
        k4.rank(&triangle)?,
        k4.is_independent(&triangle)?
    );

    let path: ElemSet = [0, 1].into_iter().collect();
    println!("span of {:?} = {:?}", path, k4.span(&path)?);

    let minor = k4
        .restrict(&ElemSet::full(5))?
        .contract(&ElemSet::singleton(0))?;
    println!(
        "(K4 | first five edges) / {{0}}: ground {:?}, rank {}",
        minor.ground_set(),
        minor.matroid_rank()
    );

    let families = [
        ("U(2,4)", MatroidOracle::uniform(4, 2)),
        (
            "partition",
            MatroidOracle::partition(vec![vec![0, 1, 2], vec![3, 4]], vec![1, 2])?,
        ),
        (
            "laminar",
            MatroidOracle::laminar(5, vec![vec![0, 1], vec![0, 1, 2, 3, 4]], vec![1, 2])?,
        ),
        (
            "explicit",
            MatroidOracle::explicit(
                3,
                &[vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2]],
            )?,
        ),
    ];
    for (name, m) in &families {
        let report = validate_axioms(m)?;
        println!(
            "{name:>9}: rank {}, axioms hold: {}",
            m.matroid_rank(),
            report.passed()
        );
    }

    // Independent sets that break exchange are rejected up front.
    println!(
        "non-matroid family: {:?}",
        MatroidOracle::explicit(3, &[vec![], vec![0], vec![1], vec![2], vec![0, 1]]).err()
    );
    Ok(())
}
