#![allow(dead_code)]

use ocrs::{ElemSet, MatroidOracle};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random simple graph on `vertices` with `edges` distinct edges.
pub fn random_graph<R: Rng>(vertices: usize, edges: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut all: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|a| (a + 1..vertices).map(move |b| (a, b)))
        .collect();
    all.shuffle(rng);
    all.truncate(edges);
    all
}

/// Every independent set of `m`, listed explicitly.
pub fn independent_family(m: &MatroidOracle, max_size: usize) -> Vec<Vec<usize>> {
    m.ground_set()
        .subsets()
        .filter(|s| s.len() <= max_size && m.is_independent(s).unwrap())
        .map(|s| s.to_vec())
        .collect()
}

/// A random graphic matroid on at most `max_n` edges, truncated to a random
/// rank and rebuilt as an explicit family.
pub fn random_explicit<R: Rng>(max_n: usize, rng: &mut R) -> MatroidOracle {
    let vertices = rng.gen_range(3..=5);
    let n = rng.gen_range(1..=max_n.min(vertices * (vertices - 1) / 2));
    let g = MatroidOracle::graphic(vertices, random_graph(vertices, n, rng)).unwrap();
    let k = rng.gen_range(0..=g.matroid_rank());
    MatroidOracle::explicit(n, &independent_family(&g, k)).unwrap()
}

/// Small matroids from every family, each with at most 8 elements.
pub fn corpus() -> Vec<(String, MatroidOracle)> {
    let mut out = Vec::new();
    for n in 0..=8 {
        for k in 0..=n {
            out.push((format!("U({k},{n})"), MatroidOracle::uniform(n, k)));
        }
    }
    out.push((
        "partition 3+3+2".into(),
        MatroidOracle::partition(
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7]],
            vec![1, 2, 1],
        )
        .unwrap(),
    ));
    out.push((
        "partition 4+4".into(),
        MatroidOracle::partition(vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]], vec![0, 3]).unwrap(),
    ));
    out.push(("K3".into(), MatroidOracle::complete_graph(3)));
    out.push(("K4".into(), MatroidOracle::complete_graph(4)));
    out.push((
        "C4 plus chord".into(),
        MatroidOracle::graphic(4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap(),
    ));
    out.push((
        "parallel and loop".into(),
        MatroidOracle::graphic(3, vec![(0, 1), (0, 1), (1, 1), (1, 2)]).unwrap(),
    ));
    out.push((
        "laminar chain".into(),
        MatroidOracle::laminar(
            8,
            vec![vec![0, 1], vec![0, 1, 2, 3], (0..8).collect()],
            vec![1, 2, 3],
        )
        .unwrap(),
    ));
    out.push((
        "laminar siblings".into(),
        MatroidOracle::laminar(
            7,
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![6]],
            vec![2, 1, 0],
        )
        .unwrap(),
    ));
    out
}

pub fn set(ids: &[usize]) -> ElemSet {
    ids.iter().copied().collect()
}
