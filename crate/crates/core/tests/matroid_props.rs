mod common;

use ocrs::matroid::validate_axioms;
use ocrs::{ElemSet, MatroidOracle};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matroid(seed: u64) -> MatroidOracle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match rng.gen_range(0..5) {
        0 => {
            let n = rng.gen_range(0..=10);
            MatroidOracle::uniform(n, rng.gen_range(0..=n))
        }
        1 => {
            let n = rng.gen_range(1..=10);
            let blocks = rng.gen_range(1..=n);
            let mut parts = vec![Vec::new(); blocks];
            for e in 0..n {
                parts[rng.gen_range(0..blocks)].push(e);
            }
            let caps = parts.iter().map(|p| rng.gen_range(0..=p.len())).collect();
            MatroidOracle::partition(parts, caps).unwrap()
        }
        2 => {
            let v = rng.gen_range(2..=5);
            let edges = (0..rng.gen_range(0..=10))
                .map(|_| (rng.gen_range(0..v), rng.gen_range(0..v)))
                .collect();
            MatroidOracle::graphic(v, edges).unwrap()
        }
        3 => {
            let n = rng.gen_range(2..=10);
            let cut = rng.gen_range(1..n);
            let sets = vec![(0..cut).collect(), (0..n).collect()];
            let inner = rng.gen_range(0..=cut);
            MatroidOracle::laminar(n, sets, vec![inner, rng.gen_range(inner..=n)]).unwrap()
        }
        _ => common::random_explicit(8, &mut rng),
    }
}

fn subset(m: &MatroidOracle, mask: u64) -> ElemSet {
    m.ground_set()
        .iter()
        .filter(|&e| mask >> e & 1 == 1)
        .collect()
}

proptest! {
    #[test]
    fn rank_is_bounded_monotone_and_submodular(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let m = random_matroid(seed);
        let (s, t) = (subset(&m, a), subset(&m, b));
        let r = |x: &ElemSet| m.rank(x).unwrap();
        prop_assert!(r(&s) <= s.len());
        prop_assert!(r(&s.intersection(&t)) <= r(&s));
        prop_assert!(r(&s) <= r(&s.union(&t)));
        prop_assert!(r(&s.union(&t)) + r(&s.intersection(&t)) <= r(&s) + r(&t));
        prop_assert_eq!(r(&ElemSet::new()), 0);
    }

    #[test]
    fn span_is_a_closure(seed in any::<u64>(), a in any::<u64>()) {
        let m = random_matroid(seed);
        let s = subset(&m, a);
        let span = m.span(&s).unwrap();
        prop_assert!(s.is_subset(&span));
        prop_assert_eq!(m.rank(&span).unwrap(), m.rank(&s).unwrap());
        prop_assert_eq!(m.span(&span).unwrap(), span.clone());
        for e in &m.ground_set().difference(&span) {
            prop_assert_eq!(m.rank(&s.with(e)).unwrap(), m.rank(&s).unwrap() + 1);
        }
    }

    #[test]
    fn minors_follow_the_rank_formulas(seed in any::<u64>(), c in any::<u64>(), a in any::<u64>(), s in any::<u64>()) {
        let m = random_matroid(seed);
        let c = subset(&m, c);
        let restricted = m.restrict(&c).unwrap();
        let a = subset(&m, a).intersection(&c);
        let contracted = restricted.contract(&a).unwrap();
        prop_assert_eq!(contracted.ground_set(), &c.difference(&a));
        let s = subset(&m, s).intersection(contracted.ground_set());
        prop_assert_eq!(
            contracted.rank(&s).unwrap(),
            m.rank(&s.union(&a)).unwrap() - m.rank(&a).unwrap()
        );
        if c != *m.ground_set() {
            prop_assert!(restricted.rank(m.ground_set()).is_err());
        }
    }

    #[test]
    fn greedy_bases_are_maximal(seed in any::<u64>(), shift in 0usize..16) {
        let m = random_matroid(seed);
        let ids = m.ground_set().to_vec();
        let k = if ids.is_empty() { 0 } else { shift % ids.len() };
        let basis = m.greedy_basis(ids[k..].iter().chain(&ids[..k]).copied());
        prop_assert!(m.is_independent(&basis).unwrap());
        prop_assert_eq!(basis.len(), m.matroid_rank());
        prop_assert_eq!(&m.span(&basis).unwrap(), m.ground_set());
    }

    #[test]
    fn generated_families_pass_validation(seed in any::<u64>()) {
        let m = random_matroid(seed);
        prop_assume!(m.universe_size() <= 10);
        prop_assert!(validate_axioms(&m).unwrap().passed());
    }
}

#[test]
fn non_matroid_families_are_rejected() {
    // {0,1} and {2} as maximal sets break exchange.
    assert!(MatroidOracle::explicit(3, &[vec![], vec![0], vec![1], vec![2], vec![0, 1]]).is_err());
    // Not downward closed.
    assert!(MatroidOracle::explicit(2, &[vec![], vec![0, 1]]).is_err());
}

#[test]
fn out_of_range_queries_fail() {
    let m = MatroidOracle::uniform(3, 2);
    assert!(m.rank(&common::set(&[5])).is_err());
    assert!(m.span(&common::set(&[3])).is_err());
    assert!(m.contract(&common::set(&[7])).is_err());
}
