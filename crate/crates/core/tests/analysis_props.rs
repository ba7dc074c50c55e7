mod common;

use ocrs::analysis::{
    brute_force_t_alpha, classify_element, t_alpha_bullet_one, t_alpha_bullet_two,
    verify_in_link_loss_with, Status,
};
use ocrs::chain::{single_ocrs_link, EstimateMode, LinkParams};
use ocrs::{ElemSet, MarginalVector, MatroidOracle, RngStream};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Marginals on a 1/16 grid, halved until they fit `P_M`.
fn dyadic_x<R: Rng>(m: &MatroidOracle, rng: &mut R) -> MarginalVector {
    let mut x: Vec<f64> = (0..m.universe_size())
        .map(|_| rng.gen_range(0..=16) as f64 / 16.0)
        .collect();
    while !ocrs::stochastic::in_scaled_polytope(m, &MarginalVector::new(x.clone()).unwrap(), 1.0)
        .unwrap()
    {
        x.iter_mut().for_each(|v| *v /= 2.0);
    }
    MarginalVector::new(x).unwrap()
}

fn relabelled(edges: &[(usize, usize)], perm: &[usize]) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0); edges.len()];
    for (old, &new) in perm.iter().enumerate() {
        out[new] = edges[old];
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn t_alpha_contains_b_and_meets_both_bullets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_explicit(7, &mut rng);
        let x = dyadic_x(&m, &mut rng);
        let alpha = rng.gen_range(1..8) as f64 / 8.0;
        let b: ElemSet = m.ground_set().iter().filter(|_| rng.gen_bool(0.4)).collect();
        let res = brute_force_t_alpha(&m, &x, &b, alpha).unwrap();
        prop_assert!(b.is_subset(&res.t));
        prop_assert!(t_alpha_bullet_one(&m, &x, &b, &res.t, alpha).unwrap().holds());
        for q in m.ground_set().difference(&res.t).subsets() {
            prop_assert!(t_alpha_bullet_two(&m, &x, &res.t, &q, alpha).unwrap().holds());
        }
    }

    #[test]
    fn classification_partitions_and_ignores_labels(seed in any::<u64>(), tau in 0.05..0.95f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = common::random_graph(5, rng.gen_range(1..=8), &mut rng);
        let n = edges.len();
        let m = MatroidOracle::graphic(5, edges.clone()).unwrap();
        let x = dyadic_x(&m, &mut rng);
        let a: ElemSet = m.ground_set().iter().filter(|_| rng.gen_bool(0.3)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let pm = MatroidOracle::graphic(5, relabelled(&edges, &perm)).unwrap();
        let mut px = vec![0.0; n];
        for (e, &p) in perm.iter().enumerate() {
            px[p] = x.get(e);
        }
        let px = MarginalVector::new(px).unwrap();
        let pa: ElemSet = a.iter().map(|e| perm[e]).collect();
        let mut r = RngStream::new(seed, 0);
        for (e, &p) in perm.iter().enumerate() {
            let v = classify_element(&m, &x, &a, tau, e, EstimateMode::Exact, &mut r).unwrap();
            prop_assert_eq!(v.status == Status::MemberOfA, a.contains(e));
            let w = classify_element(&pm, &px, &pa, tau, p, EstimateMode::Exact, &mut r).unwrap();
            prop_assert_eq!(v.status, w.status);
        }
    }
}

#[test]
fn broken_builders_are_caught_or_reported_vacuous() {
    let m = MatroidOracle::uniform(2, 1);
    let x = MarginalVector::constant(2, 0.5).unwrap();
    let (tau, eps) = (0.4, 0.05);

    // Never adds anything: both elements stay bad (spanned w.p. 0.5 > τ).
    let never =
        verify_in_link_loss_with(&m, &x, 3, tau, eps, 2_000, 9, |_| Ok(ElemSet::new())).unwrap();
    assert!(!never.pass);

    // A threshold at (essentially) 0 swallows every element, so no element
    // is ever good or bad.
    let params = LinkParams::new(3, 1e-9, eps)
        .unwrap()
        .with_q(50)
        .with_eta(4);
    let sampler = x.sampler();
    let zero = verify_in_link_loss_with(&m, &x, 3, tau, eps, 500, 9, |rng| {
        Ok(single_ocrs_link(&m, &sampler, &params, rng)?.0)
    })
    .unwrap();
    assert!(zero.vacuous && zero.elements.iter().all(|c| c.vacuous));

    // The real builder passes on the same instance.
    let params = LinkParams::new(3, (1.0 - eps) * tau, eps)
        .unwrap()
        .with_q(400)
        .with_eta(12);
    let good = verify_in_link_loss_with(&m, &x, 3, tau, eps, 2_000, 9, |rng| {
        Ok(single_ocrs_link(&m, &sampler, &params, rng)?.0)
    })
    .unwrap();
    assert!(good.pass, "{good:?}");
}
