use elnet::cylinder::{make_nm, truncate};
use elnet::groves::enumerate_groves;
use elnet::inverse::{
    estimate_from_response, estimator_partitions, peel_response, solve_nm, EdgeId, EdgeKind, HiddenNm,
    ResponseSource, Schedule,
};
use elnet::rmatrix::NmWeights;
use elnet::scalar::int;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn estimator_agrees_with_grove_enumeration() {
    let w = NmWeights::n1(&[(int(3), int(2)), (int(1), int(5))]);
    let cyl = make_nm(&w).unwrap();
    let t = truncate(&cyl, 2).unwrap();
    let resp = HiddenNm::new(w).unwrap().truncation_response(2).unwrap();
    let groves = enumerate_groves(&t.net).unwrap();
    for kind in [EdgeKind::High, EdgeKind::Low] {
        let edge = EdgeId { kind, i: 1 };
        let (sigma, tau) = estimator_partitions(edge, 1).unwrap();
        let ground = t.net.boundary().to_vec();
        let weight = |p: &elnet::groves::Partition| groves[&p.with_ground(ground.clone()).unwrap()].clone();
        let by_groves = weight(&sigma) / weight(&tau);
        assert_eq!(estimate_from_response(&resp, edge, 1).unwrap(), by_groves, "{kind:?}");
    }
}

#[test]
fn single_layers_are_recovered_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        let w = NmWeights::random(n, 1, &mut rng, 9, 5);
        let sol = solve_nm(&HiddenNm::new(w.clone()).unwrap(), &Schedule::offset(&[1], 1)).unwrap();
        assert_eq!(sol.canonical, w);
        assert_eq!(sol.certified_orbit_size, 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn peeling_the_true_layer_is_exact(seed in 0u64..1000, n in 1usize..=2, radius in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = NmWeights::random(n, 2, &mut rng, 7, 3);
        let y = HiddenNm::new(w.clone()).unwrap().truncation_response(radius).unwrap();
        let rest = NmWeights { n, m: 1, layers: vec![w.layers[1].clone()] };
        let expect = HiddenNm::new(rest).unwrap().truncation_response(radius).unwrap();
        prop_assert_eq!(peel_response(&y, n, 2, &w.layers[0], radius).unwrap(), expect);
    }
}
