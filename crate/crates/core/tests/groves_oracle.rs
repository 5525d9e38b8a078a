use std::collections::BTreeMap;

use elnet::groves::{
    enumerate_groves, grove_ratio, matrix_entry, rule1_expand, rule1_expand_rotated, upr_polynomial, upr_value,
    Partition, UprOptions,
};
use elnet::netcore::{response_matrix, Edge, Network};
use elnet::scalar::rat;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s(v: &[&str]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// A disk with six boundary vertices around two interior ones.
fn disk(rng: &mut ChaCha8Rng) -> Network {
    let shape = [
        ("1", "x"),
        ("2", "x"),
        ("3", "x"),
        ("3", "y"),
        ("4", "y"),
        ("5", "y"),
        ("6", "x"),
        ("6", "y"),
        ("x", "y"),
        ("1", "2"),
        ("4", "5"),
    ];
    let edges = shape.iter().map(|(u, v)| Edge::new(*u, *v, rat(rng.gen_range(1..=5), rng.gen_range(1..=3)))).collect();
    Network::from_parts(&["1", "2", "3", "4", "5", "6"], &["x", "y"], edges).unwrap()
}

#[test]
fn grove_ratios_match_polynomials_on_disks() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sigmas: [&[&[&str]]; 9] = [
        &[&["1", "3"]],
        &[&["1", "2", "3"]],
        &[&["1", "4"], &["2", "3"]],
        &[&["1", "2"], &["3", "4"], &["5", "6"]],
        &[&["1", "3", "5"]],
        &[&["1", "2", "3"], &["4", "6"]],
        &[&["2", "4"], &["1", "5"]],
        &[&["1", "3", "6"]],
        &[&["1", "2", "3", "4", "5", "6"]],
    ];
    let ground = s(&["1", "2", "3", "4", "5", "6"]);
    for _ in 0..4 {
        let net = disk(&mut rng);
        let l = response_matrix(&net).unwrap();
        let groves = enumerate_groves(&net).unwrap();
        let unc = groves[&Partition::uncrossing(ground.clone())].clone();
        for sig in sigmas {
            let sigma = Partition::new(ground.clone(), sig.iter().map(|p| s(p)).collect()).unwrap();
            let expect = groves.get(&sigma).cloned().unwrap_or_default() / &unc;
            let got = upr_value(&sigma, &matrix_entry(&l), &UprOptions::default()).unwrap();
            assert_eq!(got, expect, "{sigma}");
            let poly = upr_polynomial(&sigma, &UprOptions::default()).unwrap();
            let degree = sigma.support().len() - sigma.num_parts();
            assert!(poly.is_homogeneous(degree), "{sigma}");
            assert_eq!(poly.evaluate(&matrix_entry(&l)).unwrap(), expect);
        }
    }
}

#[test]
fn pair_partitions_only_use_support_entries() {
    let ground = s(&["1", "2", "3", "4", "5", "6"]);
    let sigma = Partition::new(ground, vec![s(&["1", "4"]), s(&["2", "3"])]).unwrap();
    let poly = upr_polynomial(&sigma, &UprOptions::default()).unwrap();
    let support = sigma.support();
    assert!(poly.symbols().iter().all(|(a, b)| support.contains(a) && support.contains(b)));
}

#[test]
fn triangle_ratio_is_its_edge() {
    let net = Network::from_parts(
        &["1", "2", "3"],
        &[],
        vec![Edge::new("1", "2", rat(7, 2)), Edge::new("1", "3", 1), Edge::new("2", "3", 4)],
    )
    .unwrap();
    let sig = Partition::new(s(&["1", "2", "3"]), vec![s(&["1", "2"])]).unwrap();
    assert_eq!(grove_ratio(&net, &sig).unwrap(), rat(7, 2));
    assert_eq!(grove_ratio(&net, &Partition::uncrossing(s(&["1", "2", "3"]))).unwrap(), rat(1, 1));
}

fn random_partition(labels: Vec<usize>, n: usize) -> Partition {
    let ground: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut parts: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, l) in labels.into_iter().enumerate() {
        parts.entry(l).or_default().push((i + 1).to_string());
    }
    Partition::new(ground, parts.into_values().collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rule1_coefficients_do_not_depend_on_the_cut(
        (n, labels, r) in (4usize..=8).prop_flat_map(|n| (Just(n), prop::collection::vec(0usize..3, n), 0..n))
    ) {
        let tau = random_partition(labels, n);
        let a = rule1_expand(&tau).unwrap();
        prop_assert!(a.keys().all(|p| p.is_planar() && p.ground().len() == n));
        let total = |p: &Partition| n - p.support().len() + p.num_parts();
        prop_assert!(a.keys().all(|p| total(p) == total(&tau)));
        prop_assert_eq!(rule1_expand_rotated(&tau, r).unwrap(), a);
    }

    #[test]
    fn pruned_coefficients_match_full_expansion(labels in prop::collection::vec(0usize..3, 6)) {
        // the coefficient of sigma in the expansion of tau, read two ways
        let tau = random_partition(labels, 6);
        let full = rule1_expand(&tau).unwrap();
        for (sigma, c) in &full {
            let ex = elnet::groves::upr_expansion(sigma, &UprOptions::default()).unwrap();
            let found = ex.terms.iter().find(|(parts, _)| {
                Partition::new(tau.ground().to_vec(), parts.clone()).unwrap() == tau
            });
            prop_assert_eq!(found.map(|x| x.1), Some(*c), "sigma {} tau {}", sigma, tau);
        }
    }
}
