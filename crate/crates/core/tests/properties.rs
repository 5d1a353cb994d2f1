//! Randomized invariants across modules.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use localview::capacity::{alpha, outer_bound_recipe, AlphaOptions};
use localview::coded_sets::{
    certify, feasible_gf2, feasible_real, search_best_cs, CodedSchedule, ConstraintMatrix, Field,
};
use localview::det_channel::{receive, verify_certified, DetSignal};
use localview::scheduler::{conflict_graph, fractional_coloring, is_independent_subgraph, optimize_mig};
use localview::topology::{canonical_three_user, classify, diameter, local_view};
use localview::{Execution, Network, Node, Rational};

fn arb_network(max_users: usize) -> impl Strategy<Value = Network> {
    (1..=max_users).prop_flat_map(|k| {
        proptest::collection::vec(any::<bool>(), k * k).prop_map(move |bits| {
            let edges = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| i != j && bits[i * k + j]);
            Network::new(k, edges).unwrap()
        })
    })
}

fn arb_relabeled(max_users: usize) -> impl Strategy<Value = (Network, Vec<usize>)> {
    arb_network(max_users).prop_flat_map(|net| {
        let perm: Vec<usize> = (0..net.users()).collect();
        (Just(net), Just(perm).prop_shuffle())
    })
}

fn arb_gains(net: Network) -> impl Strategy<Value = Network> {
    let k = net.users();
    let cross: Vec<(usize, usize)> = net.cross().iter().copied().collect();
    let m = cross.len();
    (proptest::collection::vec(0u32..6, k), proptest::collection::vec(0u32..6, m))
        .prop_map(move |(d, c)| Network::deterministic(k, d, cross.iter().copied().zip(c)).unwrap())
}

/// Per user, one label per slot: 0 leaves the slot unused, `j` puts it in
/// codeword `j`. Users missing a label are inactive.
fn arb_schedule(users: usize, max_t: usize, max_k: usize) -> impl Strategy<Value = CodedSchedule> {
    (1..=max_t, 1..=max_k).prop_flat_map(move |(t, k)| {
        proptest::collection::vec(proptest::collection::vec(0..=k, t), users).prop_filter_map(
            "no valid schedule",
            move |labels| {
                let assign = labels
                    .iter()
                    .map(|row| {
                        let sets: Vec<BTreeSet<usize>> =
                            (1..=k).map(|j| (0..t).filter(|&l| row[l] == j).collect()).collect();
                        if sets.iter().all(|s| !s.is_empty()) {
                            sets
                        } else {
                            Vec::new()
                        }
                    })
                    .collect();
                CodedSchedule::new(t, k, assign).ok()
            },
        )
    })
}

fn class_names(net: &Network) -> Vec<String> {
    let mut v: Vec<String> = classify(net).iter().map(|c| c.class.to_string()).collect();
    v.sort();
    v
}

fn seq() -> AlphaOptions {
    AlphaOptions { exec: Execution::Sequential, ..AlphaOptions::default() }
}

fn mask_users(mask: u64, k: usize) -> Vec<usize> {
    (0..k).filter(|&u| mask >> u & 1 == 1).collect()
}

/// Brute-force linear decodability with unit gains: every active receiver
/// needs, for each own codeword, a slot subset whose received XOR equals
/// that codeword on every payload.
fn unit_gain_decodable(net: &Network, s: &CodedSchedule) -> bool {
    let k_users = net.users();
    let g = net.with_uniform_gain(1);
    let words: Vec<(usize, usize)> =
        (0..k_users).flat_map(|i| (0..s.assignment(i).len()).map(move |j| (i, j))).collect();
    let payloads: Vec<u64> = (0..1u64 << words.len()).collect();
    // received[p][l][rx]
    let received: Vec<Vec<Vec<u8>>> = payloads
        .iter()
        .map(|&p| {
            (0..s.t())
                .map(|l| {
                    let x: Vec<DetSignal> = (0..k_users)
                        .map(|i| {
                            let bit = words
                                .iter()
                                .position(|&(u, j)| u == i && s.assignment(i)[j].contains(&l))
                                .map_or(0, |w| (p >> w & 1) as u8);
                            DetSignal::new(vec![bit]).unwrap()
                        })
                        .collect();
                    receive(&x, &g).unwrap().iter().map(|y| y.bits[0]).collect()
                })
                .collect()
        })
        .collect();
    words.iter().enumerate().all(|(w, &(i, _))| {
        (0..1u64 << s.t()).any(|c| {
            payloads.iter().zip(&received).all(|(&p, y)| {
                let combo = (0..s.t()).filter(|l| c >> l & 1 == 1).fold(0u8, |a, l| a ^ y[l][i]);
                combo == (p >> w & 1) as u8
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn classification_is_relabeling_invariant((net, perm) in arb_relabeled(7)) {
        let moved = net.relabel(&perm).unwrap();
        prop_assert_eq!(class_names(&net), class_names(&moved));
        prop_assert_eq!(diameter(&net), diameter(&moved));
        if net.users() == 3 {
            prop_assert_eq!(canonical_three_user(&net).unwrap().index, canonical_three_user(&moved).unwrap().index);
        }
    }

    #[test]
    fn alpha_is_relabeling_invariant((net, perm) in arb_relabeled(5), h in 1u32..=2) {
        let moved = net.relabel(&perm).unwrap();
        let a = alpha(&net, h, &seq()).unwrap();
        let b = alpha(&moved, h, &seq()).unwrap();
        prop_assert_eq!((a.lower, a.upper), (b.lower, b.upper));
    }

    #[test]
    fn gains_never_matter(net in arb_network(5).prop_flat_map(arb_gains), h in 1u32..=3) {
        let plain = net.connectivity();
        prop_assert_eq!(class_names(&net), class_names(&plain));
        let a = alpha(&net, h, &seq()).unwrap();
        let b = alpha(&plain, h, &seq()).unwrap();
        prop_assert_eq!((a.lower, a.upper), (b.lower, b.upper));
    }

    #[test]
    fn views_grow_with_h(net in arb_network(6)) {
        let diam = diameter(&net);
        let comps = net.components();
        for i in 0..net.users() {
            // A node never hears about links outside its own component.
            let comp = comps.iter().find(|c| c.contains(&i)).unwrap();
            let all: BTreeSet<_> = net.links().into_iter().filter(|l| comp.contains(&l.tx)).collect();
            for node in [Node::tx(i), Node::rx(i)] {
                let mut prev = BTreeSet::new();
                for h in 0..=diam + 1 {
                    let known = local_view(&net, node, h).unwrap().known_edges;
                    prop_assert!(prev.is_subset(&known));
                    if h >= diam {
                        prop_assert_eq!(&known, &all);
                    }
                    prev = known;
                }
            }
        }
    }

    #[test]
    fn one_hop_independence_is_conflict_independence(net in arb_network(6)) {
        let g = conflict_graph(&net);
        for mask in 1..1u64 << net.users() {
            let ind = is_independent_subgraph(&mask_users(mask, net.users()), &net, 1).unwrap();
            prop_assert_eq!(ind.independent, g.is_independent(mask));
        }
    }

    #[test]
    fn mig_matches_fractional_coloring_and_grows(net in arb_network(6)) {
        let g = conflict_graph(&net);
        let chi = fractional_coloring(&g, 1).chi_f;
        let mut prev = Rational::zero();
        for h in 1..=3 {
            let m = optimize_mig(&net, h, Execution::Sequential).unwrap();
            if h == 1 {
                prop_assert_eq!(m.value.clone(), chi.recip());
            }
            prop_assert!(m.value >= prev);
            prop_assert!(m.schedule.d() >= 1);
            prev = m.value;
        }
    }

    #[test]
    fn alpha_bounds_are_ordered(net in arb_network(6), h in 1u32..=3) {
        let a = alpha(&net, h, &seq()).unwrap();
        prop_assert!(Rational::zero() <= a.lower && a.lower <= a.upper && a.upper <= Rational::one());
        prop_assert_eq!(a.exact, a.lower == a.upper);
    }

    #[test]
    fn receive_is_linear(
        net in arb_network(4).prop_flat_map(arb_gains),
        seed in any::<u64>(),
    ) {
        let q = net.det_levels().unwrap();
        prop_assume!(q > 0);
        let draw = |s: u64| -> Vec<DetSignal> {
            (0..net.users())
                .map(|i| DetSignal::new((0..q).map(|b| ((s >> ((i as u32 * q + b) % 64)) & 1) as u8).collect()).unwrap())
                .collect()
        };
        let x = draw(seed);
        let z = draw(seed.rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15);
        let sum: Vec<DetSignal> = x
            .iter()
            .zip(&z)
            .map(|(a, b)| DetSignal::new(a.bits.iter().zip(&b.bits).map(|(p, r)| p ^ r).collect()).unwrap())
            .collect();
        let ya = receive(&x, &net).unwrap();
        let yb = receive(&z, &net).unwrap();
        let ys = receive(&sum, &net).unwrap();
        prop_assert_eq!(receive(&x, &net).unwrap(), ya.clone());
        for j in 0..net.users() {
            let xor: Vec<u8> = ya[j].bits.iter().zip(&yb[j].bits).map(|(p, r)| p ^ r).collect();
            prop_assert_eq!(&ys[j].bits, &xor);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn certified_schedules_decode(
        (net, s) in arb_network(4).prop_flat_map(|n| { let k = n.users(); (Just(n), arb_schedule(k, 3, 2)) }),
        seed in any::<u64>(),
    ) {
        prop_assume!(certify(&s, &net, Field::Gf2).is_ok());
        let rep = verify_certified(&net, &s, 20, seed, Execution::Sequential).unwrap();
        prop_assert!(rep.all_decoded(), "failed trials {:?}", rep.failed_trials);
    }

    #[test]
    fn unit_gain_decoding_needs_a_certificate(
        (net, s) in arb_network(4).prop_flat_map(|n| { let k = n.users(); (Just(n), arb_schedule(k, 3, 2)) }),
    ) {
        let certified = certify(&s, &net, Field::Gf2).is_ok();
        prop_assert_eq!(unit_gain_decodable(&net, &s), certified);
    }

    #[test]
    fn coded_search_is_bracketed(net in arb_network(4)) {
        let found = search_best_cs(&net, 4, 2, None, Execution::Sequential).unwrap();
        let chi = fractional_coloring(&conflict_graph(&net), 1).chi_f;
        prop_assert!(found.alpha >= chi.recip());
        let (upper, _) = outer_bound_recipe(&net, 1).unwrap();
        prop_assert!(found.alpha <= upper);
        prop_assert_eq!(found.schedule.alpha(), found.alpha);
    }
}

fn matrix(rows: &[&[u8]]) -> ConstraintMatrix {
    ConstraintMatrix {
        rx: 0,
        k: 1,
        t: rows[0].len(),
        blocks: (0..rows.len()).collect(),
        rows: rows.iter().map(|r| r.to_vec()).collect(),
    }
}

#[test]
fn gf2_feasible_but_not_real() {
    // The three interferer rows force every real coefficient to zero, while
    // over GF(2) the all-ones combination cancels them.
    let f = matrix(&[&[1, 1, 1], &[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
    assert!(feasible_gf2(&f, 1).is_some());
    assert!(feasible_real(&f, 1).is_none());
}

#[test]
fn real_feasible_but_not_gf2() {
    // Halves solve it over the reals; GF(2) has no 1/2.
    let f = matrix(&[&[1, 0, 1], &[1, 1, 0], &[0, 1, 1]]);
    assert!(feasible_gf2(&f, 1).is_none());
    let c = feasible_real(&f, 1).unwrap();
    assert_eq!(c.coeffs[0], vec![Rational::new(1, 2), Rational::new(-1, 2), Rational::new(1, 2)]);
}

#[test]
fn random_graph_helper_is_reproducible() {
    let a = common::random_networks(3, 20, 6);
    let b = common::random_networks(3, 20, 6);
    assert_eq!(a, b);
}
