use std::collections::HashSet;

use netwit::graph::{
    cactus_decomposition, compare_topologies, cut_size_histogram, cut_space, cycle_basis,
    min_cut_size, TopologyOrder,
};
use netwit::{Caps, EdgeSubset, Error, Network};
use proptest::prelude::*;

/// Random connected graph: a random recursive tree plus extra pairs.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Network> {
    (2..=max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<u32>(), n - 1),
                proptest::collection::vec((0..n, 0..n), 0..(n * 2)),
            )
        })
        .prop_map(|(n, parents, extra)| {
            let mut pairs: Vec<(usize, usize)> = (1..n)
                .map(|v| ((parents[v - 1] as usize) % v, v))
                .collect();
            for (a, b) in extra {
                let (u, v) = (a.min(b), a.max(b));
                if u != v && !pairs.contains(&(u, v)) {
                    pairs.push((u, v));
                }
            }
            Network::from_pairs(n, &pairs).unwrap()
        })
}

/// Random cactus: each new block is a pendant edge or a cycle hung on an
/// existing vertex.
fn cactus_graph() -> impl Strategy<Value = (Network, usize)> {
    proptest::collection::vec((any::<u32>(), 0usize..5), 1..5).prop_map(|blocks| {
        let mut n = 1;
        let mut pairs = Vec::new();
        let mut cycles = 0;
        for (anchor, len) in blocks {
            let root = anchor as usize % n;
            if len < 2 {
                pairs.push((root, n));
                n += 1;
            } else {
                let mut prev = root;
                for _ in 0..len {
                    pairs.push((prev, n));
                    prev = n;
                    n += 1;
                }
                pairs.push((root, prev));
                cycles += 1;
            }
        }
        (Network::from_pairs(n, &pairs).unwrap(), cycles)
    })
}

fn brute_force_cuts(net: &Network) -> Vec<EdgeSubset> {
    let n = net.vertex_count();
    (0..1u64 << (n - 1)).map(|s| net.cut_of(s << 1)).collect()
}

fn is_bridge(net: &Network, e: usize) -> bool {
    let pairs: Vec<_> = net
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e)
        .map(|(_, &p)| p)
        .collect();
    matches!(
        Network::from_pairs(net.vertex_count(), &pairs),
        Err(Error::NotConnected)
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_space_matches_enumeration(net in connected_graph(8)) {
        let caps = Caps::default();
        let space = cut_space(&net, &caps, true).unwrap();
        let n = net.vertex_count();
        prop_assert_eq!(space.dimension(), n - 1);
        let brute: HashSet<EdgeSubset> = brute_force_cuts(&net).into_iter().collect();
        prop_assert_eq!(brute.len(), 1usize << (n - 1));
        let ours: HashSet<EdgeSubset> = space.all_cuts.clone().unwrap().into_iter().collect();
        prop_assert_eq!(&ours, &brute);
        prop_assert_eq!(space.nonempty_count(), (1u64 << (n - 1)) - 1);
    }

    #[test]
    fn cuts_closed_under_xor(net in connected_graph(7)) {
        let cuts: HashSet<EdgeSubset> = brute_force_cuts(&net).into_iter().collect();
        let space = cut_space(&net, &Caps::default(), true).unwrap();
        let all = space.all_cuts.unwrap();
        for a in all.iter().take(16) {
            for b in &all {
                prop_assert!(cuts.contains(&(a ^ b)));
            }
        }
    }

    #[test]
    fn cuts_orthogonal_to_cycles(net in connected_graph(8)) {
        let basis = cycle_basis(&net);
        prop_assert_eq!(basis.len(), net.cyclomatic_number());
        for cycle in &basis {
            for v in 0..net.vertex_count() {
                prop_assert_eq!((cycle & &net.incident(v)).count() % 2, 0);
            }
        }
        for cut in brute_force_cuts(&net) {
            for cycle in &basis {
                prop_assert_eq!(cut.intersection_count(cycle) % 2, 0);
            }
        }
    }

    #[test]
    fn histogram_matches_brute_force(net in connected_graph(9)) {
        let caps = Caps::default();
        let mut brute = vec![0u64; net.edge_count() + 1];
        for cut in brute_force_cuts(&net).iter().filter(|c| !c.is_empty()) {
            brute[cut.count()] += 1;
        }
        prop_assert_eq!(cut_size_histogram(&net, &caps).unwrap(), brute.clone());
        let min = brute.iter().position(|&c| c > 0).unwrap();
        prop_assert_eq!(min_cut_size(&net, &caps).unwrap(), min);
        let min_degree = (0..net.vertex_count()).map(|v| net.degree(v)).min().unwrap();
        prop_assert!(min <= min_degree);
    }

    #[test]
    fn cycles_precede_trees(net in connected_graph(7)) {
        let edges = net.edge_count();
        let tree = Network::path(edges);
        let order = compare_topologies(&net, &tree).unwrap();
        if net.is_tree() {
            prop_assert_eq!(order, TopologyOrder::Equivalent);
        } else {
            prop_assert_eq!(order, TopologyOrder::FirstPrecedes);
            prop_assert_eq!(compare_topologies(&tree, &net).unwrap(), TopologyOrder::SecondPrecedes);
        }
        prop_assert_eq!(compare_topologies(&net, &net).unwrap(), TopologyOrder::Equivalent);
    }

    #[test]
    fn cactus_classes_are_cycles_and_bridges((net, cycles) in cactus_graph()) {
        let dec = cactus_decomposition(&net).unwrap();
        prop_assert_eq!(dec.cyclomatic_number, cycles);
        prop_assert_eq!(dec.cycle_classes.len(), cycles);
        for e in 0..net.edge_count() {
            prop_assert_eq!(dec.acyclic_class.contains(e), is_bridge(&net, e));
        }
        for class in &dec.cycle_classes {
            let mut degree = vec![0; net.vertex_count()];
            for e in class.indices() {
                let (u, v) = net.edge(e);
                degree[u] += 1;
                degree[v] += 1;
            }
            prop_assert!(degree.iter().all(|&k| k == 0 || k == 2));
            let vertices = degree.iter().filter(|&&k| k == 2).count();
            prop_assert_eq!(vertices, class.count());
        }
        let total: usize = dec.class_sizes().iter().sum();
        prop_assert_eq!(total, net.edge_count());
    }
}

#[test]
fn complete_graph_is_not_a_cactus() {
    assert!(matches!(
        cactus_decomposition(&Network::complete(4)),
        Err(Error::NotCactus(_))
    ));
}

#[test]
fn enumeration_cap_applies() {
    let caps = Caps {
        enumeration_bits: 4,
        ..Caps::default()
    };
    assert!(matches!(
        cut_size_histogram(&Network::path(6), &caps),
        Err(Error::CapExceeded { .. })
    ));
    assert!(cut_size_histogram(&Network::path(4), &caps).is_ok());
}

#[test]
fn worked_examples() {
    let caps = Caps::default();
    let tri = Network::ring(3);
    assert_eq!(cut_size_histogram(&tri, &caps).unwrap(), vec![0, 0, 3, 0]);
    assert_eq!(tri.cyclomatic_number(), 1);
    let path3 = Network::path(3);
    let star3 = Network::star(3);
    assert_eq!(
        compare_topologies(&path3, &star3).unwrap(),
        TopologyOrder::Equivalent
    );
    assert_eq!(
        compare_topologies(&Network::ring(4), &Network::star(4)).unwrap(),
        TopologyOrder::FirstPrecedes
    );
}
