use netwit::experiments::random_connected_graph;
use netwit::graph::{compare_topologies, cut_size_histogram, TopologyOrder};
use netwit::oracle::{build_operator, ipen_state, isotropic_edge, product_state};
use netwit::witness::{
    bg_expectation_from_histogram, bg_ssw, critical_visibility_bg,
    critical_visibility_bg_from_histogram, critical_visibility_tree,
    critical_visibility_triangle, e_ssw, e_ssw_expectation_ipen, fidelity_threshold_from_min_cut,
    fidelity_witness, fidelity_witness_threshold, gamma_of, tree_gme_condition, tree_negativity,
    triangle_expectation_ipen, triangle_gamma0, triangle_ssw, visibility_of_fidelity,
    visibility_of_gamma, IsotropicParams, NetworkState,
};
use netwit::{Caps, Network};
use proptest::prelude::*;

fn dense_expectation(w: &netwit::witness::Witness, visibilities: &[f64]) -> f64 {
    let caps = Caps::default();
    let d = w.local_dim();
    let rho = product_state(
        d,
        &visibilities.iter().map(|&p| isotropic_edge(d, p)).collect::<Vec<_>>(),
        &caps,
    )
    .unwrap();
    let op = build_operator(w, &caps).unwrap();
    (&op.matrix * &rho.matrix).trace().re
}

#[test]
fn tree_threshold_examples() {
    assert!((critical_visibility_tree(2, 1) - 1.0 / 3.0).abs() < 1e-10);
    assert!((critical_visibility_tree(2, 2) - 3f64.powf(-0.5)).abs() < 1e-10);
}

#[test]
fn triangle_threshold_from_gamma() {
    for d in 2..6 {
        let df = f64::from(d);
        let gamma0 = ((3.0 * (4.0 * df * df - 1.0)).sqrt() - 3.0) / (6.0 * (df * df - 1.0));
        assert!((triangle_gamma0(d) - gamma0).abs() < 1e-14);
        let p0 = critical_visibility_triangle(d);
        assert!(triangle_expectation_ipen(d, p0).abs() < 1e-10);
        assert!(triangle_expectation_ipen(d, (p0 + 1.0) / 2.0) < 0.0);
        assert!(triangle_expectation_ipen(d, p0 / 2.0) > 0.0);
    }
    // Qubit triangle: γ₀ = (√45 - 3)/18.
    let p = visibility_of_gamma(2, (45f64.sqrt() - 3.0) / 18.0);
    assert!((critical_visibility_triangle(2) - p).abs() < 1e-12);
}

#[test]
fn triangle_witness_beats_bg_on_triangle() {
    let caps = Caps::default();
    let tri = Network::ring(3);
    let bg = critical_visibility_bg(&tri, 2, &caps).unwrap();
    let w_delta = critical_visibility_triangle(2);
    assert!(w_delta < bg);
    // B(G) on the triangle: 3 [γ(d+1)]² = 1.
    let expected = visibility_of_gamma(2, 1.0 / (3.0 * 3f64.sqrt()));
    assert!((bg - expected).abs() < 1e-9);
}

#[test]
fn dense_traces_match_closed_forms() {
    let caps = Caps::default();
    for d in [2, 3] {
        let max_edges = if d == 2 { 4 } else { 2 };
        for edges in 1..=max_edges {
            let w = e_ssw(edges, d, &caps).unwrap();
            for &p in &[0.2, 0.5, 0.8, 1.0] {
                let dense = dense_expectation(&w, &vec![p; edges]);
                assert!((dense - e_ssw_expectation_ipen(d, p, edges)).abs() < 1e-10);
            }
        }
    }
    let tri = triangle_ssw(2).unwrap();
    for &p in &[0.3, 0.6, 0.9] {
        assert!((dense_expectation(&tri, &[p; 3]) - triangle_expectation_ipen(2, p)).abs() < 1e-10);
    }
}

#[test]
fn bg_expectation_matches_dense_trace() {
    let caps = Caps::default();
    for net in [Network::ring(3), Network::ring(4), Network::path(3), Network::star(3)] {
        let w = bg_ssw(&net, 2, &caps).unwrap();
        let hist = cut_size_histogram(&net, &caps).unwrap();
        for &p in &[0.3, 0.55, 0.9] {
            let dense = dense_expectation(&w, &vec![p; net.edge_count()]);
            assert!((dense - bg_expectation_from_histogram(&hist, 2, p)).abs() < 1e-10);
        }
    }
}

#[test]
fn fidelity_witness_matches_dense_trace() {
    let caps = Caps::default();
    let net = Network::ring(3);
    let w = fidelity_witness(&net, 2, &caps).unwrap();
    let p0 = fidelity_witness_threshold(&net, 2, &caps).unwrap();
    assert!(dense_expectation(&w, &[p0; 3]).abs() < 1e-10);
    assert!((p0 - visibility_of_fidelity(2, 0.25f64.powf(1.0 / 3.0))).abs() < 1e-12);
}

#[test]
fn trees_fidelity_and_bg_agree_and_dominate_e_ssw() {
    let caps = Caps::default();
    for edges in 1..=8 {
        let tree = Network::path(edges);
        let bg = critical_visibility_bg(&tree, 2, &caps).unwrap();
        let fid = fidelity_witness_threshold(&tree, 2, &caps).unwrap();
        let exact = critical_visibility_tree(2, edges);
        assert!((bg - fid).abs() < 1e-9, "N = {edges}: {bg} vs {fid}");
        assert!(bg >= exact - 1e-9);
        if edges == 1 {
            assert!((fid - exact).abs() < 1e-9);
        } else {
            assert!(fid > exact);
        }
    }
}

#[test]
fn complete_graph_limits() {
    let caps = Caps::default();
    let mut prev = 1.0;
    for n in 4..=12 {
        let p = critical_visibility_bg(&Network::complete(n), 2, &caps).unwrap();
        assert!(p < prev && p > 1.0 / 3.0);
        prev = p;
    }
    // Min cut n-1 with n(n-1)/2 edges: F = 2^{-2/n}.
    for n in 4..=12 {
        let edges = n * (n - 1) / 2;
        let p = fidelity_threshold_from_min_cut(2, edges, n - 1);
        let f = 2f64.powf(-2.0 / n as f64);
        assert!((p - (4.0 * f - 1.0) / 3.0).abs() < 1e-12);
    }
}

#[test]
fn circulant_above_half_degree_survives() {
    let caps = Caps::default();
    // Degree fraction exactly 2/3: n = 3m + 1, reach m.
    let series: Vec<f64> = (2..=6)
        .map(|m| {
            let net = Network::circulant(3 * m + 1, m).unwrap();
            critical_visibility_bg(&net, 2, &caps).unwrap()
        })
        .collect();
    assert!(series.windows(2).all(|w| w[1] < w[0]), "{series:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_is_an_involution(d in 2u32..8, p in 0.0f64..=1.0) {
        let g = gamma_of(d, p);
        prop_assert!((gamma_of(d, g) - p).abs() < 1e-12);
        prop_assert!((visibility_of_gamma(d, g) - p).abs() < 1e-12);
        let params = IsotropicParams::new(d, p).unwrap();
        let df = f64::from(d);
        prop_assert!((params.fidelity() - (p + (1.0 - p) / (df * df))).abs() < 1e-14);
        prop_assert!((visibility_of_fidelity(d, params.fidelity()) - p).abs() < 1e-12);
    }

    #[test]
    fn tree_condition_matches_threshold(d in 2u32..6, edges in 1usize..12, p in 0.0f64..=1.0) {
        let p0 = critical_visibility_tree(d, edges);
        prop_assume!((p - p0).abs() > 1e-9);
        let df = f64::from(d);
        let nu = (df - 1.0) * (1.0 - p) / (df - (df - 1.0) * (1.0 - p));
        let oracle = (1.0 - nu / df).powi(edges as i32) > (df + 1.0) / (2.0 * df);
        prop_assert_eq!(tree_gme_condition(d, p, edges), oracle);
        prop_assert_eq!(oracle, p > p0);
        prop_assert_eq!(tree_negativity(d, p, edges) > 0.0, p > p0);
        prop_assert!(tree_negativity(d, p, edges) >= 0.0);
    }

    #[test]
    fn expectation_matches_product_formula(d in 2u32..5, ps in proptest::collection::vec(0.0f64..=1.0, 1..7)) {
        let caps = Caps::default();
        let edges = ps.len();
        let w = e_ssw(edges, d, &caps).unwrap();
        let state = NetworkState::from_visibilities(d, &ps).unwrap();
        let df = f64::from(d);
        let fids: Vec<f64> = ps.iter().map(|&p| p + (1.0 - p) / (df * df)).collect();
        let a: f64 = fids.iter().product();
        let b: f64 = fids.iter().map(|&f| (1.0 + df * f) / (df + 1.0)).product();
        let oracle = -df * a + (df + 1.0) / 2.0 * b;
        prop_assert!((w.expectation(&state).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn adding_edges_never_raises_bg_threshold(seed in any::<u64>(), n in 4usize..9) {
        let caps = Caps::default();
        let total = n * (n - 1) / 2;
        let edges = n - 1 + (seed as usize % (total - n + 1));
        let net = random_connected_graph(n, edges, seed).unwrap();
        let hist = cut_size_histogram(&net, &caps).unwrap();
        let before = critical_visibility_bg_from_histogram(&hist, 2);
        let missing = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .find(|p| !net.edges().contains(p));
        if let Some(extra) = missing {
            let mut pairs = net.edges().to_vec();
            pairs.push(extra);
            let bigger = Network::from_pairs(n, &pairs).unwrap();
            let after = critical_visibility_bg(&bigger, 2, &caps).unwrap();
            prop_assert!(after <= before + 1e-12);
        }
        let tree = Network::path(edges);
        if edges <= 20 && compare_topologies(&net, &tree).unwrap() == TopologyOrder::FirstPrecedes {
            prop_assert!(before <= critical_visibility_bg(&tree, 2, &caps).unwrap() + 1e-12);
        }
    }

    #[test]
    fn bg_histogram_equals_witness_expectation(seed in any::<u64>(), n in 3usize..7, p in 0.0f64..=1.0) {
        let caps = Caps::default();
        let total = n * (n - 1) / 2;
        let edges = n - 1 + (seed as usize % (total - n + 2)).min(total - n + 1);
        let net = random_connected_graph(n, edges, seed).unwrap();
        let w = bg_ssw(&net, 2, &caps).unwrap();
        let state = NetworkState::isotropic(2, edges, p).unwrap();
        let hist = cut_size_histogram(&net, &caps).unwrap();
        prop_assert!((w.expectation(&state).unwrap() - bg_expectation_from_histogram(&hist, 2, p)).abs() < 1e-10);
    }
}

#[test]
fn ipen_state_is_normalized() {
    let caps = Caps::default();
    let rho = ipen_state(3, 2, 0.4, &caps).unwrap();
    assert!((rho.matrix.trace().re - 1.0).abs() < 1e-12);
}
