use proptest::prelude::*;
use urqt::graph::{
    generate_scale_free, generate_small_world, sample_params, DirectedNetwork, ModelParams,
    RateLevels, COMBOS,
};
use urqt::Matrix;

#[test]
fn scale_free_shape() {
    let (n, m) = (200, 2);
    let g = generate_scale_free(n, m, 11).unwrap();
    assert!(g.is_strongly_connected());
    assert!(g.reaches_all_both_ways());
    // complete seed on m + 1 nodes, then m links per added node, both directions
    let links = m * (m + 1) / 2 + (n - m - 1) * m;
    assert_eq!(g.edge_count(), 2 * links);
    for (i, j) in g.edges() {
        assert!(g.contains(j, i));
    }
    let deg = g.in_degrees();
    assert!(deg.iter().all(|&d| d >= m));
    // heavy tail: the hub is far above the mean degree
    let max = *deg.iter().max().unwrap() as f64;
    let mean = deg.iter().sum::<usize>() as f64 / n as f64;
    assert!(max > 4.0 * mean, "max {max} mean {mean}");
}

#[test]
fn small_world_shortens_paths() {
    let (n, k) = (100, 4);
    let g = generate_small_world(n, k, 0.1, 5).unwrap();
    let ring = DirectedNetwork::ring_lattice(n, k).unwrap();
    assert!(g.is_strongly_connected());
    assert_eq!(g.edge_count(), ring.edge_count());
    assert!(g.mean_shortest_path() < ring.mean_shortest_path());
    let same = generate_small_world(n, k, 0.0, 5).unwrap();
    assert_eq!(same, ring);
}

#[test]
fn generators_are_deterministic() {
    assert_eq!(
        generate_scale_free(60, 3, 9).unwrap(),
        generate_scale_free(60, 3, 9).unwrap()
    );
    assert_eq!(
        generate_small_world(60, 4, 0.3, 9).unwrap(),
        generate_small_world(60, 4, 0.3, 9).unwrap()
    );
    assert_ne!(
        generate_scale_free(60, 3, 9).unwrap(),
        generate_scale_free(60, 3, 10).unwrap()
    );
}

#[test]
fn generator_argument_errors() {
    assert!(generate_scale_free(2, 2, 0).is_err());
    assert!(generate_small_world(10, 3, 0.1, 0).is_err());
    assert!(generate_small_world(10, 4, 1.5, 0).is_err());
}

#[test]
fn edge_list_and_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate_scale_free(30, 2, 1).unwrap();
    let path = dir.path().join("g.edges");
    g.write_edge_list(&path).unwrap();
    assert_eq!(DirectedNetwork::read_edge_list(&path).unwrap(), g);

    let p = sample_params(&g, &g, &RateLevels::default(), 123, 4).unwrap();
    let path = dir.path().join("p.json");
    p.write_json(&path).unwrap();
    assert_eq!(ModelParams::read_json(&path).unwrap(), p);
}

#[test]
fn factorial_covers_every_level_combination() {
    let levels = RateLevels {
        beta_u: [1.0, 2.0, 3.0],
        beta_t: [4.0, 5.0, 6.0],
        gamma_u: [7.0, 8.0, 9.0],
        gamma_r: [10.0, 11.0, 12.0],
        theta: [13.0, 14.0, 15.0],
        delta: [16.0, 17.0, 18.0],
    };
    let mut seen = std::collections::BTreeSet::new();
    for c in 0..COMBOS {
        let s = levels.scales(c).unwrap();
        seen.insert(s.iter().map(|v| *v as u32).collect::<Vec<_>>());
    }
    assert_eq!(seen.len(), COMBOS);
    assert!(levels.scales(COMBOS).is_err());
}

#[test]
fn sampled_rates_follow_levels() {
    let g = generate_small_world(40, 4, 0.1, 2).unwrap();
    let levels = RateLevels::default();
    for combo in [0, 364, 728] {
        let p = sample_params(&g, &g, &levels, combo, 77).unwrap();
        let s = levels.scales(combo).unwrap();
        let within = |m: &Matrix, scale: f64| {
            g.edges()
                .all(|(i, j)| (0.5 * scale..=1.5 * scale).contains(&m[(i, j)]))
        };
        assert!(within(&p.beta_u, s[0]) && within(&p.beta_t, s[1]));
        assert!(within(&p.gamma_u, s[2]) && within(&p.gamma_r, s[3]));
        assert!(p
            .theta
            .iter()
            .all(|v| (0.5 * s[4]..=1.5 * s[4]).contains(v)));
        assert!(p
            .delta
            .iter()
            .all(|v| (0.5 * s[5]..=1.5 * s[5]).contains(v)));
    }
}

#[test]
fn params_reject_bad_inputs() {
    let g = DirectedNetwork::complete(3);
    let good = ModelParams::uniform(g.clone(), g.clone(), [0.1; 4], 1.0, 1.0);
    assert!(good.is_ok());
    assert!(ModelParams::uniform(g.clone(), g.clone(), [0.1; 4], 0.0, 1.0).is_err());
    // a 3-node path is not strongly connected
    let path = DirectedNetwork::new(3, [(0, 1), (1, 2)]).unwrap();
    assert!(ModelParams::uniform(path, g.clone(), [0.1; 4], 1.0, 1.0).is_err());
    // a rate on a non-edge
    let mut p = good.unwrap();
    let ring = DirectedNetwork::symmetric(3, [(0, 1), (1, 2)]).unwrap();
    p.g_r = ring;
    assert!(p.validate().is_err());
    assert!(DirectedNetwork::new(2, [(0, 0)]).is_err());
    assert!(DirectedNetwork::new(2, [(0, 2)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn strong_connectivity_matches_double_bfs(n in 2usize..9, raw in prop::collection::vec((0usize..9, 0usize..9), 0..30)) {
        let edges: Vec<_> = raw.into_iter().map(|(a, b)| (a % n, b % n)).filter(|(a, b)| a != b).collect();
        let g = DirectedNetwork::new(n, edges).unwrap();
        prop_assert_eq!(g.is_strongly_connected(), g.reaches_all_both_ways());
    }

    #[test]
    fn generated_networks_always_strongly_connected(seed in 0u64..1000, n in 5usize..60) {
        prop_assert!(generate_scale_free(n, 2, seed).unwrap().is_strongly_connected());
        prop_assert!(generate_small_world(n, 4, 0.5, seed).unwrap().is_strongly_connected());
    }
}
