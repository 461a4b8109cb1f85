use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use forest_balance::generators::{make_forest, rng_from_seed, ForestKind, ForestSpec};
use forest_balance::interpolate::{claim9_sequence, claim9_violations};
use forest_balance::solver::{solve, SolverConfig};
use forest_balance::{ColouredCompleteGraph, Embedding, Forest, PartialEmbedding};

fn colouring(n: usize, seed: u64) -> ColouredCompleteGraph {
    let mut rng = rng_from_seed(seed);
    let p = rng.gen_range(0.1..0.9);
    ColouredCompleteGraph::from_fn(n, |_, _| rng.gen_bool(p)).unwrap()
}

fn forest(n: usize, kind: u8, seed: u64) -> Forest {
    let kind = [ForestKind::Star, ForestKind::Path, ForestKind::Random, ForestKind::Broom][kind as usize % 4];
    let cap = matches!(kind, ForestKind::Random | ForestKind::Broom).then_some((n / 3).max(2).min(n - 1));
    make_forest(&ForestSpec::new(kind, n, cap, seed)).unwrap()
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng_from_seed(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn colouring_text_round_trip(n in 2usize..40, seed in any::<u64>()) {
        let g = colouring(n, seed);
        prop_assert_eq!(ColouredCompleteGraph::from_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn forest_text_round_trip(n in 3usize..60, kind in 0u8..4, seed in any::<u64>()) {
        let f = forest(n, kind, seed);
        prop_assert_eq!(Forest::from_text(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn embedding_record_round_trip(n in 3usize..30, kind in 0u8..4, seed in any::<u64>()) {
        let (g, f) = (colouring(n, seed), forest(n, kind, seed));
        let e = Embedding::new(&f, &g, permutation(n, seed)).unwrap();
        let json = serde_json::to_string(&e.to_record()).unwrap();
        let back = Embedding::from_record(&f, &g, serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn incremental_sum_tracks_recomputation(n in 3usize..30, kind in 0u8..4, seed in any::<u64>(), swaps in prop::collection::vec((0usize..30, 0usize..30), 1..40)) {
        let (g, f) = (colouring(n, seed), forest(n, kind, seed));
        let mut e = Embedding::new(&f, &g, permutation(n, seed)).unwrap();
        for (u, v) in swaps {
            let (u, v) = (u % n, v % n);
            if u == v {
                continue;
            }
            let predicted = e.sum() + e.swap_delta(&f, &g, u, v);
            e.swap_images(&f, &g, u, v).unwrap();
            prop_assert_eq!(e.sum(), predicted);
            let fresh = Embedding::new(&f, &g, e.map().to_vec()).unwrap();
            prop_assert_eq!(e.sum(), fresh.sum());
            prop_assert!((e.swap_delta(&f, &g, u, v)).unsigned_abs() <= 2 * (f.degree(u) + f.degree(v)) as u64);
        }
    }

    #[test]
    fn solver_respects_parity_and_determinism(n in 9usize..24, kind in 0u8..4, seed in 0u64..1000) {
        let (g, f) = (colouring(n, seed), forest(n, kind, seed));
        let cfg = SolverConfig { max_restarts: 5, ..SolverConfig::with_seed(seed) };
        let r = solve(&f, &g, &cfg).unwrap();
        prop_assert_eq!(r.achieved % 2, (f.edge_count() % 2) as u64);
        prop_assert_eq!(r.achieved, r.embedding.imbalance());
        prop_assert_eq!(r.embedding.sum(), Embedding::new(&f, &g, r.embedding.map().to_vec()).unwrap().sum());
        prop_assert_eq!(solve(&f, &g, &cfg).unwrap(), r);
    }

    #[test]
    fn claim9_holds_on_random_instances(n in 4usize..16, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let hosts = permutation(n, seed);
        let m_size = rng.gen_range(1..n);
        let domain = permutation(n, seed.wrapping_add(1));
        let m = &domain[..m_size];
        let n_size = rng.gen_range(0..m_size);
        let g = PartialEmbedding::from_pairs(n, n, m.iter().copied().zip(hosts.iter().copied())).unwrap();
        let a = hosts[m_size];
        let mut free: Vec<usize> = hosts.iter().copied().filter(|t| !hosts[..n_size].contains(t)).collect();
        free.shuffle(&mut rng);
        let pairs = m[..n_size].iter().map(|&v| (v, g.get(v).unwrap())).chain(m[n_size..].iter().copied().zip(free));
        let f = PartialEmbedding::from_pairs(n, n, pairs).unwrap();
        let seq = claim9_sequence(&f, &g, &m[..n_size], a).unwrap();
        let all: Vec<usize> = (0..n).collect();
        prop_assert!(claim9_violations(&seq, &f, &g, a, &all).is_empty());
    }
}
