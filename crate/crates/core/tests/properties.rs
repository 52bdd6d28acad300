use std::collections::BTreeSet;

use dynvc::hashing::{random_partition, PartitionMode};
use dynvc::mos::greedy_matching;
use dynvc::oracle::{brute_force_min_vc, exact_min_vc, residual_subgraph, verify_cover, verify_cover_with, OracleGraph};
use dynvc::small_opt::{SmallOptDecode, SmallOptSketch};
use dynvc::solve::{solve_full_with, FullSolver, SolveConfig};
use dynvc::stream::{generate_stream, parse_stream, validate_stream, write_stream, FinalGraph, Family, GeneratorSpec, StreamSink};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (0.0..1.0f64).prop_map(|p| Family::Gnp { p }),
        (0usize..6, 0.0..1.0f64).prop_map(|(cover_size, p)| Family::PlantedCover { cover_size, p }),
        (0usize..4).prop_map(|hub| Family::Star { hub }),
        (1usize..6, 1usize..4).prop_map(|(big, small)| Family::CliquePlusCliques { big, small }),
        (0.0..1.0f64).prop_map(|p| Family::Churn { p }),
        Just(Family::PerfectMatching),
    ]
}

fn graph(max_n: usize) -> impl Strategy<Value = FinalGraph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            let pairs: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
            FinalGraph::from_pairs(n, &pairs).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_streams_are_valid_and_deterministic(f in family(), del in 0.0..=0.5f64, n in 6usize..40, seed in any::<u64>()) {
        let spec = GeneratorSpec::new(f).with_deletions(del);
        let a = generate_stream(&spec, n, seed).unwrap();
        prop_assert!(validate_stream(&a, n).is_ok());
        prop_assert_eq!(&a, &generate_stream(&spec, n, seed).unwrap());
    }

    #[test]
    fn stream_files_round_trip(f in family(), n in 6usize..30, seed in any::<u64>()) {
        let ups = generate_stream(&GeneratorSpec::new(f).with_deletions(0.3), n, seed).unwrap();
        let mut buf = Vec::new();
        write_stream(&mut buf, n, &ups).unwrap();
        let parsed = parse_stream(&buf[..]).unwrap();
        prop_assert_eq!(parsed.n, n);
        prop_assert_eq!(parsed.updates, ups);
    }

    #[test]
    fn exact_matches_brute_force(g in graph(12)) {
        let og = OracleGraph::new(&g);
        let (size, cover) = exact_min_vc(&og).unwrap();
        prop_assert_eq!(size, brute_force_min_vc(&og).unwrap().0);
        prop_assert_eq!(cover.len(), size);
        prop_assert!(verify_cover(&g, &cover));
    }

    #[test]
    fn greedy_matching_is_maximal(g in graph(20)) {
        let m = greedy_matching(g.pairs());
        prop_assert!(m.is_matching());
        let used: BTreeSet<usize> = m.vertices().into_iter().collect();
        prop_assert!(g.pairs().all(|(u, v)| used.contains(&u) || used.contains(&v)));
        let (_, residual) = residual_subgraph(&g, &m).unwrap();
        prop_assert_eq!(residual, 0);
    }

    #[test]
    fn residual_count_matches_filtering(g in graph(20), take in 0usize..5) {
        let m = greedy_matching(g.pairs().take(take));
        let (sub, count) = residual_subgraph(&g, &m).unwrap();
        let used: BTreeSet<usize> = m.vertices().into_iter().collect();
        let direct = g.pairs().filter(|(u, v)| !used.contains(u) && !used.contains(v)).count();
        prop_assert_eq!(count, direct);
        prop_assert_eq!(sub.edge_count(), direct);
    }

    #[test]
    fn permutation_partition_covers_every_vertex(n in 8usize..300, alpha in 1usize..8, seed in any::<u64>()) {
        prop_assume!(alpha <= n);
        let p = random_partition(n, alpha, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(p.mode(), PartitionMode::Permutation);
        let sizes = p.group_sizes();
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        prop_assert!(sizes.iter().all(|&s| s >= alpha));
        for (i, g) in p.groups().iter().enumerate() {
            prop_assert!(g.iter().all(|&v| p.group_of(v) == i));
        }
    }

    #[test]
    fn small_opt_exact_is_sound(g in graph(14), k in 2usize..5, seed in any::<u64>()) {
        let mut so = SmallOptSketch::from_seed(g.n, k, seed).unwrap();
        so.apply_all(&g.to_stream());
        if let SmallOptDecode::Exact(cover) = so.decode() {
            prop_assert!(cover.len() < k);
            prop_assert!(verify_cover(&g, &cover));
            prop_assert_eq!(cover.len(), exact_min_vc(&OracleGraph::new(&g)).unwrap().0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_output_is_a_valid_cover(f in family(), n in 16usize..48, seed in any::<u64>()) {
        let ups = generate_stream(&GeneratorSpec::new(f).with_deletions(0.4), n, seed).unwrap();
        let g = validate_stream(&ups, n).unwrap();
        let config = SolveConfig { repetitions: Some(4), ..Default::default() };
        let lazy = solve_full_with(&ups, n, 2, 0.5, seed, config).unwrap();
        prop_assert!(verify_cover_with(&g, |v| lazy.cover.contains(v)));
        let mut full = FullSolver::new(n, 2, 0.5, seed, config).unwrap();
        full.apply_all(&ups);
        prop_assert_eq!(full.finish().unwrap().cover, lazy.cover);
    }
}
