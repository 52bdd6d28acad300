use dynvc::codec::Encode;
use dynvc::mos::MatchOrSparsify;
use dynvc::ne_sampler::{NeighborhoodEdgeSampler, NesDecode};
use dynvc::sketch::{L0Decode, L0Sketch, SparseDecode, SparseRecoverySketch};
use dynvc::small_opt::SmallOptSketch;
use dynvc::stream::{encode_edge, StreamSink, StreamUpdate};
use dynvc::tester::NeighborhoodTester;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 12;

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0..N, 0..N, prop_oneof![Just(1i64), Just(-1i64)]), 0..40)
        .prop_map(|v| v.into_iter().filter(|(a, b, _)| a != b).collect())
}

fn split() -> impl Strategy<Value = (Vec<(usize, usize, i64)>, usize)> {
    ops().prop_flat_map(|v| {
        let len = v.len();
        (Just(v), 0..=len)
    })
}

fn id(a: usize, b: usize) -> u64 {
    encode_edge(a, b, N).unwrap().index()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l0_merge_matches_concatenation((ops, cut) in split(), seed in any::<u64>()) {
        let universe = (N * (N - 1) / 2) as u64;
        let fresh = || L0Sketch::new(universe, &mut rng(seed)).unwrap();
        let (mut whole, mut left, mut right) = (fresh(), fresh(), fresh());
        for (i, &(a, b, d)) in ops.iter().enumerate() {
            whole.update(id(a, b), d).unwrap();
            if i < cut { left.update(id(a, b), d).unwrap() } else { right.update(id(a, b), d).unwrap() }
        }
        left.merge(&right).unwrap();
        prop_assert_eq!(whole.to_blob(), left.to_blob());
    }

    #[test]
    fn sparse_merge_matches_concatenation((ops, cut) in split(), seed in any::<u64>()) {
        let fresh = || SparseRecoverySketch::new(N as u64, 8, &mut rng(seed)).unwrap();
        let (mut whole, mut left, mut right) = (fresh(), fresh(), fresh());
        for (i, &(a, _, d)) in ops.iter().enumerate() {
            whole.update(a as u64, d).unwrap();
            if i < cut { left.update(a as u64, d).unwrap() } else { right.update(a as u64, d).unwrap() }
        }
        left.merge(&right).unwrap();
        prop_assert_eq!(whole.to_blob(), left.to_blob());
    }

    #[test]
    fn sampler_merge_matches_concatenation((ops, cut) in split(), seed in any::<u64>(), s in prop::collection::vec(0..N, 1..4)) {
        let fresh = || NeighborhoodEdgeSampler::new(N, &s, &mut rng(seed)).unwrap();
        let (mut whole, mut left, mut right) = (fresh(), fresh(), fresh());
        for (i, &(a, b, d)) in ops.iter().enumerate() {
            whole.update_edge(a, b, id(a, b), d);
            if i < cut { left.update_edge(a, b, id(a, b), d) } else { right.update_edge(a, b, id(a, b), d) }
        }
        left.merge(&right).unwrap();
        prop_assert_eq!(whole.to_blob(), left.to_blob());
    }

    #[test]
    fn tester_merge_matches_concatenation((ops, cut) in split(), seed in any::<u64>(), s in prop::collection::vec(0..N, 1..4)) {
        let fresh = || NeighborhoodTester::new(&s, 8, 4, N, &mut rng(seed)).unwrap();
        let (mut whole, mut left, mut right) = (fresh(), fresh(), fresh());
        for (i, &(a, b, d)) in ops.iter().enumerate() {
            whole.update_edge(a, b, d);
            if i < cut { left.update_edge(a, b, d) } else { right.update_edge(a, b, d) }
        }
        left.merge(&right).unwrap();
        prop_assert_eq!(whole.to_blob(), left.to_blob());
    }

    #[test]
    fn mos_merge_matches_concatenation((ops, cut) in split(), seed in any::<u64>()) {
        let fresh = || MatchOrSparsify::new(N, 2, 0.5, &mut rng(seed)).unwrap();
        let (mut whole, mut left, mut right) = (fresh(), fresh(), fresh());
        for (i, &(a, b, d)) in ops.iter().enumerate() {
            whole.update_edge(a, b, id(a, b), d);
            if i < cut { left.update_edge(a, b, id(a, b), d) } else { right.update_edge(a, b, id(a, b), d) }
        }
        left.merge(&right).unwrap();
        prop_assert_eq!(whole.to_blob(), left.to_blob());
    }

    #[test]
    fn small_opt_merge_matches_concatenation((ops, cut) in split(), seed in any::<u64>()) {
        let fresh = || SmallOptSketch::from_seed(N, 3, seed).unwrap();
        let (mut whole, mut left, mut right) = (fresh(), fresh(), fresh());
        for (i, &(a, b, d)) in ops.iter().enumerate() {
            let e = encode_edge(a, b, N).unwrap();
            whole.update(e, d);
            if i < cut { left.update(e, d) } else { right.update(e, d) }
        }
        left.merge(&right).unwrap();
        prop_assert_eq!(whole.to_blob(), left.to_blob());
    }

    #[test]
    fn sampler_is_order_independent(ops in ops(), seed in any::<u64>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut permuted = ops.clone();
        permuted.shuffle(&mut rng(shuffle));
        let mut x = NeighborhoodEdgeSampler::new(N, &[0, 1], &mut rng(seed)).unwrap();
        let mut y = x.clone();
        for &(a, b, d) in &ops { x.update_edge(a, b, id(a, b), d) }
        for &(a, b, d) in &permuted { y.update_edge(a, b, id(a, b), d) }
        prop_assert_eq!(x.to_blob(), y.to_blob());
    }

    #[test]
    fn insert_then_delete_is_empty(edges in prop::collection::btree_set((0..N, 0..N), 1..20), seed in any::<u64>()) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let ins: Vec<StreamUpdate> = edges.iter().map(|&(a, b)| StreamUpdate::insert_pair(a, b, N)).collect();
        let del: Vec<StreamUpdate> = edges.iter().rev().map(|&(a, b)| StreamUpdate::delete_pair(a, b, N)).collect();

        let universe = (N * (N - 1) / 2) as u64;
        let mut l0 = L0Sketch::new(universe, &mut rng(seed)).unwrap();
        let mut sr = SparseRecoverySketch::new(universe, 4, &mut rng(seed)).unwrap();
        let mut nes = NeighborhoodEdgeSampler::new(N, &[0, 3, 5], &mut rng(seed)).unwrap();
        let mut tester = NeighborhoodTester::new(&[0, 3, 5], 8, 4, N, &mut rng(seed)).unwrap();
        let blank = (l0.to_blob(), sr.to_blob(), nes.to_blob(), tester.to_blob());
        for u in ins.iter().chain(&del) {
            l0.update(u.edge.index(), u.delta.value()).unwrap();
            sr.update(u.edge.index(), u.delta.value()).unwrap();
            nes.apply(u);
            tester.apply(u);
        }
        prop_assert_eq!(l0.decode(), L0Decode::Empty);
        prop_assert_eq!(sr.decode(), SparseDecode::Recovered(Vec::new()));
        prop_assert_eq!(nes.decode(), NesDecode::Empty);
        prop_assert_eq!((l0.to_blob(), sr.to_blob(), nes.to_blob(), tester.to_blob()), blank);
    }
}
