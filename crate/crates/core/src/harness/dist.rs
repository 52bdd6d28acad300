//! Empirical neighbourhood-edge-sampler distribution against the exact one.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::ne_sampler::{Membership, NeighborhoodEdgeSampler, NesDecode, DEFAULT_CASCADES};
use crate::oracle::{ne_distribution, total_variation};
use crate::stream::{FinalGraph, StreamSink};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistReport {
    pub label: String,
    pub n: usize,
    pub s: Vec<usize>,
    pub neighbourhood: usize,
    pub samples: u64,
    pub successes: u64,
    pub fails: u64,
    pub empties: u64,
    /// Decodes returning an edge not in the graph or not leaving `S`.
    pub wrong: u64,
    /// `None` when `N(S)` is empty.
    pub tv: Option<f64>,
}

impl DistReport {
    pub fn fail_rate(&self) -> f64 {
        self.fails as f64 / self.samples.max(1) as f64
    }

    pub fn empty_rate(&self) -> f64 {
        self.empties as f64 / self.samples.max(1) as f64
    }

    pub fn wrong_rate(&self) -> f64 {
        self.wrong as f64 / self.samples.max(1) as f64
    }
}

/// Decodes `samples` independently seeded samplers fed the graph's stream.
pub fn ne_dist_test(label: &str, graph: &FinalGraph, s: &[usize], samples: u64, seed: u64) -> Result<DistReport> {
    let membership = Membership::from_vertices(graph.n, s)?;
    let target = ne_distribution(graph, s);
    let stream = graph.to_stream();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let (mut fails, mut empties, mut wrong) = (0, 0, 0);
    for _ in 0..samples {
        let mut sampler = NeighborhoodEdgeSampler::with_membership(graph.n, membership.clone(), DEFAULT_CASCADES, rng.gen())?;
        sampler.apply_all(&stream);
        match sampler.decode() {
            NesDecode::Edge { u, v } => {
                if !membership.contains(u) || !graph.contains(u, v) {
                    wrong += 1;
                } else {
                    *counts.entry(v).or_default() += 1;
                }
            }
            NesDecode::Empty => empties += 1,
            NesDecode::Fail => fails += 1,
        }
    }
    let successes = counts.values().sum();
    Ok(DistReport {
        label: label.to_string(),
        n: graph.n,
        s: s.to_vec(),
        neighbourhood: target.len(),
        samples,
        successes,
        fails,
        empties,
        wrong,
        tv: (!target.is_empty()).then(|| total_variation(&counts, &target)),
    })
}

fn graph(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> FinalGraph {
    let pairs: Vec<_> = pairs.into_iter().collect();
    FinalGraph::from_pairs(n, &pairs).expect("corpus graphs are simple")
}

/// Ten small `(label, graph, S)` instances with `n ≤ 16`.
pub fn ne_corpus() -> Vec<(String, FinalGraph, Vec<usize>)> {
    let complete = |n: usize| (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
    let grid = (0..16).flat_map(|v| {
        let (r, c) = (v / 4, v % 4);
        let right = (c < 3).then_some((v, v + 1));
        let down = (r < 3).then_some((v, v + 4));
        right.into_iter().chain(down)
    });
    vec![
        ("path3".into(), graph(3, [(0, 1), (1, 2)]), vec![1]),
        ("star8_hub".into(), graph(9, (1..9).map(|i| (0, i))), vec![0]),
        ("star8_leaves".into(), graph(9, (1..9).map(|i| (0, i))), vec![1, 2, 3]),
        ("cycle5".into(), graph(5, (0..5).map(|i| (i, (i + 1) % 5))), vec![0]),
        ("k6".into(), graph(6, complete(6)), vec![0, 1]),
        ("k44".into(), graph(8, (0..4).flat_map(|i| (4..8).map(move |j| (i, j)))), vec![0, 1]),
        ("grid4x4".into(), graph(16, grid), vec![5, 10]),
        ("path12".into(), graph(12, (0..11).map(|i| (i, i + 1))), vec![0, 5, 6]),
        (
            "sparse16".into(),
            graph(16, complete(16).filter(|&(i, j)| (i * 7 + j * 3) % 5 == 0)),
            vec![0, 1, 2, 3],
        ),
        ("k88".into(), graph(16, (0..8).flat_map(|i| (8..16).map(move |j| (i, j)))), vec![0, 1, 2, 3, 4, 5]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_is_close_to_uniform() {
        let g = graph(3, [(0, 1), (1, 2)]);
        let r = ne_dist_test("path", &g, &[1], 4000, 1).unwrap();
        assert!(r.tv.unwrap() <= 0.05, "{r:?}");
        assert_eq!(r.wrong, 0);
    }

    #[test]
    fn empty_neighbourhood_is_always_empty() {
        let g = graph(4, [(2, 3)]);
        let r = ne_dist_test("isolated", &g, &[0], 200, 2).unwrap();
        assert_eq!(r.empties, 200);
        assert_eq!(r.tv, None);
    }

    #[test]
    fn corpus_shape() {
        let c = ne_corpus();
        assert_eq!(c.len(), 10);
        assert!(c.iter().all(|(_, g, s)| g.n <= 16 && !s.is_empty()));
    }
}
