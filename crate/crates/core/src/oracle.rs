//! Ground truth for tests: exact minimum vertex cover, cover verification,
//! residual subgraphs, exact neighbourhood sampling distributions and exact
//! maximum matchings of small graphs.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::mos::Matching;
use crate::stream::FinalGraph;

/// Adjacency bitsets of a simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleGraph {
    n: usize,
    words: usize,
    adj: Vec<Vec<u64>>,
    edges: usize,
}

type Bits = Vec<u64>;

fn bit(bits: &[u64], v: usize) -> bool {
    bits[v / 64] >> (v % 64) & 1 == 1
}

fn set(bits: &mut [u64], v: usize) {
    bits[v / 64] |= 1 << (v % 64);
}

fn clear(bits: &mut [u64], v: usize) {
    bits[v / 64] &= !(1 << (v % 64));
}

fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                None
            } else {
                let t = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(w * 64 + t)
            }
        })
    })
}

impl OracleGraph {
    pub fn new(graph: &FinalGraph) -> Self {
        Self::from_pairs(graph.n, graph.pairs())
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut adj = vec![vec![0u64; words]; n];
        let mut edges = 0;
        for (u, v) in pairs {
            if u != v && !bit(&adj[u], v) {
                set(&mut adj[u], v);
                set(&mut adj[v], u);
                edges += 1;
            }
        }
        OracleGraph { n, words, adj, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bit(&self.adj[u], v)
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        ones(&self.adj[v]).collect()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|u| ones(&self.adj[u]).filter(move |&v| v > u).map(move |v| (u, v))).collect()
    }
}

/// Limits for [`exact_min_vc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_n_sparse: usize,
    pub max_n_dense: usize,
    /// Graphs with more than `dense_factor · n` edges count as dense.
    pub dense_factor: usize,
    pub node_budget: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits { max_n_sparse: 256, max_n_dense: 64, dense_factor: 4, node_budget: 20_000_000 }
    }
}

struct Search<'a> {
    g: &'a OracleGraph,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Size of a greedy maximal matching on the alive subgraph: a lower bound on its cover.
    fn matching_bound(&self, alive: &[u64]) -> usize {
        let mut free = alive.to_vec();
        let mut size = 0;
        for u in ones(alive) {
            if !bit(&free, u) {
                continue;
            }
            if let Some(v) = self.g.adj[u].iter().zip(&free).enumerate().find_map(|(w, (a, f))| {
                let x = a & f;
                (x != 0).then(|| w * 64 + x.trailing_zeros() as usize)
            }) {
                clear(&mut free, u);
                clear(&mut free, v);
                size += 1;
            }
        }
        size
    }

    fn run(&mut self, mut alive: Bits, mut chosen: Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::TooLarge(format!("exact search exceeded {} nodes", self.budget)));
        }
        loop {
            let mut changed = false;
            for v in ones(&alive.clone()) {
                if !bit(&alive, v) {
                    continue;
                }
                match and_count(&self.g.adj[v], &alive) {
                    0 => {
                        clear(&mut alive, v);
                        changed = true;
                    }
                    1 => {
                        let u = ones(&self.g.adj[v]).find(|&u| bit(&alive, u)).expect("one alive neighbour");
                        chosen.push(u);
                        clear(&mut alive, u);
                        clear(&mut alive, v);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        if chosen.len() + self.matching_bound(&alive) >= self.best.len() {
            return Ok(());
        }
        let Some((v, _)) = ones(&alive).map(|v| (v, and_count(&self.g.adj[v], &alive))).max_by_key(|&(v, d)| (d, usize::MAX - v))
        else {
            self.best = chosen;
            return Ok(());
        };
        let mut with_v = alive.clone();
        clear(&mut with_v, v);
        let mut c = chosen.clone();
        c.push(v);
        self.run(with_v, c)?;

        let mut without_v = alive.clone();
        clear(&mut without_v, v);
        let mut c = chosen;
        for u in ones(&self.g.adj[v]).filter(|&u| bit(&alive, u)).collect::<Vec<_>>() {
            clear(&mut without_v, u);
            c.push(u);
        }
        self.run(without_v, c)
    }
}

/// Minimum vertex cover by branch and bound: branch on a maximum-degree vertex
/// (take it, or take all its neighbours), after removing isolated vertices and
/// taking the neighbour of every degree-1 vertex; prune with a matching bound.
pub fn exact_min_vc(graph: &OracleGraph) -> Result<(usize, Vec<usize>)> {
    exact_min_vc_with(graph, ExactLimits::default())
}

pub fn exact_min_vc_with(graph: &OracleGraph, limits: ExactLimits) -> Result<(usize, Vec<usize>)> {
    let n = graph.n;
    if n > limits.max_n_sparse || (n > limits.max_n_dense && graph.edges > limits.dense_factor * n) {
        return Err(Error::TooLarge(format!("n = {n} with {} edges exceeds the exact-search guard", graph.edges)));
    }
    let mut alive = vec![0u64; graph.words];
    for v in 0..n {
        set(&mut alive, v);
    }
    let mut search = Search { g: graph, best: (0..n).collect(), nodes: 0, budget: limits.node_budget };
    if graph.edges == 0 {
        return Ok((0, Vec::new()));
    }
    search.best.push(usize::MAX);
    search.run(alive, Vec::new())?;
    let mut cover = search.best;
    cover.retain(|&v| v != usize::MAX);
    if cover.len() > n {
        cover = (0..n).collect();
    }
    cover.sort_unstable();
    Ok((cover.len(), cover))
}

/// Minimum vertex cover by trying all `2ⁿ` subsets, for `n ≤ 20`.
pub fn brute_force_min_vc(graph: &OracleGraph) -> Result<(usize, Vec<usize>)> {
    let n = graph.n;
    if n > 20 {
        return Err(Error::TooLarge(format!("brute force needs n <= 20, got {n}")));
    }
    let pairs = graph.pairs();
    let mut best = (n, (1u32 << n) - 1);
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size < best.0 && pairs.iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1) {
            best = (size, mask);
        }
    }
    Ok((best.0, (0..n).filter(|&v| best.1 >> v & 1 == 1).collect()))
}

/// Whether every final edge has an endpoint satisfying `in_cover`.
pub fn verify_cover_with<F: Fn(usize) -> bool>(graph: &FinalGraph, in_cover: F) -> bool {
    graph.pairs().all(|(u, v)| in_cover(u) || in_cover(v))
}

pub fn verify_cover(graph: &FinalGraph, cover: &[usize]) -> bool {
    let set: BTreeSet<usize> = cover.iter().copied().collect();
    verify_cover_with(graph, |v| set.contains(&v))
}

/// Edges that no vertex of the cover touches.
pub fn uncovered_edges<F: Fn(usize) -> bool>(graph: &FinalGraph, in_cover: F) -> Vec<(usize, usize)> {
    graph.pairs().filter(|&(u, v)| !in_cover(u) && !in_cover(v)).collect()
}

/// The subgraph induced by the vertices `matching` leaves unmatched.
pub fn residual_subgraph(graph: &FinalGraph, matching: &Matching) -> Result<(FinalGraph, usize)> {
    if !matching.is_matching() || matching.edges().iter().any(|&(u, v)| !graph.contains(u, v)) {
        return Err(Error::InvalidParameter("matching is not a matching of the graph".into()));
    }
    let matched: BTreeSet<usize> = matching.vertices().into_iter().collect();
    let pairs: Vec<(usize, usize)> = graph.pairs().filter(|(u, v)| !matched.contains(u) && !matched.contains(v)).collect();
    let count = pairs.len();
    Ok((FinalGraph::from_pairs(graph.n, &pairs)?, count))
}

/// `N(S)`: vertices adjacent to some member of `S`.
pub fn neighbourhood(graph: &FinalGraph, s: &[usize]) -> BTreeSet<usize> {
    let members: BTreeSet<usize> = s.iter().copied().collect();
    let mut out = BTreeSet::new();
    for (u, v) in graph.pairs() {
        if members.contains(&u) {
            out.insert(v);
        }
        if members.contains(&v) {
            out.insert(u);
        }
    }
    out
}

/// The target distribution of a neighbourhood edge sample: uniform over `N(S)`.
pub fn ne_distribution(graph: &FinalGraph, s: &[usize]) -> BTreeMap<usize, f64> {
    let nbrs = neighbourhood(graph, s);
    let p = 1.0 / nbrs.len().max(1) as f64;
    nbrs.into_iter().map(|v| (v, p)).collect()
}

/// Total variation distance between an empirical count table and a distribution.
pub fn total_variation(counts: &BTreeMap<usize, u64>, target: &BTreeMap<usize, f64>) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return if target.is_empty() { 0.0 } else { 1.0 };
    }
    let keys: BTreeSet<usize> = counts.keys().chain(target.keys()).copied().collect();
    keys.iter()
        .map(|k| (counts.get(k).copied().unwrap_or(0) as f64 / total as f64 - target.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
        / 2.0
}

/// Maximum matching size by branch and bound over edges, for `n ≤ 24`.
pub fn max_matching_size(graph: &OracleGraph) -> Result<usize> {
    if graph.n > 24 {
        return Err(Error::TooLarge(format!("exact matching needs n <= 24, got {}", graph.n)));
    }
    fn go(g: &OracleGraph, free: u32, best: &mut usize, size: usize) {
        let Some(u) = (0..g.n).find(|&u| free >> u & 1 == 1 && ones(&g.adj[u]).any(|v| free >> v & 1 == 1)) else {
            *best = (*best).max(size);
            return;
        };
        if size + (free.count_ones() as usize) / 2 <= *best {
            return;
        }
        for v in ones(&g.adj[u]).filter(|&v| free >> v & 1 == 1).collect::<Vec<_>>() {
            go(g, free & !(1 << u) & !(1 << v), best, size + 1);
        }
        go(g, free & !(1 << u), best, size);
    }
    let mut best = 0;
    go(graph, if graph.n == 0 { 0 } else { u32::MAX >> (32 - graph.n) }, &mut best, 0);
    Ok(best)
}

/// Size of a greedy maximal matching: a lower bound on the minimum cover of any graph.
pub fn matching_lower_bound(graph: &FinalGraph) -> usize {
    crate::mos::greedy_matching(graph.pairs()).len()
}
