//! Match-or-Sparsify: `2s` neighbourhood edge samplers over random vertex sets
//! `V_i = h_i⁻¹(0)` with pairwise `h_i : V → [⌈n/α⌉]`, followed by a greedy
//! matching over their samples.

use std::collections::BTreeSet;

use rand::Rng;

use crate::codec::{BitWriter, Encode};
use crate::error::{Error, Result};
use crate::hashing::sample_kwise;
use crate::ne_sampler::{Membership, NeighborhoodEdgeSampler, NesDecode, DEFAULT_CASCADES};
use crate::stream::{decode_edge, encode_edge, EdgeId, FinalGraph, StreamSink, StreamUpdate};
use crate::util::{ceil_div, ceil_f64, log_n};

/// A set of vertex-disjoint edges, each stored as `(min, max)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `V(M)`, sorted.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        vs.sort_unstable();
        vs
    }

    /// Whether no two edges share an endpoint.
    pub fn is_matching(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|&(a, b)| a != b && seen.insert(a) && seen.insert(b))
    }

    pub fn edge_ids(&self, n: usize) -> Vec<EdgeId> {
        self.edges.iter().map(|&(a, b)| encode_edge(a, b, n).expect("matching edge valid")).collect()
    }
}

/// Scans `edges` in order, keeping each edge whose endpoints are both unmatched.
pub fn greedy_matching<I: IntoIterator<Item = (usize, usize)>>(edges: I) -> Matching {
    let mut matched = BTreeSet::new();
    let mut m = Matching::new();
    for (a, b) in edges {
        if a != b && !matched.contains(&a) && !matched.contains(&b) {
            matched.insert(a);
            matched.insert(b);
            m.edges.push((a.min(b), a.max(b)));
        }
    }
    m
}

/// Greedy matching over canonical edge indices.
pub fn greedy_matching_ids(ids: &[EdgeId], n: usize) -> Result<Matching> {
    let pairs = ids.iter().map(|&e| decode_edge(e, n)).collect::<Result<Vec<_>>>()?;
    Ok(greedy_matching(pairs))
}

/// Tunables of the sampler bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MosConfig {
    /// Multiplier on `n² / (α² ⌈log₂ n⌉³)`.
    pub scale: f64,
    pub cascades: usize,
}

impl Default for MosConfig {
    fn default() -> Self {
        MosConfig { scale: 1.0, cascades: DEFAULT_CASCADES }
    }
}

/// Checks `1 ≤ α ≤ n^{1-δ}` and `0 < δ < 1`.
pub fn check_alpha(n: usize, alpha: usize, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1)")));
    }
    if n < 2 || alpha == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and alpha >= 1, got n = {n}, alpha = {alpha}")));
    }
    let bound = (n as f64).powf(1.0 - delta);
    if alpha as f64 > bound * (1.0 + 1e-9) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} exceeds n^(1-delta) = {bound:.3}")));
    }
    Ok(())
}

/// `(k, s)` with `k = ⌈n/α⌉` and `s = max(⌈scale·n²/(α²⌈log₂ n⌉³)⌉, k)`.
pub fn mos_parameters(n: usize, alpha: usize, scale: f64) -> (usize, usize) {
    let k = ceil_div(n as u64, alpha as u64) as usize;
    let log = log_n(n) as f64;
    let dense = ceil_f64(scale * (n as f64).powi(2) / ((alpha as f64).powi(2) * log.powi(3))) as usize;
    (k, dense.max(k))
}

/// What the bank's samplers returned, for diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MosDiagnostics {
    pub instances: usize,
    pub fails: usize,
    pub empties: usize,
    /// `(instance, u, v)` for every sampled edge, in instance order.
    pub samples: Vec<(usize, usize, usize)>,
    /// Instance index that contributed each matching edge.
    pub provenance: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchOrSparsify {
    n: usize,
    alpha: usize,
    k: usize,
    s: usize,
    samplers: Vec<NeighborhoodEdgeSampler>,
}

impl MatchOrSparsify {
    pub fn new<R: Rng + ?Sized>(n: usize, alpha: usize, delta: f64, rng: &mut R) -> Result<Self> {
        Self::with_config(n, alpha, delta, MosConfig::default(), rng)
    }

    pub fn with_config<R: Rng + ?Sized>(n: usize, alpha: usize, delta: f64, config: MosConfig, rng: &mut R) -> Result<Self> {
        check_alpha(n, alpha, delta)?;
        if !(config.scale > 0.0) {
            return Err(Error::InvalidParameter("sample scale must be positive".into()));
        }
        let (k, s) = mos_parameters(n, alpha, config.scale);
        let samplers = (0..2 * s)
            .map(|_| {
                let hash = sample_kwise(2, n as u64, k as u64, rng)?;
                let seed = rng.gen();
                NeighborhoodEdgeSampler::with_membership(n, Membership::Preimage { hash, bucket: 0 }, config.cascades, seed)
            })
            .collect::<Result<_>>()?;
        Ok(MatchOrSparsify { n, alpha, k, s, samplers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn samplers(&self) -> &[NeighborhoodEdgeSampler] {
        &self.samplers
    }

    pub fn update_edge(&mut self, a: usize, b: usize, e: u64, delta: i64) {
        for sampler in &mut self.samplers {
            sampler.update_edge(a, b, e, delta);
        }
    }

    /// Decodes every sampler in index order and matches greedily over the results.
    pub fn finalize(&self) -> (Matching, MosDiagnostics) {
        let mut diag = MosDiagnostics { instances: self.samplers.len(), ..Default::default() };
        for (i, sampler) in self.samplers.iter().enumerate() {
            match sampler.decode() {
                NesDecode::Edge { u, v } => diag.samples.push((i, u, v)),
                NesDecode::Empty => diag.empties += 1,
                NesDecode::Fail => diag.fails += 1,
            }
        }
        let m = greedy_matching(diag.samples.iter().map(|&(_, u, v)| (u, v)));
        let mut remaining: Vec<(usize, usize)> = m.edges().to_vec();
        for &(i, u, v) in &diag.samples {
            let key = (u.min(v), u.max(v));
            if let Some(pos) = remaining.iter().position(|&e| e == key) {
                remaining.remove(pos);
                diag.provenance.push(i);
            }
        }
        (m, diag)
    }

    pub fn merge(&mut self, other: &MatchOrSparsify) -> Result<()> {
        if self.samplers.len() != other.samplers.len() {
            return Err(Error::ShapeMismatch("sampler banks of different sizes".into()));
        }
        for (a, b) in self.samplers.iter_mut().zip(&other.samplers) {
            a.merge(b)?;
        }
        Ok(())
    }
}

impl StreamSink for MatchOrSparsify {
    fn apply(&mut self, update: &StreamUpdate) {
        let (a, b) = decode_edge(update.edge, self.n).expect("edge index valid for n");
        self.update_edge(a, b, update.edge.index(), update.delta.value());
    }
}

impl Encode for MatchOrSparsify {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.n as u64, 64);
        w.write(self.alpha as u64, 64);
        w.write(self.s as u64, 64);
        for sampler in &self.samplers {
            sampler.encode(w);
        }
    }
}

/// Which side of the dichotomy a run landed on, given the final graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dichotomy {
    pub matching_size: usize,
    pub match_threshold: usize,
    pub residual_edges: usize,
    pub residual_bound: u64,
    /// Matching edges absent from the final graph.
    pub wrong_edges: usize,
}

impl Dichotomy {
    pub fn evaluate(graph: &FinalGraph, alpha: usize, m: &Matching) -> Self {
        let n = graph.n;
        let matched: BTreeSet<usize> = m.vertices().into_iter().collect();
        let residual_edges = graph
            .pairs()
            .filter(|(a, b)| !matched.contains(a) && !matched.contains(b))
            .count();
        let log = log_n(n);
        let wrong_edges = m.edges().iter().filter(|&&(a, b)| !graph.contains(a, b)).count();
        Dichotomy {
            matching_size: m.len(),
            match_threshold: ceil_div(n as u64, 8 * alpha as u64) as usize,
            residual_edges,
            residual_bound: 20 * ceil_div(n as u64, alpha as u64) * log.pow(4),
            wrong_edges,
        }
    }

    pub fn large_matching(&self) -> bool {
        self.matching_size >= self.match_threshold
    }

    pub fn sparse_residual(&self) -> bool {
        self.residual_edges as u64 <= self.residual_bound
    }

    pub fn holds(&self) -> bool {
        self.large_matching() || self.sparse_residual()
    }
}
