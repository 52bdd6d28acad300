//! Exact minimum vertex cover for graphs with a small optimum: recover the
//! whole edge vector from a sparse recovery sketch, then search for a cover of
//! size below `k`.
//!
//! This meets the exact-under-promise contract whenever the final edge count
//! fits the recovery capacity; dense graphs with small covers exceed it and
//! decode as `Inconclusive`.

use std::collections::BTreeSet;

use rand::Rng;

use crate::codec::{BitWriter, Encode};
use crate::error::{Error, Result};
use crate::sketch::{SparseDecode, SparseRecoverySketch};
use crate::stream::{decode_edge, edge_count, EdgeId, StreamSink, StreamUpdate};
use crate::util::log_n;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmallOptDecode {
    /// A minimum cover, of size below `k`.
    Exact(Vec<usize>),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallOptSketch {
    n: usize,
    k: usize,
    sketch: SparseRecoverySketch,
}

/// `min(C(n,2), 8·k²·⌈log₂ n⌉)`.
pub fn small_opt_capacity(n: usize, k: usize) -> usize {
    (edge_count(n) as usize).min(8 * k * k * log_n(n) as usize)
}

impl SmallOptSketch {
    pub fn new<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        Self::from_seed(n, k, rng.gen())
    }

    pub fn from_seed(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("small-opt needs k >= 2, got {k}")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter("small-opt needs n >= 2".into()));
        }
        let sketch = SparseRecoverySketch::from_seed(edge_count(n), small_opt_capacity(n, k), seed)?;
        Ok(SmallOptSketch { n, k, sketch })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn capacity(&self) -> usize {
        self.sketch.capacity()
    }

    pub fn update(&mut self, edge: EdgeId, delta: i64) {
        self.sketch.update_unchecked(edge.index(), delta);
    }

    /// The recovered final edge set, if recovery succeeds and yields a simple graph.
    pub fn recover_edges(&self) -> Option<Vec<(usize, usize)>> {
        let SparseDecode::Recovered(support) = self.sketch.decode() else {
            return None;
        };
        support
            .into_iter()
            .map(|(id, w)| if w == 1 { decode_edge(EdgeId::new(id), self.n).ok() } else { None })
            .collect()
    }

    pub fn decode(&self) -> SmallOptDecode {
        let Some(edges) = self.recover_edges() else {
            return SmallOptDecode::Inconclusive;
        };
        match min_cover_below(self.n, &edges, self.k) {
            Some(cover) => SmallOptDecode::Exact(cover),
            None => SmallOptDecode::Inconclusive,
        }
    }

    pub fn merge(&mut self, other: &SmallOptSketch) -> Result<()> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::ShapeMismatch("small-opt sketches with different n or k".into()));
        }
        self.sketch.merge(&other.sketch)
    }
}

impl StreamSink for SmallOptSketch {
    fn apply(&mut self, update: &StreamUpdate) {
        self.update(update.edge, update.delta.value());
    }
}

impl Encode for SmallOptSketch {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.n as u64, 64);
        w.write(self.k as u64, 64);
        self.sketch.encode(w);
    }
}

/// A minimum vertex cover if one of size below `k` exists.
pub fn min_cover_below(n: usize, edges: &[(usize, usize)], k: usize) -> Option<Vec<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    (0..k).find_map(|t| {
        let mut cover = Vec::new();
        bounded_cover(&mut adj.clone(), t, &mut cover).then(|| {
            cover.sort_unstable();
            cover
        })
    })
}

fn take(adj: &mut [BTreeSet<usize>], v: usize, cover: &mut Vec<usize>) {
    for u in std::mem::take(&mut adj[v]) {
        adj[u].remove(&v);
    }
    cover.push(v);
}

/// Whether the graph has a cover of size at most `budget`; appends one to `cover` if so.
fn bounded_cover(adj: &mut Vec<BTreeSet<usize>>, mut budget: usize, cover: &mut Vec<usize>) -> bool {
    loop {
        let forced = (0..adj.len()).find(|&v| adj[v].len() > budget);
        let pendant = || (0..adj.len()).find(|&v| adj[v].len() == 1);
        if let Some(v) = forced {
            if budget == 0 {
                return false;
            }
            take(adj, v, cover);
            budget -= 1;
        } else if let Some(v) = pendant() {
            if budget == 0 {
                return false;
            }
            let u = *adj[v].iter().next().expect("degree one");
            take(adj, u, cover);
            budget -= 1;
        } else {
            break;
        }
    }
    let edges: usize = adj.iter().map(BTreeSet::len).sum::<usize>() / 2;
    if edges == 0 {
        return true;
    }
    if edges > budget * budget || budget == 0 {
        return false;
    }
    let v = (0..adj.len()).max_by_key(|&v| adj[v].len()).expect("nonempty");
    let mark = cover.len();

    let mut with_v = adj.clone();
    take(&mut with_v, v, cover);
    if bounded_cover(&mut with_v, budget - 1, cover) {
        return true;
    }
    cover.truncate(mark);

    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    if nbrs.len() > budget {
        return false;
    }
    let mut without_v = adj.clone();
    for &u in &nbrs {
        take(&mut without_v, u, cover);
    }
    if bounded_cover(&mut without_v, budget - nbrs.len(), cover) {
        return true;
    }
    cover.truncate(mark);
    false
}
