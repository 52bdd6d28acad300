//! Neighbourhood edge sampling: for a vertex set `S` fixed before the stream,
//! return an edge `(u, v)` with `u ∈ S` and `v` near-uniform over `N(S)`.
//!
//! Each cascade keeps an L0 sampler over the vector `c_x = |N(x) ∩ S|` with a
//! single cell per level, and for every level `ℓ` a nested L0 sampler over the
//! `S`-incident edges whose opposite endpoint reaches level `ℓ`. At the deepest
//! nonzero level a lone survivor `v` is uniform over `N(S)`, and that level's
//! nested sampler holds exactly the edges between `v` and `S`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{BitReader, BitWriter, Decode, Encode};
use crate::error::{Error, Result};
use crate::hashing::{field, KWiseHash};
use crate::sketch::{CellDecode, Fingerprint, L0Decode, L0Hasher, L0Shape, OneSparseCell};
use crate::stream::{decode_edge, edge_count, encode_edge, StreamSink, StreamUpdate};
use crate::util::ceil_log2;

/// Independent cascades per sampler; the first that succeeds answers.
pub const DEFAULT_CASCADES: usize = 4;
/// Hash rows per level of the nested edge samplers.
pub const NESTED_ROWS: u32 = 1;
/// Buckets per row of the nested edge samplers.
pub const NESTED_BUCKETS: u32 = 2;

/// How membership in `S` is decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// One flag per vertex.
    Explicit(Vec<bool>),
    /// `S = h⁻¹(bucket)`, evaluated on demand.
    Preimage { hash: KWiseHash, bucket: u64 },
}

impl Membership {
    pub fn from_vertices(n: usize, s: &[usize]) -> Result<Self> {
        let mut flags = vec![false; n];
        for &v in s {
            if v >= n {
                return Err(Error::InvalidParameter(format!("vertex {v} of S outside [0, {n})")));
            }
            flags[v] = true;
        }
        Ok(Membership::Explicit(flags))
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        match self {
            Membership::Explicit(flags) => flags[v],
            Membership::Preimage { hash, bucket } => hash.eval_unchecked(v as u64) == *bucket,
        }
    }

    pub fn size(&self, n: usize) -> usize {
        (0..n).filter(|&v| self.contains(v)).count()
    }
}

impl Encode for Membership {
    fn encode(&self, w: &mut BitWriter) {
        match self {
            Membership::Explicit(flags) => {
                w.write(0, 8);
                for &f in flags {
                    w.write_bool(f);
                }
            }
            Membership::Preimage { hash, bucket } => {
                w.write(1, 8);
                hash.encode(w);
                w.write(*bucket, 64);
            }
        }
    }
}

/// Outcome of a neighbourhood edge sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NesDecode {
    /// `u ∈ S` and `v ∈ N(S)`.
    Edge { u: usize, v: usize },
    Empty,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cascade {
    vertex: L0Hasher,
    vertex_cells: Vec<OneSparseCell>,
    nested: L0Hasher,
    /// One nested cell array per vertex level, concatenated.
    nested_cells: Vec<OneSparseCell>,
}

impl Cascade {
    fn nested_block(&self, level: u32) -> std::ops::Range<usize> {
        let len = self.nested.shape().cells();
        level as usize * len..(level as usize + 1) * len
    }

    /// Adds `delta` to coordinate `x` of `c` and to edge `e` at every level `x` reaches.
    fn add(&mut self, x: u64, term_x: u64, e: u64, term_e: u64, delta: i64) {
        self.vertex.update_cells_with_term(&mut self.vertex_cells, x, delta, term_x);
        for level in 0..=self.vertex.level(x) {
            let block = self.nested_block(level);
            self.nested.update_cells_with_term(&mut self.nested_cells[block], e, delta, term_e);
        }
    }

    /// Recovers one edge from a nested cell holding exactly two edges of `v`.
    /// Every edge in the block joins `v` to `S`, so the first endpoint fixes
    /// the second through the id sum; the fingerprint and the cell's hashes
    /// confirm the pair.
    fn resolve_pair(&self, block: &[OneSparseCell], n: usize, v: usize, members: &[usize]) -> Option<u64> {
        let shape = self.nested.shape();
        let fp = self.nested.fingerprint();
        let owns = |e: u64, level: u32, row: u32, bucket: u32| {
            self.nested.level(e) >= level && self.nested.bucket(level, row, e) == bucket
        };
        for level in (0..shape.levels).rev() {
            for row in 0..shape.rows {
                for bucket in 0..shape.buckets {
                    let cell = &block[self.nested.index(level, row, bucket)];
                    if cell.count != 2 {
                        continue;
                    }
                    for &u in members {
                        let Ok(first) = encode_edge(u, v, n) else { continue };
                        let e1 = first.index();
                        let e2 = cell.id_sum.wrapping_sub(e1 as i64);
                        if e2 <= e1 as i64 || e2 as u64 >= shape.universe {
                            continue;
                        }
                        let e2 = e2 as u64;
                        let Ok((a, b)) = decode_edge(crate::stream::EdgeId::new(e2), n) else { continue };
                        let other = if a == v { b } else if b == v { a } else { continue };
                        if members.binary_search(&other).is_err() {
                            continue;
                        }
                        if field::add(fp.power(e1), fp.power(e2)) == cell.fingerprint
                            && owns(e1, level, row, bucket)
                            && owns(e2, level, row, bucket)
                        {
                            return Some(e1);
                        }
                    }
                }
            }
        }
        None
    }

    fn decode<'a>(&self, n: usize, membership: &Membership, members: impl FnOnce() -> &'a [usize]) -> NesDecode {
        let Some(level) = (0..self.vertex.levels()).rev().find(|&l| !self.vertex_cells[l as usize].is_zero()) else {
            return NesDecode::Empty;
        };
        let CellDecode::One { id: v, .. } = self.vertex.decode_cell(&self.vertex_cells, level, 0, 0) else {
            return NesDecode::Fail;
        };
        let block = &self.nested_cells[self.nested_block(level)];
        let e = match self.nested.decode_cells(block) {
            L0Decode::Sample { id, weight: 1 } => id,
            L0Decode::Sample { .. } | L0Decode::Empty => return NesDecode::Fail,
            L0Decode::Fail => match self.resolve_pair(block, n, v as usize, members()) {
                Some(e) => e,
                None => return NesDecode::Fail,
            },
        };
        let Ok((a, b)) = decode_edge(crate::stream::EdgeId::new(e), n) else {
            return NesDecode::Fail;
        };
        let v = v as usize;
        let u = if a == v {
            b
        } else if b == v {
            a
        } else {
            return NesDecode::Fail;
        };
        if membership.contains(u) {
            NesDecode::Edge { u, v }
        } else {
            NesDecode::Fail
        }
    }
}

/// Linear sketch answering one neighbourhood edge sample for a fixed `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodEdgeSampler {
    seed: u64,
    n: usize,
    membership: Membership,
    fingerprint: Fingerprint,
    cascades: Vec<Cascade>,
}

impl NeighborhoodEdgeSampler {
    pub fn new<R: Rng + ?Sized>(n: usize, s: &[usize], rng: &mut R) -> Result<Self> {
        Self::with_membership(n, Membership::from_vertices(n, s)?, DEFAULT_CASCADES, rng.gen())
    }

    pub fn with_membership(n: usize, membership: Membership, cascades: usize, seed: u64) -> Result<Self> {
        if n < 2 || cascades == 0 {
            return Err(Error::InvalidParameter("sampler needs n >= 2 and at least one cascade".into()));
        }
        if let Membership::Explicit(flags) = &membership {
            if flags.len() != n {
                return Err(Error::InvalidParameter("membership bitmap length differs from n".into()));
            }
        }
        let size = membership.size(n) as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fingerprint = Fingerprint::sample(&mut rng);
        let m = edge_count(n);
        let vertex_shape = L0Shape::for_universe(n as u64, 1, 1);
        let nested_shape = L0Shape {
            universe: m,
            levels: ceil_log2(m).min(ceil_log2(size.max(1))) + 1,
            rows: NESTED_ROWS,
            buckets: NESTED_BUCKETS,
        };
        let cascades = (0..cascades)
            .map(|_| {
                let vertex = L0Hasher::with_fingerprint(vertex_shape, fingerprint, &mut rng)?;
                let nested = L0Hasher::with_fingerprint(nested_shape, fingerprint, &mut rng)?;
                Ok(Cascade {
                    vertex_cells: vertex.empty_cells(),
                    nested_cells: vec![OneSparseCell::default(); vertex_shape.levels as usize * nested_shape.cells()],
                    vertex,
                    nested,
                })
            })
            .collect::<Result<_>>()?;
        Ok(NeighborhoodEdgeSampler { seed, n, membership, fingerprint, cascades })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn membership(&self) -> &Membership {
        &self.membership
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.membership.contains(v)
    }

    /// Update for edge `e = {a, b}` whose endpoints are already decoded.
    pub fn update_edge(&mut self, a: usize, b: usize, e: u64, delta: i64) {
        let a_in = self.membership.contains(a);
        let b_in = self.membership.contains(b);
        if !a_in && !b_in {
            return;
        }
        let term_e = self.fingerprint.term(e, delta);
        for (member, opposite) in [(a_in, b), (b_in, a)] {
            if member {
                let x = opposite as u64;
                let term_x = self.fingerprint.term(x, delta);
                for c in &mut self.cascades {
                    c.add(x, term_x, e, term_e, delta);
                }
            }
        }
    }

    pub fn decode(&self) -> NesDecode {
        let members = std::cell::OnceCell::new();
        let list = || members.get_or_init(|| (0..self.n).filter(|&v| self.membership.contains(v)).collect::<Vec<_>>()).as_slice();
        for c in &self.cascades {
            match c.decode(self.n, &self.membership, list) {
                NesDecode::Fail => continue,
                found => return found,
            }
        }
        NesDecode::Fail
    }

    pub fn merge(&mut self, other: &NeighborhoodEdgeSampler) -> Result<()> {
        if self.seed != other.seed || self.n != other.n || self.membership != other.membership {
            return Err(Error::ShapeMismatch("samplers built from different seeds or sets".into()));
        }
        for (a, b) in self.cascades.iter_mut().zip(&other.cascades) {
            for (x, y) in a.vertex_cells.iter_mut().zip(&b.vertex_cells) {
                x.merge(y);
            }
            for (x, y) in a.nested_cells.iter_mut().zip(&b.nested_cells) {
                x.merge(y);
            }
        }
        Ok(())
    }
}

impl StreamSink for NeighborhoodEdgeSampler {
    fn apply(&mut self, update: &StreamUpdate) {
        let (a, b) = decode_edge(update.edge, self.n).expect("edge index valid for n");
        self.update_edge(a, b, update.edge.index(), update.delta.value());
    }
}

impl Encode for NeighborhoodEdgeSampler {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.seed, 64);
        w.write(self.n as u64, 64);
        self.membership.encode(w);
        w.write(self.cascades.len() as u64, 8);
        for c in &self.cascades {
            c.vertex.encode(w);
            c.nested.encode(w);
            for cell in c.vertex_cells.iter().chain(&c.nested_cells) {
                cell.encode(w);
            }
        }
    }
}

impl NeighborhoodEdgeSampler {
    /// Inverse of [`Encode`], used to check that blobs are complete.
    pub fn decode_blob(bytes: &[u8]) -> Result<Self> {
        let mut r = BitReader::new(bytes);
        if r.read(8)? as u8 != crate::codec::BLOB_VERSION {
            return Err(Error::Codec("unsupported blob version".into()));
        }
        let seed = r.read(64)?;
        let n = r.read(64)? as usize;
        let membership = match r.read(8)? {
            0 => Membership::Explicit((0..n).map(|_| r.read_bool()).collect::<Result<_>>()?),
            1 => Membership::Preimage { hash: KWiseHash::decode(&mut r)?, bucket: r.read(64)? },
            t => return Err(Error::Codec(format!("unknown membership tag {t}"))),
        };
        let count = r.read(8)? as usize;
        let mut cascades = Vec::with_capacity(count);
        for _ in 0..count {
            let vertex = L0Hasher::decode(&mut r)?;
            let nested = L0Hasher::decode(&mut r)?;
            let vertex_cells = (0..vertex.shape().cells())
                .map(|_| <OneSparseCell as Decode>::decode(&mut r))
                .collect::<Result<_>>()?;
            let nested_cells = (0..vertex.levels() as usize * nested.shape().cells())
                .map(|_| <OneSparseCell as Decode>::decode(&mut r))
                .collect::<Result<_>>()?;
            cascades.push(Cascade { vertex, vertex_cells, nested, nested_cells });
        }
        let fingerprint = *cascades
            .first()
            .map(|c: &Cascade| c.vertex.fingerprint())
            .ok_or_else(|| Error::Codec("sampler without cascades".into()))?;
        Ok(NeighborhoodEdgeSampler { seed, n, membership, fingerprint, cascades })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampler(n: usize, s: &[usize], seed: u64) -> NeighborhoodEdgeSampler {
        NeighborhoodEdgeSampler::new(n, s, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn shared_neighbour_resolves() {
        let mut decoded = 0;
        for seed in 0..500 {
            let mut s = NeighborhoodEdgeSampler::with_membership(6, Membership::from_vertices(6, &[0, 1]).unwrap(), 1, seed).unwrap();
            s.apply(&StreamUpdate::insert_pair(0, 4, 6));
            s.apply(&StreamUpdate::insert_pair(1, 4, 6));
            match s.decode() {
                NesDecode::Edge { u, v } => {
                    assert_eq!(v, 4);
                    assert!(u < 2);
                    decoded += 1;
                }
                NesDecode::Empty => panic!("neighbourhood is not empty"),
                NesDecode::Fail => {}
            }
        }
        assert_eq!(decoded, 500);
    }

    #[test]
    fn empty_set_is_always_empty() {
        let mut s = sampler(8, &[], 0);
        s.apply(&StreamUpdate::insert_pair(0, 1, 8));
        assert_eq!(s.decode(), NesDecode::Empty);
    }

    #[test]
    fn whole_vertex_set_allowed() {
        let mut s = sampler(8, &[0, 1, 2, 3, 4, 5, 6, 7], 1);
        s.apply(&StreamUpdate::insert_pair(2, 5, 8));
        match s.decode() {
            NesDecode::Edge { u, v } => assert!((u, v) == (2, 5) || (u, v) == (5, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic_initial_state() {
        assert_eq!(sampler(8, &[1, 2], 5).to_blob(), sampler(8, &[1, 2], 5).to_blob());
    }

    #[test]
    fn insert_delete_restores_state() {
        let fresh = sampler(8, &[1], 2);
        let mut s = fresh.clone();
        s.apply(&StreamUpdate::insert_pair(1, 2, 8));
        assert_ne!(s, fresh);
        s.apply(&StreamUpdate::delete_pair(1, 2, 8));
        assert_eq!(s, fresh);
        assert_eq!(s.decode(), NesDecode::Empty);
    }

    #[test]
    fn no_edges_is_empty() {
        assert_eq!(sampler(8, &[1], 3).decode(), NesDecode::Empty);
    }

    #[test]
    fn blob_roundtrip() {
        let mut s = sampler(10, &[0, 3], 4);
        s.apply(&StreamUpdate::insert_pair(0, 9, 10));
        s.apply(&StreamUpdate::insert_pair(3, 4, 10));
        assert_eq!(NeighborhoodEdgeSampler::decode_blob(&s.to_blob()).unwrap(), s);
    }
}
