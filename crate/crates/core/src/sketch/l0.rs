use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cell::{CellDecode, Fingerprint, OneSparseCell};
use crate::codec::{BitReader, BitWriter, Decode, Encode};
use crate::error::{Error, Result};
use crate::hashing::{sample_kwise, KWiseHash};
use crate::util::ceil_log2;

/// Hash rows per level of a standalone L0 sampler.
pub const DEFAULT_L0_ROWS: u32 = 3;
/// Buckets per row of a standalone L0 sampler.
pub const DEFAULT_L0_BUCKETS: u32 = 4;

/// Geometry of an L0 sampler: `levels × rows × buckets` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct L0Shape {
    pub universe: u64,
    pub levels: u32,
    pub rows: u32,
    pub buckets: u32,
}

impl L0Shape {
    /// `⌈log₂ universe⌉ + 1` levels.
    pub fn for_universe(universe: u64, rows: u32, buckets: u32) -> Self {
        L0Shape { universe, levels: ceil_log2(universe) + 1, rows, buckets }
    }

    /// Enough levels for supports of at most `bound` coordinates.
    pub fn for_support(universe: u64, bound: u64, rows: u32, buckets: u32) -> Self {
        let levels = ceil_log2(universe).min(ceil_log2(2 * bound.max(1))) + 1;
        L0Shape { universe, levels, rows, buckets }
    }

    pub fn default_for(universe: u64) -> Self {
        Self::for_universe(universe, DEFAULT_L0_ROWS, DEFAULT_L0_BUCKETS)
    }

    pub fn cells_per_level(&self) -> usize {
        self.rows as usize * self.buckets as usize
    }

    pub fn cells(&self) -> usize {
        self.levels as usize * self.cells_per_level()
    }
}

/// Outcome of an L0 decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L0Decode {
    Sample { id: u64, weight: i64 },
    Empty,
    Fail,
}

/// The randomness of an L0 sampler, separable from its cells so that several
/// cell arrays can share one set of hashes.
///
/// Coordinate `i` lives in levels `0..=level(i)` with `P(level(i) ≥ ℓ) = 2^-ℓ`,
/// and in one bucket of every row of each such level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L0Hasher {
    shape: L0Shape,
    level_hash: KWiseHash,
    bucket_hashes: Vec<KWiseHash>,
    fingerprint: Fingerprint,
}

impl L0Hasher {
    pub fn new<R: Rng + ?Sized>(shape: L0Shape, rng: &mut R) -> Result<Self> {
        Self::with_fingerprint(shape, Fingerprint::sample(rng), rng)
    }

    pub fn with_fingerprint<R: Rng + ?Sized>(shape: L0Shape, fingerprint: Fingerprint, rng: &mut R) -> Result<Self> {
        if shape.universe == 0 || shape.levels == 0 || shape.levels > 61 || shape.rows == 0 || shape.buckets == 0 {
            return Err(Error::InvalidParameter(format!("bad L0 shape {shape:?}")));
        }
        let level_hash = sample_kwise(4, shape.universe, 1u64 << (shape.levels - 1), rng)?;
        let bucket_hashes = if shape.buckets == 1 {
            Vec::new()
        } else {
            (0..shape.levels * shape.rows)
                .map(|_| sample_kwise(2, shape.universe, shape.buckets as u64, rng))
                .collect::<Result<_>>()?
        };
        Ok(L0Hasher { shape, level_hash, bucket_hashes, fingerprint })
    }

    pub fn shape(&self) -> L0Shape {
        self.shape
    }

    pub fn universe(&self) -> u64 {
        self.shape.universe
    }

    pub fn levels(&self) -> u32 {
        self.shape.levels
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    /// Deepest level containing `id`.
    #[inline]
    pub fn level(&self, id: u64) -> u32 {
        let h = self.level_hash.eval_unchecked(id);
        if h == 0 {
            self.shape.levels - 1
        } else {
            h.trailing_zeros().min(self.shape.levels - 1)
        }
    }

    #[inline]
    pub fn bucket(&self, level: u32, row: u32, id: u64) -> u32 {
        if self.bucket_hashes.is_empty() {
            0
        } else {
            self.bucket_hashes[(level * self.shape.rows + row) as usize].eval_unchecked(id) as u32
        }
    }

    #[inline]
    pub fn index(&self, level: u32, row: u32, bucket: u32) -> usize {
        ((level * self.shape.rows + row) * self.shape.buckets + bucket) as usize
    }

    pub fn empty_cells(&self) -> Vec<OneSparseCell> {
        vec![OneSparseCell::default(); self.shape.cells()]
    }

    pub fn update_cells(&self, cells: &mut [OneSparseCell], id: u64, delta: i64) {
        let term = self.fingerprint.term(id, delta);
        self.update_cells_with_term(cells, id, delta, term);
    }

    /// Update with a precomputed fingerprint term, avoiding a field exponentiation.
    #[inline]
    pub fn update_cells_with_term(&self, cells: &mut [OneSparseCell], id: u64, delta: i64, term: u64) {
        debug_assert!(id < self.shape.universe);
        for level in 0..=self.level(id) {
            for row in 0..self.shape.rows {
                cells[self.index(level, row, self.bucket(level, row, id))].add(id, delta, term);
            }
        }
    }

    /// Decodes one cell, accepting it only if the recovered coordinate hashes to it.
    pub fn decode_cell(&self, cells: &[OneSparseCell], level: u32, row: u32, bucket: u32) -> CellDecode {
        match cells[self.index(level, row, bucket)].decode(self.shape.universe, &self.fingerprint) {
            CellDecode::One { id, weight } if self.level(id) >= level && self.bucket(level, row, id) == bucket => {
                CellDecode::One { id, weight }
            }
            CellDecode::One { .. } => CellDecode::Multi,
            other => other,
        }
    }

    /// Scans from the sparsest level and returns the first recoverable coordinate.
    pub fn decode_cells(&self, cells: &[OneSparseCell]) -> L0Decode {
        for level in (0..self.shape.levels).rev() {
            for row in 0..self.shape.rows {
                for bucket in 0..self.shape.buckets {
                    if let CellDecode::One { id, weight } = self.decode_cell(cells, level, row, bucket) {
                        return L0Decode::Sample { id, weight };
                    }
                }
            }
        }
        if cells[..self.shape.buckets as usize].iter().all(OneSparseCell::is_zero) {
            L0Decode::Empty
        } else {
            L0Decode::Fail
        }
    }
}

impl Encode for L0Hasher {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.shape.universe, 64);
        w.write(self.shape.levels as u64, 8);
        w.write(self.shape.rows as u64, 8);
        w.write(self.shape.buckets as u64, 32);
        w.write(self.fingerprint.base(), 61);
        self.level_hash.encode(w);
        for h in &self.bucket_hashes {
            h.encode(w);
        }
    }
}

impl Decode for L0Hasher {
    fn decode(r: &mut BitReader<'_>) -> Result<Self> {
        let universe = r.read(64)?;
        let levels = r.read(8)? as u32;
        let rows = r.read(8)? as u32;
        let buckets = r.read(32)? as u32;
        let fingerprint = Fingerprint::from_base(r.read(61)?);
        let level_hash = KWiseHash::decode(r)?;
        let count = if buckets == 1 { 0 } else { levels * rows };
        let bucket_hashes = (0..count).map(|_| KWiseHash::decode(r)).collect::<Result<_>>()?;
        Ok(L0Hasher { shape: L0Shape { universe, levels, rows, buckets }, level_hash, bucket_hashes, fingerprint })
    }
}

/// Samples a near-uniform coordinate from the support of a turnstile vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L0Sketch {
    seed: u64,
    hasher: L0Hasher,
    cells: Vec<OneSparseCell>,
}

impl L0Sketch {
    /// Sampler over `[universe]` with the default geometry.
    pub fn new<R: Rng + ?Sized>(universe: u64, rng: &mut R) -> Result<Self> {
        Self::with_shape(L0Shape::default_for(universe), rng.gen())
    }

    pub fn with_shape(shape: L0Shape, seed: u64) -> Result<Self> {
        let hasher = L0Hasher::new(shape, &mut ChaCha8Rng::seed_from_u64(seed))?;
        let cells = hasher.empty_cells();
        Ok(L0Sketch { seed, hasher, cells })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn shape(&self) -> L0Shape {
        self.hasher.shape()
    }

    pub fn cells(&self) -> &[OneSparseCell] {
        &self.cells
    }

    pub fn update(&mut self, id: u64, delta: i64) -> Result<()> {
        if id >= self.hasher.universe() {
            return Err(Error::OutOfDomain { value: id, domain: self.hasher.universe() });
        }
        self.hasher.update_cells(&mut self.cells, id, delta);
        Ok(())
    }

    pub fn decode(&self) -> L0Decode {
        self.hasher.decode_cells(&self.cells)
    }

    pub fn merge(&mut self, other: &L0Sketch) -> Result<()> {
        if self.seed != other.seed || self.hasher != other.hasher {
            return Err(Error::ShapeMismatch("L0 sketches built from different seeds or shapes".into()));
        }
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            a.merge(b);
        }
        Ok(())
    }
}

impl Encode for L0Sketch {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.seed, 64);
        self.hasher.encode(w);
        for c in &self.cells {
            c.encode(w);
        }
    }
}

impl Decode for L0Sketch {
    fn decode(r: &mut BitReader<'_>) -> Result<Self> {
        let seed = r.read(64)?;
        let hasher = L0Hasher::decode(r)?;
        let cells = (0..hasher.shape().cells()).map(|_| <OneSparseCell as Decode>::decode(r)).collect::<Result<_>>()?;
        Ok(L0Sketch { seed, hasher, cells })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sketch(universe: u64, seed: u64) -> L0Sketch {
        L0Sketch::new(universe, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn empty_is_empty() {
        assert_eq!(sketch(100, 0).decode(), L0Decode::Empty);
        let mut s = sketch(100, 1);
        s.update(4, 1).unwrap();
        s.update(4, -1).unwrap();
        assert_eq!(s.decode(), L0Decode::Empty);
    }

    #[test]
    fn single_coordinate() {
        let mut hits = 0;
        for seed in 0..1000 {
            let mut s = sketch(1 << 20, seed);
            s.update(12, 1).unwrap();
            if s.decode() == (L0Decode::Sample { id: 12, weight: 1 }) {
                hits += 1;
            }
        }
        assert!(hits >= 990, "{hits}");
    }

    #[test]
    fn rejects_out_of_universe() {
        let mut s = sketch(10, 0);
        assert!(s.update(10, 1).is_err());
    }

    #[test]
    fn level_tail_is_geometric() {
        let s = sketch(1 << 16, 5);
        let deep = (0..1u64 << 16).filter(|&i| s.hasher.level(i) >= 3).count();
        let rate = deep as f64 / (1u64 << 16) as f64;
        assert!((rate - 0.125).abs() < 0.01, "{rate}");
    }

    #[test]
    fn blob_roundtrip_and_merge_mismatch() {
        let mut a = sketch(1000, 7);
        a.update(3, 1).unwrap();
        a.update(999, -2).unwrap();
        assert_eq!(L0Sketch::from_blob(&a.to_blob()).unwrap(), a);
        let b = sketch(1000, 8);
        assert!(matches!(a.clone().merge(&b), Err(Error::ShapeMismatch(_))));
    }
}
