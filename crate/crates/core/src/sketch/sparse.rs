use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cell::{CellDecode, Fingerprint, OneSparseCell};
use crate::codec::{BitReader, BitWriter, Decode, Encode};
use crate::error::{Error, Result};
use crate::hashing::{sample_kwise, KWiseHash};

/// Hash rows of a sparse recovery sketch.
pub const SR_ROWS: usize = 3;

/// Outcome of peeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SparseDecode {
    /// The full support with weights, ordered by coordinate.
    Recovered(Vec<(u64, i64)>),
    Fail,
}

impl SparseDecode {
    pub fn recovered(self) -> Option<Vec<(u64, i64)>> {
        match self {
            SparseDecode::Recovered(v) => Some(v),
            SparseDecode::Fail => None,
        }
    }
}

/// Invertible sketch recovering any vector with at most `capacity / 2` nonzero
/// coordinates, with `SR_ROWS` rows of `capacity` cells each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseRecoverySketch {
    seed: u64,
    universe: u64,
    capacity: usize,
    hashes: Vec<KWiseHash>,
    fingerprint: Fingerprint,
    cells: Vec<OneSparseCell>,
}

impl SparseRecoverySketch {
    pub fn new<R: Rng + ?Sized>(universe: u64, capacity: usize, rng: &mut R) -> Result<Self> {
        Self::from_seed(universe, capacity, rng.gen())
    }

    pub fn from_seed(universe: u64, capacity: usize, seed: u64) -> Result<Self> {
        if universe == 0 || capacity == 0 {
            return Err(Error::InvalidParameter("sparse recovery needs a nonempty universe and capacity".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fingerprint = Fingerprint::sample(&mut rng);
        let hashes = (0..SR_ROWS)
            .map(|_| sample_kwise(2, universe, capacity as u64, &mut rng))
            .collect::<Result<_>>()?;
        let cells = vec![OneSparseCell::default(); SR_ROWS * capacity];
        Ok(SparseRecoverySketch { seed, universe, capacity, hashes, fingerprint, cells })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn cells(&self) -> &[OneSparseCell] {
        &self.cells
    }

    #[inline]
    fn slot(&self, row: usize, id: u64) -> usize {
        row * self.capacity + self.hashes[row].eval_unchecked(id) as usize
    }

    pub fn update(&mut self, id: u64, delta: i64) -> Result<()> {
        if id >= self.universe {
            return Err(Error::OutOfDomain { value: id, domain: self.universe });
        }
        self.update_unchecked(id, delta);
        Ok(())
    }

    #[inline]
    pub fn update_unchecked(&mut self, id: u64, delta: i64) {
        let term = self.fingerprint.term(id, delta);
        for row in 0..SR_ROWS {
            let slot = self.slot(row, id);
            self.cells[slot].add(id, delta, term);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(OneSparseCell::is_zero)
    }

    /// Peels one-sparse cells until the residue is zero (success) or no cell
    /// decodes (failure). Every recovered coordinate passed a fingerprint check.
    pub fn decode(&self) -> SparseDecode {
        let mut cells = self.cells.clone();
        let mut found: BTreeMap<u64, i64> = BTreeMap::new();
        let mut stack: Vec<usize> = (0..cells.len()).collect();
        while let Some(slot) = stack.pop() {
            let CellDecode::One { id, weight } = cells[slot].decode(self.universe, &self.fingerprint) else {
                continue;
            };
            if self.slot(slot / self.capacity, id) != slot {
                continue;
            }
            let term = self.fingerprint.term(id, -weight);
            for row in 0..SR_ROWS {
                let s = self.slot(row, id);
                cells[s].add(id, -weight, term);
                stack.push(s);
            }
            let w = found.entry(id).or_insert(0);
            *w += weight;
            if *w == 0 {
                found.remove(&id);
            }
        }
        if cells.iter().all(OneSparseCell::is_zero) {
            SparseDecode::Recovered(found.into_iter().collect())
        } else {
            SparseDecode::Fail
        }
    }

    pub fn merge(&mut self, other: &SparseRecoverySketch) -> Result<()> {
        if self.seed != other.seed || self.universe != other.universe || self.capacity != other.capacity {
            return Err(Error::ShapeMismatch("sparse recovery sketches built from different seeds or shapes".into()));
        }
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            a.merge(b);
        }
        Ok(())
    }
}

impl Encode for SparseRecoverySketch {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.seed, 64);
        w.write(self.universe, 64);
        w.write(self.capacity as u64, 64);
        w.write(self.fingerprint.base(), 61);
        for h in &self.hashes {
            h.encode(w);
        }
        for c in &self.cells {
            c.encode(w);
        }
    }
}

impl Decode for SparseRecoverySketch {
    fn decode(r: &mut BitReader<'_>) -> Result<Self> {
        let seed = r.read(64)?;
        let universe = r.read(64)?;
        let capacity = r.read(64)? as usize;
        let fingerprint = Fingerprint::from_base(r.read(61)?);
        let hashes: Vec<KWiseHash> = (0..SR_ROWS).map(|_| KWiseHash::decode(r)).collect::<Result<_>>()?;
        if capacity == 0 || hashes.iter().any(|h| h.domain() != universe || h.range() != capacity as u64) {
            return Err(Error::Codec("sparse recovery hash shape mismatch".into()));
        }
        let cells = (0..SR_ROWS * capacity).map(|_| <OneSparseCell as Decode>::decode(r)).collect::<Result<_>>()?;
        Ok(SparseRecoverySketch { seed, universe, capacity, hashes, fingerprint, cells })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sketch(universe: u64, capacity: usize, seed: u64) -> SparseRecoverySketch {
        SparseRecoverySketch::from_seed(universe, capacity, seed).unwrap()
    }

    #[test]
    fn zero_vector() {
        assert_eq!(sketch(100, 16, 0).decode(), SparseDecode::Recovered(vec![]));
    }

    #[test]
    fn small_support_recovered() {
        let mut ok = 0;
        for seed in 0..1000 {
            let mut s = sketch(10_000, 16, seed);
            s.update(5, 1).unwrap();
            s.update(77, 2).unwrap();
            s.update(9_999, -1).unwrap();
            if s.decode() == SparseDecode::Recovered(vec![(5, 1), (77, 2), (9_999, -1)]) {
                ok += 1;
            }
        }
        assert!(ok >= 990, "{ok}");
    }

    #[test]
    fn overfull_fails_cleanly() {
        let mut fails = 0;
        for seed in 0..1000 {
            let mut s = sketch(10_000, 16, seed);
            for i in 0..100 {
                s.update(i * 37, 1).unwrap();
            }
            match s.decode() {
                SparseDecode::Fail => fails += 1,
                SparseDecode::Recovered(v) => {
                    assert_eq!(v, (0..100).map(|i| (i * 37, 1)).collect::<Vec<_>>());
                }
            }
        }
        assert!(fails >= 990, "{fails}");
    }

    #[test]
    fn blob_roundtrip() {
        let mut s = sketch(500, 8, 3);
        s.update(42, 1).unwrap();
        assert_eq!(SparseRecoverySketch::from_blob(&s.to_blob()).unwrap(), s);
        let other = sketch(500, 8, 4);
        assert!(s.merge(&other).is_err());
    }
}
