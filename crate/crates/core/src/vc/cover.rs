use serde::Serialize;

use crate::codec::{width_for, BitReader, BitWriter, Decode, Encode};
use crate::error::{Error, Result};
use crate::hashing::Partition;

/// Which branch produced a cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    MatchCase,
    GroupCover,
    SmallOptExact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverEncoding {
    /// Sorted vertex list.
    Explicit(Vec<usize>),
    /// A partition plus one bit per group.
    Implicit { partition: Partition, groups: Vec<bool> },
}

/// A vertex cover, stored either as a vertex list or as chosen vertex groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    n: usize,
    encoding: CoverEncoding,
    provenance: Provenance,
}

impl CoverResult {
    pub fn explicit(n: usize, mut vertices: Vec<usize>, provenance: Provenance) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        CoverResult { n, encoding: CoverEncoding::Explicit(vertices), provenance }
    }

    pub fn implicit(partition: Partition, groups: Vec<bool>, provenance: Provenance) -> Result<Self> {
        if groups.len() != partition.num_groups() {
            return Err(Error::InvalidParameter("group bit vector length differs from group count".into()));
        }
        Ok(CoverResult { n: partition.n(), encoding: CoverEncoding::Implicit { partition, groups }, provenance })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn encoding(&self) -> &CoverEncoding {
        &self.encoding
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self.encoding, CoverEncoding::Implicit { .. })
    }

    pub fn contains(&self, v: usize) -> bool {
        match &self.encoding {
            CoverEncoding::Explicit(vs) => vs.binary_search(&v).is_ok(),
            CoverEncoding::Implicit { partition, groups } => v < self.n && groups[partition.group_of(v)],
        }
    }

    pub fn vertices(&self) -> Vec<usize> {
        match &self.encoding {
            CoverEncoding::Explicit(vs) => vs.clone(),
            CoverEncoding::Implicit { .. } => (0..self.n).filter(|&v| self.contains(v)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        match &self.encoding {
            CoverEncoding::Explicit(vs) => vs.len(),
            CoverEncoding::Implicit { partition, groups } => partition
                .group_sizes()
                .iter()
                .zip(groups)
                .filter(|(_, &chosen)| chosen)
                .map(|(s, _)| s)
                .sum(),
        }
    }

    /// The same cover as an explicit vertex list.
    pub fn to_explicit(&self) -> CoverResult {
        CoverResult::explicit(self.n, self.vertices(), self.provenance)
    }

    pub fn summary(&self) -> CoverSummary {
        CoverSummary {
            provenance: self.provenance,
            cover_size: self.size(),
            encoding: if self.is_implicit() { "implicit" } else { "explicit" },
            groups: match &self.encoding {
                CoverEncoding::Implicit { groups, .. } => {
                    Some(groups.iter().enumerate().filter(|(_, &g)| g).map(|(i, _)| i).collect())
                }
                CoverEncoding::Explicit(_) => None,
            },
        }
    }
}

/// JSON view of a cover.
#[derive(Debug, Clone, Serialize)]
pub struct CoverSummary {
    pub provenance: Provenance,
    pub cover_size: usize,
    pub encoding: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<usize>>,
}

impl Encode for CoverResult {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.n as u64, 64);
        w.write(self.provenance as u64, 8);
        match &self.encoding {
            CoverEncoding::Explicit(vs) => {
                w.write(0, 8);
                w.write(vs.len() as u64, 64);
                let width = width_for(self.n as u64);
                for &v in vs {
                    w.write(v as u64, width);
                }
            }
            CoverEncoding::Implicit { partition, groups } => {
                w.write(1, 8);
                partition.encode(w);
                for &g in groups {
                    w.write_bool(g);
                }
            }
        }
    }
}

impl Decode for CoverResult {
    fn decode(r: &mut BitReader<'_>) -> Result<Self> {
        let n = r.read(64)? as usize;
        let provenance = match r.read(8)? {
            0 => Provenance::MatchCase,
            1 => Provenance::GroupCover,
            2 => Provenance::SmallOptExact,
            t => return Err(Error::Codec(format!("unknown provenance tag {t}"))),
        };
        match r.read(8)? {
            0 => {
                let len = r.read(64)? as usize;
                let width = width_for(n as u64);
                let vs = (0..len).map(|_| r.read(width).map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
                if vs.iter().any(|&v| v >= n) {
                    return Err(Error::Codec("cover vertex out of range".into()));
                }
                Ok(CoverResult::explicit(n, vs, provenance))
            }
            1 => {
                let partition = Partition::decode(r)?;
                let groups = (0..partition.num_groups()).map(|_| r.read_bool()).collect::<Result<_>>()?;
                CoverResult::implicit(partition, groups, provenance).map_err(|e| Error::Codec(e.to_string()))
            }
            t => Err(Error::Codec(format!("unknown cover encoding tag {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::random_partition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn explicit_all() {
        let c = CoverResult::explicit(5, (0..5).collect(), Provenance::MatchCase);
        assert!((0..5).all(|v| c.contains(v)));
        assert_eq!(c.size(), 5);
    }

    #[test]
    fn implicit_zero_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = random_partition(64, 4, &mut rng).unwrap();
        let g = p.num_groups();
        let c = CoverResult::implicit(p, vec![false; g], Provenance::GroupCover).unwrap();
        assert!((0..64).all(|v| !c.contains(v)));
        assert_eq!(c.size(), 0);
    }

    #[test]
    fn implicit_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let n = rng.gen_range(2..300);
            let alpha = rng.gen_range(1..=n);
            let p = random_partition(n, alpha, &mut rng).unwrap();
            let bits: Vec<bool> = (0..p.num_groups()).map(|_| rng.gen()).collect();
            let c = CoverResult::implicit(p, bits, Provenance::GroupCover).unwrap();
            let e = c.to_explicit();
            assert!((0..n).all(|v| c.contains(v) == e.contains(v)));
            assert_eq!(c.size(), e.size());
            let back = CoverResult::from_blob(&c.to_blob()).unwrap();
            assert_eq!(back.vertices(), c.vertices());
        }
    }
}
