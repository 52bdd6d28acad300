use crate::codec::{width_for, BitWriter, Encode};
use crate::error::{Error, Result};

/// Edge counters of a vertex partition: one residue modulo `c` per unordered
/// group pair and one exact count per group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCounters {
    groups: usize,
    modulus: u16,
    pair: Vec<u16>,
    internal: Vec<i64>,
}

impl GroupCounters {
    pub fn new(groups: usize, modulus: u32) -> Result<Self> {
        if modulus < 2 || modulus > u16::MAX as u32 {
            return Err(Error::InvalidParameter(format!("counter modulus {modulus} outside [2, 65535]")));
        }
        Ok(GroupCounters {
            groups,
            modulus: modulus as u16,
            pair: vec![0; groups * groups.saturating_sub(1) / 2],
            internal: vec![0; groups],
        })
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn modulus(&self) -> u32 {
        self.modulus as u32
    }

    pub fn pair_count(&self) -> usize {
        self.pair.len()
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * self.groups - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Records `delta` on an edge between groups `gi` and `gj`.
    #[inline]
    pub fn add(&mut self, gi: usize, gj: usize, delta: i64) {
        if gi == gj {
            self.internal[gi] += delta;
        } else {
            let idx = self.index(gi, gj);
            let c = self.modulus as i64;
            self.pair[idx] = (self.pair[idx] as i64 + delta).rem_euclid(c) as u16;
        }
    }

    pub fn pair(&self, i: usize, j: usize) -> u32 {
        self.pair[self.index(i, j)] as u32
    }

    pub fn internal(&self, i: usize) -> i64 {
        self.internal[i]
    }

    pub fn pair_bits(&self) -> u64 {
        width_for(self.modulus as u64) as u64 * self.pair.len() as u64
    }

    pub fn internal_bits(&self) -> u64 {
        64 * self.internal.len() as u64
    }

    pub fn encode_pairs(&self, w: &mut BitWriter) {
        let width = width_for(self.modulus as u64);
        for &p in &self.pair {
            w.write(p as u64, width);
        }
    }

    pub fn encode_internal(&self, w: &mut BitWriter) {
        for &c in &self.internal {
            w.write_i64(c);
        }
    }
}

impl Encode for GroupCounters {
    fn encode(&self, w: &mut BitWriter) {
        self.encode_pairs(w);
        self.encode_internal(w);
    }
}
