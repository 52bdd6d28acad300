use rand::Rng;

use crate::codec::{BitReader, BitWriter, Decode, Encode};
use crate::error::{Error, Result};
use crate::hashing::field::{self, P};

/// Evaluation point `r` of the polynomial fingerprint `Σ wᵢ·rⁱ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fingerprint {
    r: u64,
}

impl Fingerprint {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fingerprint { r: rng.gen_range(2..P) }
    }

    pub fn from_base(r: u64) -> Self {
        Fingerprint { r: r % P }
    }

    pub fn base(&self) -> u64 {
        self.r
    }

    /// `rⁱᵈ` in the field.
    #[inline]
    pub fn power(&self, id: u64) -> u64 {
        field::pow(self.r, id)
    }

    /// `delta·rⁱᵈ` in the field, the fingerprint contribution of one update.
    #[inline]
    pub fn term(&self, id: u64, delta: i64) -> u64 {
        scale(self.power(id), delta)
    }
}

#[inline]
fn scale(power: u64, delta: i64) -> u64 {
    match delta {
        1 => power,
        -1 => field::sub(0, power),
        d => field::mul(field::from_i64(d), power),
    }
}

/// Result of decoding a single cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellDecode {
    Zero,
    One { id: u64, weight: i64 },
    Multi,
}

/// Exact one-sparse detector: `(Σ wᵢ, Σ wᵢ·i, Σ wᵢ·rⁱ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OneSparseCell {
    pub count: i64,
    pub id_sum: i64,
    pub fingerprint: u64,
}

impl OneSparseCell {
    pub const BITS: u64 = 64 + 64 + 61;

    pub fn update(&mut self, id: u64, delta: i64, fp: &Fingerprint) {
        self.add(id, delta, fp.term(id, delta));
    }

    /// Update with a precomputed fingerprint term `delta·rⁱᵈ`.
    #[inline]
    pub fn add(&mut self, id: u64, delta: i64, term: u64) {
        self.count = self.count.wrapping_add(delta);
        self.id_sum = self.id_sum.wrapping_add(delta.wrapping_mul(id as i64));
        self.fingerprint = field::add(self.fingerprint, term);
    }

    pub fn merge(&mut self, other: &OneSparseCell) {
        self.count = self.count.wrapping_add(other.count);
        self.id_sum = self.id_sum.wrapping_add(other.id_sum);
        self.fingerprint = field::add(self.fingerprint, other.fingerprint);
    }

    pub fn subtract(&mut self, other: &OneSparseCell) {
        self.count = self.count.wrapping_sub(other.count);
        self.id_sum = self.id_sum.wrapping_sub(other.id_sum);
        self.fingerprint = field::sub(self.fingerprint, other.fingerprint);
    }

    pub fn is_zero(&self) -> bool {
        self.count == 0 && self.id_sum == 0 && self.fingerprint == 0
    }

    /// Classifies the cell. A vector with two or more nonzero coordinates is
    /// misreported as `One` with probability at most `universe / p`.
    pub fn decode(&self, universe: u64, fp: &Fingerprint) -> CellDecode {
        if self.is_zero() {
            return CellDecode::Zero;
        }
        let w = self.count;
        if w == 0 || self.id_sum % w != 0 {
            return CellDecode::Multi;
        }
        let id = self.id_sum / w;
        if id < 0 || id as u64 >= universe {
            return CellDecode::Multi;
        }
        let id = id as u64;
        if scale(fp.power(id), w) != self.fingerprint {
            return CellDecode::Multi;
        }
        CellDecode::One { id, weight: w }
    }
}

impl Encode for OneSparseCell {
    fn encode(&self, w: &mut BitWriter) {
        w.write_i64(self.count);
        w.write_i64(self.id_sum);
        w.write(self.fingerprint, 61);
    }
}

impl Decode for OneSparseCell {
    fn decode(r: &mut BitReader<'_>) -> Result<Self> {
        let count = r.read_i64()?;
        let id_sum = r.read_i64()?;
        let fingerprint = r.read(61)?;
        if fingerprint >= P {
            return Err(Error::Codec("fingerprint is not a field element".into()));
        }
        Ok(OneSparseCell { count, id_sum, fingerprint })
    }
}
