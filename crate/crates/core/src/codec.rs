//! Bit-packed binary blobs for sketch state.
//!
//! Every sketch writes a fixed-width layout (version, seed, shape, hash
//! coefficients, cells), so the length of a blob is a function of the sketch
//! shape only and two blobs are equal exactly when the states are equal.

use crate::error::{Error, Result};

/// Format version written at the head of every top-level blob.
pub const BLOB_VERSION: u8 = 1;

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `width` bits of `value`, least significant first.
    pub fn write(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || value >> width == 0, "value {value} wider than {width} bits");
        for i in 0..width {
            let bit = (value >> i) & 1;
            let byte = (self.bits / 8) as usize;
            if byte == self.bytes.len() {
                self.bytes.push(0);
            }
            self.bytes[byte] |= (bit as u8) << (self.bits % 8);
            self.bits += 1;
        }
    }

    pub fn write_i64(&mut self, value: i64) {
        self.write(value as u64, 64);
    }

    pub fn write_bool(&mut self, value: bool) {
        self.write(value as u64, 1);
    }

    pub fn bit_len(&self) -> u64 {
        self.bits
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    pub fn read(&mut self, width: u32) -> Result<u64> {
        let mut value = 0u64;
        for i in 0..width {
            let byte = (self.pos / 8) as usize;
            let b = *self.bytes.get(byte).ok_or_else(|| Error::Codec("unexpected end of blob".into()))?;
            value |= (((b >> (self.pos % 8)) & 1) as u64) << i;
            self.pos += 1;
        }
        Ok(value)
    }

    pub fn read_i64(&mut self) -> Result<i64> {
        Ok(self.read(64)? as i64)
    }

    pub fn read_bool(&mut self) -> Result<bool> {
        Ok(self.read(1)? == 1)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }
}

/// Types with a fixed-width serialized state.
pub trait Encode {
    fn encode(&self, w: &mut BitWriter);

    /// Serialized size in bits.
    fn encoded_bits(&self) -> u64 {
        let mut w = BitWriter::new();
        self.encode(&mut w);
        w.bit_len()
    }

    /// Versioned blob: one version byte followed by the state.
    fn to_blob(&self) -> Vec<u8> {
        let mut w = BitWriter::new();
        w.write(BLOB_VERSION as u64, 8);
        self.encode(&mut w);
        w.into_bytes()
    }
}

pub trait Decode: Sized {
    fn decode(r: &mut BitReader<'_>) -> Result<Self>;

    fn from_blob(bytes: &[u8]) -> Result<Self> {
        let mut r = BitReader::new(bytes);
        let version = r.read(8)? as u8;
        if version != BLOB_VERSION {
            return Err(Error::Codec(format!("unsupported blob version {version}")));
        }
        Self::decode(&mut r)
    }
}

/// Bits needed to write any value in `0..count`.
pub fn width_for(count: u64) -> u32 {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_widths_roundtrip() {
        let mut w = BitWriter::new();
        w.write(5, 3);
        w.write(0, 0);
        w.write(u64::MAX, 64);
        w.write_i64(-42);
        w.write_bool(true);
        assert_eq!(w.bit_len(), 3 + 64 + 64 + 1);
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes);
        assert_eq!(r.read(3).unwrap(), 5);
        assert_eq!(r.read(0).unwrap(), 0);
        assert_eq!(r.read(64).unwrap(), u64::MAX);
        assert_eq!(r.read_i64().unwrap(), -42);
        assert!(r.read_bool().unwrap());
        assert!(r.read(8).is_err());
    }

    #[test]
    fn widths() {
        assert_eq!(width_for(0), 0);
        assert_eq!(width_for(1), 0);
        assert_eq!(width_for(2), 1);
        assert_eq!(width_for(30), 5);
        assert_eq!(width_for(32), 5);
        assert_eq!(width_for(33), 6);
    }
}
