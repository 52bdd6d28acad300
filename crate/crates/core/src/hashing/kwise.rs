use rand::Rng;

use super::field::{self, P};
use crate::codec::{BitReader, BitWriter, Decode, Encode};
use crate::error::{Error, Result};

/// A degree-`(k-1)` polynomial over `GF(2^61 - 1)`, reduced modulo `range`.
///
/// The final reduction has a bias of at most `range / p`, negligible for
/// every range used here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KWiseHash {
    /// `coefficients[i]` multiplies `x^i`.
    coefficients: Vec<u64>,
    domain: u64,
    range: u64,
}

/// Draws a uniformly random member of the k-wise independent family `[domain] → [range]`.
pub fn sample_kwise<R: Rng + ?Sized>(k: usize, domain: u64, range: u64, rng: &mut R) -> Result<KWiseHash> {
    check_shape(k, domain, range)?;
    let coefficients = (0..k).map(|_| rng.gen_range(0..P)).collect();
    Ok(KWiseHash { coefficients, domain, range })
}

fn check_shape(k: usize, domain: u64, range: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("independence degree k = {k} must be at least 2")));
    }
    if range == 0 {
        return Err(Error::InvalidParameter("hash range must be at least 1".into()));
    }
    if domain > P {
        return Err(Error::DomainTooLarge { domain });
    }
    Ok(())
}

impl KWiseHash {
    /// Builds a hash from explicit coefficients, lowest degree first.
    pub fn from_coefficients(coefficients: Vec<u64>, domain: u64, range: u64) -> Result<Self> {
        check_shape(coefficients.len(), domain, range)?;
        if let Some(c) = coefficients.iter().find(|&&c| c >= P) {
            return Err(Error::InvalidParameter(format!("coefficient {c} is not a field element")));
        }
        Ok(KWiseHash { coefficients, domain, range })
    }

    pub fn k(&self) -> usize {
        self.coefficients.len()
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.domain {
            return Err(Error::OutOfDomain { value: x, domain: self.domain });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the domain check, for hot loops whose inputs are known valid.
    #[inline]
    pub fn eval_unchecked(&self, x: u64) -> u64 {
        debug_assert!(x < self.domain);
        self.field_value(x) % self.range
    }

    /// The polynomial value in the field, before range reduction.
    #[inline]
    pub fn field_value(&self, x: u64) -> u64 {
        let x = x % P;
        let mut acc = 0u64;
        for &c in self.coefficients.iter().rev() {
            acc = field::add(field::mul(acc, x), c);
        }
        acc
    }
}

impl Encode for KWiseHash {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.coefficients.len() as u64, 16);
        w.write(self.domain, 64);
        w.write(self.range, 64);
        for &c in &self.coefficients {
            w.write(c, 61);
        }
    }
}

impl Decode for KWiseHash {
    fn decode(r: &mut BitReader<'_>) -> Result<Self> {
        let k = r.read(16)? as usize;
        let domain = r.read(64)?;
        let range = r.read(64)?;
        let coefficients = (0..k).map(|_| r.read(61)).collect::<Result<Vec<_>>>()?;
        KWiseHash::from_coefficients(coefficients, domain, range).map_err(|e| Error::Codec(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn range_one_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = sample_kwise(2, 16, 1, &mut rng).unwrap();
        assert!((0..16).all(|x| h.eval(x).unwrap() == 0));
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = sample_kwise(2, 16, 4, &mut rng).unwrap();
        assert_eq!(h.eval(3).unwrap(), h.eval(3).unwrap());
        let mut again = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(sample_kwise(2, 16, 4, &mut again).unwrap(), h);
    }

    #[test]
    fn explicit_polynomials() {
        let zero = KWiseHash::from_coefficients(vec![0, 0], 100, 7).unwrap();
        assert!((0..100).all(|x| zero.eval(x).unwrap() == 0));
        let identity = KWiseHash::from_coefficients(vec![0, 1], P, P).unwrap();
        for x in [0, 1, 5, 1 << 40, P - 1] {
            assert_eq!(identity.eval(x).unwrap(), x);
        }
    }

    #[test]
    fn errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(sample_kwise(1, 16, 4, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(matches!(sample_kwise(2, 16, 0, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(matches!(sample_kwise(2, P + 1, 4, &mut rng), Err(Error::DomainTooLarge { .. })));
        let h = sample_kwise(2, 16, 4, &mut rng).unwrap();
        assert!(matches!(h.eval(16), Err(Error::OutOfDomain { value: 16, domain: 16 })));
    }

    #[test]
    fn storage_is_k_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [2, 4, 40] {
            let h = sample_kwise(k, 1000, 10, &mut rng).unwrap();
            assert_eq!(h.coefficients().len(), k);
            assert_eq!(h.encoded_bits(), 16 + 128 + 61 * k as u64);
            let back = KWiseHash::from_blob(&h.to_blob()).unwrap();
            assert_eq!(back, h);
        }
    }

    #[test]
    fn bucket_frequencies_near_uniform() {
        let mut counts = [0u64; 4];
        let seeds = 10_000u64;
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = sample_kwise(2, 16, 4, &mut rng).unwrap();
            for x in 0..16 {
                counts[h.eval(x).unwrap() as usize] += 1;
            }
        }
        let total = (seeds * 16) as f64;
        for c in counts {
            assert!((c as f64 / total - 0.25).abs() <= 0.02 * 0.25, "{counts:?}");
        }
    }

    #[test]
    fn pairwise_collision_rate() {
        let seeds = 100_000u64;
        let mut collisions = 0u64;
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = sample_kwise(2, 32, 32, &mut rng).unwrap();
            let x = seed % 32;
            let y = (x + 1 + seed / 32 % 31) % 32;
            if h.eval(x).unwrap() == h.eval(y).unwrap() {
                collisions += 1;
            }
        }
        let rate = collisions as f64 / seeds as f64;
        assert!((rate - 1.0 / 32.0).abs() <= 0.1 / 32.0, "rate {rate}");
    }
}
