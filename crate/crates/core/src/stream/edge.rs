use crate::error::{Error, Result};

/// Index of an unordered vertex pair `{u, v}` in row-major order over `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(u64);

impl EdgeId {
    pub const fn new(index: u64) -> Self {
        EdgeId(index)
    }

    pub const fn index(self) -> u64 {
        self.0
    }
}

/// `n choose 2`, the size of the edge universe.
pub fn edge_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

fn row_start(u: u64, n: u64) -> u64 {
    u * n - u * (u + 1) / 2
}

pub fn encode_edge(u: usize, v: usize, n: usize) -> Result<EdgeId> {
    if u == v || u >= n || v >= n {
        return Err(Error::InvalidVertex { u, v, n });
    }
    let (lo, hi) = if u < v { (u as u64, v as u64) } else { (v as u64, u as u64) };
    Ok(EdgeId(row_start(lo, n as u64) + (hi - lo - 1)))
}

pub fn decode_edge(id: EdgeId, n: usize) -> Result<(usize, usize)> {
    let m = edge_count(n);
    if id.0 >= m {
        return Err(Error::EdgeOutOfRange { index: id.0, n });
    }
    let nn = n as u64;
    // Largest u with row_start(u) <= id, from the quadratic, then corrected
    // for floating-point error.
    let b = (2 * nn - 1) as f64;
    let disc = (b * b - 8.0 * id.0 as f64).max(0.0);
    let mut u = ((b - disc.sqrt()) / 2.0).floor().max(0.0) as u64;
    u = u.min(nn - 2);
    while u > 0 && row_start(u, nn) > id.0 {
        u -= 1;
    }
    while u + 1 < nn - 1 && row_start(u + 1, nn) <= id.0 {
        u += 1;
    }
    let v = u + 1 + (id.0 - row_start(u, nn));
    Ok((u as usize, v as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates all pairs in row-major order.
    fn enumerate_pairs(n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                out.push((u, v));
            }
        }
        out
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_edge(0, 1, 5).unwrap(), EdgeId(0));
        assert_eq!(encode_edge(3, 4, 5).unwrap(), EdgeId(9));
        let oracle = enumerate_pairs(5).iter().position(|&p| p == (1, 3)).unwrap() as u64;
        assert_eq!(oracle, 5);
        assert_eq!(encode_edge(1, 3, 5).unwrap(), EdgeId(oracle));
        assert_eq!(encode_edge(3, 1, 5).unwrap(), EdgeId(oracle));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_edge(EdgeId(0), 5).unwrap(), (0, 1));
        assert_eq!(decode_edge(EdgeId(9), 5).unwrap(), (3, 4));
        assert_eq!(decode_edge(EdgeId(5), 5).unwrap(), enumerate_pairs(5)[5]);
        assert_eq!(decode_edge(EdgeId(10), 5), Err(Error::EdgeOutOfRange { index: 10, n: 5 }));
    }

    #[test]
    fn invalid_vertices() {
        assert!(encode_edge(2, 2, 5).is_err());
        assert!(encode_edge(0, 5, 5).is_err());
        assert!(decode_edge(EdgeId(0), 1).is_err());
    }

    #[test]
    fn exhaustive_roundtrip_up_to_64() {
        for n in 2..=64 {
            for (i, (u, v)) in enumerate_pairs(n).into_iter().enumerate() {
                let id = encode_edge(v, u, n).unwrap();
                assert_eq!(id.index(), i as u64);
                assert_eq!(decode_edge(id, n).unwrap(), (u, v));
            }
        }
    }

    #[test]
    fn large_n_roundtrip() {
        let n = 1 << 20;
        for &(u, v) in &[(0, 1), (0, n - 1), (n - 2, n - 1), (12345, 999_999), (524_287, 524_288)] {
            let id = encode_edge(u, v, n).unwrap();
            assert_eq!(decode_edge(id, n).unwrap(), (u, v));
        }
    }
}
