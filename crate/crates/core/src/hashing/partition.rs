use rand::seq::SliceRandom;
use rand::Rng;

use super::kwise::{sample_kwise, KWiseHash};
use crate::codec::{width_for, BitReader, BitWriter, Decode, Encode};
use crate::error::{Error, Result};
use crate::util::{ceil_div, log_n};

/// Draw budget for hash-mode rejection sampling.
pub const PARTITION_MAX_ATTEMPTS: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
    Permutation,
    Hash,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Layout {
    /// `order[i]` is the vertex at position `i`; positions are chunked into groups of `α`.
    Permutation(Vec<u32>),
    Hash(KWiseHash),
}

/// A random partition of `[n]` into vertex groups of size about `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    alpha: usize,
    num_groups: usize,
    layout: Layout,
    group_of: Vec<u32>,
    attempts: u32,
    concentrated: bool,
}

/// Partitions `[n]` into groups of size about `α`.
///
/// With `α < ⌈log₂ n⌉²` a uniform permutation is cut into `⌊n/α⌋` chunks of `α`
/// vertices, the remainder joining the last chunk. Otherwise a
/// `(10⌈log₂ n⌉)`-wise hash maps vertices into `⌈n/α⌉` groups. Hash draws are
/// rejected until every group lies within 10% of `n/⌈n/α⌉`; if the budget runs
/// out, the first draw with all sizes in `[α/2, 2α]` is kept and the partition is
/// reported as not concentrated.
pub fn random_partition<R: Rng + ?Sized>(n: usize, alpha: usize, rng: &mut R) -> Result<Partition> {
    if n == 0 || alpha == 0 || alpha > n {
        return Err(Error::InvalidParameter(format!("partition needs 1 <= alpha <= n, got n = {n}, alpha = {alpha}")));
    }
    let log = log_n(n) as usize;
    if alpha < log * log {
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.shuffle(rng);
        return Ok(Partition::from_permutation(n, alpha, order));
    }

    let k = ceil_div(n as u64, alpha as u64) as usize;
    let mean = n as f64 / k as f64;
    let tight = (mean * 0.9, mean * 1.1);
    let loose = (alpha as f64 / 2.0, 2.0 * alpha as f64);
    let mut fallback = None;
    for attempt in 1..=PARTITION_MAX_ATTEMPTS {
        let hash = sample_kwise(10 * log, n as u64, k as u64, rng)?;
        let group_of: Vec<u32> = (0..n as u64).map(|v| hash.eval_unchecked(v) as u32).collect();
        let mut sizes = vec![0usize; k];
        for &g in &group_of {
            sizes[g as usize] += 1;
        }
        let within = |(lo, hi): (f64, f64)| sizes.iter().all(|&s| s as f64 >= lo && s as f64 <= hi);
        let build = |hash, group_of, concentrated| Partition {
            n,
            alpha,
            num_groups: k,
            layout: Layout::Hash(hash),
            group_of,
            attempts: attempt,
            concentrated,
        };
        if within(tight) && within(loose) {
            return Ok(build(hash, group_of, true));
        }
        if fallback.is_none() && within(loose) {
            fallback = Some(build(hash, group_of, false));
        }
    }
    match fallback {
        Some(mut p) => {
            p.attempts = PARTITION_MAX_ATTEMPTS;
            Ok(p)
        }
        None => Err(Error::PartitionRetriesExhausted { attempts: PARTITION_MAX_ATTEMPTS }),
    }
}

impl Partition {
    fn from_permutation(n: usize, alpha: usize, order: Vec<u32>) -> Self {
        let num_groups = (n / alpha).max(1);
        let mut group_of = vec![0u32; n];
        for (pos, &v) in order.iter().enumerate() {
            group_of[v as usize] = (pos / alpha).min(num_groups - 1) as u32;
        }
        Partition {
            n,
            alpha,
            num_groups,
            layout: Layout::Permutation(order),
            group_of,
            attempts: 1,
            concentrated: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn mode(&self) -> PartitionMode {
        match self.layout {
            Layout::Permutation(_) => PartitionMode::Permutation,
            Layout::Hash(_) => PartitionMode::Hash,
        }
    }

    /// Number of hash draws consumed (1 in permutation mode).
    pub fn attempts(&self) -> u32 {
        self.attempts
    }

    /// Whether every group lies within 10% of the mean group size.
    pub fn is_concentrated(&self) -> bool {
        self.concentrated
    }

    #[inline]
    pub fn group_of(&self, v: usize) -> usize {
        self.group_of[v] as usize
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups];
        for &g in &self.group_of {
            sizes[g as usize] += 1;
        }
        sizes
    }

    /// Vertices of each group, in increasing order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_groups];
        for (v, &g) in self.group_of.iter().enumerate() {
            groups[g as usize].push(v);
        }
        groups
    }
}

impl Encode for Partition {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.mode() as u64, 8);
        w.write(self.n as u64, 64);
        w.write(self.alpha as u64, 64);
        w.write(self.num_groups as u64, 64);
        match &self.layout {
            Layout::Permutation(order) => {
                let width = width_for(self.n as u64);
                for &v in order {
                    w.write(v as u64, width);
                }
            }
            Layout::Hash(h) => h.encode(w),
        }
    }
}

impl Decode for Partition {
    fn decode(r: &mut BitReader<'_>) -> Result<Self> {
        let tag = r.read(8)?;
        let n = r.read(64)? as usize;
        let alpha = r.read(64)? as usize;
        let num_groups = r.read(64)? as usize;
        if n == 0 || alpha == 0 || alpha > n || n > u32::MAX as usize {
            return Err(Error::Codec("bad partition header".into()));
        }
        match tag {
            0 => {
                let width = width_for(n as u64);
                let mut order = Vec::with_capacity(n);
                let mut seen = vec![false; n];
                for _ in 0..n {
                    let v = r.read(width)? as usize;
                    if v >= n || std::mem::replace(&mut seen[v], true) {
                        return Err(Error::Codec("permutation is not a bijection".into()));
                    }
                    order.push(v as u32);
                }
                let p = Partition::from_permutation(n, alpha, order);
                if p.num_groups != num_groups {
                    return Err(Error::Codec("group count mismatch".into()));
                }
                Ok(p)
            }
            1 => {
                let hash = KWiseHash::decode(r)?;
                if hash.domain() != n as u64 || hash.range() != num_groups as u64 {
                    return Err(Error::Codec("partition hash shape mismatch".into()));
                }
                let group_of = (0..n as u64).map(|v| hash.eval_unchecked(v) as u32).collect();
                Ok(Partition {
                    n,
                    alpha,
                    num_groups,
                    layout: Layout::Hash(hash),
                    group_of,
                    attempts: 1,
                    concentrated: true,
                })
            }
            t => Err(Error::Codec(format!("unknown partition mode tag {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = random_partition(8, 8, &mut rng).unwrap();
        assert_eq!(p.mode(), PartitionMode::Permutation);
        assert_eq!(p.groups(), vec![(0..8).collect::<Vec<_>>()]);
    }

    #[test]
    fn chunks_of_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_partition(8, 2, &mut rng).unwrap();
        assert_eq!(p.mode(), PartitionMode::Permutation);
        assert_eq!(p.group_sizes(), vec![2; 4]);
    }

    #[test]
    fn remainder_folds_into_last_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_partition(23, 5, &mut rng).unwrap();
        assert_eq!(p.group_sizes(), vec![5, 5, 5, 8]);
    }

    #[test]
    fn hash_mode_sizes() {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_partition(1024, 100, &mut rng).unwrap();
            assert_eq!(p.mode(), PartitionMode::Hash);
            assert_eq!(p.num_groups(), 11);
            assert_eq!(p.group_sizes().iter().sum::<usize>(), 1024);
            assert!(p.group_sizes().iter().all(|&s| (50..=200).contains(&s)));
        }
    }

    #[test]
    fn roundtrip_both_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (n, alpha) in [(50, 3), (1024, 100)] {
            let p = random_partition(n, alpha, &mut rng).unwrap();
            let back = Partition::from_blob(&p.to_blob()).unwrap();
            assert_eq!(back.groups(), p.groups());
            assert_eq!(back.mode(), p.mode());
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_partition(8, 0, &mut rng).is_err());
        assert!(random_partition(8, 9, &mut rng).is_err());
    }
}
