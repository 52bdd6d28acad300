//! Gap test on a neighbourhood size: given `T` with `|T| ≤ a`, answer `Yes`
//! when `|N(S) \ T| ≥ b` and `No` when `|N(S) \ T| ≤ b/2`.
//!
//! Each repetition keeps the vector `c_x = |N(x) ∩ S|` restricted to vertices
//! sampled at rate `p = min(1, λ/b)` in a sparse recovery sketch. A repetition
//! votes `Yes` when at least `¾·p·b` recovered vertices lie outside `T`, or
//! when its sketch is too full to decode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{BitWriter, Encode};
use crate::error::{Error, Result};
use crate::hashing::{sample_kwise, KWiseHash};
use crate::ne_sampler::Membership;
use crate::sketch::{SparseDecode, SparseRecoverySketch};
use crate::stream::{decode_edge, StreamSink, StreamUpdate};
use crate::util::log_n;

/// Expected number of sampled vertices when `|N(S) \ T| = b`.
pub const DEFAULT_LAMBDA: u64 = 8;

const SAMPLE_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Answer {
    Yes,
    No,
}

/// Per-query vote breakdown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryReport {
    pub answer: Answer,
    pub yes_votes: usize,
    pub decode_failures: usize,
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Repetition {
    sampler: Option<KWiseHash>,
    sketch: SparseRecoverySketch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodTester {
    seed: u64,
    n: usize,
    a: usize,
    b: usize,
    /// Sampling threshold out of `2^SAMPLE_BITS`; `None` keeps every vertex.
    threshold: Option<u64>,
    set: Option<Membership>,
    reps: Vec<Repetition>,
}

impl NeighborhoodTester {
    pub fn new<R: Rng + ?Sized>(s: &[usize], a: usize, b: usize, n: usize, rng: &mut R) -> Result<Self> {
        Self::build(n, a, b, Some(Membership::from_vertices(n, s)?), DEFAULT_LAMBDA, None, rng.gen())
    }

    /// A tester whose set is tracked by the caller, fed through [`update_incident`](Self::update_incident).
    pub fn detached(n: usize, a: usize, b: usize, seed: u64) -> Result<Self> {
        Self::build(n, a, b, None, DEFAULT_LAMBDA, None, seed)
    }

    /// Full constructor: `lambda` sets the sampling rate and `reps` overrides the repetition count.
    pub fn build(
        n: usize,
        a: usize,
        b: usize,
        set: Option<Membership>,
        lambda: u64,
        reps: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        if b < 2 || a < b {
            return Err(Error::InvalidParameter(format!("tester needs a >= b >= 2, got a = {a}, b = {b}")));
        }
        if n < 2 || lambda == 0 {
            return Err(Error::InvalidParameter("tester needs n >= 2 and lambda >= 1".into()));
        }
        let full = lambda >= b as u64;
        let threshold = (!full).then(|| (lambda << SAMPLE_BITS) / b as u64);
        let p = threshold.map_or(1.0, |t| t as f64 / (1u64 << SAMPLE_BITS) as f64);
        let log = log_n(n) as usize;
        let count = reps.unwrap_or(if full { 1 } else { (8.0 * (n as f64).ln()).ceil() as usize }).max(1);
        let capacity = 2 * ((p * (a + b) as f64).ceil() as usize + log);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reps = (0..count)
            .map(|_| {
                let sampler = if full { None } else { Some(sample_kwise(2, n as u64, 1 << SAMPLE_BITS, &mut rng)?) };
                let sketch = SparseRecoverySketch::from_seed(n as u64, capacity, rng.gen())?;
                Ok(Repetition { sampler, sketch })
            })
            .collect::<Result<_>>()?;
        Ok(NeighborhoodTester { seed, n, a, b, threshold, set, reps })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn repetitions(&self) -> usize {
        self.reps.len()
    }

    pub fn capacity(&self) -> usize {
        self.reps[0].sketch.capacity()
    }

    /// Sampling rate `p`.
    pub fn rate(&self) -> f64 {
        self.threshold.map_or(1.0, |t| t as f64 / (1u64 << SAMPLE_BITS) as f64)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.set.as_ref().expect("tester set is tracked by the caller").contains(v)
    }

    /// Records `delta` on edge `{member, other}` where `member ∈ S`.
    #[inline]
    pub fn update_incident(&mut self, other: usize, delta: i64) {
        let x = other as u64;
        for r in &mut self.reps {
            let keep = match (&r.sampler, self.threshold) {
                (Some(h), Some(t)) => h.eval_unchecked(x) < t,
                _ => true,
            };
            if keep {
                r.sketch.update_unchecked(x, delta);
            }
        }
    }

    pub fn update_edge(&mut self, a: usize, b: usize, delta: i64) {
        if self.contains(a) {
            self.update_incident(b, delta);
        }
        if self.contains(b) {
            self.update_incident(a, delta);
        }
    }

    pub fn query(&self, t: &[usize]) -> Answer {
        self.query_report(t).answer
    }

    pub fn query_report(&self, t: &[usize]) -> QueryReport {
        let mut excluded = vec![false; self.n];
        for &v in t {
            if v < self.n {
                excluded[v] = true;
            }
        }
        let target = 0.75 * self.rate() * self.b as f64;
        let mut yes_votes = 0;
        let mut decode_failures = 0;
        for r in &self.reps {
            match r.sketch.decode() {
                SparseDecode::Recovered(support) => {
                    let k = support.iter().filter(|&&(x, w)| w > 0 && !excluded[x as usize]).count();
                    if k as f64 >= target {
                        yes_votes += 1;
                    }
                }
                SparseDecode::Fail => {
                    decode_failures += 1;
                    yes_votes += 1;
                }
            }
        }
        let answer = if 2 * yes_votes > self.reps.len() { Answer::Yes } else { Answer::No };
        QueryReport { answer, yes_votes, decode_failures, repetitions: self.reps.len() }
    }

    pub fn merge(&mut self, other: &NeighborhoodTester) -> Result<()> {
        if self.seed != other.seed || self.n != other.n || self.a != other.a || self.b != other.b || self.set != other.set {
            return Err(Error::ShapeMismatch("testers built from different seeds or parameters".into()));
        }
        for (x, y) in self.reps.iter_mut().zip(&other.reps) {
            x.sketch.merge(&y.sketch)?;
        }
        Ok(())
    }
}

impl StreamSink for NeighborhoodTester {
    fn apply(&mut self, update: &StreamUpdate) {
        let (a, b) = decode_edge(update.edge, self.n).expect("edge index valid for n");
        self.update_edge(a, b, update.delta.value());
    }
}

impl Encode for NeighborhoodTester {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.seed, 64);
        w.write(self.n as u64, 64);
        w.write(self.a as u64, 64);
        w.write(self.b as u64, 64);
        w.write(self.threshold.unwrap_or(1 << SAMPLE_BITS), SAMPLE_BITS + 1);
        match &self.set {
            Some(m) => {
                w.write_bool(true);
                m.encode(w);
            }
            None => w.write_bool(false),
        }
        w.write(self.reps.len() as u64, 16);
        for r in &self.reps {
            if let Some(h) = &r.sampler {
                h.encode(w);
            }
            r.sketch.encode(w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_tester(b: usize, seed: u64) -> NeighborhoodTester {
        let mut t = NeighborhoodTester::new(&[0], 16.max(b), b, 16, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for leaf in 1..9 {
            t.apply(&StreamUpdate::insert_pair(0, leaf, 16));
        }
        t
    }

    #[test]
    fn parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(NeighborhoodTester::new(&[0], 4, 2, 16, &mut rng).is_ok());
        assert!(NeighborhoodTester::new(&[0], 2, 4, 16, &mut rng).is_err());
        assert!(NeighborhoodTester::new(&[0], 4, 1, 16, &mut rng).is_err());
        let x = NeighborhoodTester::new(&[0], 4, 2, 16, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let y = NeighborhoodTester::new(&[0], 4, 2, 16, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(x.to_blob(), y.to_blob());
    }

    #[test]
    fn star_answers() {
        assert_eq!(star_tester(4, 1).query(&[1, 2]), Answer::Yes);
        assert_eq!(star_tester(16, 2).query(&[]), Answer::No);
    }

    #[test]
    fn no_edges_is_no() {
        let t = NeighborhoodTester::new(&[3], 20, 10, 64, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(t.query(&[]), Answer::No);
        assert_eq!(t.query(&[1, 2, 3]), Answer::No);
    }

    #[test]
    fn empty_set_ignores_updates() {
        let fresh = NeighborhoodTester::new(&[], 4, 2, 16, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mut t = fresh.clone();
        t.apply(&StreamUpdate::insert_pair(0, 1, 16));
        assert_eq!(t, fresh);
    }

    #[test]
    fn insert_delete_restores() {
        let fresh = NeighborhoodTester::new(&[0, 1], 64, 32, 64, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        let mut t = fresh.clone();
        t.apply(&StreamUpdate::insert_pair(0, 5, 64));
        t.apply(&StreamUpdate::delete_pair(0, 5, 64));
        assert_eq!(t, fresh);
    }

    #[test]
    fn query_is_pure() {
        let t = star_tester(4, 7);
        assert_eq!(t.query_report(&[1]), t.query_report(&[1]));
    }
}
