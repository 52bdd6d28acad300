//! The α-approximate vertex cover algorithm: a random vertex partition, edge
//! counters between and inside groups, one neighbourhood tester per group and a
//! Match-or-Sparsify bank, combined after the stream into a group-level cover.

mod audit;
mod counters;
mod cover;
mod post;

pub use audit::{audit, SketchAudit};
pub use counters::GroupCounters;
pub use cover::{CoverEncoding, CoverResult, CoverSummary, Provenance};
pub use post::{greedy_group_cover, post_process, ContractedMultigraph, GroupClass, PostProcess};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codec::{BitWriter, Encode};
use crate::error::Result;
use crate::hashing::{random_partition, Partition};
use crate::mos::{check_alpha, Matching, MatchOrSparsify, MosConfig, MosDiagnostics};
use crate::stream::{decode_edge, StreamSink, StreamUpdate};
use crate::tester::NeighborhoodTester;
use crate::util::{ceil_div, ceil_f64, log_n};

/// Derived constants of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VcParams {
    pub n: usize,
    pub alpha: usize,
    pub delta: f64,
    /// Pair counter modulus `⌈15/δ⌉`.
    pub c: u32,
    /// Tester bound on `|T|`, `⌈n/α⌉`.
    pub a: usize,
    /// Tester threshold `⌈n^{δ/2}⌉`.
    pub b: usize,
    /// Match case fires at `|M_easy| ≥ ⌈n/(8α)⌉`.
    pub match_threshold: usize,
    /// Output as partition plus group bits when `α ≥ ⌈log₂ n⌉²`.
    pub implicit_output: bool,
}

impl VcParams {
    pub fn new(n: usize, alpha: usize, delta: f64) -> Result<Self> {
        check_alpha(n, alpha, delta)?;
        let b = ceil_f64((n as f64).powf(delta / 2.0)).max(2) as usize;
        let a = (ceil_div(n as u64, alpha as u64) as usize).max(b);
        let log = log_n(n) as usize;
        Ok(VcParams {
            n,
            alpha,
            delta,
            c: ceil_f64(15.0 / delta) as u32,
            a,
            b,
            match_threshold: ceil_div(n as u64, 8 * alpha as u64) as usize,
            implicit_output: alpha >= log * log,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VcConfig {
    pub mos: MosConfig,
}

/// Streaming state of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcState {
    params: VcParamsKey,
    seed: u64,
    partition: Partition,
    mos: MatchOrSparsify,
    testers: Vec<NeighborhoodTester>,
    counters: GroupCounters,
}

/// `VcParams` with `δ` stored by bits, so states compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct VcParamsKey {
    n: usize,
    alpha: usize,
    delta_bits: u64,
}

/// Outcome of post-processing one run.
#[derive(Debug, Clone)]
pub struct VcRun {
    pub params: VcParams,
    pub matching: Matching,
    pub mos: MosDiagnostics,
    pub post: PostProcess,
    pub tester_decode_failures: usize,
}

impl VcRun {
    pub fn cover(&self) -> &CoverResult {
        &self.post.cover
    }

    pub fn failed(&self) -> bool {
        self.post.failure.is_some()
    }

    pub fn residual_groups(&self) -> usize {
        self.post.count(GroupClass::Residual)
    }

    pub fn diagnostics(&self) -> VcDiagnostics {
        VcDiagnostics {
            n: self.params.n,
            alpha: self.params.alpha,
            m_easy: self.matching.len(),
            match_case: self.post.cover.provenance() == Provenance::MatchCase,
            simple: self.post.count(GroupClass::Simple),
            residual: self.post.count(GroupClass::Residual),
            clean: self.post.count(GroupClass::Clean),
            covering_clean: self.post.covering_clean.len(),
            t_size: self.post.t_size,
            sampler_fails: self.mos.fails,
            tester_decode_failures: self.tester_decode_failures,
            cover_size: self.post.cover.size(),
            failed: self.failed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VcDiagnostics {
    pub n: usize,
    pub alpha: usize,
    pub m_easy: usize,
    pub match_case: bool,
    pub simple: usize,
    pub residual: usize,
    pub clean: usize,
    pub covering_clean: usize,
    pub t_size: usize,
    pub sampler_fails: usize,
    pub tester_decode_failures: usize,
    pub cover_size: usize,
    pub failed: bool,
}

impl VcState {
    pub fn new<R: Rng + ?Sized>(n: usize, alpha: usize, delta: f64, rng: &mut R) -> Result<Self> {
        Self::with_config(n, alpha, delta, VcConfig::default(), rng.gen())
    }

    /// All randomness derives from `seed`.
    pub fn with_config(n: usize, alpha: usize, delta: f64, config: VcConfig, seed: u64) -> Result<Self> {
        let params = VcParams::new(n, alpha, delta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let partition = random_partition(n, alpha, &mut rng)?;
        let mos = MatchOrSparsify::with_config(n, alpha, delta, config.mos, &mut rng)?;
        let testers = (0..partition.num_groups())
            .map(|_| NeighborhoodTester::detached(n, params.a, params.b, rng.gen()))
            .collect::<Result<_>>()?;
        let counters = GroupCounters::new(partition.num_groups(), params.c)?;
        Ok(VcState {
            params: VcParamsKey { n, alpha, delta_bits: delta.to_bits() },
            seed,
            partition,
            mos,
            testers,
            counters,
        })
    }

    pub fn params(&self) -> VcParams {
        VcParams::new(self.params.n, self.params.alpha, f64::from_bits(self.params.delta_bits)).expect("validated at construction")
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn mos(&self) -> &MatchOrSparsify {
        &self.mos
    }

    pub fn testers(&self) -> &[NeighborhoodTester] {
        &self.testers
    }

    pub fn counters(&self) -> &GroupCounters {
        &self.counters
    }

    pub fn update_edge(&mut self, u: usize, v: usize, e: u64, delta: i64) {
        self.mos.update_edge(u, v, e, delta);
        let (gu, gv) = (self.partition.group_of(u), self.partition.group_of(v));
        self.testers[gu].update_incident(v, delta);
        self.testers[gv].update_incident(u, delta);
        self.counters.add(gu, gv, delta);
    }

    pub fn finalize(&self) -> VcRun {
        let params = self.params();
        let (matching, mos) = self.mos.finalize();
        let mut tester_decode_failures = 0;
        let post = post_process(&params, &self.partition, &self.counters, &matching, |i, t| {
            let report = self.testers[i].query_report(t);
            tester_decode_failures += report.decode_failures;
            report.answer
        });
        VcRun { params, matching, mos, post, tester_decode_failures }
    }

    /// Serialized size of each component, in bits.
    pub fn component_bits(&self) -> ComponentBits {
        let mut testers = BitWriter::new();
        for t in &self.testers {
            t.encode(&mut testers);
        }
        ComponentBits {
            header: 64 * 4,
            partition: self.partition.encoded_bits(),
            mos: self.mos.encoded_bits(),
            testers: testers.bit_len(),
            pair_counters: self.counters.pair_bits(),
            internal_counters: self.counters.internal_bits(),
        }
    }
}

/// Bit counts of a run's serialized state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComponentBits {
    pub header: u64,
    pub partition: u64,
    pub mos: u64,
    pub testers: u64,
    pub pair_counters: u64,
    pub internal_counters: u64,
}

impl ComponentBits {
    pub fn total(&self) -> u64 {
        self.header + self.partition + self.mos + self.testers + self.pair_counters + self.internal_counters
    }
}

impl StreamSink for VcState {
    fn apply(&mut self, update: &StreamUpdate) {
        let (u, v) = decode_edge(update.edge, self.params.n).expect("edge index valid for n");
        self.update_edge(u, v, update.edge.index(), update.delta.value());
    }
}

impl Encode for VcState {
    fn encode(&self, w: &mut BitWriter) {
        w.write(self.seed, 64);
        w.write(self.params.n as u64, 64);
        w.write(self.params.alpha as u64, 64);
        w.write(self.params.delta_bits, 64);
        self.partition.encode(w);
        self.mos.encode(w);
        for t in &self.testers {
            t.encode(w);
        }
        self.counters.encode(w);
    }
}
