//! Serialized-state space accounting.

use serde::{Deserialize, Serialize};

use crate::codec::Encode;
use crate::error::Result;
use crate::small_opt::SmallOptSketch;
use crate::solve::{SolveConfig, SolvePlan};
use crate::vc::VcState;

pub const SPACE_CSV_HEADER: &str =
    "n,alpha,delta,seed,header,partition,mos,testers,pair_counters,internal_counters,small_opt,output_encoding,total";

/// One `(n, α, δ)` point of a space grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceCell {
    pub n: usize,
    pub alpha: usize,
    #[serde(default = "half")]
    pub delta: f64,
}

fn half() -> f64 {
    0.5
}

/// Bit counts of every component of one algorithm instance plus the
/// small-optimum sketch that accompanies it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceReport {
    pub n: usize,
    pub alpha: usize,
    pub delta: f64,
    pub seed: u64,
    pub header: u64,
    pub partition: u64,
    pub mos: u64,
    pub testers: u64,
    pub pair_counters: u64,
    pub internal_counters: u64,
    pub small_opt: u64,
    /// The cover as the final state would emit it.
    pub output_encoding: u64,
    pub total: u64,
}

impl SpaceReport {
    /// Measures the freshly initialized state at `(n, α, δ)`.
    pub fn measure(n: usize, alpha: usize, delta: f64, seed: u64) -> Result<Self> {
        let state = VcState::with_config(n, alpha, delta, Default::default(), seed)?;
        let plan = SolvePlan::new(n, alpha, delta, seed, SolveConfig::default())?;
        let small_opt = plan.new_small_opt()?;
        Ok(Self::of_state(&state, small_opt.as_ref()))
    }

    pub fn of_state(state: &VcState, small_opt: Option<&SmallOptSketch>) -> Self {
        let params = state.params();
        let bits = state.component_bits();
        let small_opt = small_opt.map_or(0, |s| s.encoded_bits());
        let output_encoding = state.finalize().cover().encoded_bits();
        let mut report = SpaceReport {
            n: params.n,
            alpha: params.alpha,
            delta: params.delta,
            seed: state.seed(),
            header: bits.header,
            partition: bits.partition,
            mos: bits.mos,
            testers: bits.testers,
            pair_counters: bits.pair_counters,
            internal_counters: bits.internal_counters,
            small_opt,
            output_encoding,
            total: 0,
        };
        report.total = report.component_sum();
        report
    }

    pub fn component_sum(&self) -> u64 {
        self.header
            + self.partition
            + self.mos
            + self.testers
            + self.pair_counters
            + self.internal_counters
            + self.small_opt
            + self.output_encoding
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.alpha,
            self.delta,
            self.seed,
            self.header,
            self.partition,
            self.mos,
            self.testers,
            self.pair_counters,
            self.internal_counters,
            self.small_opt,
            self.output_encoding,
            self.total
        )
    }
}
