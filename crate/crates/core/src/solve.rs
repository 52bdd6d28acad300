//! The complete solver: repeated base runs at an internal parameter
//! `α' = max(1, ⌊α/10⌋)` next to an exact small-optimum branch, with a
//! selection rule that detects failed runs by their residual-group count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mos::{check_alpha, MosConfig};
use crate::small_opt::{SmallOptDecode, SmallOptSketch};
use crate::stream::{decode_edge, validate_stream, StreamSink, StreamUpdate};
use crate::util::{ceil_div, ceil_f64, log_n};
use crate::vc::{CoverResult, Provenance, VcConfig, VcRun, VcState};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveConfig {
    /// Overrides `⌈40/δ⌉`.
    pub repetitions: Option<usize>,
    pub mos: MosConfig,
    pub disable_small_opt: bool,
}

/// Parameters and seeds of one solve, fixed before the stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvePlan {
    pub n: usize,
    pub alpha: usize,
    pub delta: f64,
    pub inner_alpha: usize,
    pub repetitions: usize,
    /// Small-optimum promise `k = ⌈n/(α⌈log₂ n⌉²)⌉`; the branch runs when `k ≥ 2`.
    pub k: usize,
    /// A run qualifies when it has at most this many residual groups.
    pub residual_limit: usize,
    pub small_opt_seed: u64,
    pub run_seeds: Vec<u64>,
    #[serde(skip)]
    pub config: SolveConfig,
}

impl SolvePlan {
    pub fn new(n: usize, alpha: usize, delta: f64, seed: u64, config: SolveConfig) -> Result<Self> {
        check_alpha(n, alpha, delta)?;
        let log2 = log_n(n).pow(2);
        let inner_alpha = (alpha / 10).max(1);
        let repetitions = config.repetitions.unwrap_or(ceil_f64(40.0 / delta) as usize).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(SolvePlan {
            n,
            alpha,
            delta,
            inner_alpha,
            repetitions,
            k: ceil_div(n as u64, alpha as u64 * log2) as usize,
            residual_limit: ceil_div(n as u64, inner_alpha as u64 * log2) as usize,
            small_opt_seed: rng.gen(),
            run_seeds: (0..repetitions).map(|_| rng.gen()).collect(),
            config,
        })
    }

    pub fn small_opt_enabled(&self) -> bool {
        self.k >= 2 && !self.config.disable_small_opt
    }

    pub fn new_small_opt(&self) -> Result<Option<SmallOptSketch>> {
        if !self.small_opt_enabled() {
            return Ok(None);
        }
        SmallOptSketch::from_seed(self.n, self.k, self.small_opt_seed).map(Some)
    }

    pub fn new_run(&self, index: usize) -> Result<VcState> {
        VcState::with_config(self.n, self.inner_alpha, self.delta, VcConfig { mos: self.config.mos }, self.run_seeds[index])
    }
}

/// How the answer was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", content = "run", rename_all = "snake_case")]
pub enum Selection {
    SmallOpt,
    ResidualRule(usize),
    Smallest(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub index: usize,
    pub cover_size: usize,
    pub residual_groups: usize,
    pub failed: bool,
    pub qualified: bool,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub plan: SolvePlan,
    pub cover: CoverResult,
    pub selection: Selection,
    pub small_opt_exact: Option<bool>,
    /// Runs finalized, in index order.
    pub runs: Vec<RunSummary>,
    /// State and result of the chosen base run.
    pub chosen: Option<(VcState, VcRun)>,
}

fn summarize(index: usize, run: &VcRun, limit: usize) -> RunSummary {
    let residual_groups = run.residual_groups();
    RunSummary {
        index,
        cover_size: run.cover().size(),
        residual_groups,
        failed: run.failed(),
        qualified: !run.failed() && residual_groups <= limit,
    }
}

/// Picks the answer from finalized runs, all of which saw the same stream.
struct Selector {
    plan: SolvePlan,
    runs: Vec<RunSummary>,
    best: Option<(usize, VcState, VcRun)>,
}

impl Selector {
    fn offer(&mut self, index: usize, state: VcState, run: VcRun) -> bool {
        let summary = summarize(index, &run, self.plan.residual_limit);
        let qualified = summary.qualified;
        let better = !summary.failed
            && match &self.best {
                None => true,
                Some((_, _, b)) => run.cover().size() < b.cover().size(),
            };
        self.runs.push(summary);
        if qualified {
            self.best = Some((index, state, run));
            return true;
        }
        if better {
            self.best = Some((index, state, run));
        }
        false
    }

    fn finish(self, small_opt_exact: Option<bool>, qualified: bool) -> Result<SolveOutcome> {
        let Some((index, state, run)) = self.best else {
            return Err(Error::RunFailed(format!("all {} runs failed", self.runs.len())));
        };
        Ok(SolveOutcome {
            plan: self.plan,
            cover: run.cover().clone(),
            selection: if qualified { Selection::ResidualRule(index) } else { Selection::Smallest(index) },
            small_opt_exact,
            runs: self.runs,
            chosen: Some((state, run)),
        })
    }
}

fn small_opt_outcome(plan: &SolvePlan, decoded: SmallOptDecode) -> Option<SolveOutcome> {
    match decoded {
        SmallOptDecode::Exact(cover) if cover.len() < plan.k => Some(SolveOutcome {
            plan: plan.clone(),
            cover: CoverResult::explicit(plan.n, cover, Provenance::SmallOptExact),
            selection: Selection::SmallOpt,
            small_opt_exact: Some(true),
            runs: Vec::new(),
            chosen: None,
        }),
        _ => None,
    }
}

pub fn solve_full(updates: &[StreamUpdate], n: usize, alpha: usize, delta: f64, seed: u64) -> Result<SolveOutcome> {
    solve_full_with(updates, n, alpha, delta, seed, SolveConfig::default())
}

/// Validates the stream, then evaluates the branches lazily over it: the
/// small-optimum branch first, then runs in index order until one qualifies.
/// The result equals that of [`FullSolver`] fed the same stream.
pub fn solve_full_with(
    updates: &[StreamUpdate],
    n: usize,
    alpha: usize,
    delta: f64,
    seed: u64,
    config: SolveConfig,
) -> Result<SolveOutcome> {
    validate_stream(updates, n)?;
    let plan = SolvePlan::new(n, alpha, delta, seed, config)?;
    let mut small_opt_exact = None;
    if let Some(mut so) = plan.new_small_opt()? {
        so.apply_all(updates);
        let decoded = so.decode();
        if let Some(outcome) = small_opt_outcome(&plan, decoded) {
            return Ok(outcome);
        }
        small_opt_exact = Some(false);
    }
    let decoded: Vec<(usize, usize, u64, i64)> = updates
        .iter()
        .map(|u| {
            let (a, b) = decode_edge(u.edge, n).expect("validated");
            (a, b, u.edge.index(), u.delta.value())
        })
        .collect();
    let mut selector = Selector { plan: plan.clone(), runs: Vec::new(), best: None };
    for index in 0..plan.repetitions {
        let mut state = plan.new_run(index)?;
        for &(a, b, e, d) in &decoded {
            state.update_edge(a, b, e, d);
        }
        let run = state.finalize();
        if selector.offer(index, state, run) {
            return selector.finish(small_opt_exact, true);
        }
    }
    selector.finish(small_opt_exact, false)
}

/// One-pass form of the solver holding every branch at once.
#[derive(Debug, Clone)]
pub struct FullSolver {
    plan: SolvePlan,
    small_opt: Option<SmallOptSketch>,
    runs: Vec<VcState>,
}

impl FullSolver {
    pub fn new(n: usize, alpha: usize, delta: f64, seed: u64, config: SolveConfig) -> Result<Self> {
        let plan = SolvePlan::new(n, alpha, delta, seed, config)?;
        let small_opt = plan.new_small_opt()?;
        let runs = (0..plan.repetitions).map(|i| plan.new_run(i)).collect::<Result<_>>()?;
        Ok(FullSolver { plan, small_opt, runs })
    }

    pub fn finish(self) -> Result<SolveOutcome> {
        let mut small_opt_exact = None;
        if let Some(so) = &self.small_opt {
            if let Some(outcome) = small_opt_outcome(&self.plan, so.decode()) {
                return Ok(outcome);
            }
            small_opt_exact = Some(false);
        }
        let mut selector = Selector { plan: self.plan.clone(), runs: Vec::new(), best: None };
        for (index, state) in self.runs.into_iter().enumerate() {
            let run = state.finalize();
            if selector.offer(index, state, run) {
                return selector.finish(small_opt_exact, true);
            }
        }
        selector.finish(small_opt_exact, false)
    }
}

impl StreamSink for FullSolver {
    fn apply(&mut self, update: &StreamUpdate) {
        if let Some(so) = &mut self.small_opt {
            so.apply(update);
        }
        let (a, b) = decode_edge(update.edge, self.plan.n).expect("edge index valid for n");
        for run in &mut self.runs {
            run.update_edge(a, b, update.edge.index(), update.delta.value());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::verify_cover_with;
    use crate::stream::FinalGraph;

    #[test]
    fn empty_graph() {
        let out = solve_full(&[], 64, 2, 0.5, 0).unwrap();
        assert_eq!(out.cover.size(), 0);
    }

    #[test]
    fn star_is_covered() {
        let n = 16;
        let updates: Vec<_> = (1..n).map(|i| StreamUpdate::insert_pair(0, i, n)).collect();
        let plan = SolvePlan::new(n, 2, 0.5, 0, SolveConfig::default()).unwrap();
        assert_eq!(plan.k, 1);
        assert_eq!(plan.repetitions, 80);
        let out = solve_full(&updates, n, 2, 0.5, 1).unwrap();
        let g = validate_stream(&updates, n).unwrap();
        assert!(verify_cover_with(&g, |v| out.cover.contains(v)));
        assert!(out.cover.size() <= n);
    }

    #[test]
    fn lazy_equals_streaming() {
        let n = 32;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|(u, v)| (u * 31 + v * 17) % 7 == 0).collect();
        let updates = FinalGraph::from_pairs(n, &pairs).unwrap().to_stream();
        let config = SolveConfig { repetitions: Some(6), ..Default::default() };
        for seed in 0..3 {
            let lazy = solve_full_with(&updates, n, 2, 0.5, seed, config).unwrap();
            let mut full = FullSolver::new(n, 2, 0.5, seed, config).unwrap();
            full.apply_all(&updates);
            let full = full.finish().unwrap();
            assert_eq!(lazy.cover, full.cover);
            assert_eq!(lazy.selection, full.selection);
            assert_eq!(lazy.runs, full.runs);
        }
    }
}
