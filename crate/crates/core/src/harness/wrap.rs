//! A constructed instance on which the modular pair counters hide edges.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hashing::random_partition;
use crate::mos::greedy_matching;
use crate::oracle::uncovered_edges;
use crate::stream::FinalGraph;
use crate::tester::Answer;
use crate::vc::{post_process, CoverResult, GroupCounters, PostProcess, VcParams};

pub const WRAP_N: usize = 1300;
pub const WRAP_ALPHA: usize = 6;
pub const WRAP_DELTA: f64 = 0.5;

/// Two clean groups joined by exactly `c` edges: their pair residue is zero,
/// so the contracted graph has no edge between them and neither group joins
/// the cover.
#[derive(Debug, Clone)]
pub struct WrapDemo {
    pub params: VcParams,
    pub groups: (usize, usize),
    pub graph: FinalGraph,
    pub residue: u32,
    pub post: PostProcess,
    pub uncovered: Vec<(usize, usize)>,
}

impl WrapDemo {
    pub fn cover(&self) -> &CoverResult {
        &self.post.cover
    }

    /// True when the run shows the failure it was built to show.
    pub fn demonstrates_failure(&self) -> bool {
        self.residue == 0 && !self.uncovered.is_empty()
    }
}

pub fn modulo_wrap_demo(seed: u64) -> Result<WrapDemo> {
    let params = VcParams::new(WRAP_N, WRAP_ALPHA, WRAP_DELTA)?;
    let c = params.c as usize;
    let partition = random_partition(WRAP_N, WRAP_ALPHA, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let groups = partition.groups();
    let full: Vec<usize> = (0..groups.len()).filter(|&i| groups[i].len() * groups[i].len() >= c).take(2).collect();
    let (gx, gy) = match full[..] {
        [x, y] => (x, y),
        _ => return Err(Error::InvalidParameter("partition has no two groups large enough".into())),
    };
    let pairs: Vec<(usize, usize)> =
        groups[gx].iter().flat_map(|&u| groups[gy].iter().map(move |&v| (u, v))).take(c).collect();
    let graph = FinalGraph::from_pairs(WRAP_N, &pairs)?;
    let mut counters = GroupCounters::new(partition.num_groups(), params.c)?;
    for &(u, v) in &pairs {
        counters.add(partition.group_of(u), partition.group_of(v), 1);
    }
    let residue = counters.pair(gx, gy);
    let post = post_process(&params, &partition, &counters, &greedy_matching(Vec::new()), |_, _| Answer::No);
    let uncovered = uncovered_edges(&graph, |v| post.cover.contains(v));
    Ok(WrapDemo { params, groups: (gx, gy), graph, residue, post, uncovered })
}
