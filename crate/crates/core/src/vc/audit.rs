use serde::Serialize;

use super::post::GroupClass;
use super::{VcRun, VcState};
use crate::stream::FinalGraph;
use crate::tester::Answer;

/// Sketch mistakes of one run, found by comparing against the final graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SketchAudit {
    /// Sampled edges that are not in the final graph.
    pub wrong_samples: usize,
    /// Tester answers contradicting a true neighbourhood size outside the gap.
    pub tester_errors: usize,
    /// Group pairs whose true edge count reached `c`.
    pub pair_wraps: usize,
    /// Clean-clean pairs with edges but a zero residue.
    pub clean_pair_wraps: usize,
}

impl SketchAudit {
    /// No sketch or counter mis-answered.
    pub fn is_clean(&self) -> bool {
        self.wrong_samples == 0 && self.tester_errors == 0 && self.clean_pair_wraps == 0
    }
}

pub fn audit(state: &VcState, run: &VcRun, graph: &FinalGraph) -> SketchAudit {
    let partition = state.partition();
    let params = run.params;
    let groups = partition.num_groups();
    let mut out = SketchAudit {
        wrong_samples: run.mos.samples.iter().filter(|&&(_, u, v)| !graph.contains(u, v)).count(),
        ..Default::default()
    };

    let mut between = vec![0u64; groups * groups];
    for (u, v) in graph.pairs() {
        let (gu, gv) = (partition.group_of(u), partition.group_of(v));
        if gu != gv {
            between[gu.min(gv) * groups + gu.max(gv)] += 1;
        }
    }
    for i in 0..groups {
        for j in i + 1..groups {
            let count = between[i * groups + j];
            if count >= params.c as u64 {
                out.pair_wraps += 1;
            }
            let clean = run.post.classes.get(i) == Some(&GroupClass::Clean) && run.post.classes.get(j) == Some(&GroupClass::Clean);
            if clean && count > 0 && count % params.c as u64 == 0 {
                out.clean_pair_wraps += 1;
            }
        }
    }

    if !run.post.classes.is_empty() {
        let t: std::collections::BTreeSet<usize> = run.matching.vertices().into_iter().collect();
        let mut neighbourhoods = vec![std::collections::BTreeSet::new(); groups];
        for (u, v) in graph.pairs() {
            neighbourhoods[partition.group_of(u)].insert(v);
            neighbourhoods[partition.group_of(v)].insert(u);
        }
        for (i, class) in run.post.classes.iter().enumerate() {
            if *class == GroupClass::Simple {
                continue;
            }
            let size = neighbourhoods[i].iter().filter(|x| !t.contains(x)).count();
            let answer = if *class == GroupClass::Residual { Answer::Yes } else { Answer::No };
            let wrong = (size >= params.b && answer == Answer::No) || (2 * size <= params.b && answer == Answer::Yes);
            if wrong {
                out.tester_errors += 1;
            }
        }
    }
    out
}
