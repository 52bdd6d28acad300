use serde::Serialize;

use super::counters::GroupCounters;
use super::cover::{CoverResult, Provenance};
use super::VcParams;
use crate::hashing::Partition;
use crate::mos::Matching;
use crate::tester::Answer;

/// Classification of a vertex group after the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupClass {
    /// Touches `V(M_easy)` or has an internal edge.
    Simple,
    /// Not simple, and its tester reports a large neighbourhood outside `V(M_easy)`.
    Residual,
    Clean,
}

/// Clean groups contracted to single vertices, with edge multiplicities read
/// from the pair residues.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractedMultigraph {
    pub vertices: Vec<usize>,
    /// `(i, j, residue)` with `i < j` and `residue ≠ 0`, in lexicographic order.
    pub edges: Vec<(usize, usize, u32)>,
}

impl ContractedMultigraph {
    pub fn build(classes: &[GroupClass], counters: &GroupCounters) -> Self {
        let vertices: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] == GroupClass::Clean).collect();
        let mut edges = Vec::new();
        for (x, &i) in vertices.iter().enumerate() {
            for &j in &vertices[x + 1..] {
                let r = counters.pair(i, j);
                if r != 0 {
                    edges.push((i, j, r));
                }
            }
        }
        ContractedMultigraph { vertices, edges }
    }
}

/// Both endpoints of a greedy maximal matching over the contracted edges:
/// a 2-approximate vertex cover of the contracted graph.
pub fn greedy_group_cover(graph: &ContractedMultigraph) -> Vec<usize> {
    let mut taken = std::collections::BTreeSet::new();
    for &(i, j, _) in &graph.edges {
        if !taken.contains(&i) && !taken.contains(&j) {
            taken.insert(i);
            taken.insert(j);
        }
    }
    taken.into_iter().collect()
}

/// Everything post-processing decided.
#[derive(Debug, Clone)]
pub struct PostProcess {
    pub cover: CoverResult,
    /// Empty in the match case.
    pub classes: Vec<GroupClass>,
    pub contracted: ContractedMultigraph,
    pub covering_clean: Vec<usize>,
    pub t_size: usize,
    /// Set when `|V(M_easy)|` exceeds the tester bound `a`.
    pub failure: Option<String>,
}

impl PostProcess {
    pub fn count(&self, class: GroupClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

/// Turns the end-of-stream state into a cover. `tester(i, T)` answers the
/// neighbourhood test of group `i`; it is only asked about non-simple groups.
pub fn post_process<F>(
    params: &VcParams,
    partition: &Partition,
    counters: &GroupCounters,
    m_easy: &Matching,
    mut tester: F,
) -> PostProcess
where
    F: FnMut(usize, &[usize]) -> Answer,
{
    let n = params.n;
    if m_easy.len() >= params.match_threshold {
        return PostProcess {
            cover: CoverResult::explicit(n, (0..n).collect(), Provenance::MatchCase),
            classes: Vec::new(),
            contracted: ContractedMultigraph::default(),
            covering_clean: Vec::new(),
            t_size: 2 * m_easy.len(),
            failure: None,
        };
    }

    let t = m_easy.vertices();
    let failure = (t.len() > params.a)
        .then(|| format!("|V(M_easy)| = {} exceeds the tester bound a = {}", t.len(), params.a));
    let groups = partition.num_groups();
    let mut touched = vec![false; groups];
    for &v in &t {
        touched[partition.group_of(v)] = true;
    }
    let classes: Vec<GroupClass> = (0..groups)
        .map(|i| {
            if touched[i] || counters.internal(i) != 0 {
                GroupClass::Simple
            } else if tester(i, &t) == Answer::Yes {
                GroupClass::Residual
            } else {
                GroupClass::Clean
            }
        })
        .collect();
    let contracted = ContractedMultigraph::build(&classes, counters);
    let covering_clean = greedy_group_cover(&contracted);
    let mut chosen: Vec<bool> = classes.iter().map(|&c| c != GroupClass::Clean).collect();
    for &i in &covering_clean {
        chosen[i] = true;
    }
    let cover = if params.implicit_output {
        CoverResult::implicit(partition.clone(), chosen, Provenance::GroupCover).expect("one bit per group")
    } else {
        let vertices = (0..n).filter(|&v| chosen[partition.group_of(v)]).collect();
        CoverResult::explicit(n, vertices, Provenance::GroupCover)
    };
    PostProcess { cover, classes, contracted, covering_clean, t_size: t.len(), failure }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_cover_examples() {
        assert!(greedy_group_cover(&ContractedMultigraph::default()).is_empty());
        let single = ContractedMultigraph { vertices: vec![1, 2], edges: vec![(1, 2, 3)] };
        assert_eq!(greedy_group_cover(&single), vec![1, 2]);
        let triangle = ContractedMultigraph { vertices: vec![0, 1, 2], edges: vec![(0, 1, 1), (0, 2, 1), (1, 2, 1)] };
        assert_eq!(greedy_group_cover(&triangle).len(), 2);
    }

    #[test]
    fn contraction_keeps_clean_nonzero_pairs() {
        let mut c = GroupCounters::new(4, 5).unwrap();
        c.add(0, 1, 1);
        c.add(1, 2, 1);
        c.add(2, 3, 1);
        for _ in 0..5 {
            c.add(0, 3, 1);
        }
        let classes = [GroupClass::Clean, GroupClass::Clean, GroupClass::Simple, GroupClass::Clean];
        let g = ContractedMultigraph::build(&classes, &c);
        assert_eq!(g.vertices, vec![0, 1, 3]);
        assert_eq!(g.edges, vec![(0, 1, 1)]);
    }
}
