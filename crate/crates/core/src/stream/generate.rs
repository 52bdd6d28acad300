//! Seeded test-instance factories.
//!
//! Every generator first builds the final edge set, then adds deletions by
//! inserting a superset and deleting a random subset of it. Each deleted
//! edge is removed at a random time after its insertion, so the produced
//! stream is valid by construction.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{edge_count, encode_edge, EdgeId, StreamUpdate};
use crate::error::{Error, Result};

/// Graph family of a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Erdős–Rényi `G(n, p)`.
    Gnp { p: f64 },
    /// Every pair touching a random `cover_size`-subset is an edge with
    /// probability `p`, so that subset is a vertex cover.
    PlantedCover { cover_size: usize, p: f64 },
    /// All edges `(hub, i)`.
    Star { hub: usize },
    /// A clique on `big` random vertices; the rest split into cliques of `small`.
    CliquePlusCliques { big: usize, small: usize },
    /// `G(n, p)` inserted in full, then a `deletion_fraction` share deleted.
    Churn { p: f64 },
    /// `n / 2` disjoint edges (a perfect matching when `n` is even).
    PerfectMatching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub deletion_fraction: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family) -> Self {
        GeneratorSpec { family, deletion_fraction: 0.0 }
    }

    pub fn with_deletions(mut self, fraction: f64) -> Self {
        self.deletion_fraction = fraction;
        self
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        let base = match &self.family {
            Family::Gnp { p } => format!("gnp(p={p})"),
            Family::PlantedCover { cover_size, p } => format!("planted_cover(k={cover_size},p={p})"),
            Family::Star { hub } => format!("star(hub={hub})"),
            Family::CliquePlusCliques { big, small } => format!("clique_plus_cliques({big},{small})"),
            Family::Churn { p } => format!("churn(p={p})"),
            Family::PerfectMatching => "perfect_matching".to_string(),
        };
        if self.deletion_fraction > 0.0 {
            format!("{base}+del{}", self.deletion_fraction)
        } else {
            base
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")))
    }
}

fn pair(u: usize, v: usize, n: usize) -> EdgeId {
    encode_edge(u, v, n).expect("generator produced a valid pair")
}

fn gnp_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<EdgeId> {
    let mut out = Vec::new();
    if p <= 0.0 {
        return out;
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                out.push(pair(u, v, n));
            }
        }
    }
    out
}

fn family_edges(family: &Family, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<EdgeId>> {
    let edges = match *family {
        Family::Gnp { p } | Family::Churn { p } => {
            check_p(p)?;
            gnp_edges(n, p, rng)
        }
        Family::PlantedCover { cover_size, p } => {
            check_p(p)?;
            if cover_size > n {
                return Err(Error::InvalidParameter(format!("planted cover {cover_size} larger than n = {n}")));
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut in_cover = vec![false; n];
            for &v in &perm[..cover_size] {
                in_cover[v] = true;
            }
            let mut out = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if (in_cover[u] || in_cover[v]) && rng.gen::<f64>() < p {
                        out.push(pair(u, v, n));
                    }
                }
            }
            out
        }
        Family::Star { hub } => {
            if hub >= n {
                return Err(Error::InvalidParameter(format!("hub {hub} out of range for n = {n}")));
            }
            (0..n).filter(|&i| i != hub).map(|i| pair(hub, i, n)).collect()
        }
        Family::CliquePlusCliques { big, small } => {
            if big > n || small == 0 {
                return Err(Error::InvalidParameter(format!(
                    "clique sizes big = {big}, small = {small} infeasible for n = {n}"
                )));
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut out = Vec::new();
            let mut push_clique = |vs: &[usize]| {
                for (i, &u) in vs.iter().enumerate() {
                    for &v in &vs[i + 1..] {
                        out.push(pair(u, v, n));
                    }
                }
            };
            push_clique(&perm[..big]);
            for chunk in perm[big..].chunks(small) {
                push_clique(chunk);
            }
            out
        }
        Family::PerfectMatching => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            perm.chunks_exact(2).map(|c| pair(c[0], c[1], n)).collect()
        }
    };
    Ok(edges)
}

/// Random edges outside `present`, at most `count` of them.
fn decoy_edges(n: usize, present: &HashSet<EdgeId>, count: usize, rng: &mut ChaCha8Rng) -> Vec<EdgeId> {
    let m = edge_count(n);
    let free = m as usize - present.len();
    let count = count.min(free);
    if count == 0 {
        return Vec::new();
    }
    if count * 2 < free {
        let mut chosen = HashSet::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let e = EdgeId::new(rng.gen_range(0..m));
            if !present.contains(&e) && chosen.insert(e) {
                out.push(e);
            }
        }
        out
    } else {
        let mut all: Vec<EdgeId> = (0..m).map(EdgeId::new).filter(|e| !present.contains(e)).collect();
        all.shuffle(rng);
        all.truncate(count);
        all
    }
}

/// Produces a valid update stream for `spec` on `n` vertices; a pure function
/// of `(spec, n, seed)`.
pub fn generate_stream(spec: &GeneratorSpec, n: usize, seed: u64) -> Result<Vec<StreamUpdate>> {
    let f = spec.deletion_fraction;
    if !(0.0..1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!("deletion fraction {f} not in [0, 1)")));
    }
    if n < 2 && !matches!(spec.family, Family::Gnp { .. } | Family::Churn { .. }) {
        return Err(Error::InvalidParameter(format!("n = {n} too small")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = family_edges(&spec.family, n, &mut rng)?;

    // (kept, deleted) partition of everything inserted.
    let (kept, deleted) = match spec.family {
        Family::Churn { .. } => {
            let mut all = base;
            all.shuffle(&mut rng);
            let del = ((all.len() as f64) * f).round() as usize;
            let deleted = all.split_off(all.len() - del);
            (all, deleted)
        }
        _ => {
            let wanted = if f > 0.0 { ((base.len() as f64) * f / (1.0 - f)).round() as usize } else { 0 };
            let present: HashSet<EdgeId> = base.iter().copied().collect();
            let decoys = decoy_edges(n, &present, wanted, &mut rng);
            (base, decoys)
        }
    };

    // Random insertion times; deletions strictly after their insertion.
    let mut events: Vec<(f64, u64, StreamUpdate)> = Vec::with_capacity(kept.len() + 2 * deleted.len());
    let mut tie = 0u64;
    let mut push = |t: f64, up: StreamUpdate, events: &mut Vec<(f64, u64, StreamUpdate)>| {
        events.push((t, tie, up));
        tie += 1;
    };
    for &e in &kept {
        let t = rng.gen::<f64>();
        push(t, StreamUpdate::insert(e), &mut events);
    }
    for &e in &deleted {
        let t_ins = rng.gen::<f64>();
        let t_del = t_ins + (1.0 - t_ins) * rng.gen::<f64>();
        push(t_ins, StreamUpdate::insert(e), &mut events);
        push(t_del, StreamUpdate::delete(e), &mut events);
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(events.into_iter().map(|(_, _, up)| up).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{validate_stream, Delta};

    fn corpus() -> Vec<GeneratorSpec> {
        vec![
            GeneratorSpec::new(Family::Gnp { p: 0.3 }),
            GeneratorSpec::new(Family::Gnp { p: 0.1 }).with_deletions(0.5),
            GeneratorSpec::new(Family::PlantedCover { cover_size: 4, p: 0.5 }).with_deletions(0.3),
            GeneratorSpec::new(Family::Star { hub: 3 }).with_deletions(0.2),
            GeneratorSpec::new(Family::CliquePlusCliques { big: 6, small: 3 }).with_deletions(0.4),
            GeneratorSpec::new(Family::Churn { p: 0.5 }).with_deletions(0.5),
            GeneratorSpec::new(Family::PerfectMatching).with_deletions(0.1),
        ]
    }

    #[test]
    fn star_without_deletions() {
        let ups = generate_stream(&GeneratorSpec::new(Family::Star { hub: 0 }), 8, 1).unwrap();
        assert_eq!(ups.len(), 7);
        let g = validate_stream(&ups, 8).unwrap();
        let mut pairs: Vec<_> = g.pairs().collect();
        pairs.sort();
        assert_eq!(pairs, (1..8).map(|i| (0, i)).collect::<Vec<_>>());
        assert!(ups.iter().all(|u| u.delta == Delta::Insert));
    }

    #[test]
    fn empty_gnp() {
        assert!(generate_stream(&GeneratorSpec::new(Family::Gnp { p: 0.0 }), 8, 9).unwrap().is_empty());
    }

    #[test]
    fn churn_validates() {
        let spec = GeneratorSpec::new(Family::Churn { p: 0.5 }).with_deletions(0.5);
        for seed in 0..50 {
            let ups = generate_stream(&spec, 8, seed).unwrap();
            validate_stream(&ups, 8).unwrap();
        }
    }

    #[test]
    fn corpus_is_valid_and_deterministic() {
        for spec in corpus() {
            for seed in 0..5 {
                let a = generate_stream(&spec, 24, seed).unwrap();
                let b = generate_stream(&spec, 24, seed).unwrap();
                assert_eq!(a, b, "{}", spec.label());
                validate_stream(&a, 24).unwrap();
            }
        }
    }

    #[test]
    fn deletions_keep_final_family_graph() {
        let spec = GeneratorSpec::new(Family::Star { hub: 2 }).with_deletions(0.5);
        let ups = generate_stream(&spec, 10, 4).unwrap();
        assert!(ups.iter().any(|u| u.delta == Delta::Delete));
        let g = validate_stream(&ups, 10).unwrap();
        assert_eq!(g.edge_count(), 9);
        assert!(g.pairs().all(|(u, v)| u == 2 || v == 2));
    }

    #[test]
    fn infeasible_parameters() {
        let bad = [
            GeneratorSpec::new(Family::PlantedCover { cover_size: 9, p: 0.5 }),
            GeneratorSpec::new(Family::Star { hub: 8 }),
            GeneratorSpec::new(Family::Gnp { p: 1.5 }),
            GeneratorSpec::new(Family::CliquePlusCliques { big: 9, small: 2 }),
            GeneratorSpec::new(Family::Gnp { p: 0.5 }).with_deletions(1.0),
        ];
        for spec in bad {
            assert!(generate_stream(&spec, 8, 0).is_err(), "{}", spec.label());
        }
    }
}
