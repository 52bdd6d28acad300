//! The dynamic graph stream model: canonical edge indexing, signed updates,
//! validation against the {0,1} edge-vector promise, seeded instance
//! generators and the text file format.

mod edge;
mod format;
mod generate;

pub use edge::{decode_edge, edge_count, encode_edge, EdgeId};
pub use format::{parse_stream, read_stream_file, write_stream, write_stream_file, Stream};
pub use generate::{generate_stream, Family, GeneratorSpec};

use std::collections::BTreeSet;

use crate::error::{Error, Result, StreamErrorKind};

/// Sign of a stream update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Delta {
    Insert,
    Delete,
}

impl Delta {
    pub fn value(self) -> i64 {
        match self {
            Delta::Insert => 1,
            Delta::Delete => -1,
        }
    }

    pub fn inverse(self) -> Delta {
        match self {
            Delta::Insert => Delta::Delete,
            Delta::Delete => Delta::Insert,
        }
    }
}

/// One signed update to a canonical undirected edge index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamUpdate {
    pub edge: EdgeId,
    pub delta: Delta,
}

impl StreamUpdate {
    pub fn insert(edge: EdgeId) -> Self {
        StreamUpdate { edge, delta: Delta::Insert }
    }

    pub fn delete(edge: EdgeId) -> Self {
        StreamUpdate { edge, delta: Delta::Delete }
    }

    /// Insert of the pair `{u, v}`; panics on an invalid pair, for tests and generators.
    pub fn insert_pair(u: usize, v: usize, n: usize) -> Self {
        Self::insert(encode_edge(u, v, n).expect("valid pair"))
    }

    pub fn delete_pair(u: usize, v: usize, n: usize) -> Self {
        Self::delete(encode_edge(u, v, n).expect("valid pair"))
    }
}

/// Anything that consumes a dynamic graph stream one update at a time.
pub trait StreamSink {
    fn apply(&mut self, update: &StreamUpdate);

    fn apply_all<'a, I>(&mut self, updates: I)
    where
        I: IntoIterator<Item = &'a StreamUpdate>,
        Self: Sized,
    {
        for u in updates {
            self.apply(u);
        }
    }
}

/// The graph a valid stream leaves behind.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FinalGraph {
    pub n: usize,
    pub edges: BTreeSet<EdgeId>,
}

impl FinalGraph {
    pub fn new(n: usize) -> Self {
        FinalGraph { n, edges: BTreeSet::new() }
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut g = FinalGraph::new(n);
        for &(u, v) in pairs {
            g.edges.insert(encode_edge(u, v, n)?);
        }
        Ok(g)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        encode_edge(u, v, self.n).map(|e| self.edges.contains(&e)).unwrap_or(false)
    }

    /// Endpoint pairs `(u, v)` with `u < v`, in index order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(move |&e| decode_edge(e, self.n).expect("stored edge in range"))
    }

    /// An insertion-only stream that produces this graph.
    pub fn to_stream(&self) -> Vec<StreamUpdate> {
        self.edges.iter().map(|&e| StreamUpdate::insert(e)).collect()
    }
}

/// Replays `updates` and returns the final edge set, rejecting any update that
/// would push an edge multiplicity outside {0, 1}.
pub fn validate_stream(updates: &[StreamUpdate], n: usize) -> Result<FinalGraph> {
    let m = edge_count(n);
    let mut graph = FinalGraph::new(n);
    for (position, up) in updates.iter().enumerate() {
        if up.edge.index() >= m {
            return Err(Error::InvalidStream { position, kind: StreamErrorKind::IndexOutOfRange });
        }
        match up.delta {
            Delta::Insert => {
                if !graph.edges.insert(up.edge) {
                    return Err(Error::InvalidStream { position, kind: StreamErrorKind::DuplicateInsert });
                }
            }
            Delta::Delete => {
                if !graph.edges.remove(&up.edge) {
                    return Err(Error::InvalidStream {
                        position,
                        kind: StreamErrorKind::DeleteBeforeInsert,
                    });
                }
            }
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        let n = 5;
        let g = validate_stream(&[StreamUpdate::insert_pair(0, 1, n)], n).unwrap();
        assert_eq!(g.pairs().collect::<Vec<_>>(), vec![(0, 1)]);

        let g = validate_stream(&[StreamUpdate::insert_pair(0, 1, n), StreamUpdate::delete_pair(0, 1, n)], n)
            .unwrap();
        assert!(g.edges.is_empty());

        let err = validate_stream(&[StreamUpdate::delete_pair(0, 1, n)], n).unwrap_err();
        assert_eq!(err, Error::InvalidStream { position: 0, kind: StreamErrorKind::DeleteBeforeInsert });
    }

    #[test]
    fn validate_reports_duplicate_and_range() {
        let n = 5;
        let ups = [StreamUpdate::insert_pair(1, 2, n), StreamUpdate::insert_pair(2, 1, n)];
        assert_eq!(
            validate_stream(&ups, n).unwrap_err(),
            Error::InvalidStream { position: 1, kind: StreamErrorKind::DuplicateInsert }
        );
        let ups = [StreamUpdate::insert(EdgeId::new(3)), StreamUpdate::insert(EdgeId::new(10))];
        assert_eq!(
            validate_stream(&ups, n).unwrap_err(),
            Error::InvalidStream { position: 1, kind: StreamErrorKind::IndexOutOfRange }
        );
    }
}
