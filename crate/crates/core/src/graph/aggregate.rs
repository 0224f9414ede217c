//! Aggregation of an event log into a single time-stamped graph.

use std::collections::HashMap;

use crate::{NodeId, Timestamp};

use super::{EventLog, GraphError, Snapshot};

/// All events collapsed into one undirected simple graph; every edge keeps
/// the sorted multiset of timestamps at which the pair interacted.
#[derive(Debug, Clone)]
pub struct AggregatedGraph {
    snapshot: Snapshot,
    edge_index: HashMap<(NodeId, NodeId), usize>,
    times: Vec<Vec<Timestamp>>,
}

/// Aggregates the log. Edge timestamp lists are ascending and collectively
/// hold exactly one entry per (non-self-loop) event.
pub fn aggregate_graph(log: &EventLog) -> Result<AggregatedGraph, GraphError> {
    if log.events().is_empty() {
        return Err(GraphError::EmptyLog);
    }
    let mut edge_index: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut times: Vec<Vec<Timestamp>> = Vec::new();
    for e in log.events() {
        let key = (e.x.min(e.y), e.x.max(e.y));
        let idx = *edge_index.entry(key).or_insert_with(|| {
            times.push(Vec::new());
            times.len() - 1
        });
        times[idx].push(e.t); // events come sorted by t
    }
    let snapshot = Snapshot::from_edges(log.node_count(), edge_index.keys().copied());
    Ok(AggregatedGraph {
        snapshot,
        edge_index,
        times,
    })
}

impl AggregatedGraph {
    /// The aggregated adjacency as a plain snapshot (interval = whole log).
    pub fn as_snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    pub fn node_count(&self) -> usize {
        self.snapshot.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_index.len()
    }

    /// Ascending timestamps at which `u`–`v` interactions occurred.
    pub fn times(&self, u: NodeId, v: NodeId) -> Option<&[Timestamp]> {
        let key = (u.min(v), u.max(v));
        self.edge_index.get(&key).map(|&i| self.times[i].as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_event_log;
    use std::io::Cursor;

    fn log(s: &str) -> EventLog {
        parse_event_log(Cursor::new(s)).unwrap()
    }

    #[test]
    fn repeated_pair_aggregates_times() {
        let ag = aggregate_graph(&log("a b 1\na b 3")).unwrap();
        assert_eq!(ag.edge_count(), 1);
        assert_eq!(ag.times(0, 1).unwrap(), &[1, 3]);
        assert_eq!(ag.times(1, 0).unwrap(), &[1, 3]);
    }

    #[test]
    fn distinct_pairs_keep_their_own_times() {
        let ag = aggregate_graph(&log("a b 2\nb c 1")).unwrap();
        assert_eq!(ag.edge_count(), 2);
        assert_eq!(ag.times(0, 1).unwrap(), &[2]);
        assert_eq!(ag.times(1, 2).unwrap(), &[1]);
        assert!(ag.times(0, 2).is_none());
    }

    #[test]
    fn edge_times_cover_the_event_multiset() {
        let l = log("a b 1\na b 1\nb c 2\na c 2\na b 5");
        let ag = aggregate_graph(&l).unwrap();
        let mut collected: Vec<i64> = ag
            .as_snapshot()
            .edges()
            .flat_map(|(u, v)| ag.times(u, v).unwrap().iter().copied())
            .collect();
        collected.sort_unstable();
        let mut expected: Vec<i64> = l.events().iter().map(|e| e.t).collect();
        expected.sort_unstable();
        assert_eq!(collected, expected);
        for (u, v) in ag.as_snapshot().edges() {
            assert!(!ag.times(u, v).unwrap().is_empty());
        }
    }
}
