//! Static snapshots of a dynamic graph and the snapshot-sequence builder.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::scalar::Real;
use crate::NodeId;

use super::{EventLog, GraphError};

/// An undirected simple graph over the global dense index space, covering
/// one time bin. Nodes with degree ≥ 1 are *active*; the index space itself
/// is shared by every snapshot of a sequence so that embedding vectors stay
/// joinable across time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    n: usize,
    adj: Vec<Vec<NodeId>>,
    active: Vec<NodeId>,
    interval: (f64, f64),
    event_count: usize,
}

impl Snapshot {
    /// Builds a snapshot from undirected edges. Duplicates collapse, self
    /// loops are ignored, neighbor lists come out sorted.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        Self::from_edges_counted(n, edges, (0.0, 0.0)).0
    }

    fn from_edges_counted(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        interval: (f64, f64),
    ) -> (Self, usize) {
        let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut supplied = 0usize;
        for (x, y) in edges {
            supplied += 1;
            assert!(
                (x as usize) < n && (y as usize) < n,
                "node index out of range"
            );
            if x == y {
                continue;
            }
            let key = (x.min(y), x.max(y));
            if seen.insert(key) {
                adj[x as usize].push(y);
                adj[y as usize].push(x);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let active = (0..n as NodeId)
            .filter(|&v| !adj[v as usize].is_empty())
            .collect();
        (
            Snapshot {
                n,
                adj,
                active,
                interval,
                event_count: 0,
            },
            supplied,
        )
    }

    /// Global node count (the dense index space, not just active nodes).
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Nodes with degree ≥ 1, ascending.
    pub fn active_nodes(&self) -> &[NodeId] {
        &self.active
    }

    pub fn is_active(&self, v: NodeId) -> bool {
        (v as usize) < self.n && !self.adj[v as usize].is_empty()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Undirected edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            let u = u as NodeId;
            nbrs.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Half-open time interval `[t_start, t_end)` this snapshot covers
    /// (closed at the sequence end).
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    /// Number of (non-self-loop) events that collapsed into this snapshot.
    pub fn event_count(&self) -> usize {
        self.event_count
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if (v as usize) >= self.n {
            return Err(GraphError::NodeOutOfRange(v, self.n));
        }
        if !self.is_active(v) {
            return Err(GraphError::InactiveNode(v));
        }
        Ok(())
    }
}

/// An ordered list of snapshots whose intervals partition the log's time
/// range.
#[derive(Debug, Clone)]
pub struct SnapshotSequence {
    snapshots: Vec<Snapshot>,
    boundaries: Vec<f64>,
    n: usize,
}

impl SnapshotSequence {
    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Monotone timestamp cut points; `len() + 1` entries, first `t_min`,
    /// last `t_max`.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Global node count shared by all snapshots.
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, idx: usize) -> &Snapshot {
        &self.snapshots[idx]
    }

    /// Reassembles a sequence from parts (deserialization path). Interval
    /// metadata is restored from the boundaries; per-bin event counts are
    /// not serialized and come back as zero.
    pub(crate) fn from_parts(mut snapshots: Vec<Snapshot>, boundaries: Vec<f64>) -> Self {
        assert!(
            !snapshots.is_empty(),
            "sequence needs at least one snapshot"
        );
        assert_eq!(boundaries.len(), snapshots.len() + 1);
        let n = snapshots[0].n;
        assert!(snapshots.iter().all(|s| s.n == n), "shared index space");
        for (i, snap) in snapshots.iter_mut().enumerate() {
            snap.interval = (boundaries[i], boundaries[i + 1]);
        }
        SnapshotSequence {
            snapshots,
            boundaries,
            n,
        }
    }
}

/// How to cut the log's time range into bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BinSpec {
    /// Fixed number of equal-width bins over `[t_min, t_max]`.
    Count(usize),
    /// Fixed bin width in time units, anchored at `t_min`; the final bin is
    /// closed at `t_max`.
    Width(i64),
}

/// Assigns events to time bins and collapses each bin to an unweighted
/// simple snapshot. Bin assignment is exact integer arithmetic; the
/// fractional `boundaries` on the result are informational.
///
/// Empty bins are kept as edgeless snapshots so snapshot indices stay
/// aligned with time (a warning is logged).
pub fn build_snapshots(log: &EventLog, spec: BinSpec) -> Result<SnapshotSequence, GraphError> {
    let span = log.t_max() - log.t_min();
    let bins: usize = match spec {
        BinSpec::Count(0) | BinSpec::Width(0) => return Err(GraphError::ZeroBins),
        BinSpec::Count(c) => c,
        BinSpec::Width(w) => {
            if w < 0 {
                return Err(GraphError::ZeroBins);
            }
            ((span + w - 1) / w).max(1) as usize
        }
    };

    let bin_of = |t: i64| -> usize {
        let offset = (t - log.t_min()) as i128;
        let idx = match spec {
            BinSpec::Count(c) => {
                if span == 0 {
                    0
                } else {
                    (offset * c as i128 / span as i128) as usize
                }
            }
            BinSpec::Width(w) => (offset / w as i128) as usize,
        };
        idx.min(bins - 1)
    };

    let mut edges_per_bin: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); bins];
    for e in log.events() {
        edges_per_bin[bin_of(e.t)].push((e.x, e.y));
    }

    let boundary = |i: usize| -> f64 {
        if i == bins {
            return log.t_max() as f64;
        }
        match spec {
            BinSpec::Count(c) => log.t_min() as f64 + span as f64 * i as f64 / c as f64,
            BinSpec::Width(w) => (log.t_min() + w * i as i64) as f64,
        }
    };
    let boundaries: Vec<f64> = (0..=bins).map(boundary).collect();

    let n = log.node_count();
    let mut snapshots = Vec::with_capacity(bins);
    let mut empty_bins = 0usize;
    for (i, bin_edges) in edges_per_bin.into_iter().enumerate() {
        let interval = (boundaries[i], boundaries[i + 1]);
        let (mut snap, supplied) = Snapshot::from_edges_counted(n, bin_edges, interval);
        snap.event_count = supplied;
        if snap.edge_count() == 0 {
            empty_bins += 1;
        }
        snapshots.push(snap);
    }
    if empty_bins > 0 {
        log::warn!("{empty_bins} empty bin(s) retained as edgeless snapshots");
    }

    Ok(SnapshotSequence {
        snapshots,
        boundaries,
        n,
    })
}

/// Mean number of snapshots in which an ever-active node (resp. a distinct
/// undirected edge) is present.
pub fn activation_stats<F: Real>(seq: &SnapshotSequence) -> (F, F) {
    let mut node_presence: Vec<usize> = vec![0; seq.node_count()];
    let mut edge_presence: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    for snap in seq.snapshots() {
        for &v in snap.active_nodes() {
            node_presence[v as usize] += 1;
        }
        for e in snap.edges() {
            *edge_presence.entry(e).or_insert(0) += 1;
        }
    }
    let active_nodes: Vec<usize> = node_presence.into_iter().filter(|&c| c > 0).collect();
    let a_v = if active_nodes.is_empty() {
        F::zero()
    } else {
        F::from_count(active_nodes.iter().sum::<usize>()) / F::from_count(active_nodes.len())
    };
    let a_e = if edge_presence.is_empty() {
        F::zero()
    } else {
        F::from_count(edge_presence.values().sum::<usize>()) / F::from_count(edge_presence.len())
    };
    (a_v, a_e)
}

/// Unweighted shortest-path hop counts from `source`; `None` marks
/// unreachable nodes.
pub fn bfs_distances(g: &Snapshot, source: NodeId) -> Result<Vec<Option<u32>>, GraphError> {
    g.check_node(source)?;
    let mut dist: Vec<Option<u32>> = vec![None; g.node_count()];
    dist[source as usize] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v as usize].unwrap();
        for &w in g.neighbors(v) {
            if dist[w as usize].is_none() {
                dist[w as usize] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    Ok(dist)
}

/// Number of nodes within `k` hops of `n`, including `n` itself.
pub fn ball_size(g: &Snapshot, n: NodeId, k: u32) -> Result<usize, GraphError> {
    let dist = bfs_distances(g, n)?;
    Ok(dist
        .iter()
        .filter(|d| matches!(d, Some(h) if *h <= k))
        .count())
}
