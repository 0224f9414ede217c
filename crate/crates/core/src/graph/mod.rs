//! Temporal-network representations: event logs, snapshot sequences and
//! aggregated time-stamped graphs, plus the distance kernels the rest of the
//! crate is built on.

mod aggregate;
mod event;
pub mod io;
mod snapshot;

pub use aggregate::{aggregate_graph, AggregatedGraph};
pub use event::{parse_event_log, Event, EventLog, ParseError};
pub use snapshot::{
    activation_stats, ball_size, bfs_distances, build_snapshots, BinSpec, Snapshot,
    SnapshotSequence,
};

use crate::NodeId;

/// Errors from graph construction and the distance kernels.
#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("event log has no events")]
    EmptyLog,
    #[error("snapshot spec yields zero bins")]
    ZeroBins,
    #[error("node {0} is not active in this snapshot")]
    InactiveNode(NodeId),
    #[error("node index {0} out of range (n = {1})")]
    NodeOutOfRange(NodeId, usize),
}
