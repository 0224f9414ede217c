//! NC-LID: local intrinsic dimensionality of nodes, measured as the mismatch
//! between a node's natural community and its distance ball.
//!
//! For a node `n` with natural community `S` and community eccentricity `k`,
//! the score is `-ln(|S| / D(n, k))` where `D(n, k)` counts the nodes within
//! distance `k` of `n` (including `n`). A score of 0 means the community
//! exactly fills the ball — the distance function separates it perfectly;
//! larger scores mean the community has a shape the distance cannot carve
//! out.
//!
//! The discrete-time variant uses shortest-path hops on one snapshot; the
//! temporal variant (see [`temporal`]) replaces hops with mean
//! earliest-arrival latencies on the aggregated graph.

mod temporal;

pub use temporal::{
    earliest_arrival_path, earliest_arrivals, temporal_distance, temporal_distance_matrix,
    temporal_distances_from, temporal_nc_lid, MeanLatency, TemporalDistanceMatrix,
    TemporalPathStep,
};

use rayon::prelude::*;

use crate::community::{detect_natural_community, CommunityError};
use crate::graph::{bfs_distances, GraphError, Snapshot};
use crate::scalar::Real;
use crate::NodeId;

/// NC-LID of one node.
///
/// `radius_k` is in hops for the snapshot variant and in time units (a mean
/// latency) for the temporal one. `community_size ≤ ball` always holds, so
/// `value ≥ 0`, with equality exactly when the community fills the ball.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NcLidScore<F> {
    pub node: NodeId,
    pub value: F,
    pub community_size: usize,
    pub radius_k: F,
    pub ball: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum LidError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error("temporal NC-LID undefined: no community member is temporally reachable")]
    Undefined,
}

/// NC-LID of `n` in a single snapshot. A degree-0 node degenerates to the
/// singleton community and scores 0.
pub fn nc_lid<F: Real>(g: &Snapshot, n: NodeId, alpha: F) -> Result<NcLidScore<F>, LidError> {
    let community = detect_natural_community(g, n, alpha)?;
    if community.members.len() == 1 {
        // singleton: ball at k = 0 is the node itself
        return Ok(NcLidScore {
            node: n,
            value: F::zero(),
            community_size: 1,
            radius_k: F::zero(),
            ball: 1,
        });
    }
    let dist = bfs_distances(g, n)?;
    let k = community
        .members
        .iter()
        .map(|&v| dist[v as usize].expect("community members are reachable"))
        .max()
        .unwrap();
    let ball = dist
        .iter()
        .filter(|d| matches!(d, Some(h) if *h <= k))
        .count();
    let size = community.members.len();
    debug_assert!(size <= ball);
    Ok(NcLidScore {
        node: n,
        value: (F::from_count(ball) / F::from_count(size)).ln(),
        community_size: size,
        radius_k: F::from_u32(k).unwrap(),
        ball,
    })
}

/// NC-LID for every active node of a snapshot, ascending by node index.
/// Nodes are independent, so the map runs in parallel.
pub fn nc_lid_snapshot<F: Real>(g: &Snapshot, alpha: F) -> Result<Vec<NcLidScore<F>>, LidError> {
    g.active_nodes()
        .par_iter()
        .map(|&n| nc_lid(g, n, alpha))
        .collect()
}
