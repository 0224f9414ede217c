//! Temporal distances on aggregated time-stamped graphs, and the
//! continuous-time NC-LID variant built on them.
//!
//! A temporal path follows events with strictly increasing timestamps; the
//! first hop from the source at start time `s` may use any event with
//! `t ≥ s`, and arrival time is the final event's timestamp. The distance
//! from `i` to `j` is the mean of the earliest-arrival latencies over all
//! start times at which anything can change — the distinct event timestamps
//! of the log. Unreachable start times are excluded from the mean; a pair is
//! unreachable only if no start time reaches it.
//!
//! Latencies are integer-valued, so means are kept as exact `i64` rationals
//! and every ordering comparison (the temporal radius, ball membership) is
//! exact.

use num_rational::Ratio;
use rayon::prelude::*;

use crate::community::detect_natural_community;
use crate::graph::{AggregatedGraph, EventLog, GraphError};
use crate::scalar::Real;
use crate::{NodeId, Timestamp};

use super::{LidError, NcLidScore};

/// Mean earliest-arrival latency as an exact rational.
pub type MeanLatency = Ratio<i64>;

/// One hop of a temporal path certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalPathStep {
    pub from: NodeId,
    pub to: NodeId,
    pub t: Timestamp,
}

/// Mean temporal distances for every ordered pair. Rows are sources; the
/// diagonal is zero and entries are `None` when never reachable. Not
/// symmetric in general.
#[derive(Debug, Clone)]
pub struct TemporalDistanceMatrix {
    rows: Vec<Vec<Option<MeanLatency>>>,
}

impl TemporalDistanceMatrix {
    pub fn get(&self, i: NodeId, j: NodeId) -> Option<MeanLatency> {
        self.rows[i as usize][j as usize]
    }

    pub fn row(&self, i: NodeId) -> &[Option<MeanLatency>] {
        &self.rows[i as usize]
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }
}

fn check_node(log: &EventLog, v: NodeId) -> Result<(), LidError> {
    if (v as usize) >= log.node_count() {
        return Err(GraphError::NodeOutOfRange(v, log.node_count()).into());
    }
    Ok(())
}

/// Earliest arrival time at every node for a walker leaving `source` at
/// `start`. The source itself reports `start`.
///
/// Events sharing a timestamp are relaxed in one batch against the state
/// before that timestamp, so equal-time events can never chain.
pub fn earliest_arrivals(
    log: &EventLog,
    source: NodeId,
    start: Timestamp,
) -> Result<Vec<Option<Timestamp>>, LidError> {
    check_node(log, source)?;
    Ok(sweep(log, source, start).0)
}

/// One earliest-arrival temporal path from `source` to `target` starting at
/// `start`, or `None` if unreachable. Step timestamps are strictly
/// increasing and the first is ≥ `start`. Intended for debugging and
/// verification.
pub fn earliest_arrival_path(
    log: &EventLog,
    source: NodeId,
    target: NodeId,
    start: Timestamp,
) -> Result<Option<Vec<TemporalPathStep>>, LidError> {
    check_node(log, source)?;
    check_node(log, target)?;
    if source == target {
        return Ok(Some(Vec::new()));
    }
    let (arr, pred) = sweep(log, source, start);
    if arr[target as usize].is_none() {
        return Ok(None);
    }
    let mut path = Vec::new();
    let mut cur = target;
    while cur != source {
        let step = pred[cur as usize].expect("reachable nodes have predecessors");
        path.push(step);
        cur = step.from;
    }
    path.reverse();
    Ok(Some(path))
}

/// Batched time-ordered relaxation; returns arrivals and predecessor steps.
/// `arrival[source]` is reported as `start` but internally behaves as
/// `start - 1` so the first hop accepts events with `t ≥ start`.
fn sweep(
    log: &EventLog,
    source: NodeId,
    start: Timestamp,
) -> (Vec<Option<Timestamp>>, Vec<Option<TemporalPathStep>>) {
    let n = log.node_count();
    let mut arr: Vec<Option<Timestamp>> = vec![None; n];
    let mut pred: Vec<Option<TemporalPathStep>> = vec![None; n];
    arr[source as usize] = Some(start.saturating_sub(1));

    let events = log.events();
    let mut i = events.partition_point(|e| e.t < start);
    let mut batch: Vec<(NodeId, TemporalPathStep)> = Vec::new();
    while i < events.len() {
        let t = events[i].t;
        batch.clear();
        while i < events.len() && events[i].t == t {
            let e = &events[i];
            for (from, to) in [(e.x, e.y), (e.y, e.x)] {
                if matches!(arr[from as usize], Some(a) if t > a) && arr[to as usize].is_none() {
                    batch.push((to, TemporalPathStep { from, to, t }));
                }
            }
            i += 1;
        }
        for &(to, step) in &batch {
            if arr[to as usize].is_none() {
                arr[to as usize] = Some(t);
                pred[to as usize] = Some(step);
            }
        }
    }

    arr[source as usize] = Some(start);
    (arr, pred)
}

/// Mean temporal distances from `source` to every node. Exact integer
/// accumulation, so the result is identical however the start-time loop is
/// parallelized.
pub fn temporal_distances_from(
    log: &EventLog,
    source: NodeId,
) -> Result<Vec<Option<MeanLatency>>, LidError> {
    check_node(log, source)?;
    let n = log.node_count();
    let starts = log.distinct_timestamps();
    let (sums, counts) = starts
        .par_iter()
        .fold(
            || (vec![0i64; n], vec![0i64; n]),
            |(mut sums, mut counts), &s| {
                let (arr, _) = sweep(log, source, s);
                for j in 0..n {
                    if j == source as usize {
                        continue;
                    }
                    if let Some(a) = arr[j] {
                        sums[j] += a - s;
                        counts[j] += 1;
                    }
                }
                (sums, counts)
            },
        )
        .reduce(
            || (vec![0i64; n], vec![0i64; n]),
            |(mut s1, mut c1), (s2, c2)| {
                for j in 0..n {
                    s1[j] += s2[j];
                    c1[j] += c2[j];
                }
                (s1, c1)
            },
        );

    let mut out: Vec<Option<MeanLatency>> = (0..n)
        .map(|j| (counts[j] > 0).then(|| Ratio::new(sums[j], counts[j])))
        .collect();
    out[source as usize] = Some(Ratio::from_integer(0));
    Ok(out)
}

/// Mean temporal distance for one ordered pair; `None` when `j` is never
/// reachable from `i`.
pub fn temporal_distance(
    log: &EventLog,
    i: NodeId,
    j: NodeId,
) -> Result<Option<MeanLatency>, LidError> {
    check_node(log, j)?;
    Ok(temporal_distances_from(log, i)?[j as usize])
}

/// Full ordered-pair distance matrix (one source sweep per row, in
/// parallel).
pub fn temporal_distance_matrix(log: &EventLog) -> Result<TemporalDistanceMatrix, LidError> {
    let rows = (0..log.node_count() as NodeId)
        .into_par_iter()
        .map(|i| temporal_distances_from(log, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TemporalDistanceMatrix { rows })
}

/// Continuous-time NC-LID: the natural community is detected on the
/// aggregated adjacency exactly as in the discrete case, while hops are
/// replaced by mean temporal latencies. The radius is the largest finite
/// member latency; the ball counts nodes within it (exact rational
/// comparison). Members that are never temporally reachable drop out of both
/// the community size and the radius.
pub fn temporal_nc_lid<F: Real>(
    ag: &AggregatedGraph,
    log: &EventLog,
    n: NodeId,
    alpha: F,
) -> Result<NcLidScore<F>, LidError> {
    let community = detect_natural_community(ag.as_snapshot(), n, alpha)?;
    let dist = temporal_distances_from(log, n)?;

    let reachable_members: Vec<MeanLatency> = community
        .members
        .iter()
        .filter_map(|&v| dist[v as usize])
        .collect();
    if reachable_members.is_empty() {
        return Err(LidError::Undefined);
    }
    let k: MeanLatency = reachable_members.iter().copied().max().unwrap();
    let ball = dist.iter().flatten().filter(|&&d| d <= k).count();
    let size = reachable_members.len();
    debug_assert!(size <= ball);

    let ratio_to_f = |r: MeanLatency| -> F {
        F::from_i64(*r.numer()).unwrap() / F::from_i64(*r.denom()).unwrap()
    };
    Ok(NcLidScore {
        node: n,
        value: (F::from_count(ball) / F::from_count(size)).ln(),
        community_size: size,
        radius_k: ratio_to_f(k),
        ball,
    })
}
