//! Natural (local) communities grown greedily from a seed node.
//!
//! The community of a seed is found by fitness optimization: starting from
//! the singleton, repeatedly add the frontier neighbor with the largest
//! strictly positive fitness gain, pruning members whose removal improves
//! fitness after every addition, until no neighbor helps. Fitness of a node
//! set is
//!
//! ```text
//! f(S) = internal / (internal + boundary)^alpha
//! ```
//!
//! where `internal` sums the members' internal degrees (each inside edge
//! counted at both endpoints) and `boundary` counts edges leaving the set.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{bfs_distances, GraphError, Snapshot};
use crate::scalar::Real;
use crate::NodeId;

/// A seed-grown community together with its fitness and its hop
/// eccentricity `k` (the largest shortest-path distance from the seed to any
/// member, measured in the full graph).
#[derive(Debug, Clone, Serialize)]
pub struct NaturalCommunity<F> {
    pub seed: NodeId,
    /// Sorted member set; always contains the seed and induces a connected
    /// subgraph.
    pub members: Vec<NodeId>,
    pub fitness: F,
    pub k: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum CommunityError {
    #[error("member set is empty")]
    EmptyMembers,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Fitness of an arbitrary member set. Zero when the set has no internal
/// edge (in particular for singletons).
pub fn community_fitness<F: Real>(
    g: &Snapshot,
    members: &BTreeSet<NodeId>,
    alpha: F,
) -> Result<F, CommunityError> {
    if members.is_empty() {
        return Err(CommunityError::EmptyMembers);
    }
    let mut internal = 0usize;
    let mut boundary = 0usize;
    for &v in members {
        for w in g.neighbors(v) {
            if members.contains(w) {
                internal += 1;
            } else {
                boundary += 1;
            }
        }
    }
    Ok(fitness_value(internal, boundary, alpha))
}

fn fitness_value<F: Real>(internal: usize, boundary: usize, alpha: F) -> F {
    if internal == 0 {
        return F::zero();
    }
    let total = F::from_count(internal + boundary);
    F::from_count(internal) / total.powf(alpha)
}

/// Greedy growth state with incrementally maintained internal/boundary
/// counts; gains are O(deg) per candidate.
struct Growth<'g, F> {
    g: &'g Snapshot,
    alpha: F,
    members: BTreeSet<NodeId>,
    internal: usize,
    boundary: usize,
}

impl<'g, F: Real> Growth<'g, F> {
    fn new(g: &'g Snapshot, seed: NodeId, alpha: F) -> Self {
        Growth {
            g,
            alpha,
            members: BTreeSet::from([seed]),
            internal: 0,
            boundary: g.degree(seed),
        }
    }

    fn fitness(&self) -> F {
        fitness_value(self.internal, self.boundary, self.alpha)
    }

    /// Edges from `v` into the current member set.
    fn links_in(&self, v: NodeId) -> usize {
        self.g
            .neighbors(v)
            .iter()
            .filter(|w| self.members.contains(w))
            .count()
    }

    fn fitness_with(&self, v: NodeId) -> F {
        let into = self.links_in(v);
        let internal = self.internal + 2 * into;
        let boundary = self.boundary - into + (self.g.degree(v) - into);
        fitness_value(internal, boundary, self.alpha)
    }

    fn fitness_without(&self, v: NodeId) -> F {
        let into = self.links_in(v); // v is a member; links to other members
        let internal = self.internal - 2 * into;
        let boundary = self.boundary + into - (self.g.degree(v) - into);
        fitness_value(internal, boundary, self.alpha)
    }

    fn add(&mut self, v: NodeId) {
        let into = self.links_in(v);
        self.internal += 2 * into;
        self.boundary = self.boundary - into + (self.g.degree(v) - into);
        self.members.insert(v);
    }

    fn remove(&mut self, v: NodeId) {
        self.members.remove(&v);
        let into = self.links_in(v);
        self.internal -= 2 * into;
        self.boundary = self.boundary + into - (self.g.degree(v) - into);
    }

    /// Frontier = non-member neighbors of members, ascending.
    fn frontier(&self) -> Vec<NodeId> {
        let mut out = BTreeSet::new();
        for &v in &self.members {
            for &w in self.g.neighbors(v) {
                if !self.members.contains(&w) {
                    out.insert(w);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Would the members minus `v` still induce a connected subgraph
    /// containing the seed?
    fn connected_without(&self, v: NodeId, seed: NodeId) -> bool {
        let mut seen = BTreeSet::from([seed]);
        let mut stack = vec![seed];
        while let Some(u) = stack.pop() {
            for &w in self.g.neighbors(u) {
                if w != v && self.members.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.members.len() - 1
    }
}

/// Recovers the natural community of `seed`.
///
/// Additions require a strictly positive fitness gain; ties go to the
/// smallest node index. After each addition, non-seed members are scanned in
/// ascending index and removed whenever that strictly increases fitness
/// while keeping the set connected (the scan restarts after a removal). A
/// seed with degree 0 yields the degenerate `{seed}` community.
pub fn detect_natural_community<F: Real>(
    g: &Snapshot,
    seed: NodeId,
    alpha: F,
) -> Result<NaturalCommunity<F>, CommunityError> {
    if (seed as usize) >= g.node_count() {
        return Err(GraphError::NodeOutOfRange(seed, g.node_count()).into());
    }
    if g.degree(seed) == 0 {
        return Ok(NaturalCommunity {
            seed,
            members: vec![seed],
            fitness: F::zero(),
            k: 0,
        });
    }

    let mut growth = Growth::new(g, seed, alpha);
    let step_cap = 4 * g.node_count();
    let mut steps = 0usize;

    'grow: while steps < step_cap {
        let current = growth.fitness();
        let mut best: Option<(NodeId, F)> = None;
        for v in growth.frontier() {
            let f = growth.fitness_with(v);
            if f > current && best.map_or(true, |(_, bf)| f > bf) {
                best = Some((v, f));
            }
        }
        let Some((node, _)) = best else { break };
        growth.add(node);
        steps += 1;

        // prune: restart the ascending scan after every removal
        'prune: loop {
            if steps >= step_cap {
                break 'grow;
            }
            let current = growth.fitness();
            let candidates: Vec<NodeId> = growth
                .members
                .iter()
                .copied()
                .filter(|&v| v != seed)
                .collect();
            for v in candidates {
                if growth.fitness_without(v) > current && growth.connected_without(v, seed) {
                    growth.remove(v);
                    steps += 1;
                    continue 'prune;
                }
            }
            break;
        }
    }
    if steps >= step_cap {
        log::warn!("community growth for seed {seed} hit the {step_cap}-step cap");
    }

    let members: Vec<NodeId> = growth.members.iter().copied().collect();
    let dist = bfs_distances(g, seed)?;
    let k = members
        .iter()
        .map(|&v| dist[v as usize].expect("members are connected to the seed"))
        .max()
        .unwrap();
    Ok(NaturalCommunity {
        seed,
        members,
        fitness: growth.fitness(),
        k,
    })
}
