//! Biased second-order random walks (node2vec-style).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::Snapshot;
use crate::scalar::Real;
use crate::seeds;
use crate::NodeId;

/// Walk-sampling parameters. `p` is the return parameter (weight `1/p` for
/// stepping back to the previous node), `q` the in-out parameter (weight
/// `1/q` for leaving the previous node's neighborhood).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WalkConfig<F> {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub p: F,
    pub q: F,
    pub seed: u64,
}

impl<F: Real> Default for WalkConfig<F> {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 32,
            p: F::one(),
            q: F::one(),
            seed: 0,
        }
    }
}

impl<F: Real> WalkConfig<F> {
    fn validate(&self) {
        assert!(self.walks_per_node >= 1, "walks_per_node must be ≥ 1");
        assert!(self.walk_length >= 2, "walk_length must be ≥ 2");
        assert!(
            self.p > F::zero() && self.q > F::zero(),
            "p and q must be > 0"
        );
    }
}

/// node2vec bias for stepping from `cur` to `candidate` given the node
/// visited before `cur`.
#[inline]
fn bias_weight<F: Real>(g: &Snapshot, prev: NodeId, candidate: NodeId, p: F, q: F) -> F {
    if candidate == prev {
        p.recip()
    } else if g.has_edge(prev, candidate) {
        F::one()
    } else {
        q.recip()
    }
}

/// Transition probabilities from `cur`, aligned with its sorted neighbor
/// list. Uniform when there is no previous node (first step). Empty exactly
/// when `cur` is isolated, which tells the walker to stop.
pub fn transition_distribution<F: Real>(
    g: &Snapshot,
    prev: Option<NodeId>,
    cur: NodeId,
    p: F,
    q: F,
) -> Vec<(NodeId, F)> {
    let nbrs = g.neighbors(cur);
    if nbrs.is_empty() {
        return Vec::new();
    }
    match prev {
        None => {
            let w = F::from_count(nbrs.len()).recip();
            nbrs.iter().map(|&v| (v, w)).collect()
        }
        Some(prev) => {
            let weights: Vec<F> = nbrs
                .iter()
                .map(|&v| bias_weight(g, prev, v, p, q))
                .collect();
            let total: F = weights.iter().copied().sum();
            nbrs.iter()
                .zip(weights)
                .map(|(&v, w)| (v, w / total))
                .collect()
        }
    }
}

/// Samples `walks_per_node` truncated biased walks from every start node,
/// in `(start, walk index)` order. Each walk's RNG stream is derived from
/// `(seed, start, walk index)`, so output is reproducible and independent of
/// the parallel schedule. Dead ends truncate a walk; isolated starts yield
/// length-1 walks.
pub fn sample_walks<F: Real>(
    g: &Snapshot,
    starts: &[NodeId],
    cfg: &WalkConfig<F>,
) -> Vec<Vec<NodeId>> {
    cfg.validate();
    let jobs: Vec<(NodeId, usize)> = starts
        .iter()
        .flat_map(|&s| (0..cfg.walks_per_node).map(move |i| (s, i)))
        .collect();
    jobs.into_par_iter()
        .map(|(start, widx)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(
                cfg.seed,
                &[u64::from(start), widx as u64],
            ));
            walk_from(g, start, cfg, &mut rng)
        })
        .collect()
}

fn walk_from<F: Real>(
    g: &Snapshot,
    start: NodeId,
    cfg: &WalkConfig<F>,
    rng: &mut ChaCha8Rng,
) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(cfg.walk_length);
    walk.push(start);
    let mut prev: Option<NodeId> = None;
    while walk.len() < cfg.walk_length {
        let cur = *walk.last().unwrap();
        let nbrs = g.neighbors(cur);
        if nbrs.is_empty() {
            break;
        }
        let next = match prev {
            None => nbrs[rng.gen_range(0..nbrs.len())],
            Some(pv) => {
                let total: F = nbrs
                    .iter()
                    .map(|&v| bias_weight(g, pv, v, cfg.p, cfg.q))
                    .sum();
                let mut r = F::lit(rng.gen::<f64>()) * total;
                let mut chosen = *nbrs.last().unwrap();
                for &v in nbrs {
                    let w = bias_weight(g, pv, v, cfg.p, cfg.q);
                    if r < w {
                        chosen = v;
                        break;
                    }
                    r -= w;
                }
                chosen
            }
        };
        prev = Some(cur);
        walk.push(next);
    }
    walk
}

/// Nodes active in `cur` whose neighbor set differs from what it was in
/// `prev` — including nodes that just became active. These are the walk
/// sources for the incremental model update.
pub fn evolutionary_nodes(prev: &Snapshot, cur: &Snapshot) -> Vec<NodeId> {
    assert_eq!(
        prev.node_count(),
        cur.node_count(),
        "snapshots must share the global index space"
    );
    cur.active_nodes()
        .iter()
        .copied()
        .filter(|&v| prev.neighbors(v) != cur.neighbors(v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Snapshot {
        Snapshot::from_edges(3, [(0, 1), (1, 2)])
    }

    #[test]
    fn first_step_is_uniform() {
        let g = path3();
        let d = transition_distribution(&g, None, 1, 2.0f64, 0.5);
        assert_eq!(d, vec![(0, 0.5), (2, 0.5)]);
    }

    #[test]
    fn unbiased_case_is_uniform_regardless_of_prev() {
        let g = path3();
        let d = transition_distribution(&g, Some(0), 1, 1.0f64, 1.0);
        assert_eq!(d, vec![(0, 0.5), (2, 0.5)]);
    }

    #[test]
    fn return_and_inout_biases() {
        // prev = 0, cur = 1 on a path: back to 0 has weight 1/p = 0.5,
        // forward to 2 has weight 1/q = 2 → probabilities 0.2 / 0.8
        let g = path3();
        let d = transition_distribution(&g, Some(0), 1, 2.0f64, 0.5);
        assert_eq!(d.len(), 2);
        assert!((d[0].1 - 0.2).abs() < 1e-12);
        assert!((d[1].1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn neighbors_of_prev_keep_unit_weight() {
        // triangle: candidate 2 is adjacent to prev 0, so q is irrelevant
        let g = Snapshot::from_edges(3, [(0, 1), (0, 2), (1, 2)]);
        for q in [0.25f64, 4.0] {
            let d = transition_distribution(&g, Some(0), 1, 2.0, q);
            // weights: back to 0 → 1/2, to 2 → 1 (distance-1 from prev)
            assert!((d[0].1 - (0.5 / 1.5)).abs() < 1e-12);
            assert!((d[1].1 - (1.0 / 1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn isolated_node_gets_empty_distribution() {
        let g = Snapshot::from_edges(2, std::iter::empty());
        assert!(transition_distribution(&g, None, 0, 1.0f64, 1.0).is_empty());
    }

    #[test]
    fn distributions_sum_to_one() {
        let g = Snapshot::from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (1, 4)]);
        for prev in [None, Some(0), Some(2)] {
            for &cur in g.active_nodes() {
                if let Some(pv) = prev {
                    if !g.has_edge(pv, cur) {
                        continue;
                    }
                }
                let d = transition_distribution(&g, prev, cur, 2.0f64, 0.25);
                let total: f64 = d.iter().map(|(_, w)| w).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_edge_forces_alternation() {
        let g = Snapshot::from_edges(2, [(0, 1)]);
        let cfg = WalkConfig {
            walk_length: 4,
            ..WalkConfig::<f64>::default()
        };
        for walk in sample_walks(&g, &[0, 1], &cfg) {
            assert_eq!(walk.len(), 4);
            for w in walk.windows(2) {
                assert_ne!(w[0], w[1]);
                assert!(g.has_edge(w[0], w[1]));
            }
        }
    }

    #[test]
    fn empty_starts_yield_no_walks() {
        let g = path3();
        assert!(sample_walks(&g, &[], &WalkConfig::<f64>::default()).is_empty());
    }

    #[test]
    fn isolated_start_yields_length_one_walk() {
        let g = Snapshot::from_edges(3, [(0, 1)]);
        let walks = sample_walks(&g, &[2], &WalkConfig::<f64>::default());
        assert_eq!(walks.len(), 10);
        assert!(walks.iter().all(|w| w == &vec![2]));
    }

    #[test]
    fn walks_are_deterministic_and_follow_edges() {
        let g = Snapshot::from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]);
        let cfg = WalkConfig {
            seed: 7,
            p: 2.0f64,
            q: 0.5,
            ..Default::default()
        };
        let a = sample_walks(&g, g.active_nodes(), &cfg);
        let b = sample_walks(&g, g.active_nodes(), &cfg);
        assert_eq!(a, b);
        assert_eq!(a.len(), 5 * 10);
        for walk in &a {
            assert_eq!(walk.len(), 32);
            for w in walk.windows(2) {
                assert!(g.has_edge(w[0], w[1]));
            }
        }
        let c = sample_walks(&g, g.active_nodes(), &WalkConfig { seed: 8, ..cfg });
        assert_ne!(a, c);
    }

    #[test]
    fn evolutionary_nodes_examples() {
        let n = 4;
        let prev = Snapshot::from_edges(n, [(0, 1), (1, 2)]);
        // identical snapshots → none
        assert!(evolutionary_nodes(&prev, &prev.clone()).is_empty());
        // {a–b, b–c} → {a–b, b–d}: b changed, d newly active, c dropped out
        let cur = Snapshot::from_edges(n, [(0, 1), (1, 3)]);
        assert_eq!(evolutionary_nodes(&prev, &cur), vec![1, 3]);
        // edgeless → {a–b}: both endpoints are new
        let edgeless = Snapshot::from_edges(n, std::iter::empty());
        let ab = Snapshot::from_edges(n, [(0, 1)]);
        assert_eq!(evolutionary_nodes(&edgeless, &ab), vec![0, 1]);
    }
}
