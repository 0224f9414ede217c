//! Intrinsic embedding quality via graph reconstruction: connect the
//! `|E|` closest vector pairs, then compare against the original snapshot
//! with per-node and micro-averaged precision/recall/F1. Also hosts the
//! hyperparameter sweep that mirrors the tuning protocol.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rayon::prelude::*;

use crate::embedding::{embed_dynamic, EmbedError, EmbeddingSeries, SgnsConfig, WalkConfig};
use crate::graph::{Snapshot, SnapshotSequence};
use crate::scalar::Real;
use crate::seeds;
use crate::NodeId;

/// Rows of the pair space handled per parallel tile in [`reconstruct`].
const TILE_ROWS: usize = 128;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("reconstruction needs at least 2 embedded nodes, found {0}")]
    TooFewNodes(usize),
    #[error("edge budget {budget} exceeds the {pairs} available node pairs")]
    BudgetTooLarge { budget: usize, pairs: usize },
    #[error("last snapshot cannot be scored (too few embedded nodes or no edges)")]
    LastSnapshotUnusable,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// Per-node reconstruction outcome. `correct` counts incident links present
/// in both graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeScores<F> {
    pub node: NodeId,
    pub correct: usize,
    pub deg_orig: usize,
    pub deg_recon: usize,
    pub precision: F,
    pub recall: F,
    pub f1: F,
}

/// Reconstruction quality of one snapshot: per-node rows (active nodes,
/// ascending) plus micro-averages over incidence sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport<F> {
    pub snapshot_index: usize,
    pub per_node: Vec<NodeScores<F>>,
    pub micro_precision: F,
    pub micro_recall: F,
    pub micro_f1: F,
}

/// Harmonic mean of precision and recall; zero when both are zero.
pub fn f1_score<F: Real>(precision: F, recall: F) -> F {
    if precision + recall == F::zero() {
        F::zero()
    } else {
        F::lit(2.0) * precision * recall / (precision + recall)
    }
}

/// Connects the `edge_budget` closest pairs by Euclidean distance between
/// embedding vectors. Distance ties break lexicographically on the
/// `(min, max)` node pair, so the result is a deterministic function of the
/// input. The pair space is scanned in fixed-size row tiles evaluated in
/// parallel, each keeping its own best-candidates heap.
pub fn reconstruct<F: Real>(
    vectors: &BTreeMap<NodeId, Vec<F>>,
    edge_budget: usize,
) -> Result<BTreeSet<(NodeId, NodeId)>, EvalError> {
    let nodes: Vec<NodeId> = vectors.keys().copied().collect();
    if nodes.len() < 2 {
        return Err(EvalError::TooFewNodes(nodes.len()));
    }
    let pairs = nodes.len() * (nodes.len() - 1) / 2;
    if edge_budget > pairs {
        return Err(EvalError::BudgetTooLarge {
            budget: edge_budget,
            pairs,
        });
    }
    if edge_budget == 0 {
        return Ok(BTreeSet::new());
    }

    let vecs: Vec<&[F]> = nodes.iter().map(|n| vectors[n].as_slice()).collect();
    let row_tiles: Vec<(usize, usize)> = (0..nodes.len() - 1)
        .step_by(TILE_ROWS)
        .map(|lo| (lo, (lo + TILE_ROWS).min(nodes.len() - 1)))
        .collect();

    let mut candidates: Vec<Candidate<F>> = row_tiles
        .par_iter()
        .map(|&(lo, hi)| {
            let mut heap: BinaryHeap<Candidate<F>> = BinaryHeap::with_capacity(edge_budget + 1);
            for i in lo..hi {
                for j in i + 1..nodes.len() {
                    let dist = vecs[i]
                        .iter()
                        .zip(vecs[j])
                        .map(|(&a, &b)| (a - b) * (a - b))
                        .sum::<F>();
                    let cand = Candidate {
                        dist,
                        pair: (nodes[i], nodes[j]),
                    };
                    if heap.len() < edge_budget {
                        heap.push(cand);
                    } else if cand < *heap.peek().unwrap() {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            heap.into_vec()
        })
        .flatten()
        .collect();

    candidates.sort_unstable();
    Ok(candidates
        .into_iter()
        .take(edge_budget)
        .map(|c| c.pair)
        .collect())
}

/// Squared distance plus the tie-breaking pair, ordered worst-last.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate<F> {
    dist: F,
    pair: (NodeId, NodeId),
}

impl<F: Real> Eq for Candidate<F> {}

impl<F: Real> Ord for Candidate<F> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dist
            .partial_cmp(&other.dist)
            .expect("embedding distances must be finite")
            .then(self.pair.cmp(&other.pair))
    }
}

impl<F: Real> PartialOrd for Candidate<F> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Scores a reconstructed edge set against the original snapshot.
///
/// Per node: precision = correct/deg_recon, recall = correct/deg_orig, F1
/// their harmonic mean, each 0 when its denominator is 0. Micro metrics
/// aggregate incidence counts first (every edge counted at both endpoints).
pub fn score_reconstruction<F: Real>(
    original: &Snapshot,
    recon: &BTreeSet<(NodeId, NodeId)>,
) -> ReconstructionReport<F> {
    let n = original.node_count();
    let mut deg_recon = vec![0usize; n];
    let mut correct = vec![0usize; n];
    for &(u, v) in recon {
        debug_assert!(original.is_active(u) && original.is_active(v));
        deg_recon[u as usize] += 1;
        deg_recon[v as usize] += 1;
        if original.has_edge(u, v) {
            correct[u as usize] += 1;
            correct[v as usize] += 1;
        }
    }

    let ratio = |num: usize, den: usize| {
        if den == 0 {
            F::zero()
        } else {
            F::from_count(num) / F::from_count(den)
        }
    };

    let mut sum_c = 0usize;
    let mut sum_orig = 0usize;
    let mut sum_recon = 0usize;
    let per_node: Vec<NodeScores<F>> = original
        .active_nodes()
        .iter()
        .map(|&v| {
            let i = v as usize;
            let deg_orig = original.degree(v);
            sum_c += correct[i];
            sum_orig += deg_orig;
            sum_recon += deg_recon[i];
            NodeScores {
                node: v,
                correct: correct[i],
                deg_orig,
                deg_recon: deg_recon[i],
                precision: ratio(correct[i], deg_recon[i]),
                recall: ratio(correct[i], deg_orig),
                // harmonic mean of precision and recall, written as one
                // correctly-rounded division so that equal rationals from
                // different count pairs stay bitwise-tied under ranking
                f1: ratio(2 * correct[i], deg_recon[i] + deg_orig),
            }
        })
        .collect();

    ReconstructionReport {
        snapshot_index: 0,
        per_node,
        micro_precision: ratio(sum_c, sum_recon),
        micro_recall: ratio(sum_c, sum_orig),
        micro_f1: ratio(2 * sum_c, sum_recon + sum_orig),
    }
}

/// Reconstructs and scores every snapshot of a sequence with its own edge
/// count as the budget. Snapshots with fewer than two embedded nodes, no
/// edges, or a budget above the embeddable pair count are skipped with a
/// warning (their indices are simply absent from the result).
pub fn evaluate_series<F: Real>(
    seq: &SnapshotSequence,
    series: &EmbeddingSeries<F>,
) -> Vec<ReconstructionReport<F>> {
    assert_eq!(
        seq.len(),
        series.len(),
        "series must align with the sequence"
    );
    let mut reports = Vec::new();
    for idx in 0..seq.len() {
        let snap = seq.get(idx);
        let vectors = series.get(idx);
        let budget = snap.edge_count();
        let pairs = vectors.len().saturating_sub(1) * vectors.len() / 2;
        if vectors.len() < 2 || budget == 0 || budget > pairs {
            log::warn!(
                "snapshot {idx} skipped: {} embedded nodes, {budget} edges",
                vectors.len()
            );
            continue;
        }
        let recon = reconstruct(vectors, budget).expect("bounds checked above");
        let mut report = score_reconstruction(snap, &recon);
        report.snapshot_index = idx;
        reports.push(report);
    }
    reports
}

/// One grid point of the sweep with its run-averaged last-snapshot micro
/// metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneRow<F> {
    pub p: F,
    pub q: F,
    pub dim: usize,
    pub mean_precision: F,
    pub mean_recall: F,
    pub mean_f1: F,
}

/// Full sweep table plus the winning configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult<F> {
    pub best: TuneRow<F>,
    pub rows: Vec<TuneRow<F>>,
}

/// Sweeps `(p, q, dim)` over the grids, embedding `runs` times per
/// configuration with derived seeds and averaging the last snapshot's micro
/// metrics. The best row maximizes mean F1; exact ties prefer smaller dim,
/// then smaller p, then smaller q.
pub fn tune<F: Real>(
    seq: &SnapshotSequence,
    p_grid: &[F],
    q_grid: &[F],
    dims: &[usize],
    runs: usize,
    wcfg: &WalkConfig<F>,
    scfg: &SgnsConfig<F>,
) -> Result<TuneResult<F>, EvalError> {
    assert!(
        !p_grid.is_empty() && !q_grid.is_empty() && !dims.is_empty(),
        "grids must be non-empty"
    );
    assert!(runs >= 1, "runs must be ≥ 1");

    let combos: Vec<(F, F, usize)> = dims
        .iter()
        .flat_map(|&d| {
            p_grid
                .iter()
                .flat_map(move |&p| q_grid.iter().map(move |&q| (p, q, d)))
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..combos.len())
        .flat_map(|c| (0..runs).map(move |r| (c, r)))
        .collect();
    let outcomes: Vec<(F, F, F)> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let (p, q, dim) = combos[c];
            let job = (c * runs + r) as u64;
            let w = WalkConfig {
                p,
                q,
                seed: seeds::derive_labeled(wcfg.seed, "tune-walks", job),
                ..wcfg.clone()
            };
            let s = SgnsConfig {
                dim,
                seed: seeds::derive_labeled(scfg.seed, "tune-sgns", job),
                ..scfg.clone()
            };
            last_snapshot_metrics(seq, &w, &s)
        })
        .collect::<Result<_, _>>()?;

    let rows: Vec<TuneRow<F>> = combos
        .iter()
        .enumerate()
        .map(|(c, &(p, q, dim))| {
            let slice = &outcomes[c * runs..(c + 1) * runs];
            let scale = F::from_count(runs);
            TuneRow {
                p,
                q,
                dim,
                mean_precision: slice.iter().map(|m| m.0).sum::<F>() / scale,
                mean_recall: slice.iter().map(|m| m.1).sum::<F>() / scale,
                mean_f1: slice.iter().map(|m| m.2).sum::<F>() / scale,
            }
        })
        .collect();

    let best = rows
        .iter()
        .min_by(|a, b| {
            b.mean_f1
                .partial_cmp(&a.mean_f1)
                .expect("finite F1")
                .then(a.dim.cmp(&b.dim))
                .then(a.p.partial_cmp(&b.p).unwrap())
                .then(a.q.partial_cmp(&b.q).unwrap())
        })
        .cloned()
        .unwrap();

    Ok(TuneResult { best, rows })
}

fn last_snapshot_metrics<F: Real>(
    seq: &SnapshotSequence,
    wcfg: &WalkConfig<F>,
    scfg: &SgnsConfig<F>,
) -> Result<(F, F, F), EvalError> {
    let series = embed_dynamic(seq, wcfg, scfg)?;
    let idx = seq.len() - 1;
    let snap = seq.get(idx);
    let vectors = series.get(idx);
    let budget = snap.edge_count();
    let pairs = vectors.len().saturating_sub(1) * vectors.len() / 2;
    if vectors.len() < 2 || budget == 0 || budget > pairs {
        return Err(EvalError::LastSnapshotUnusable);
    }
    let recon = reconstruct(vectors, budget)?;
    let report: ReconstructionReport<F> = score_reconstruction(snap, &recon);
    Ok((report.micro_precision, report.micro_recall, report.micro_f1))
}
