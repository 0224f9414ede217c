//! Dynamic random-walk embeddings: an initial skip-gram model trained on the
//! first snapshot's walks, then incrementally updated per snapshot with
//! walks from evolutionary nodes only, recording the per-snapshot vectors
//! along the way.

mod sgns;
mod walks;

pub use sgns::{
    incremental_update, sgns_pair_gradients, sgns_pair_objective, train_initial, EmbedError,
    EmbeddingModel, SgnsConfig,
};
pub use walks::{evolutionary_nodes, sample_walks, transition_distribution, WalkConfig};

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::graph::SnapshotSequence;
use crate::scalar::Real;
use crate::seeds;
use crate::NodeId;

/// Per-snapshot embeddings: for each snapshot, the input vectors of the
/// vocabulary nodes active in it.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSeries<F> {
    snapshots: Vec<BTreeMap<NodeId, Vec<F>>>,
    dim: usize,
}

impl<F: Real> EmbeddingSeries<F> {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vectors recorded after the model update for snapshot `idx`.
    pub fn get(&self, idx: usize) -> &BTreeMap<NodeId, Vec<F>> {
        &self.snapshots[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &BTreeMap<NodeId, Vec<F>>> {
        self.snapshots.iter()
    }

    /// Assembles a series from plain maps (deserialization path). All
    /// vectors must share one dimension.
    pub fn from_maps(snapshots: Vec<BTreeMap<NodeId, Vec<F>>>, dim: usize) -> Self {
        for map in &snapshots {
            debug_assert!(map.values().all(|v| v.len() == dim));
        }
        EmbeddingSeries { snapshots, dim }
    }
}

/// Runs the full dynamic pipeline over a snapshot sequence.
///
/// Snapshot 0 trains the initial model from walks over all its active
/// nodes; every later snapshot samples walks from its evolutionary nodes
/// and continues training on those only. Walk seeds mix the snapshot index
/// into `wcfg.seed`, so every snapshot gets its own stream while the whole
/// series stays a pure function of the configs.
pub fn embed_dynamic<F: Real>(
    seq: &SnapshotSequence,
    wcfg: &WalkConfig<F>,
    scfg: &SgnsConfig<F>,
) -> Result<EmbeddingSeries<F>, EmbedError> {
    let first = seq.get(0);
    if first.edge_count() == 0 {
        return Err(EmbedError::EmptyInitialSnapshot);
    }

    let walk_cfg_for = |snapshot_idx: usize| WalkConfig {
        seed: seeds::derive(wcfg.seed, &[snapshot_idx as u64]),
        ..wcfg.clone()
    };

    let walks = sample_walks(first, first.active_nodes(), &walk_cfg_for(0));
    let mut model = train_initial(&walks, scfg)?;
    let mut snapshots = Vec::with_capacity(seq.len());
    snapshots.push(snapshot_vectors(&model, first));

    for idx in 1..seq.len() {
        let prev = seq.get(idx - 1);
        let cur = seq.get(idx);
        let starts = evolutionary_nodes(prev, cur);
        let walks = sample_walks(cur, &starts, &walk_cfg_for(idx));
        incremental_update(&mut model, &walks);
        snapshots.push(snapshot_vectors(&model, cur));
    }

    Ok(EmbeddingSeries {
        snapshots,
        dim: scfg.dim,
    })
}

fn snapshot_vectors<F: Real>(
    model: &EmbeddingModel<F>,
    snap: &crate::graph::Snapshot,
) -> BTreeMap<NodeId, Vec<F>> {
    snap.active_nodes()
        .iter()
        .filter_map(|&v| model.vector(v).map(|vec| (v, vec.to_vec())))
        .collect()
}

/// Writes one snapshot's vectors: header `N D`, then `label v1 ... vD` per
/// node with fixed 6-decimal components, ascending by dense index.
pub fn write_embedding_file<F: Real>(
    vectors: &BTreeMap<NodeId, Vec<F>>,
    labels: &[String],
    path: &Path,
) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let dim = vectors.values().next().map_or(0, Vec::len);
    writeln!(out, "{} {}", vectors.len(), dim)?;
    for (&node, vec) in vectors {
        write!(out, "{}", labels[node as usize])?;
        for v in vec {
            write!(out, " {:.6}", v)?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Reads a file produced by [`write_embedding_file`], mapping labels back to
/// dense indices via `index_of`.
pub fn read_embedding_file<F: Real>(
    path: &Path,
    mut index_of: impl FnMut(&str) -> Option<NodeId>,
) -> std::io::Result<BTreeMap<NodeId, Vec<F>>> {
    let bad = |msg: String| std::io::Error::new(std::io::ErrorKind::InvalidData, msg);
    let mut lines = BufReader::new(std::fs::File::open(path)?).lines();
    let header = lines.next().ok_or_else(|| bad("missing header".into()))??;
    let mut hdr = header.split_whitespace();
    let n: usize = hdr
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad node count".into()))?;
    let dim: usize = hdr
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad dimension".into()))?;

    let mut map = BTreeMap::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let label = fields.next().ok_or_else(|| bad("missing label".into()))?;
        let node = index_of(label).ok_or_else(|| bad(format!("unknown label {label:?}")))?;
        let vec: Vec<F> = fields
            .map(|f| {
                f.parse::<f64>()
                    .map(F::lit)
                    .map_err(|_| bad(format!("bad component {f:?}")))
            })
            .collect::<Result<_, _>>()?;
        if vec.len() != dim {
            return Err(bad(format!(
                "expected {dim} components, found {}",
                vec.len()
            )));
        }
        map.insert(node, vec);
    }
    if map.len() != n {
        return Err(bad(format!("expected {n} rows, found {}", map.len())));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_snapshots, BinSpec, EventLog};

    fn seq_of(n: usize, triplets: &[(NodeId, NodeId, i64)], bins: usize) -> SnapshotSequence {
        let log = EventLog::from_triplets(n, triplets.iter().copied()).unwrap();
        build_snapshots(&log, BinSpec::Count(bins)).unwrap()
    }

    fn test_cfgs(seed: u64) -> (WalkConfig<f64>, SgnsConfig<f64>) {
        (
            WalkConfig {
                seed,
                walks_per_node: 4,
                walk_length: 8,
                ..Default::default()
            },
            SgnsConfig {
                dim: 12,
                window: 3,
                epochs_initial: 3,
                seed,
                ..Default::default()
            },
        )
    }

    #[test]
    fn single_snapshot_behaves_statically() {
        let seq = seq_of(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)], 1);
        let (w, s) = test_cfgs(1);
        let series = embed_dynamic(&seq, &w, &s).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series.get(0).len(), 4);
        assert!(series.get(0).values().all(|v| v.len() == 12));
    }

    #[test]
    fn identical_snapshots_keep_vectors_identical() {
        // same edges in both halves of the time range → empty update batch
        let seq = seq_of(3, &[(0, 1, 1), (1, 2, 1), (0, 1, 9), (1, 2, 9)], 2);
        let (w, s) = test_cfgs(2);
        let series = embed_dynamic(&seq, &w, &s).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series.get(0), series.get(1));
    }

    #[test]
    fn edgeless_first_snapshot_is_an_error() {
        // binning never produces an edgeless *first* bin (t_min always lands
        // there), so assemble the degenerate sequence directly
        use crate::graph::Snapshot;
        let seq = SnapshotSequence::from_parts(
            vec![
                Snapshot::from_edges(2, std::iter::empty()),
                Snapshot::from_edges(2, [(0, 1)]),
            ],
            vec![0.0, 1.0, 2.0],
        );
        let (w, s) = test_cfgs(3);
        assert!(matches!(
            embed_dynamic(&seq, &w, &s),
            Err(EmbedError::EmptyInitialSnapshot)
        ));
    }

    #[test]
    fn runs_are_bit_identical_given_equal_seeds() {
        let seq = seq_of(
            5,
            &[(0, 1, 1), (1, 2, 2), (2, 3, 5), (3, 4, 8), (0, 4, 9)],
            3,
        );
        let (w, s) = test_cfgs(7);
        let a = embed_dynamic(&seq, &w, &s).unwrap();
        let b = embed_dynamic(&seq, &w, &s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vocabulary_only_grows_and_new_nodes_enter_on_activation() {
        // node 3 first becomes active in the second bin
        let seq = seq_of(4, &[(0, 1, 1), (1, 2, 1), (0, 1, 9), (2, 3, 9)], 2);
        let (w, s) = test_cfgs(4);
        let series = embed_dynamic(&seq, &w, &s).unwrap();
        assert!(!series.get(0).contains_key(&3));
        assert!(series.get(1).contains_key(&3));
        // snapshot keys = active nodes present in vocabulary
        assert_eq!(
            series.get(1).keys().copied().collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn embedding_file_round_trip() {
        let seq = seq_of(3, &[(0, 1, 1), (1, 2, 1)], 1);
        let (w, s) = test_cfgs(5);
        let series = embed_dynamic(&seq, &w, &s).unwrap();
        let labels: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap0.emb");
        write_embedding_file(series.get(0), &labels, &path).unwrap();

        let first = std::fs::read_to_string(&path).unwrap();
        assert!(first.starts_with("3 12\n"));

        let back: BTreeMap<NodeId, Vec<f64>> = read_embedding_file(&path, |l| {
            labels.iter().position(|x| x == l).map(|i| i as NodeId)
        })
        .unwrap();
        assert_eq!(back.len(), 3);
        for (node, vec) in &back {
            let orig = &series.get(0)[node];
            for (a, b) in vec.iter().zip(orig) {
                assert!((a - b).abs() <= 5e-7, "6-decimal round trip");
            }
        }
    }
}
