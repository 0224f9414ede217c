//! Snapshot-sequence serialization: a directory of per-snapshot edge lists
//! (`u v` lines over dense indices) plus a JSON manifest with the bin
//! boundaries and the label map.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Snapshot, SnapshotSequence};

#[derive(Debug, Serialize, Deserialize)]
struct DirManifest {
    boundaries: Vec<f64>,
    label_map: Vec<String>,
}

/// Writes `seq` under `dir` as `snapshot_<i>.edges` files plus
/// `manifest.json`. `labels[i]` is the original label of dense index `i`.
pub fn write_snapshot_dir(
    seq: &SnapshotSequence,
    labels: &[String],
    dir: &Path,
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (i, snap) in seq.snapshots().iter().enumerate() {
        let mut f = fs::File::create(dir.join(format!("snapshot_{i}.edges")))?;
        for (u, v) in snap.edges() {
            writeln!(f, "{u} {v}")?;
        }
    }
    let manifest = DirManifest {
        boundaries: seq.boundaries().to_vec(),
        label_map: labels.to_vec(),
    };
    let f = fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(f, &manifest)?;
    Ok(())
}

/// Reads a directory produced by [`write_snapshot_dir`].
pub fn read_snapshot_dir(dir: &Path) -> std::io::Result<(SnapshotSequence, Vec<String>)> {
    let manifest: DirManifest =
        serde_json::from_reader(fs::File::open(dir.join("manifest.json"))?)?;
    let n = manifest.label_map.len();
    let count = manifest.boundaries.len().saturating_sub(1);
    let mut snapshots = Vec::with_capacity(count);
    for i in 0..count {
        let f = fs::File::open(dir.join(format!("snapshot_{i}.edges")))?;
        let mut edges = Vec::new();
        for line in BufReader::new(f).lines() {
            let line = line?;
            let mut it = line.split_whitespace();
            let (u, v) = (it.next(), it.next());
            if let (Some(u), Some(v)) = (u, v) {
                let parse = |s: &str| {
                    s.parse().map_err(|_| {
                        std::io::Error::new(std::io::ErrorKind::InvalidData, "bad node index")
                    })
                };
                edges.push((parse(u)?, parse(v)?));
            }
        }
        snapshots.push(Snapshot::from_edges(n, edges));
    }
    Ok((
        SnapshotSequence::from_parts(snapshots, manifest.boundaries),
        manifest.label_map,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_snapshots, parse_event_log, BinSpec};
    use std::io::Cursor;

    #[test]
    fn directory_round_trip() {
        let log = parse_event_log(Cursor::new("a b 1\nb c 2\na c 5\nc d 9")).unwrap();
        let seq = build_snapshots(&log, BinSpec::Count(3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_snapshot_dir(&seq, log.labels(), dir.path()).unwrap();

        let (back, labels) = read_snapshot_dir(dir.path()).unwrap();
        assert_eq!(labels, log.labels());
        assert_eq!(back.boundaries(), seq.boundaries());
        assert_eq!(back.len(), seq.len());
        for (a, b) in back.snapshots().iter().zip(seq.snapshots()) {
            let ea: Vec<_> = a.edges().collect();
            let eb: Vec<_> = b.edges().collect();
            assert_eq!(ea, eb);
            assert_eq!(a.interval(), b.interval());
        }
    }
}
