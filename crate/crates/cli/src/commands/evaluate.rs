//! `dynlid evaluate` — reconstruct every snapshot from stored embedding
//! files and score it against the original graph.

use std::collections::BTreeMap;
use std::path::Path;

use dynlid_core::embedding::{read_embedding_file, EmbeddingSeries};
use dynlid_core::evaluation::{evaluate_series, ReconstructionReport};
use dynlid_core::graph::EventLog;
use dynlid_core::NodeId;

use crate::manifest::RunManifest;
use crate::table::{Cell, CsvWriter};
use crate::{CmdResult, Failure, InputArgs};

use super::{ensure_dir, load, write_json};

#[derive(serde::Serialize)]
struct NodeView {
    label: String,
    correct: usize,
    deg_orig: usize,
    deg_recon: usize,
    precision: f64,
    recall: f64,
    f1: f64,
}

#[derive(serde::Serialize)]
struct SnapshotView {
    snapshot_index: usize,
    micro_precision: f64,
    micro_recall: f64,
    micro_f1: f64,
    nodes: Vec<NodeView>,
}

#[derive(serde::Serialize)]
struct ReportView {
    snapshots: Vec<SnapshotView>,
}

pub fn run(input: &InputArgs, out: &Path) -> CmdResult {
    let (log, spec, seq) = load(input)?;

    let emb_dir = out.join("embeddings");
    if !emb_dir.is_dir() {
        return Err(Failure::MissingArtifact(emb_dir));
    }
    // cross-check against the producing run when its manifest is around
    let embed_manifest = out.join("manifest_embed.json");
    if embed_manifest.is_file() {
        let m = RunManifest::read(&embed_manifest)?;
        if m.input != input.input || m.snapshot_spec != spec {
            log::warn!(
                "embeddings in {} were produced from {} with {:?}; evaluating against {} with {:?}",
                emb_dir.display(),
                m.input.display(),
                m.snapshot_spec,
                input.input.display(),
                spec
            );
        }
    }
    let mut maps: Vec<BTreeMap<NodeId, Vec<f64>>> = Vec::with_capacity(seq.len());
    let mut dim = 0usize;
    for idx in 0..seq.len() {
        let path = emb_dir.join(format!("snapshot_{idx}.emb"));
        if !path.is_file() {
            return Err(Failure::MissingArtifact(path));
        }
        let map = read_embedding_file(&path, |label| log.index_of(label))
            .map_err(|e| Failure::Input(anyhow::anyhow!("{}: {e}", path.display())))?;
        if let Some(v) = map.values().next() {
            if dim == 0 {
                dim = v.len();
            } else if v.len() != dim {
                return Err(Failure::Input(anyhow::anyhow!(
                    "{} has dimension {} but earlier snapshots use {dim}",
                    path.display(),
                    v.len()
                )));
            }
        }
        maps.push(map);
    }

    let series = EmbeddingSeries::from_maps(maps, dim);
    let reports = evaluate_series(&seq, &series);

    ensure_dir(out)?;
    write_outputs(&log, &reports, out)?;
    RunManifest::bare("evaluate", &input.input, spec, out).write()?;

    for report in &reports {
        println!(
            "snapshot {}: precision={:.6} recall={:.6} f1={:.6}",
            report.snapshot_index, report.micro_precision, report.micro_recall, report.micro_f1
        );
    }
    Ok(())
}

fn write_outputs(
    log: &EventLog,
    reports: &[ReconstructionReport<f64>],
    out: &Path,
) -> Result<(), Failure> {
    let mut csv = CsvWriter::new(&[
        "snapshot_index",
        "node_label",
        "C",
        "deg_orig",
        "deg_recon",
        "precision",
        "recall",
        "f1",
    ]);
    let mut views = Vec::with_capacity(reports.len());
    for report in reports {
        let mut nodes = Vec::with_capacity(report.per_node.len());
        for row in &report.per_node {
            csv.row([
                report.snapshot_index.into(),
                Cell::Str(log.label(row.node)),
                row.correct.into(),
                row.deg_orig.into(),
                row.deg_recon.into(),
                row.precision.into(),
                row.recall.into(),
                row.f1.into(),
            ]);
            nodes.push(NodeView {
                label: log.label(row.node).to_string(),
                correct: row.correct,
                deg_orig: row.deg_orig,
                deg_recon: row.deg_recon,
                precision: row.precision,
                recall: row.recall,
                f1: row.f1,
            });
        }
        views.push(SnapshotView {
            snapshot_index: report.snapshot_index,
            micro_precision: report.micro_precision,
            micro_recall: report.micro_recall,
            micro_f1: report.micro_f1,
            nodes,
        });
    }
    csv.write_to(&out.join("reconstruction.csv"))?;
    write_json(
        &out.join("reconstruction.json"),
        &ReportView { snapshots: views },
    )
}
