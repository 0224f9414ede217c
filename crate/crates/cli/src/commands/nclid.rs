//! `dynlid nclid` — NC-LID tables, per snapshot or temporal.

use std::path::Path;

use dynlid_core::community::detect_natural_community;
use dynlid_core::graph::{aggregate_graph, EventLog, Snapshot};
use dynlid_core::lid::{nc_lid_snapshot, temporal_nc_lid, NcLidScore};

use crate::manifest::RunManifest;
use crate::table::{Cell, CsvWriter};
use crate::{CmdResult, Failure, InputArgs};

use super::{ensure_dir, load, write_json};

#[derive(serde::Serialize)]
struct NcLidSummary {
    mean_nclid: f64,
    max_nclid: f64,
}

#[derive(serde::Serialize)]
struct CommunityView {
    seed: String,
    members: Vec<String>,
    fitness: f64,
    k: u32,
}

#[derive(serde::Serialize)]
struct SnapshotCommunities {
    snapshot_index: i64,
    communities: Vec<CommunityView>,
}

pub fn run(
    input: &InputArgs,
    alpha: f64,
    temporal: bool,
    dump_communities: bool,
    out: Option<&Path>,
) -> CmdResult {
    let (log, spec, seq) = load(input)?;

    let mut all_scores: Vec<f64> = Vec::new();
    let mut csv;
    let mut communities: Vec<SnapshotCommunities> = Vec::new();
    let csv_name;

    if temporal {
        csv_name = "nclid_temporal.csv";
        csv = CsvWriter::new(&["node_label", "nclid", "community_size", "k", "ball"]);
        let aggregated = aggregate_graph(&log).map_err(|e| Failure::Input(e.into()))?;
        let snap = aggregated.as_snapshot();
        for &node in snap.active_nodes() {
            let score: NcLidScore<f64> = temporal_nc_lid(&aggregated, &log, node, alpha)
                .map_err(|e| Failure::Internal(e.into()))?;
            all_scores.push(score.value);
            csv.row([
                Cell::Str(log.label(node)),
                score.value.into(),
                score.community_size.into(),
                score.radius_k.into(),
                score.ball.into(),
            ]);
        }
        if dump_communities {
            communities.push(snapshot_communities(snap, &log, alpha, -1)?);
        }
    } else {
        csv_name = "nclid.csv";
        csv = CsvWriter::new(&[
            "snapshot_index",
            "node_label",
            "nclid",
            "community_size",
            "k",
            "ball",
        ]);
        for (idx, snap) in seq.snapshots().iter().enumerate() {
            let scores = nc_lid_snapshot(snap, alpha).map_err(|e| Failure::Internal(e.into()))?;
            for score in &scores {
                all_scores.push(score.value);
                csv.row([
                    idx.into(),
                    Cell::Str(log.label(score.node)),
                    score.value.into(),
                    score.community_size.into(),
                    score.radius_k.into(),
                    score.ball.into(),
                ]);
            }
            if dump_communities {
                communities.push(snapshot_communities(snap, &log, alpha, idx as i64)?);
            }
        }
    }

    let summary = NcLidSummary {
        mean_nclid: if all_scores.is_empty() {
            0.0
        } else {
            all_scores.iter().sum::<f64>() / all_scores.len() as f64
        },
        max_nclid: all_scores.iter().copied().fold(0.0, f64::max),
    };
    println!(
        "nc-lid over {} node-snapshots: mean={:.6} max={:.6}",
        all_scores.len(),
        summary.mean_nclid,
        summary.max_nclid
    );

    if let Some(dir) = out {
        ensure_dir(dir)?;
        csv.write_to(&dir.join(csv_name))?;
        write_json(&dir.join("nclid_summary.json"), &summary)?;
        if dump_communities {
            write_json(&dir.join("communities.json"), &communities)?;
        }
        let mut manifest = RunManifest::bare("nclid", &input.input, spec, dir);
        manifest.alpha = Some(alpha);
        manifest.write()?;
    }
    Ok(())
}

fn snapshot_communities(
    snap: &Snapshot,
    log: &EventLog,
    alpha: f64,
    snapshot_index: i64,
) -> Result<SnapshotCommunities, Failure> {
    let mut views = Vec::new();
    for &node in snap.active_nodes() {
        let c =
            detect_natural_community(snap, node, alpha).map_err(|e| Failure::Internal(e.into()))?;
        views.push(CommunityView {
            seed: log.label(c.seed).to_string(),
            members: c
                .members
                .iter()
                .map(|&m| log.label(m).to_string())
                .collect(),
            fitness: c.fitness,
            k: c.k,
        });
    }
    Ok(SnapshotCommunities {
        snapshot_index,
        communities: views,
    })
}
