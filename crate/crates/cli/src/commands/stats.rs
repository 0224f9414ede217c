//! `dynlid stats` — the dataset summary row.

use std::path::Path;

use dynlid_core::graph::{activation_stats, aggregate_graph};

use crate::manifest::RunManifest;
use crate::table::{Cell, CsvWriter};
use crate::{CmdResult, Failure, InputArgs};

use super::{ensure_dir, load, network_name, write_json};

#[derive(serde::Serialize)]
struct Summary {
    network: String,
    nodes: usize,
    edges: usize,
    snapshots: usize,
    node_activation: f64,
    edge_activation: f64,
}

pub fn run(input: &InputArgs, out: Option<&Path>) -> CmdResult {
    let (log, spec, seq) = load(input)?;
    let aggregated = aggregate_graph(&log).map_err(|e| Failure::Input(e.into()))?;
    let (a_v, a_e): (f64, f64) = activation_stats(&seq);

    let summary = Summary {
        network: network_name(&input.input),
        nodes: log.node_count(),
        edges: aggregated.edge_count(),
        snapshots: seq.len(),
        node_activation: a_v,
        edge_activation: a_e,
    };

    println!(
        "{} |V|={} |E|={} snapshots={} a(V)={:.6} a(E)={:.6}",
        summary.network,
        summary.nodes,
        summary.edges,
        summary.snapshots,
        summary.node_activation,
        summary.edge_activation
    );

    if let Some(dir) = out {
        ensure_dir(dir)?;
        let mut csv = CsvWriter::new(&[
            "network",
            "nodes",
            "edges",
            "snapshots",
            "node_activation",
            "edge_activation",
        ]);
        csv.row([
            Cell::Str(&summary.network),
            summary.nodes.into(),
            summary.edges.into(),
            summary.snapshots.into(),
            summary.node_activation.into(),
            summary.edge_activation.into(),
        ]);
        csv.write_to(&dir.join("stats_summary.csv"))?;
        write_json(&dir.join("stats_summary.json"), &summary)?;
        RunManifest::bare("stats", &input.input, spec, dir).write()?;
    }
    Ok(())
}
