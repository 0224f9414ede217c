//! `dynlid report` — joins the NC-LID and reconstruction artifacts with
//! freshly computed centralities into the statistics report and the
//! plot-ready tables.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::anyhow;

use dynlid_core::centrality::{centrality, CentralityMetric, CentralityVector};
use dynlid_core::evaluation::{NodeScores, ReconstructionReport};
use dynlid_core::lid::NcLidScore;
use dynlid_core::stats::{
    build_observations, correlate, mwu, split_high_low, HighLow, ObsField, Observation,
};
use dynlid_core::NodeId;

use crate::manifest::RunManifest;
use crate::table::{parse_field, read_csv, Cell, CsvWriter};
use crate::{CmdResult, Failure, InputArgs};

use super::{ensure_dir, load, network_name, write_json};

#[derive(serde::Serialize)]
struct SpearmanBlock {
    f1: Option<f64>,
    precision: Option<f64>,
    recall: Option<f64>,
    degree: Option<f64>,
    betweenness: Option<f64>,
    closeness: Option<f64>,
    eigenvector: Option<f64>,
    shell: Option<f64>,
}

#[derive(serde::Serialize)]
struct MwuBlock {
    u: f64,
    p: f64,
    accepted: bool,
    #[serde(rename = "f1_H")]
    f1_h: f64,
    #[serde(rename = "f1_L")]
    f1_l: f64,
    #[serde(rename = "ps_H")]
    ps_h: f64,
    #[serde(rename = "ps_L")]
    ps_l: f64,
}

#[derive(serde::Serialize)]
struct StatsReport {
    network: String,
    observations: usize,
    spearman: SpearmanBlock,
    mwu: Option<MwuBlock>,
}

pub fn run(input: &InputArgs, alpha: f64, out: &Path) -> CmdResult {
    let (log, spec, seq) = load(input)?;

    let nclid = read_nclid(&out.join("nclid.csv"), seq.len(), &log)?;
    let reports = read_reconstruction(&out.join("reconstruction.csv"), &log)?;

    let centralities: Vec<Vec<CentralityVector<f64>>> = seq
        .snapshots()
        .iter()
        .map(|snap| {
            CentralityMetric::ALL
                .iter()
                .map(|&m| centrality(snap, m).map_err(|e| Failure::Internal(e.into())))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;

    ensure_dir(out)?;
    write_centralities(&log, &seq, &centralities, out)?;

    let observations = build_observations(&nclid, &reports, &centralities);
    if observations.is_empty() {
        return Err(Failure::Input(anyhow!(
            "no joined observations — do the nclid and reconstruction artifacts match the input?"
        )));
    }

    let rho_of = |field: ObsField| -> Option<f64> {
        match correlate(&observations, ObsField::NcLid, field) {
            Ok((rho, _)) => Some(rho),
            Err(e) => {
                log::warn!("spearman vs {field:?} undefined: {e}");
                None
            }
        }
    };
    let spearman = SpearmanBlock {
        f1: rho_of(ObsField::F1),
        precision: rho_of(ObsField::Precision),
        recall: rho_of(ObsField::Recall),
        degree: rho_of(ObsField::Centrality(CentralityMetric::Degree)),
        betweenness: rho_of(ObsField::Centrality(CentralityMetric::Betweenness)),
        closeness: rho_of(ObsField::Centrality(CentralityMetric::Closeness)),
        eigenvector: rho_of(ObsField::Centrality(CentralityMetric::Eigenvector)),
        shell: rho_of(ObsField::Centrality(CentralityMetric::ShellIndex)),
    };

    let mwu_block = high_low_mwu(&observations);
    let network = network_name(&input.input);
    let report = StatsReport {
        network: network.clone(),
        observations: observations.len(),
        spearman,
        mwu: mwu_block,
    };
    write_json(&out.join("report.json"), &report)?;
    write_figures(&network, &nclid, &report, out)?;

    let mut manifest = RunManifest::bare("report", &input.input, spec, out);
    manifest.alpha = Some(alpha);
    manifest.write()?;

    println!(
        "report over {} observations written to {}",
        observations.len(),
        out.join("report.json").display()
    );
    Ok(())
}

fn read_nclid(
    path: &Path,
    snapshots: usize,
    log: &dynlid_core::graph::EventLog,
) -> Result<Vec<Vec<NcLidScore<f64>>>, Failure> {
    let (_, rows) = read_csv(path)?;
    let mut per_snapshot: Vec<Vec<NcLidScore<f64>>> = vec![Vec::new(); snapshots];
    for row in rows {
        let idx: usize = parse_field(&row, 0, "snapshot index")?;
        if idx >= snapshots {
            return Err(Failure::Input(anyhow!(
                "nclid artifact references snapshot {idx}, but the input yields {snapshots}"
            )));
        }
        let node = lookup(log, &row[1])?;
        per_snapshot[idx].push(NcLidScore {
            node,
            value: parse_field(&row, 2, "nclid")?,
            community_size: parse_field(&row, 3, "community size")?,
            radius_k: parse_field(&row, 4, "k")?,
            ball: parse_field(&row, 5, "ball")?,
        });
    }
    Ok(per_snapshot)
}

fn read_reconstruction(
    path: &Path,
    log: &dynlid_core::graph::EventLog,
) -> Result<Vec<ReconstructionReport<f64>>, Failure> {
    let (_, rows) = read_csv(path)?;
    let mut grouped: BTreeMap<usize, Vec<NodeScores<f64>>> = BTreeMap::new();
    for row in rows {
        let idx: usize = parse_field(&row, 0, "snapshot index")?;
        let node = lookup(log, &row[1])?;
        let correct: usize = parse_field(&row, 2, "C")?;
        let deg_orig: usize = parse_field(&row, 3, "deg_orig")?;
        let deg_recon: usize = parse_field(&row, 4, "deg_recon")?;
        // ratios are recomputed from the integer counts, so joined metrics
        // do not inherit the 6-decimal truncation of the artifact; f1 uses
        // the same single-division form as the evaluate stage
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        grouped.entry(idx).or_default().push(NodeScores {
            node,
            correct,
            deg_orig,
            deg_recon,
            precision: ratio(correct, deg_recon),
            recall: ratio(correct, deg_orig),
            f1: ratio(2 * correct, deg_recon + deg_orig),
        });
    }
    Ok(grouped
        .into_iter()
        .map(|(snapshot_index, per_node)| {
            let sum = |f: fn(&NodeScores<f64>) -> usize| per_node.iter().map(f).sum::<usize>();
            let (c, orig, recon) = (
                sum(|r| r.correct),
                sum(|r| r.deg_orig),
                sum(|r| r.deg_recon),
            );
            let ratio = |num: usize, den: usize| {
                if den == 0 {
                    0.0
                } else {
                    num as f64 / den as f64
                }
            };
            ReconstructionReport {
                snapshot_index,
                per_node,
                micro_precision: ratio(c, recon),
                micro_recall: ratio(c, orig),
                micro_f1: ratio(2 * c, recon + orig),
            }
        })
        .collect())
}

fn lookup(log: &dynlid_core::graph::EventLog, label: &str) -> Result<NodeId, Failure> {
    log.index_of(label)
        .ok_or_else(|| Failure::Input(anyhow!("label {label:?} not present in the input")))
}

fn high_low_mwu(observations: &[Observation<f64>]) -> Option<MwuBlock> {
    let labels = split_high_low(observations);
    let pick = |want: HighLow| -> Vec<f64> {
        observations
            .iter()
            .zip(&labels)
            .filter(|(_, &l)| l == want)
            .map(|(o, _)| o.f1)
            .collect()
    };
    let h = pick(HighLow::High);
    let l = pick(HighLow::Low);
    match mwu(&h, &l) {
        Ok(r) => Some(MwuBlock {
            u: r.u_h,
            p: r.p_value,
            accepted: !r.reject_null,
            f1_h: r.mean_h,
            f1_l: r.mean_l,
            ps_h: r.ps_h,
            ps_l: r.ps_l,
        }),
        Err(e) => {
            log::warn!("high/low comparison unavailable: {e}");
            None
        }
    }
}

fn write_centralities(
    log: &dynlid_core::graph::EventLog,
    seq: &dynlid_core::graph::SnapshotSequence,
    centralities: &[Vec<CentralityVector<f64>>],
    out: &Path,
) -> Result<(), Failure> {
    let mut csv = CsvWriter::new(&["snapshot_index", "node_label", "metric", "value"]);
    for (idx, snap) in seq.snapshots().iter().enumerate() {
        for cv in &centralities[idx] {
            for &node in snap.active_nodes() {
                csv.row([
                    idx.into(),
                    Cell::Str(log.label(node)),
                    Cell::Str(cv.metric.as_str()),
                    cv.values[node as usize].into(),
                ]);
            }
        }
    }
    csv.write_to(&out.join("centralities.csv"))
}

fn write_figures(
    network: &str,
    nclid: &[Vec<NcLidScore<f64>>],
    report: &StatsReport,
    out: &Path,
) -> Result<(), Failure> {
    // average and maximal NC-LID pooled over all node-snapshots
    let values: Vec<f64> = nclid.iter().flatten().map(|s| s.value).collect();
    let mean = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    let max = values.iter().copied().fold(0.0, f64::max);
    let mut fig1 = CsvWriter::new(&["network", "mean_nclid", "max_nclid"]);
    fig1.row([Cell::Str(network), mean.into(), max.into()]);
    fig1.write_to(&out.join("fig1_nclid.csv"))?;

    // NC-LID vs centrality correlations
    let mut fig2 = CsvWriter::new(&["network", "metric", "spearman_nclid"]);
    let s = &report.spearman;
    for (metric, rho) in [
        ("degree", s.degree),
        ("betweenness", s.betweenness),
        ("closeness", s.closeness),
        ("eigenvector", s.eigenvector),
        ("shell", s.shell),
    ] {
        if let Some(rho) = rho {
            fig2.row([Cell::Str(network), Cell::Str(metric), rho.into()]);
        }
    }
    fig2.write_to(&out.join("fig2_centrality_correlations.csv"))?;

    // NC-LID vs embedding quality correlations
    let mut fig3 = CsvWriter::new(&["network", "metric", "spearman_nclid"]);
    for (metric, rho) in [
        ("f1", s.f1),
        ("precision", s.precision),
        ("recall", s.recall),
    ] {
        if let Some(rho) = rho {
            fig3.row([Cell::Str(network), Cell::Str(metric), rho.into()]);
        }
    }
    fig3.write_to(&out.join("fig3_quality_correlations.csv"))?;

    // high/low NC-LID comparison row
    let mut table3 = CsvWriter::new(&[
        "network", "f1_H", "f1_L", "U", "p", "accepted", "ps_H", "ps_L",
    ]);
    if let Some(m) = &report.mwu {
        table3.row([
            Cell::Str(network),
            m.f1_h.into(),
            m.f1_l.into(),
            m.u.into(),
            m.p.into(),
            Cell::Str(if m.accepted { "yes" } else { "no" }),
            m.ps_h.into(),
            m.ps_l.into(),
        ]);
    }
    table3.write_to(&out.join("table3_high_low.csv"))
}
