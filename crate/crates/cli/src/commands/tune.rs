//! `dynlid tune` — the (p, q, dim) sweep with run-averaged last-snapshot
//! metrics, written as a table sorted best-first.

use std::path::Path;

use dynlid_core::evaluation::tune;

use crate::manifest::RunManifest;
use crate::table::CsvWriter;
use crate::{CmdResult, Failure, InputArgs};

use super::{ensure_dir, load, write_json};

#[derive(serde::Serialize)]
struct BestView {
    p: f64,
    q: f64,
    dim: usize,
    precision: f64,
    recall: f64,
    f1: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    input: &InputArgs,
    p_grid: &[f64],
    q_grid: &[f64],
    dims: &[usize],
    runs: usize,
    walk: &crate::WalkBaseArgs,
    sgns: &crate::SgnsBaseArgs,
    seed: u64,
    out: &Path,
) -> CmdResult {
    if runs == 0 {
        return Err(Failure::Input(anyhow::anyhow!("--runs must be at least 1")));
    }
    let (_log, spec, seq) = load(input)?;
    // sweep jobs saturate the pool, so each training run stays single-worker
    let (wcfg, scfg) = super::embed::base_configs(walk, sgns, seed, 1);

    let result = tune(&seq, p_grid, q_grid, dims, runs, &wcfg, &scfg)
        .map_err(|e| Failure::Input(e.into()))?;

    let mut rows = result.rows.clone();
    rows.sort_by(|a, b| {
        b.mean_f1
            .partial_cmp(&a.mean_f1)
            .unwrap()
            .then(a.dim.cmp(&b.dim))
            .then(a.p.partial_cmp(&b.p).unwrap())
            .then(a.q.partial_cmp(&b.q).unwrap())
    });

    ensure_dir(out)?;
    let network = super::network_name(&input.input);
    let mut csv = CsvWriter::new(&["network", "dim", "p", "q", "precision", "recall", "f1"]);
    for row in &rows {
        csv.row([
            crate::table::Cell::Str(&network),
            row.dim.into(),
            row.p.into(),
            row.q.into(),
            row.mean_precision.into(),
            row.mean_recall.into(),
            row.mean_f1.into(),
        ]);
    }
    csv.write_to(&out.join("tune.csv"))?;

    let best = BestView {
        p: result.best.p,
        q: result.best.q,
        dim: result.best.dim,
        precision: result.best.mean_precision,
        recall: result.best.mean_recall,
        f1: result.best.mean_f1,
    };
    write_json(&out.join("tune_best.json"), &best)?;

    let mut manifest = RunManifest::bare("tune", &input.input, spec, out);
    manifest.walk = Some(wcfg);
    manifest.sgns = Some(scfg);
    manifest.p_grid = Some(p_grid.to_vec());
    manifest.q_grid = Some(q_grid.to_vec());
    manifest.dims = Some(dims.to_vec());
    manifest.runs = Some(runs);
    manifest.master_seed = Some(seed);
    manifest.write()?;

    println!(
        "best config: p={} q={} dim={} f1={:.6} ({} configs x {runs} runs)",
        best.p,
        best.q,
        best.dim,
        best.f1,
        result.rows.len()
    );
    Ok(())
}
