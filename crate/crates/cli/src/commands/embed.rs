//! `dynlid embed` — train the dynamic embedding and persist per-snapshot
//! vector files plus the snapshot-sequence export.

use std::path::Path;

use dynlid_core::embedding::{embed_dynamic, write_embedding_file, SgnsConfig, WalkConfig};
use dynlid_core::graph::io::write_snapshot_dir;
use dynlid_core::seeds;

use crate::manifest::RunManifest;
use crate::{CmdResult, Failure, InputArgs, SgnsArgs, WalkArgs};

use super::{ensure_dir, load};

pub fn configs(
    walk: &WalkArgs,
    sgns: &SgnsArgs,
    master_seed: u64,
    workers: usize,
) -> (WalkConfig<f64>, SgnsConfig<f64>) {
    let (mut wcfg, mut scfg) = base_configs(&walk.base, &sgns.base, master_seed, workers);
    wcfg.p = walk.p;
    wcfg.q = walk.q;
    scfg.dim = sgns.dim;
    (wcfg, scfg)
}

/// Configs without the swept parameters (p, q, dim stay at their defaults;
/// the tune stage substitutes them per grid point).
pub fn base_configs(
    walk: &crate::WalkBaseArgs,
    sgns: &crate::SgnsBaseArgs,
    master_seed: u64,
    workers: usize,
) -> (WalkConfig<f64>, SgnsConfig<f64>) {
    (
        WalkConfig {
            walks_per_node: walk.walks,
            walk_length: walk.walk_length,
            seed: seeds::derive_labeled(master_seed, "walks", 0),
            ..Default::default()
        },
        SgnsConfig {
            window: sgns.window,
            negatives: sgns.negatives,
            epochs_initial: sgns.epochs_initial,
            epochs_update: sgns.epochs_update,
            seed: seeds::derive_labeled(master_seed, "sgns", 0),
            threads: workers,
            ..Default::default()
        },
    )
}

pub fn run(
    input: &InputArgs,
    walk: &WalkArgs,
    sgns: &SgnsArgs,
    seed: u64,
    workers: usize,
    out: &Path,
) -> CmdResult {
    let (log, spec, seq) = load(input)?;
    let (wcfg, scfg) = configs(walk, sgns, seed, workers);

    let series = embed_dynamic(&seq, &wcfg, &scfg).map_err(|e| Failure::Input(e.into()))?;

    ensure_dir(out)?;
    let emb_dir = out.join("embeddings");
    ensure_dir(&emb_dir)?;
    for (idx, vectors) in series.iter().enumerate() {
        write_embedding_file(
            vectors,
            log.labels(),
            &emb_dir.join(format!("snapshot_{idx}.emb")),
        )
        .map_err(|e| Failure::Internal(e.into()))?;
    }
    write_snapshot_dir(&seq, log.labels(), &out.join("snapshots"))
        .map_err(|e| Failure::Internal(e.into()))?;

    let mut manifest = RunManifest::bare("embed", &input.input, spec, out);
    manifest.walk = Some(wcfg);
    manifest.sgns = Some(scfg);
    manifest.master_seed = Some(seed);
    manifest.threads = workers;
    manifest.write()?;

    println!(
        "embedded {} snapshots at dim {} into {}",
        series.len(),
        series.dim(),
        emb_dir.display()
    );
    Ok(())
}
