//! One module per pipeline stage.

pub mod embed;
pub mod evaluate;
pub mod nclid;
pub mod report;
pub mod stats;
pub mod tune;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::Context;

use dynlid_core::graph::{build_snapshots, parse_event_log, BinSpec, EventLog, SnapshotSequence};

use crate::{Failure, InputArgs};

/// Parses the input edge list and builds the snapshot sequence per the
/// binning flags.
pub fn load(args: &InputArgs) -> Result<(EventLog, BinSpec, SnapshotSequence), Failure> {
    let file = File::open(&args.input)
        .with_context(|| format!("opening {}", args.input.display()))
        .map_err(Failure::Input)?;
    let log = parse_event_log(BufReader::new(file))
        .with_context(|| format!("parsing {}", args.input.display()))
        .map_err(Failure::Input)?;
    let spec = match (args.snapshots, args.resolution) {
        (Some(count), None) => BinSpec::Count(count),
        (None, Some(width)) => BinSpec::Width(width),
        _ => unreachable!("clap enforces exactly one binning flag"),
    };
    let seq = build_snapshots(&log, spec)
        .context("building snapshots")
        .map_err(Failure::Input)?;
    Ok((log, spec, seq))
}

/// Dataset name for report rows: the input file stem.
pub fn network_name(input: &Path) -> String {
    input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "network".to_string())
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::Internal)
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let file = File::create(path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(Failure::Internal)?;
    serde_json::to_writer_pretty(file, value)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Internal)
}
