//! Run manifests: the full configuration of a stage, written beside its
//! outputs so any run can be reproduced from the directory alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dynlid_core::embedding::{SgnsConfig, WalkConfig};
use dynlid_core::graph::BinSpec;

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub input: PathBuf,
    pub snapshot_spec: BinSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkConfig<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sgns: Option<SgnsConfig<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    pub threads: usize,
    pub out_dir: PathBuf,
}

impl RunManifest {
    pub fn bare(command: &str, input: &Path, spec: BinSpec, out_dir: &Path) -> Self {
        RunManifest {
            command: command.to_string(),
            input: input.to_path_buf(),
            snapshot_spec: spec,
            alpha: None,
            walk: None,
            sgns: None,
            p_grid: None,
            q_grid: None,
            dims: None,
            runs: None,
            master_seed: None,
            threads: 0,
            out_dir: out_dir.to_path_buf(),
        }
    }

    /// Writes `manifest_<command>.json` into the run's output directory.
    pub fn write(&self) -> Result<(), Failure> {
        let path = self.out_dir.join(format!("manifest_{}.json", self.command));
        let file = std::fs::File::create(&path)
            .map_err(|e| Failure::Internal(anyhow::anyhow!("creating {}: {e}", path.display())))?;
        serde_json::to_writer_pretty(file, self)
            .map_err(|e| Failure::Internal(anyhow::anyhow!("writing {}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self, Failure> {
        let file =
            std::fs::File::open(path).map_err(|_| Failure::MissingArtifact(path.to_path_buf()))?;
        serde_json::from_reader(file)
            .map_err(|e| Failure::Input(anyhow::anyhow!("parsing {}: {e}", path.display())))
    }
}
