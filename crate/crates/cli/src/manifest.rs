//! Run manifests: the resolved configuration plus a hashed inventory of
//! every artifact a run produced.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use qae_core::io::{write_json, write_series_csv, write_spectrum_csv, write_text};
use qae_core::spectrum::SpectrumGrid;
use qae_core::{acquire::SignalSeries, Error, Result};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    /// Path relative to the run directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub harness_version: String,
    pub created_unix_s: u64,
    pub config: ExperimentConfig,
    pub artifacts: Vec<ArtifactEntry>,
}

/// Collects artifacts under one run directory, hashing each file as it is
/// written so the manifest inventory cannot drift from the outputs.
pub struct ArtifactSink {
    root: PathBuf,
    entries: Vec<ArtifactEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(digest.len() * 2);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

impl ArtifactSink {
    pub fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::Io {
            path: root.display().to_string(),
            source: e,
        })?;
        Ok(ArtifactSink {
            root: root.to_path_buf(),
            entries: Vec::new(),
        })
    }

    fn record(&mut self, rel: &str) -> Result<()> {
        let path = self.root.join(rel);
        let bytes = fs::read(&path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        self.entries.push(ArtifactEntry {
            path: rel.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn write_spectrum(&mut self, rel: &str, spectrum: &SpectrumGrid) -> Result<()> {
        write_spectrum_csv(spectrum, &self.root.join(rel))?;
        self.record(rel)?;
        self.record(&sidecar_rel(rel))
    }

    pub fn write_series(&mut self, rel: &str, series: &SignalSeries) -> Result<()> {
        write_series_csv(series, &self.root.join(rel))?;
        self.record(rel)?;
        self.record(&sidecar_rel(rel))
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        write_json(value, &self.root.join(rel))?;
        self.record(rel)
    }

    pub fn write_text(&mut self, rel: &str, text: &str) -> Result<()> {
        write_text(&self.root.join(rel), text)?;
        self.record(rel)
    }

    /// Finishes the run: writes `manifest.json` (not itself inventoried)
    /// and returns the manifest.
    pub fn finish(mut self, config: &ExperimentConfig) -> Result<RunManifest> {
        self.entries.sort_by(|x, y| x.path.cmp(&y.path));
        let manifest = RunManifest {
            experiment: config.experiment.id().to_string(),
            harness_version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config: config.clone(),
            artifacts: self.entries,
        };
        write_json(&manifest, &self.root.join("manifest.json"))?;
        Ok(manifest)
    }
}

fn sidecar_rel(rel: &str) -> String {
    match rel.rsplit_once('.') {
        Some((stem, _)) => format!("{stem}.meta.json"),
        None => format!("{rel}.meta.json"),
    }
}
