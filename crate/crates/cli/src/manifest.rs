//! Provenance record written next to every run's outputs.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

const MANIFEST_SUFFIX: &str = ".manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convention {
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub engine: Option<String>,
    pub files: Vec<FileEntry>,
    pub conventions: Vec<Convention>,
}

pub fn conventions() -> Vec<Convention> {
    [
        ("bit_order", "qubit i is bit i of the basis index; |0_L> is all zeros"),
        ("coset_weight", "min(w, n - w) for Hamming weight w"),
        ("time_unit", "CSV and fit times are in units of 1/gamma_e"),
        ("infidelity", "1 - F after majority-vote decoding; misdecode probability times 1 - |<psi|X_L|psi>|^2"),
        ("fit_model", "I(t) = (1 - exp(-eps (t - tau))) / 2, p_L = eps tau"),
        ("lambda", "(p_L(n) / p_L(n + 2k))^(1/k), averaged over size pairs with n >= 5, fitted as A/gamma_e + B"),
        ("ell", "ell = (n - 1) / 2; n = 2 ell + 1 unless the extrapolation says otherwise"),
        ("rng", "ChaCha8 seeded by the master seed, one stream per trajectory index"),
    ]
    .into_iter()
    .map(|(k, v)| Convention { key: k.into(), value: v.into() })
    .collect()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Accumulates output files and finally writes `<command>.manifest.json`.
pub struct OutputDir {
    dir: PathBuf,
    command: String,
    files: Vec<FileEntry>,
}

impl OutputDir {
    /// Prepares `dir` for `command`: every file already there must belong
    /// to some manifest, and the previous outputs of `command` are removed.
    pub fn prepare(dir: &Path, command: &str) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
        let orphans = orphans(dir)?;
        if !orphans.is_empty() {
            return Err(CliError::Orphans { dir: dir.to_path_buf(), files: orphans });
        }
        let own = dir.join(format!("{command}{MANIFEST_SUFFIX}"));
        if own.exists() {
            for f in read_manifest(&own)?.files {
                let p = dir.join(&f.path);
                if p.exists() {
                    fs::remove_file(&p).map_err(CliError::io(format!("removing {}", p.display())))?;
                }
            }
            fs::remove_file(&own).map_err(CliError::io(format!("removing {}", own.display())))?;
        }
        Ok(Self { dir: dir.to_path_buf(), command: command.into(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, description: &str, bytes: &[u8]) -> CliResult<()> {
        if name.contains('/') || name.ends_with(MANIFEST_SUFFIX) || self.files.iter().any(|f| f.path == name) {
            return Err(CliError::Config(format!("refusing to write output {name:?}")));
        }
        let p = self.dir.join(name);
        if p.exists() {
            // registered by another command's manifest
            return Err(CliError::Config(format!("{} already exists", p.display())));
        }
        fs::write(&p, bytes).map_err(CliError::io(format!("writing {}", p.display())))?;
        self.files.push(FileEntry {
            path: name.into(),
            sha256: hex(&Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
            description: description.into(),
        });
        Ok(())
    }

    /// Writes the manifest and then checks that nothing unregistered remains.
    pub fn finish(self, config: &ExperimentConfig, seeds: Vec<u64>, engine: Option<String>) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            tool: "tdqec".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.clone(),
            config_sha256: config.sha256(),
            config: config.clone(),
            seeds,
            engine,
            files: self.files,
            conventions: conventions(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let p = self.dir.join(format!("{}{MANIFEST_SUFFIX}", self.command));
        fs::write(&p, text).map_err(CliError::io(format!("writing {}", p.display())))?;
        let orphans = orphans(&self.dir)?;
        if !orphans.is_empty() {
            return Err(CliError::Orphans { dir: self.dir, files: orphans });
        }
        Ok(manifest)
    }
}

pub fn read_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Files in `dir` that no manifest there registers, sorted.
pub fn orphans(dir: &Path) -> CliResult<Vec<String>> {
    let mut present = BTreeSet::new();
    let mut registered = BTreeSet::new();
    let entries = fs::read_dir(dir).map_err(CliError::io(format!("listing {}", dir.display())))?;
    for entry in entries {
        let entry = entry.map_err(CliError::io(format!("listing {}", dir.display())))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(MANIFEST_SUFFIX) {
            registered.extend(read_manifest(&entry.path())?.files.into_iter().map(|f| f.path));
        } else {
            present.insert(name);
        }
    }
    Ok(present.difference(&registered).cloned().collect())
}
