use crate::HarnessError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Version of the CSV layouts written by the studies.
pub const CSV_SCHEMA: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const FAILED: &str = "FAILED";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub csv_schema: u32,
    pub study: String,
    pub seed: u64,
    pub threads: usize,
    /// resolved configuration, defaults included
    pub config: String,
    pub config_sha256: String,
    pub wall_time_s: f64,
    /// "pass", "fail" or "failed"
    pub status: String,
    pub verdict: String,
    pub artifacts: Vec<ArtifactEntry>,
}

/// Output directory of one study. Files can only be created directly
/// inside it.
#[derive(Debug)]
pub struct ArtifactDir {
    root: PathBuf,
    entries: Vec<ArtifactEntry>,
}

impl ArtifactDir {
    /// Refuses a directory holding a previous manifest unless `force`.
    pub fn create(root: &Path, force: bool) -> Result<Self, HarnessError> {
        if root.join(MANIFEST).exists() && !force {
            return Err(HarnessError::Usage(format!("{} already holds a study; pass --force to overwrite", root.display())));
        }
        fs::create_dir_all(root)?;
        let stale = root.join(FAILED);
        if stale.exists() {
            fs::remove_file(stale)?;
        }
        Ok(ArtifactDir { root: root.to_path_buf(), entries: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[ArtifactEntry] {
        &self.entries
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), HarnessError> {
        let plain = !name.is_empty() && Path::new(name).file_name().is_some_and(|f| f == name) && name != MANIFEST && name != FAILED;
        if !plain {
            return Err(HarnessError::Usage(format!("artifact name {name:?} must be a plain file name")));
        }
        fs::write(self.root.join(name), bytes)?;
        self.entries.retain(|e| e.name != name);
        self.entries.push(ArtifactEntry { name: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn finish(self, manifest: &Manifest) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
        fs::write(self.root.join(MANIFEST), text + "\n")?;
        if manifest.status == "failed" {
            fs::write(self.root.join(FAILED), format!("{}\n", manifest.verdict))?;
        }
        Ok(())
    }
}
