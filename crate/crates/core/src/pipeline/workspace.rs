//! Stage directories, manifests and content digests.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::write_file;
use crate::error::{Error, Result};

/// Pipeline stages in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "ingest")]
    Ingest,
    #[serde(rename = "link")]
    Link,
    #[serde(rename = "pathie")]
    Pathie,
    #[serde(rename = "clean-openie")]
    CleanOpenie,
    #[serde(rename = "canonicalize")]
    Canonicalize,
    #[serde(rename = "constrain")]
    Constrain,
    #[serde(rename = "stats")]
    Stats,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Ingest,
        Stage::Link,
        Stage::Pathie,
        Stage::CleanOpenie,
        Stage::Canonicalize,
        Stage::Constrain,
        Stage::Stats,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Link => "link",
            Stage::Pathie => "pathie",
            Stage::CleanOpenie => "clean-openie",
            Stage::Canonicalize => "canonicalize",
            Stage::Constrain => "constrain",
            Stage::Stats => "stats",
        }
    }

    /// Stages whose outputs this stage reads.
    pub fn upstream(&self) -> &'static [Stage] {
        match self {
            Stage::Ingest => &[],
            Stage::Link => &[Stage::Ingest],
            Stage::Pathie => &[Stage::Ingest, Stage::Link],
            Stage::CleanOpenie => &[Stage::Ingest, Stage::Link],
            Stage::Canonicalize => &[Stage::Pathie, Stage::CleanOpenie],
            Stage::Constrain => &[Stage::Canonicalize],
            Stage::Stats => &[Stage::Ingest, Stage::Link, Stage::Pathie, Stage::CleanOpenie, Stage::Constrain],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Stage::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Pending,
    Done,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: Stage,
    pub status: StageStatus,
    /// Digest over settings, input files and upstream stage digests.
    pub input_digest: String,
    pub inputs: BTreeMap<String, String>,
    /// Output file name to content digest.
    pub outputs: BTreeMap<String, String>,
    pub elapsed_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(digest_bytes(&bytes))
}

/// Collects the named parts that make up a stage's input digest.
#[derive(Clone, Debug, Default)]
pub struct InputDigest {
    parts: BTreeMap<String, String>,
}

impl InputDigest {
    pub fn add(&mut self, name: impl Into<String>, digest: impl Into<String>) {
        self.parts.insert(name.into(), digest.into());
    }

    pub fn add_file(&mut self, name: impl Into<String>, path: &Path) -> Result<()> {
        let d = digest_file(path)?;
        self.add(name, d);
        Ok(())
    }

    pub fn add_settings<T: Serialize>(&mut self, settings: &T) {
        let json = serde_json::to_string(settings).expect("settings serialize");
        self.add("settings", digest_bytes(json.as_bytes()));
    }

    pub fn finish(&self) -> (String, BTreeMap<String, String>) {
        let mut text = String::new();
        for (k, v) in &self.parts {
            text.push_str(k);
            text.push('\t');
            text.push_str(v);
            text.push('\n');
        }
        (digest_bytes(text.as_bytes()), self.parts.clone())
    }
}

/// A workspace directory with one subdirectory per stage.
#[derive(Clone, Debug)]
pub struct Workspace {
    root: PathBuf,
}

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RUN_LOG_FILE: &str = "run_log.json";

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workspace { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn stage_dir(&self, stage: Stage) -> PathBuf {
        self.root.join(stage.name())
    }

    pub fn output(&self, stage: Stage, file: &str) -> PathBuf {
        self.stage_dir(stage).join(file)
    }

    pub fn manifest(&self, stage: Stage) -> Result<Option<StageManifest>> {
        let path = self.stage_dir(stage).join(MANIFEST_FILE);
        if !path.is_file() {
            return Ok(None);
        }
        let content = crate::corpus::read_file(&path)?;
        serde_json::from_str(&content).map(Some).map_err(|e| Error::format(&path, e.line(), e.to_string()))
    }

    pub fn write_manifest(&self, manifest: &StageManifest) -> Result<()> {
        let path = self.stage_dir(manifest.stage).join(MANIFEST_FILE);
        let mut json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
        json.push('\n');
        write_file(&path, &json)
    }

    /// A done manifest whose input digest matches and whose outputs are all
    /// present with their recorded contents.
    pub fn is_current(&self, stage: Stage, input_digest: &str) -> Result<bool> {
        let Some(m) = self.manifest(stage)? else { return Ok(false) };
        if m.status != StageStatus::Done || m.input_digest != input_digest {
            return Ok(false);
        }
        for (file, digest) in &m.outputs {
            let path = self.output(stage, file);
            if !path.is_file() || digest_file(&path)? != *digest {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The input digest of a done upstream stage.
    pub fn done_digest(&self, stage: Stage) -> Result<Option<String>> {
        Ok(self.manifest(stage)?.filter(|m| m.status == StageStatus::Done).map(|m| m.input_digest))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub stages: Vec<RunLogEntry>,
    pub total_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunLogEntry {
    pub stage: Stage,
    pub executed: bool,
    pub elapsed_seconds: f64,
}
