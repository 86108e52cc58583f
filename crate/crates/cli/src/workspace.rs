//! Flat-file workspace layout and the provenance manifest.
//!
//! ```text
//! <root>/
//!   shotmem.toml                 optional configuration
//!   manifest.tsv                 path, sha256, stage, params per derived file
//!   model.membrr                 train
//!   train/scores.tsv             video_id, score
//!   train/features/<id>.memfeat
//!   episodes/<ep>/
//!     words.tsv scenes.tsv [cast_roles.tsv]        corpus inputs
//!     sbd_shots.tsv | frames.memhist                shot source
//!     features.memfeat
//!     annotation.tsv shots.tsv scores.tsv signal.tsv contexts.tsv
//!   reports/*.tsv reports/report.md reports/plots/*.svg
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::{debug, info};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.tsv";
pub const MODEL: &str = "model.membrr";
pub const TRAIN_SCORES: &str = "train/scores.tsv";
pub const TRAIN_FEATURES: &str = "train/features";
pub const EPISODES: &str = "episodes";
pub const REPORTS: &str = "reports";

pub const WORDS: &str = "words.tsv";
pub const SCENES: &str = "scenes.tsv";
pub const CAST_ROLES: &str = "cast_roles.tsv";
pub const SBD_SHOTS: &str = "sbd_shots.tsv";
pub const FRAMES: &str = "frames.memhist";
pub const FEATURES: &str = "features.memfeat";
pub const ANNOTATION: &str = "annotation.tsv";
pub const SHOTS: &str = "shots.tsv";
pub const SCORES: &str = "scores.tsv";
pub const SIGNAL: &str = "signal.tsv";
pub const CONTEXTS: &str = "contexts.tsv";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub sha256: String,
    pub stage: String,
    /// `key=value` pairs, inputs as `input=<path>@<sha256>`, and `at=<unix secs>` last.
    pub params: Vec<String>,
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: BTreeMap<String, ManifestEntry>,
}

const MANIFEST_HEADER: &str = "path\tsha256\tstage\tparams";

impl Manifest {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || (i == 0 && line == MANIFEST_HEADER) {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let [path, sha, stage, params] = f[..] else {
                return Err(CliError::Config(format!("{MANIFEST} line {}: expected 4 fields", i + 1)));
            };
            let params = params.split(';').filter(|p| !p.is_empty()).map(String::from).collect();
            entries.insert(
                path.to_string(),
                ManifestEntry { sha256: sha.into(), stage: stage.into(), params },
            );
        }
        Ok(Self { entries })
    }

    pub fn render(&self) -> String {
        let mut out = format!("{MANIFEST_HEADER}\n");
        for (path, e) in &self.entries {
            out.push_str(&format!("{path}\t{}\t{}\t{}\n", e.sha256, e.stage, e.params.join(";")));
        }
        out
    }
}

/// The parts of a manifest entry that must match for an output to count as
/// up to date (everything except the timestamp).
fn stable_params(params: &[String]) -> Vec<&String> {
    params.iter().filter(|p| !p.starts_with("at=")).collect()
}

/// One file a stage wants to write.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub rel: String,
    pub content: String,
}

/// Everything a stage produced for one unit of work, before it touches disk.
#[derive(Debug, Clone, Default)]
pub struct Plan {
    pub artifacts: Vec<Artifact>,
    pub inputs: Vec<String>,
    pub params: Vec<(String, String)>,
}

impl Plan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(mut self, rel: impl Into<String>) -> Self {
        self.inputs.push(rel.into());
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn output(mut self, rel: impl Into<String>, content: String) -> Self {
        self.artifacts.push(Artifact { rel: rel.into(), content });
        self
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CommitStats {
    pub written: usize,
    pub unchanged: usize,
}

#[derive(Debug)]
pub struct Workspace {
    root: PathBuf,
    manifest: Manifest,
}

impl Workspace {
    pub fn open(root: impl Into<PathBuf>) -> CliResult<Self> {
        let root = root.into();
        if !root.is_dir() {
            return Err(CliError::MissingInput {
                path: root,
                hint: "workspace directory does not exist".into(),
            });
        }
        let manifest = match fs::read_to_string(root.join(MANIFEST)) {
            Ok(text) => Manifest::parse(&text)?,
            Err(e) if e.kind() == ErrorKind::NotFound => Manifest::default(),
            Err(e) => return Err(CliError::io(root.join(MANIFEST), e)),
        };
        Ok(Self { root, manifest })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn exists(&self, rel: &str) -> bool {
        self.path(rel).is_file()
    }

    /// Episode ids, i.e. subdirectories of `episodes/`, sorted.
    pub fn episodes(&self) -> CliResult<Vec<String>> {
        let dir = self.path(EPISODES);
        let entries = fs::read_dir(&dir).map_err(|e| match e.kind() {
            ErrorKind::NotFound => CliError::MissingInput {
                path: dir.clone(),
                hint: "no episodes directory in workspace".into(),
            },
            _ => CliError::io(&dir, e),
        })?;
        let mut out = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| CliError::io(&dir, e))?;
            if entry.path().is_dir() {
                out.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        out.sort();
        Ok(out)
    }

    /// Reads an input file, naming it in the error when absent.
    pub fn read(&self, rel: &str) -> CliResult<String> {
        let path = self.path(rel);
        fs::read_to_string(&path).map_err(|e| match e.kind() {
            ErrorKind::NotFound => CliError::MissingInput { path, hint: "required input not found".into() },
            _ => CliError::io(&path, e),
        })
    }

    /// Reads the output of an earlier stage.
    pub fn read_stage(&self, rel: &str, stage: &'static str, needs: &'static str) -> CliResult<String> {
        let path = self.path(rel);
        if !path.is_file() {
            return Err(CliError::StageOrder { stage, needs, path });
        }
        self.read(rel)
    }

    pub fn require_stage(&self, rel: &str, stage: &'static str, needs: &'static str) -> CliResult<()> {
        if self.exists(rel) {
            Ok(())
        } else {
            Err(CliError::StageOrder { stage, needs, path: self.path(rel) })
        }
    }

    fn hash_file(&self, rel: &str) -> CliResult<String> {
        let path = self.path(rel);
        fs::read(&path).map(|b| sha256_hex(&b)).map_err(|e| CliError::io(&path, e))
    }

    /// Writes every artifact of every plan, refusing to replace differing
    /// files unless `force` is set. All checks run before the first write.
    pub fn commit(&mut self, stage: &str, plans: &[Plan], force: bool) -> CliResult<CommitStats> {
        let mut pending = Vec::new();
        let mut stats = CommitStats::default();
        for plan in plans {
            let mut params: Vec<String> = plan.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            for input in &plan.inputs {
                params.push(format!("input={input}@{}", self.hash_file(input)?));
            }
            for a in &plan.artifacts {
                let sha = sha256_hex(a.content.as_bytes());
                let path = self.path(&a.rel);
                let unchanged = match fs::read(&path) {
                    Ok(existing) => {
                        if sha256_hex(&existing) != sha && !force {
                            return Err(CliError::Overwrite { path });
                        }
                        sha256_hex(&existing) == sha
                    }
                    Err(e) if e.kind() == ErrorKind::NotFound => false,
                    Err(e) => return Err(CliError::io(&path, e)),
                };
                let same_entry = self.manifest.entries.get(&a.rel).is_some_and(|e| {
                    e.sha256 == sha && e.stage == stage && stable_params(&e.params) == params.iter().collect::<Vec<_>>()
                });
                pending.push((a, sha, params.clone(), unchanged, same_entry));
            }
        }

        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        for (a, sha, mut params, unchanged, same_entry) in pending {
            if unchanged {
                stats.unchanged += 1;
                debug!("{} unchanged", a.rel);
            } else {
                write_file(&self.path(&a.rel), &a.content)?;
                stats.written += 1;
                info!("wrote {}", a.rel);
            }
            if !same_entry {
                params.push(format!("at={now}"));
                self.manifest.entries.insert(
                    a.rel.clone(),
                    ManifestEntry { sha256: sha, stage: stage.to_string(), params },
                );
            }
        }
        write_file(&self.path(MANIFEST), &self.manifest.render())?;
        Ok(stats)
    }
}

pub fn episode_file(ep: &str, file: &str) -> String {
    format!("{EPISODES}/{ep}/{file}")
}

pub fn write_file(path: &Path, content: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, content).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
