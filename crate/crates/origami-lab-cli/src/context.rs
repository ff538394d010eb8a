//! Shared run machinery: input digests, atomic output writes, the run
//! manifest, and the content-addressed cache.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use origami_lab::ErrorCategory;

#[derive(Debug)]
pub enum CliError {
    Lab(origami_lab::Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lab(e) => match e.category() {
                ErrorCategory::BadInput => 2,
                ErrorCategory::Budget => 3,
                ErrorCategory::Internal => 4,
            },
            CliError::Io(..) | CliError::Usage(_) => 2,
        }
    }

    pub fn category_name(&self) -> &'static str {
        match self {
            CliError::Lab(e) => match e.category() {
                ErrorCategory::BadInput => "bad_input",
                ErrorCategory::Budget => "budget_exceeded",
                ErrorCategory::Internal => "internal_invariant",
            },
            CliError::Io(..) | CliError::Usage(_) => "bad_input",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lab(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<origami_lab::Error> for CliError {
    fn from(e: origami_lab::Error) -> Self {
        CliError::Lab(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Serialize)]
struct ManifestInput {
    path: String,
    sha256: String,
}

/// Snapshot of one run: the resolved configuration, input digests, output
/// paths, seed, and wall clock. The manifest fully determines the run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: BTreeMap<String, String>,
    inputs: Vec<ManifestInput>,
    outputs: Vec<String>,
    pub seed: Option<u64>,
    pub cache_hit: bool,
    pub wall_clock_unix_ms: u128,
    pub version: String,
}

pub struct RunContext {
    subcommand: String,
    config: BTreeMap<String, String>,
    inputs: Vec<ManifestInput>,
    outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub cache_hit: bool,
    manifest_path: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
}

impl RunContext {
    pub fn new(subcommand: &str) -> Self {
        let cache_dir = std::env::var_os("ORIGAMI_LAB_CACHE")
            .map(PathBuf::from)
            .or_else(|| Some(PathBuf::from(".origami-lab-cache")));
        RunContext {
            subcommand: subcommand.to_string(),
            config: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            cache_hit: false,
            manifest_path: None,
            cache_dir,
        }
    }

    /// Record one resolved configuration value (defaults included).
    pub fn record(&mut self, key: &str, value: impl fmt::Display) {
        self.config.insert(key.to_string(), value.to_string());
    }

    /// Read an input file, recording its digest in the manifest.
    pub fn read_input(&mut self, path: &Path) -> CliResult<String> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        self.inputs.push(ManifestInput {
            path: path.display().to_string(),
            sha256: hex_sha256(text.as_bytes()),
        });
        Ok(text)
    }

    /// Write an output atomically (temp file + rename) and record it.
    pub fn write_output(&mut self, path: &Path, contents: &str) -> CliResult<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(|e| CliError::Io(parent.into(), e))?;
            }
        }
        let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
        fs::write(&tmp, contents).map_err(|e| CliError::Io(tmp.clone(), e))?;
        fs::rename(&tmp, path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    pub fn set_manifest_path(&mut self, path: PathBuf) {
        self.manifest_path = Some(path);
    }

    /// Write the manifest next to the outputs. Print-only runs (no outputs,
    /// no explicit manifest path) skip it.
    pub fn finish(self) -> CliResult<()> {
        let path = match (&self.manifest_path, self.outputs.first()) {
            (Some(p), _) => p.clone(),
            (None, Some(first)) => {
                let mut name = first.file_name().unwrap_or_default().to_os_string();
                name.push(".manifest.json");
                first.with_file_name(name)
            }
            (None, None) => return Ok(()),
        };
        let manifest = RunManifest {
            subcommand: self.subcommand,
            config: self.config,
            inputs: self.inputs,
            outputs: self
                .outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
            seed: self.seed,
            cache_hit: self.cache_hit,
            wall_clock_unix_ms: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let json = serde_json::to_string_pretty(&manifest)
            .expect("manifest serialization cannot fail");
        let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
        fs::write(&tmp, json).map_err(|e| CliError::Io(tmp.clone(), e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::Io(path.clone(), e))?;
        Ok(())
    }

    /// Cache lookup by content key. Misses silently on any cache trouble.
    pub fn cache_get(&mut self, key: &str) -> Option<String> {
        let dir = self.cache_dir.as_ref()?;
        let path = dir.join(format!("{key}.entry"));
        match fs::read_to_string(path) {
            Ok(text) => {
                self.cache_hit = true;
                Some(text)
            }
            Err(_) => None,
        }
    }

    /// Cache store with a single-writer lock file; readers rely on the
    /// atomic rename, so they never lock.
    pub fn cache_put(&self, key: &str, value: &str) {
        let Some(dir) = self.cache_dir.as_ref() else {
            return;
        };
        if fs::create_dir_all(dir).is_err() {
            return;
        }
        let lock = dir.join(".writer.lock");
        let mut acquired = false;
        for _ in 0..50 {
            match fs::OpenOptions::new().write(true).create_new(true).open(&lock) {
                Ok(_) => {
                    acquired = true;
                    break;
                }
                Err(_) => std::thread::sleep(std::time::Duration::from_millis(20)),
            }
        }
        if !acquired {
            return; // another writer is wedged; skip caching
        }
        let path = dir.join(format!("{key}.entry"));
        let tmp = dir.join(format!("{key}.tmp-{}", std::process::id()));
        if fs::write(&tmp, value).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
        let _ = fs::remove_file(&lock);
    }
}

pub fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Content key for cached derived artifacts.
pub fn cache_key(parts: &[&str]) -> String {
    hex_sha256(parts.join("\u{1f}").as_bytes())
}
