use anyhow::{Context, Result};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CACHE_ENV: &str = "FLOWCERT_CACHE_DIR";
const DEFAULT_CACHE: &str = ".flowcert-cache";

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE))
}

/// File name derived from the command and its inputs, safe on every filesystem.
pub fn cache_name(parts: &[&str]) -> String {
    let joined = parts.join("_");
    let clean: String =
        joined.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '.' }).collect();
    format!("{clean}.json")
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Default, Serialize)]
pub struct RunReport {
    pub subcommand: String,
    pub group: Option<String>,
    pub parameters: serde_json::Map<String, serde_json::Value>,
    pub outcome: String,
    pub exit_code: u8,
    pub files: Vec<String>,
    pub summary: Vec<String>,
    pub wall_time_ms: u128,
}

impl RunReport {
    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("parameters serialize");
        self.parameters.insert(key.to_string(), v);
    }

    /// Prints a line and records it in the summary.
    pub fn line(&mut self, s: impl Into<String>) {
        let s = s.into();
        println!("{s}");
        self.summary.push(s);
    }
}
