//! File formats and the command-line pipeline around `tofplane-core`:
//! JSONL datasets, versioned surface-model files, evaluation reports
//! (JSON/CSV/SVG), and the `simulate` / `fit` / `score` / `eval` commands.

pub mod dataset;
pub mod model_file;
pub mod report_io;
pub mod runner;
pub mod svg;

/// Provenance stamped into every artifact a command writes.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub config_hash: String,
}

/// Hex digest of a command's resolved configuration; identical inputs give
/// identical artifacts, so the hash doubles as a cache key.
pub fn config_hash<T: serde::Serialize>(config: &T) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(config).expect("config serializes");
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(16);
    for b in &digest[..8] {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Write a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &std::path::Path, contents: &[u8]) -> anyhow::Result<()> {
    use anyhow::Context;
    let tmp = path.with_extension(format!(
        "{}tmp",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    std::fs::write(&tmp, contents)
        .with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
