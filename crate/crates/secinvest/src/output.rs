//! Writing a finished run to disk.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::AppError;
use crate::experiments::RunOutput;
use crate::records::write_atomic;

pub const DEFAULT_OUTPUT_DIR: &str = "secinvest-output";
pub const OUTPUT_DIR_ENV: &str = "SECINVEST_OUTPUT_DIR";

/// Flag, then config file, then environment, then the built-in default.
pub fn resolve_output_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Manifest contents: the resolved config (enough to rerun), seeds, tool
/// version, creation time and the list of files.
pub fn manifest(cfg: &ExperimentConfig, out: &RunOutput) -> Vec<u8> {
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let files: Vec<_> = out
        .artifacts
        .iter()
        .map(|a| json!({"name": a.name, "bytes": a.bytes.len()}))
        .chain(std::iter::once(json!({"name": "summary.txt", "bytes": out.summary.len()})))
        .collect();
    let value = json!({
        "tool": "secinvest",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment.as_str(),
        "seeds": out.seeds,
        "created_unix": created,
        "config_toml": cfg.to_toml(),
        "files": files,
    });
    let mut bytes = serde_json::to_vec_pretty(&value).expect("json");
    bytes.push(b'\n');
    bytes
}

/// Writes every artifact, the summary and the manifest (last).
pub fn write_run(dir: &Path, cfg: &ExperimentConfig, out: &RunOutput) -> Result<(), AppError> {
    fs::create_dir_all(dir).map_err(|e| AppError::Io(format!("cannot create {}: {e}", dir.display())))?;
    for a in &out.artifacts {
        write_atomic(dir, &a.name, &a.bytes)?;
    }
    write_atomic(dir, "summary.txt", out.summary.as_bytes())?;
    write_atomic(dir, "manifest.json", &manifest(cfg, out))?;
    log::info!("wrote {} files to {}", out.artifacts.len() + 2, dir.display());
    Ok(())
}

/// Reads the config back out of a manifest.
pub fn config_from_manifest(bytes: &[u8]) -> Result<ExperimentConfig, AppError> {
    let v: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| AppError::Validation(format!("manifest: {e}")))?;
    let text = v["config_toml"]
        .as_str()
        .ok_or_else(|| AppError::Validation("manifest: missing config_toml".into()))?;
    ExperimentConfig::from_toml(text)
}
