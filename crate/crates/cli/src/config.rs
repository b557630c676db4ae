//! Optional JSON config file carrying the same fields as the flags; explicit
//! flags win. Unknown fields are rejected.

use anyhow::{Context, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Deserialize, Default, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub map: Option<String>,
    pub graph: Option<String>,
    pub method: Option<String>,
    pub depth: Option<usize>,
    pub nmax: Option<usize>,
    pub pmax: Option<usize>,
    pub qmax: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<u32>,
    pub r: Option<f64>,
    pub delta: Option<f64>,
    pub amp_const: Option<f64>,
    pub l_list: Option<Vec<u32>>,
    pub vertex: Option<String>,
    pub p: Option<usize>,
    pub out: Option<PathBuf>,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

pub fn load(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("file not found: {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Default output directory: the environment override or the cwd.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os("ENTROMAP_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}
