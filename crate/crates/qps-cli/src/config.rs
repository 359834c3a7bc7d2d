//! Experiment configuration schema and atomic file output.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qps_core::kernel::GridSpec;
use qps_core::povm::PovmModel;
use qps_core::states::QuantumState;
use qps_core::witness::TestFunction;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub state: QuantumState,
    pub povm: PovmModel,
    pub test_function: TestFunction,
    /// Ordering parameter; defaults to the scheme's own (s_th for counting
    /// and UHD schemes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Mandatory in configs that sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let cfg: ExperimentConfig = serde_path_to_error(de)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!(
                "config schema_version {} unsupported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            );
        }
        cfg.state
            .validate()
            .map_err(|e| anyhow::anyhow!("state: {e}"))?;
        cfg.povm
            .validate()
            .map_err(|e| anyhow::anyhow!("povm: {e}"))?;
        cfg.test_function
            .validate()
            .map_err(|e| anyhow::anyhow!("test_function: {e}"))?;
        Ok(cfg)
    }

    pub fn s(&self) -> f64 {
        self.s.unwrap_or_else(|| self.povm.default_s())
    }

    pub fn grid(&self) -> GridSpec {
        self.grid.clone().unwrap_or_default()
    }
}

// serde_json with field paths in errors, without pulling the full crate in
fn serde_path_to_error<'de, T: Deserialize<'de>>(
    de: &mut serde_json::Deserializer<serde_json::de::StrRead<'de>>,
) -> Result<T> {
    match T::deserialize(de) {
        Ok(v) => Ok(v),
        Err(e) => bail!("{e} (line {}, column {})", e.line(), e.column()),
    }
}

/// Writes atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating output directory {}", dir.display()))?;
        }
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Sweep CSV: '.' decimals, LF endings, header row.
pub fn write_sweep_csv(path: &Path, rows: &[(f64, f64, f64, f64, bool)]) -> Result<()> {
    let mut out = String::from("parameter,lhs,rhs,relative_violation,violated\n");
    for (p, lhs, rhs, rv, v) in rows {
        out.push_str(&format!("{p},{lhs},{rhs},{rv},{v}\n"));
    }
    write_atomic(path, out.as_bytes())
}
