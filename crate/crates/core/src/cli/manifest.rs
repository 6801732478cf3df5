//! Run manifests and CSV artifacts.
//!
//! Everything written here is a function of the config alone: no clocks,
//! no host names, floats in shortest round-trip form.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::Result;
use crate::scenario::{theta_exact, ConstraintCheck, Scenario, ScenarioInput};

pub const TOOL: &str = "radscatter";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Derived scenario quantities echoed into every manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEcho {
    pub input: ScenarioInput,
    pub a: f64,
    pub m: f64,
    pub strauss: f64,
    pub k_reduced: f64,
    pub kappa_reduced: f64,
    pub nu: f64,
    pub theta: f64,
    /// `theta` as an exact fraction of the decimal inputs.
    pub theta_exact: Option<String>,
    pub k_was_reduced: bool,
    pub kappa_was_reduced: bool,
    pub checks: Vec<ConstraintCheck>,
}

impl From<&Scenario> for ScenarioEcho {
    fn from(s: &Scenario) -> Self {
        ScenarioEcho {
            input: s.input,
            a: s.a,
            m: s.m,
            strauss: s.strauss,
            k_reduced: s.k_reduced,
            kappa_reduced: s.kappa_reduced,
            nu: s.nu,
            theta: s.theta,
            theta_exact: theta_exact(s.input.n, s.input.p, s.input.k).map(|t| t.to_string()),
            k_was_reduced: s.k_was_reduced,
            kappa_was_reduced: s.kappa_was_reduced,
            checks: s.checks(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Hash of the canonical config with `output` blanked, so the same
    /// computation hashes the same wherever it is written.
    pub config_sha256: String,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioEcho>,
    pub results: serde_json::Value,
    pub artifacts: Vec<Artifact>,
    pub exit_code: i32,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Manifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config_sha256: config_hash(config),
            config: config.clone(),
            scenario: None,
            results: serde_json::Value::Null,
            artifacts: Vec::new(),
            exit_code: 0,
        }
    }
}

pub fn config_hash(config: &RunConfig) -> String {
    let mut c = config.clone();
    c.output.clear();
    sha256_hex(c.to_toml_string().as_bytes())
}

/// `manifest.json`, then `manifest.1.json`, `manifest.2.json`, ...
fn manifest_name(i: usize) -> String {
    if i == 0 {
        "manifest.json".into()
    } else {
        format!("manifest.{i}.json")
    }
}

/// Write the manifest under the first unused name; earlier ones are never touched.
pub fn write_manifest(dir: &Path, m: &Manifest) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut i = 0;
    let path = loop {
        let p = dir.join(manifest_name(i));
        if !p.exists() {
            break p;
        }
        i += 1;
    };
    let mut text = serde_json::to_string_pretty(m)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Most recent manifest in `dir`, if any.
pub fn latest_manifest(dir: &Path) -> Result<Option<(PathBuf, Manifest)>> {
    let mut last = None;
    for i in 0.. {
        let p = dir.join(manifest_name(i));
        if !p.exists() {
            break;
        }
        last = Some(p);
    }
    match last {
        None => Ok(None),
        Some(p) => {
            let m = serde_json::from_str(&fs::read_to_string(&p)?)?;
            Ok(Some((p, m)))
        }
    }
}

/// CSV writer that remembers what it wrote, for the manifest.
pub struct CsvOut {
    dir: PathBuf,
    file: String,
    w: csv::Writer<Vec<u8>>,
    rows: usize,
}

impl CsvOut {
    pub fn new(dir: &Path, file: &str, header: &[&str]) -> Result<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        Ok(CsvOut { dir: dir.to_path_buf(), file: file.into(), w, rows: 0 })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.w.write_record(fields)?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<Artifact> {
        let bytes = self.w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        fs::create_dir_all(&self.dir)?;
        fs::write(self.dir.join(&self.file), &bytes)?;
        Ok(Artifact { file: self.file, rows: self.rows, sha256: sha256_hex(&bytes) })
    }
}

/// Shortest round-trip form; empty for missing values.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
