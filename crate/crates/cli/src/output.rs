//! Data files and the run sidecar. Data files depend only on the config;
//! anything run-specific goes into the sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use qwork::{AtomDistribution, DistributionRecord, GaussianMixture};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;

/// Collects written files for one command invocation.
pub struct Writer {
    dir: PathBuf,
    written: Vec<String>,
    started: Instant,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Writes through a temporary file in the target directory and renames
    /// it into place.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("creating temporary file in {}", self.dir.display()))?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Sampled columns as CSV or as a JSON object of arrays, with `extra`
    /// merged into the JSON object.
    pub fn write_columns(&mut self, name: &str, format: Format, columns: &[(&str, &[f64])], extra: Option<Value>) -> Result<()> {
        match format {
            Format::Csv => {
                let header: Vec<&str> = columns.iter().map(|c| c.0).collect();
                let mut s = header.join(",");
                s.push('\n');
                for row in 0..columns[0].1.len() {
                    let cells: Vec<String> = columns.iter().map(|c| format!("{:.12e}", c.1[row])).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                self.write(name, s.as_bytes())?;
            }
            Format::Json => {
                let mut obj = serde_json::Map::new();
                for (k, v) in columns {
                    obj.insert(k.to_string(), json!(v));
                }
                if let Some(Value::Object(more)) = extra {
                    obj.extend(more);
                }
                self.write_json(name, &Value::Object(obj))?;
            }
        }
        Ok(())
    }

    /// Records the invocation next to the data.
    pub fn finish(mut self, command: &str, config_path: Option<&Path>, config: &Value, seed: Option<u64>, annotations: Value) -> Result<()> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let sidecar = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config_path": config_path.map(|p| p.display().to_string()),
            "config": config,
            "seed": seed,
            "seed_note": "reserved; every pipeline is deterministic and ignores it",
            "outputs": self.written.clone(),
            "annotations": annotations,
            "started_unix": stamp,
            "elapsed_ms": self.started.elapsed().as_millis() as u64,
        });
        let name = format!("{command}.run.json");
        self.write_json(&name, &sidecar)?;
        Ok(())
    }
}

/// Record with energies divided by `unit`.
pub fn scaled_mixture_record(m: &GaussianMixture<f64>, unit: f64) -> DistributionRecord {
    let mut r = m.to_record();
    if let Some(terms) = r.terms.as_mut() {
        for t in terms {
            t.center = [t.center[0] / unit, t.center[1] / unit];
            t.variance /= unit * unit;
        }
    }
    r.sigma_e2 = r.sigma_e2.map(|v| v / (unit * unit));
    r.sigma_nd2 = r.sigma_nd2.map(|v| v / (unit * unit));
    r
}

pub fn atoms_columns(d: &AtomDistribution<f64>) -> (Vec<f64>, Vec<f64>) {
    d.atoms.iter().cloned().unzip()
}
