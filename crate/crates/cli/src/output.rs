use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = concat!("hualab ", env!("CARGO_PKG_VERSION"));

/// Full round-trip precision: 17 significant digits. Integral values (indices,
/// counts) are printed as integers.
pub fn fmt(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `value < tolerance`, or `value > tolerance` for lower bounds.
    pub lower_bound: bool,
    pub pass: bool,
}

impl Check {
    pub fn below(suite: &str, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { suite: suite.into(), name: name.into(), value, tolerance, lower_bound: false, pass: value < tolerance }
    }

    pub fn above(suite: &str, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { suite: suite.into(), name: name.into(), value, tolerance, lower_bound: true, pass: value > tolerance }
    }

    pub fn flag(suite: &str, name: impl Into<String>, ok: bool) -> Self {
        let value = if ok { 1.0 } else { 0.0 };
        Self { suite: suite.into(), name: name.into(), value, tolerance: 0.5, lower_bound: true, pass: ok }
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub versions: String,
    pub outputs: Vec<OutputFile>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Output directory of one run. Files are recorded with their hashes as
/// they are written; [`OutDir::finish`] writes `manifest.json`.
pub struct OutDir {
    root: PathBuf,
    outputs: Vec<OutputFile>,
}

impl OutDir {
    /// Refuses a non-empty existing directory unless `force` is set.
    pub fn prepare(root: &Path, force: bool) -> Result<Self> {
        if root.exists() {
            if !root.is_dir() {
                bail!("output path {} exists and is not a directory", root.display());
            }
            let occupied = fs::read_dir(root)?.next().is_some();
            if occupied && !force {
                bail!("output directory {} is not empty; pass --force to overwrite", root.display());
            }
        }
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), outputs: Vec::new() })
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        let digest = Sha256::digest(bytes);
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.outputs.push(OutputFile { path: name.into(), sha256 });
        Ok(())
    }

    /// CSV with a header row; numeric cells use [`fmt`].
    pub fn write_csv<S: AsRef<str>>(&mut self, name: &str, header: &[S], rows: &[Vec<f64>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header.iter().map(|h| h.as_ref()))?;
        for row in rows {
            w.write_record(row.iter().map(|v| fmt(*v)))?;
        }
        let bytes = w.into_inner().context("flushing csv")?;
        self.write_bytes(name, &bytes)
    }

    /// CSV with arbitrary string cells.
    pub fn write_table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().context("flushing csv")?;
        self.write_bytes(name, &bytes)
    }

    /// Dense matrix grid, one CSV row per matrix row.
    pub fn write_matrix(&mut self, name: &str, nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> f64) -> Result<()> {
        let header: Vec<String> = (1..=ncols).map(|k| format!("c{k}")).collect();
        let rows: Vec<Vec<f64>> = (0..nrows).map(|i| (0..ncols).map(|j| f(i, j)).collect()).collect();
        self.write_csv(name, &header, &rows)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    pub fn finish(self, command: &str, params: serde_json::Value, seed: u64, checks: Vec<Check>) -> Result<bool> {
        let passed = checks.iter().all(|c| c.pass);
        let manifest = RunManifest {
            command: command.into(),
            params,
            seed,
            versions: VERSION.into(),
            outputs: self.outputs,
            checks,
            passed,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        let path = self.root.join("manifest.json");
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(passed)
    }
}

pub fn checks_csv(out: &mut OutDir, checks: &[Check]) -> Result<()> {
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.suite.clone(),
                c.name.clone(),
                fmt(c.value),
                fmt(c.tolerance),
                if c.lower_bound { ">" } else { "<" }.into(),
                if c.pass { "pass" } else { "FAIL" }.into(),
            ]
        })
        .collect();
    out.write_table("checks.csv", &["suite", "check", "value", "tolerance", "relation", "result"], &rows)
}
