//! CSV and TOML writers plus the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use resonance_core::entanglement::EntropyRecord;
use resonance_core::rotor::MomentRecord;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::CliError;

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects written files and warnings for one run.
pub struct RunOutput {
    dir: PathBuf,
    command: String,
    config: Config,
    run_id: String,
    started: Instant,
    files: Vec<FileEntry>,
    warnings: Vec<String>,
    dims: Vec<usize>,
}

#[derive(Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    run_id: &'a str,
    command: &'a str,
    version: &'a str,
    seed: u64,
    dims: &'a [usize],
    tail_tolerance: f64,
    wall_clock_seconds: f64,
    warnings: &'a [String],
    files: &'a [FileEntry],
}

impl RunOutput {
    pub fn create(dir: &Path, command: &str, config: &Config) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let echo = config.to_toml();
        let run_id = sha256_hex(format!("{command}\n{}\n{echo}", env!("CARGO_PKG_VERSION")).as_bytes());
        let mut out = Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config: config.clone(),
            run_id,
            started: Instant::now(),
            files: Vec::new(),
            warnings: Vec::new(),
            dims: Vec::new(),
        };
        out.write_bytes("effective_config.toml", echo.as_bytes())?;
        Ok(out)
    }

    pub fn run_id(&self) -> &str {
        &self.run_id
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn set_dims(&mut self, dims: &[usize]) {
        self.dims = dims.to_vec();
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.write_bytes(name, &bytes)
    }

    pub fn write_toml<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = toml::to_string(value).map_err(|e| CliError::Io(e.to_string()))?;
        self.write_bytes(name, text.as_bytes())
    }

    /// Moments with columns `t, mean_{p}{j}, {p}2_{j}, D_{j}, sigma2_{j}, var_{j}`.
    pub fn write_moments(&mut self, prefix: &str, records: &[MomentRecord]) -> Result<(), CliError> {
        let n = records.first().map_or(0, |r| r.mean.len());
        let mut header = vec!["t".to_string()];
        for j in 1..=n {
            header.extend([
                format!("mean_{prefix}{j}"),
                format!("{prefix}2_{j}"),
                format!("D_{j}"),
                format!("sigma2_{j}"),
                format!("var_{j}"),
            ]);
        }
        let rows: Vec<Vec<String>> = records
            .iter()
            .map(|r| {
                let mut row = vec![r.t.to_string()];
                for j in 0..n {
                    row.extend(
                        [r.mean[j], r.second[j], r.displacement[j], r.squared_displacement[j], r.variance[j]].map(fmt_f64),
                    );
                }
                row
            })
            .collect();
        self.write_csv("moments.csv", &header, &rows)
    }

    pub fn write_entropy(&mut self, records: &[EntropyRecord]) -> Result<(), CliError> {
        let header = ["t", "purity", "s_lin"].map(String::from);
        let rows: Vec<Vec<String>> = records
            .iter()
            .map(|r| vec![r.t.to_string(), fmt_f64(r.purity), fmt_f64(r.s_lin)])
            .collect();
        self.write_csv("entropy.csv", &header, &rows)
    }

    /// Writes `manifest.toml` and returns its path.
    pub fn finish(self) -> Result<PathBuf, CliError> {
        let manifest = Manifest {
            run_id: &self.run_id,
            command: &self.command,
            version: env!("CARGO_PKG_VERSION"),
            seed: self.config.predictor.seed,
            dims: &self.dims,
            tail_tolerance: self.config.engine.tail_tolerance,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            warnings: &self.warnings,
            files: &self.files,
        };
        let path = self.dir.join("manifest.toml");
        let text = toml::to_string(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
