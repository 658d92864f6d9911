//! Run directories: CSV tables, JSON sidecars and the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::diagnostics::{AutocorrResult, CorrelationLength, PowerSpectrum};
use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::linalg::io::fmt_g17;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitFailureRecord {
    pub series: String,
    pub reason: String,
    pub k_stop: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub software: String,
    pub version: String,
    /// Fully resolved configuration; running it again reproduces the outputs.
    pub config: ExperimentConfig,
    pub seeds: BTreeMap<String, u64>,
    pub prng: String,
    /// Values and conventions the config left implicit.
    pub defaults: BTreeMap<String, serde_json::Value>,
    /// `null` marks a quantity that does not exist for this run, such as the
    /// correlation length of a series that never decays.
    pub metrics: BTreeMap<String, Option<f64>>,
    pub correlation_lengths: BTreeMap<String, CorrelationLength>,
    pub fit_failures: Vec<FitFailureRecord>,
    pub outputs: Vec<OutputFile>,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn metric(&self, name: &str) -> Result<Option<f64>> {
        self.metrics
            .get(name)
            .copied()
            .ok_or_else(|| Error::Validation(format!("metric '{name}' missing from {} run", self.experiment)))
    }
}

/// Accumulates the files and metrics of one run.
#[derive(Debug)]
pub struct RunWriter {
    dir: PathBuf,
    files: Vec<String>,
    pub(crate) seeds: BTreeMap<String, u64>,
    pub(crate) defaults: BTreeMap<String, serde_json::Value>,
    pub(crate) metrics: BTreeMap<String, Option<f64>>,
    pub(crate) correlation_lengths: BTreeMap<String, CorrelationLength>,
    pub(crate) fit_failures: Vec<FitFailureRecord>,
}

impl RunWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            seeds: BTreeMap::new(),
            defaults: BTreeMap::new(),
            metrics: BTreeMap::new(),
            correlation_lengths: BTreeMap::new(),
            fit_failures: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            let cells: Vec<String> = row.into_iter().map(fmt_g17).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value.is_finite().then_some(value));
    }

    pub fn default_value(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.defaults.insert(name.to_string(), v);
    }

    pub fn seed(&mut self, name: &str, seed: u64) {
        self.seeds.insert(name.to_string(), seed);
    }

    /// `t,<label>` table of a time series.
    pub fn series(&mut self, name: &str, s: &TimeSeries) -> Result<()> {
        let header = ["t", s.label.as_str()];
        self.csv(name, &header, s.values.iter().enumerate().map(|(k, &v)| vec![s.time(k), v]))
    }

    /// Writes `<stem>.csv` (lag, time, C) and `<stem>.json`, and records the
    /// correlation length as `l_c_<key>` in lags and `l_c_<key>_time` in
    /// time units. A fast decay is recorded as its upper bound.
    pub fn autocorrelation(
        &mut self,
        stem: &str,
        key: &str,
        ac: &AutocorrResult,
        lag_time: f64,
    ) -> Result<CorrelationLength> {
        self.csv(
            &format!("{stem}.csv"),
            &["lag", "time", "c"],
            ac.lags.iter().zip(&ac.values).map(|(&k, &c)| vec![k as f64, k as f64 * lag_time, c]),
        )?;
        let lc = CorrelationLength::of(ac);
        self.json(
            &format!("{stem}.json"),
            &serde_json::json!({
                "correlation_length": lc,
                "fit": ac.fit,
                "lag_time": lag_time,
            }),
        )?;
        match lc {
            CorrelationLength::Fitted { .. } => {}
            CorrelationLength::DecayedWithin { k_stop, .. } => self.fit_failures.push(FitFailureRecord {
                series: key.into(),
                reason: "decayed below the floor before three lags; l_c reported as an upper bound".into(),
                k_stop,
            }),
            CorrelationLength::NoDecay => self.fit_failures.push(FitFailureRecord {
                series: key.into(),
                reason: "no decay within the lag window".into(),
                k_stop: ac.values.len(),
            }),
        }
        let v = lc.value();
        self.metrics.insert(format!("l_c_{key}"), v);
        self.metrics.insert(format!("l_c_{key}_time"), v.map(|l| l * lag_time));
        self.correlation_lengths.insert(key.into(), lc);
        Ok(lc)
    }

    /// Writes `<stem>.csv` (omega, power) and `<stem>.json`, and records
    /// `pr_<key>`.
    pub fn spectrum(&mut self, stem: &str, key: &str, ps: &PowerSpectrum) -> Result<()> {
        self.csv(
            &format!("{stem}.csv"),
            &["omega", "power"],
            ps.frequencies.iter().zip(&ps.power).map(|(&w, &p)| vec![w, p]),
        )?;
        self.json(
            &format!("{stem}.json"),
            &serde_json::json!({
                "participation_ratio": ps.participation_ratio,
                "bins": ps.power.len(),
            }),
        )?;
        self.metric(format!("pr_{key}"), ps.participation_ratio);
        Ok(())
    }

    /// Hashes every output and writes the manifest last.
    pub fn finish(mut self, config: &ExperimentConfig, wall_time_seconds: f64) -> Result<RunManifest> {
        let mut outputs = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let path = self.dir.join(name);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            outputs.push(OutputFile {
                file: name.clone(),
                sha256: hex::encode(Sha256::digest(&bytes)),
                bytes: bytes.len() as u64,
            });
        }
        self.seeds.entry("run".into()).or_insert(config.seed());
        let manifest = RunManifest {
            experiment: config.name().into(),
            software: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            seeds: std::mem::take(&mut self.seeds),
            prng: crate::linalg::state::PRNG_NAME.into(),
            defaults: std::mem::take(&mut self.defaults),
            metrics: std::mem::take(&mut self.metrics),
            correlation_lengths: std::mem::take(&mut self.correlation_lengths),
            fit_failures: std::mem::take(&mut self.fit_failures),
            outputs,
            wall_time_seconds,
        };
        self.json(MANIFEST_FILE, &manifest)?;
        Ok(manifest)
    }
}
