//! Configuration-driven experiment runner.
//!
//! A run reads an [`ExperimentConfig`], writes CSV tables and JSON sidecars
//! into `<root>/<experiment>-<seed>/`, and finishes with `manifest.json`.
//! The manifest echoes the fully resolved config, so running it again
//! reproduces the tables byte for byte.

pub mod compare;
pub mod config;
pub mod output;
mod pipelines;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use compare::{compare_runs, ComparisonReport, MetricComparison, Verdict};
pub use config::{
    ClassicalSection, DiagnosticsSection, EvolutionSection, ExperimentConfig, HarperPairConfig, HybridConfig,
    InitialState, IntervalsConfig, RotorsConfig, SpectralCheckConfig, SpinProtoConfig,
};
pub use output::{FitFailureRecord, OutputFile, RunManifest, RunWriter, MANIFEST_FILE};

use crate::error::{Error, Result};

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "RDM_CHAOS_OUT";
pub const DEFAULT_OUT_ROOT: &str = "runs";

/// Registered experiments with one-line descriptions.
pub const EXPERIMENTS: [(&str, &str); 6] = [
    ("spin-proto", "random-matrix vs Harper spin prototypes: A_H, S_L series, autocorrelations, l_c"),
    ("rotors", "coupled kicked rotors: A_U, S_VN series and autocorrelation"),
    ("harper-pair", "coupled Harper pair: Poincare section, Lyapunov, S_L autocorrelation, A_H, power spectrum"),
    ("intervals", "energy-interval and nearest-neighbour spacing histograms, GOE vs Poisson vs Harper"),
    ("hybrid", "eigenvalue/eigenvector swaps between regular and chaotic Hamiltonians: power spectra"),
    ("spectral-check", "spectral reconstruction of Tr rho_A^2 against direct evolution"),
];

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Output root; falls back to the config, then `RDM_CHAOS_OUT`, then `runs`.
    pub out_root: Option<PathBuf>,
    /// Worker threads; the rayon default when absent.
    pub threads: Option<usize>,
}

/// Reads either a TOML config or a manifest JSON of an earlier run.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        let manifest: RunManifest =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        manifest.config.validate()?;
        Ok(manifest.config)
    } else {
        ExperimentConfig::from_toml_str(&text)
    }
}

pub fn output_dir(config: &ExperimentConfig, opts: &RunOptions) -> PathBuf {
    let root = opts
        .out_root
        .clone()
        .or_else(|| config.out_dir().cloned())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT));
    root.join(format!("{}-{}", config.name(), config.seed()))
}

fn conventions(w: &mut RunWriter) {
    use crate::diagnostics::autocorr::{FIT_FLOOR, MIN_FIT_POINTS, SHOULDER_LEVEL};
    w.default_value(
        "fit_window",
        format!(
            "lags 0..k_stop, k_stop = first k with C(k) <= max({FIT_FLOOR}, first local minimum below \
             {SHOULDER_LEVEL}) or C(k) <= 0; least squares on ln C; l_c = -1/slope; at least {MIN_FIT_POINTS} points"
        ),
    );
    w.default_value(
        "fast_decay",
        "when C falls to the floor within fewer than 3 lags, l_c is the bound k_stop/ln(20)",
    );
    w.default_value(
        "series_autocorrelation",
        "mean-subtracted, biased (divide by L), normalized to C(0) = 1",
    );
    w.default_value(
        "matrix_autocorrelation",
        "A(m) = mean over the (N-m)^2 index pairs of H_ij H*_(i+m)(j+m), divided by A(0); real part",
    );
    w.default_value(
        "power_spectrum",
        "mean-subtracted periodogram, bins 1..L/2, unit sum, angular frequencies 2 pi k/(L dt), PR = 1/sum p^2",
    );
    w.default_value("sample_interval", "pi/4 divided by the largest angular frequency (E_max - E_min)/hbar");
    w.default_value("composite_index", "i = a*dim_B + b; the RDM keeps subsystem A");
}

/// Runs one experiment and writes its outputs and manifest.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunManifest> {
    config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = opts.threads {
        if t == 0 {
            return Err(Error::Validation("threads: must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Validation(format!("threads: {e}")))?;
    let dir = output_dir(config, opts);
    let result = pool.install(|| {
        let start = Instant::now();
        let mut w = RunWriter::create(&dir)?;
        conventions(&mut w);
        let mut resolved = config.clone();
        match &mut resolved {
            ExperimentConfig::SpinProto(c) => pipelines::spin_proto(c, &mut w)?,
            ExperimentConfig::Rotors(c) => pipelines::rotors(c, &mut w)?,
            ExperimentConfig::HarperPair(c) => pipelines::harper_pair(c, &mut w)?,
            ExperimentConfig::Intervals(c) => pipelines::intervals(c, &mut w)?,
            ExperimentConfig::Hybrid(c) => pipelines::hybrid(c, &mut w)?,
            ExperimentConfig::SpectralCheck(c) => pipelines::spectral_check(c, &mut w)?,
        }
        w.finish(&resolved, start.elapsed().as_secs_f64())
    });
    if result.is_err() {
        // only removes the directory if nothing was written
        let _ = std::fs::remove_dir(&dir);
    }
    result
}
