//! TOML experiment configurations. Unknown keys are rejected so that a typo
//! in a sweep cannot silently fall back to a default.

use std::f64::consts::TAU;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DEFAULT_CHECK_EVERY, DEFAULT_STEPS};
use crate::error::{Error, Result};
use crate::hamiltonians::RotorCoupling;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    SpinProto(SpinProtoConfig),
    Rotors(RotorsConfig),
    HarperPair(HarperPairConfig),
    Intervals(IntervalsConfig),
    Hybrid(HybridConfig),
    SpectralCheck(SpectralCheckConfig),
}

/// Initial product state of the two subsystems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// Complex Gaussian factors; the seed defaults to the run seed.
    RandomProduct {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Product of torus coherent states centred at `(q1, p1)` and `(q2, p2)`.
    CoherentProduct {
        q1: f64,
        p1: f64,
        q2: f64,
        p2: f64,
        #[serde(default = "one")]
        width: f64,
    },
    /// A composite computational basis state.
    Basis { index: usize },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::RandomProduct { seed: None }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Sample interval; filled in with the anti-aliasing default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_check_every")]
    pub check_every: usize,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            dt: None,
            check_every: DEFAULT_CHECK_EVERY,
        }
    }
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}
fn default_check_every() -> usize {
    DEFAULT_CHECK_EVERY
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    /// Largest lag of time-series autocorrelations.
    #[serde(default = "default_max_lag")]
    pub max_lag: usize,
    /// Largest lag of matrix autocorrelations; half the dimension if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_max_lag: Option<usize>,
    /// First lag of the tail used for decay and recurrence statistics.
    #[serde(default = "default_tail_start")]
    pub tail_start: usize,
    #[serde(default = "default_interval_bins")]
    pub interval_bins: usize,
    #[serde(default = "default_nnlsd_bins")]
    pub nnlsd_bins: usize,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            max_lag: default_max_lag(),
            matrix_max_lag: None,
            tail_start: default_tail_start(),
            interval_bins: default_interval_bins(),
            nnlsd_bins: default_nnlsd_bins(),
        }
    }
}

fn default_max_lag() -> usize {
    500
}
fn default_tail_start() -> usize {
    50
}
fn default_interval_bins() -> usize {
    crate::diagnostics::levels::DEFAULT_INTERVAL_BINS
}
fn default_nnlsd_bins() -> usize {
    40
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinProtoConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_spins")]
    pub n_spins: u32,
    #[serde(default = "default_kept_spins")]
    pub kept_spins: u32,
    #[serde(default = "default_spin_hbar")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub gamma1: f64,
    #[serde(default = "one")]
    pub gamma2: f64,
    /// GOE off-diagonal deviation; `1/√N` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

fn default_spins() -> u32 {
    7
}
fn default_kept_spins() -> u32 {
    4
}
fn default_spin_hbar() -> f64 {
    0.592
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotorsConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_rotor_n")]
    pub n: usize,
    #[serde(default = "default_kick")]
    pub k1: f64,
    #[serde(default = "default_kick")]
    pub k2: f64,
    #[serde(default = "one")]
    pub tau: f64,
    #[serde(default = "default_rotor_coupling")]
    pub coupling: f64,
    /// `2π/N` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(default = "default_coupling_mode")]
    pub coupling_mode: RotorCoupling,
    #[serde(default = "default_rotor_initial")]
    pub initial: InitialState,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

fn default_rotor_n() -> usize {
    16
}
fn default_kick() -> f64 {
    10.0
}
fn default_rotor_coupling() -> f64 {
    2.0
}
fn default_coupling_mode() -> RotorCoupling {
    RotorCoupling::Continuous
}
fn default_rotor_initial() -> InitialState {
    InitialState::CoherentProduct {
        q1: 0.0,
        p1: 0.0,
        q2: 0.0,
        p2: 0.0,
        width: 1.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSection {
    /// Orbits started uniformly on the torus for the section plot.
    #[serde(default = "default_orbits")]
    pub orbits: usize,
    #[serde(default = "default_orbit_steps")]
    pub steps: usize,
    #[serde(default = "default_flow_dt")]
    pub dt: f64,
    #[serde(default = "default_max_crossings")]
    pub max_crossings: usize,
    #[serde(default)]
    pub section_q2: f64,
    #[serde(default = "default_lyapunov_orbits")]
    pub lyapunov_orbits: usize,
    #[serde(default = "default_orbit_steps")]
    pub lyapunov_steps: usize,
}

impl Default for ClassicalSection {
    fn default() -> Self {
        Self {
            orbits: default_orbits(),
            steps: default_orbit_steps(),
            dt: default_flow_dt(),
            max_crossings: default_max_crossings(),
            section_q2: 0.0,
            lyapunov_orbits: default_lyapunov_orbits(),
            lyapunov_steps: default_orbit_steps(),
        }
    }
}

fn default_orbits() -> usize {
    20
}
fn default_orbit_steps() -> usize {
    200_000
}
fn default_flow_dt() -> f64 {
    crate::classical::DEFAULT_FLOW_DT
}
fn default_max_crossings() -> usize {
    10_000
}
fn default_lyapunov_orbits() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarperPairConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Sites per subsystem; derived from `hbar` and the periods if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "default_harper_hbar")]
    pub hbar: f64,
    #[serde(default = "tau_period")]
    pub period_p: f64,
    #[serde(default = "tau_period")]
    pub period_q: f64,
    #[serde(default = "two")]
    pub gamma1: f64,
    #[serde(default = "two")]
    pub gamma2: f64,
    #[serde(default = "default_harper_coupling")]
    pub coupling: f64,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub classical: ClassicalSection,
}

fn default_harper_hbar() -> f64 {
    0.628
}
fn tau_period() -> f64 {
    TAU
}
fn two() -> f64 {
    2.0
}
fn default_harper_coupling() -> f64 {
    10.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalsConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_levels")]
    pub n: usize,
    /// GOE draws pooled into the spacing histogram, seeds `seed..seed+samples`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_spin_hbar")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub gamma1: f64,
    #[serde(default = "one")]
    pub gamma2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

fn default_levels() -> usize {
    128
}
fn default_samples() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_spins")]
    pub n_spins: u32,
    #[serde(default = "default_kept_spins")]
    pub kept_spins: u32,
    #[serde(default = "default_spin_hbar")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub gamma1: f64,
    #[serde(default = "one")]
    pub gamma2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub evolution: EvolutionSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralCheckConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Sites per Harper subsystem; the composite dimension is `n²`.
    #[serde(default = "default_check_n")]
    pub n: usize,
    #[serde(default = "two")]
    pub gamma1: f64,
    #[serde(default = "two")]
    pub gamma2: f64,
    #[serde(default = "default_harper_coupling")]
    pub coupling: f64,
    #[serde(default = "default_time_points")]
    pub time_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub initial: InitialState,
}

fn default_check_n() -> usize {
    6
}
fn default_time_points() -> usize {
    100
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("{field}: must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("{field}: must be finite, got {v}")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(Error::Validation(format!("{field}: must be at least {min}, got {v}")))
    }
}

impl EvolutionSection {
    fn validate(&self) -> Result<()> {
        at_least("evolution.steps", self.steps, 1)?;
        at_least("evolution.check_every", self.check_every, 1)?;
        if let Some(dt) = self.dt {
            positive("evolution.dt", dt)?;
        }
        Ok(())
    }
}

impl DiagnosticsSection {
    fn validate(&self, steps: usize) -> Result<()> {
        at_least("diagnostics.max_lag", self.max_lag, 1)?;
        if 2 * self.max_lag > steps + 1 {
            return Err(Error::Validation(format!(
                "diagnostics.max_lag: {} needs at least {} samples, evolution has {}",
                self.max_lag,
                2 * self.max_lag,
                steps + 1
            )));
        }
        if self.tail_start > self.max_lag {
            return Err(Error::Validation(format!(
                "diagnostics.tail_start: {} exceeds max_lag {}",
                self.tail_start, self.max_lag
            )));
        }
        at_least("diagnostics.interval_bins", self.interval_bins, 1)?;
        at_least("diagnostics.nnlsd_bins", self.nnlsd_bins, 1)
    }
}

impl InitialState {
    fn validate(&self) -> Result<()> {
        if let InitialState::CoherentProduct { q1, p1, q2, p2, width } = *self {
            for (name, v) in [("q1", q1), ("p1", p1), ("q2", q2), ("p2", p2)] {
                finite(&format!("initial.{name}"), v)?;
            }
            positive("initial.width", width)?;
        }
        Ok(())
    }
}

fn check_spins(n_spins: u32, kept: u32) -> Result<()> {
    if !(2..=20).contains(&n_spins) {
        return Err(Error::Validation(format!("n_spins: must be in 2..=20, got {n_spins}")));
    }
    if kept == 0 || kept >= n_spins {
        return Err(Error::Validation(format!(
            "kept_spins: must be in 1..{n_spins}, got {kept}"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::SpinProto(_) => "spin-proto",
            ExperimentConfig::Rotors(_) => "rotors",
            ExperimentConfig::HarperPair(_) => "harper-pair",
            ExperimentConfig::Intervals(_) => "intervals",
            ExperimentConfig::Hybrid(_) => "hybrid",
            ExperimentConfig::SpectralCheck(_) => "spectral-check",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::SpinProto(c) => c.seed,
            ExperimentConfig::Rotors(c) => c.seed,
            ExperimentConfig::HarperPair(c) => c.seed,
            ExperimentConfig::Intervals(c) => c.seed,
            ExperimentConfig::Hybrid(c) => c.seed,
            ExperimentConfig::SpectralCheck(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::SpinProto(c) => c.seed = seed,
            ExperimentConfig::Rotors(c) => c.seed = seed,
            ExperimentConfig::HarperPair(c) => c.seed = seed,
            ExperimentConfig::Intervals(c) => c.seed = seed,
            ExperimentConfig::Hybrid(c) => c.seed = seed,
            ExperimentConfig::SpectralCheck(c) => c.seed = seed,
        }
    }

    pub fn out_dir(&self) -> Option<&PathBuf> {
        match self {
            ExperimentConfig::SpinProto(c) => c.out_dir.as_ref(),
            ExperimentConfig::Rotors(c) => c.out_dir.as_ref(),
            ExperimentConfig::HarperPair(c) => c.out_dir.as_ref(),
            ExperimentConfig::Intervals(c) => c.out_dir.as_ref(),
            ExperimentConfig::Hybrid(c) => c.out_dir.as_ref(),
            ExperimentConfig::SpectralCheck(c) => c.out_dir.as_ref(),
        }
    }

    /// Field-level checks beyond what the schema enforces.
    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::SpinProto(c) => {
                check_spins(c.n_spins, c.kept_spins)?;
                positive("hbar", c.hbar)?;
                finite("gamma1", c.gamma1)?;
                finite("gamma2", c.gamma2)?;
                if let Some(s) = c.sigma {
                    positive("sigma", s)?;
                }
                c.initial.validate()?;
                c.evolution.validate()?;
                c.diagnostics.validate(c.evolution.steps)
            }
            ExperimentConfig::Rotors(c) => {
                at_least("n", c.n, 2)?;
                finite("k1", c.k1)?;
                finite("k2", c.k2)?;
                positive("tau", c.tau)?;
                finite("coupling", c.coupling)?;
                if let Some(h) = c.hbar {
                    positive("hbar", h)?;
                }
                if c.evolution.dt.is_some_and(|dt| dt != c.tau) {
                    return Err(Error::Validation(
                        "evolution.dt: a kicked system is sampled once per kick; leave it unset or equal to tau".into(),
                    ));
                }
                c.initial.validate()?;
                c.evolution.validate()?;
                c.diagnostics.validate(c.evolution.steps)
            }
            ExperimentConfig::HarperPair(c) => {
                if let Some(n) = c.n {
                    at_least("n", n, 2)?;
                }
                positive("hbar", c.hbar)?;
                positive("period_p", c.period_p)?;
                positive("period_q", c.period_q)?;
                finite("gamma1", c.gamma1)?;
                finite("gamma2", c.gamma2)?;
                finite("coupling", c.coupling)?;
                c.initial.validate()?;
                c.evolution.validate()?;
                c.diagnostics.validate(c.evolution.steps)?;
                let cl = &c.classical;
                positive("classical.dt", cl.dt)?;
                finite("classical.section_q2", cl.section_q2)?;
                if cl.lyapunov_orbits > 0 {
                    at_least(
                        "classical.lyapunov_steps",
                        cl.lyapunov_steps,
                        crate::classical::MIN_LYAPUNOV_STEPS,
                    )?;
                }
                Ok(())
            }
            ExperimentConfig::Intervals(c) => {
                at_least("n", c.n, 3)?;
                at_least("samples", c.samples, 1)?;
                positive("hbar", c.hbar)?;
                finite("gamma1", c.gamma1)?;
                finite("gamma2", c.gamma2)?;
                if let Some(s) = c.sigma {
                    positive("sigma", s)?;
                }
                at_least("diagnostics.interval_bins", c.diagnostics.interval_bins, 1)?;
                at_least("diagnostics.nnlsd_bins", c.diagnostics.nnlsd_bins, 1)
            }
            ExperimentConfig::Hybrid(c) => {
                check_spins(c.n_spins, c.kept_spins)?;
                positive("hbar", c.hbar)?;
                finite("gamma1", c.gamma1)?;
                finite("gamma2", c.gamma2)?;
                if let Some(s) = c.sigma {
                    positive("sigma", s)?;
                }
                c.initial.validate()?;
                c.evolution.validate()
            }
            ExperimentConfig::SpectralCheck(c) => {
                at_least("n", c.n, 2)?;
                finite("gamma1", c.gamma1)?;
                finite("gamma2", c.gamma2)?;
                finite("coupling", c.coupling)?;
                at_least("time_points", c.time_points, 2)?;
                if let Some(dt) = c.dt {
                    positive("dt", dt)?;
                }
                c.initial.validate()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_toml_str("experiment = \"rotors\"\n").unwrap();
        match cfg {
            ExperimentConfig::Rotors(c) => {
                assert_eq!(c.n, 16);
                assert_eq!(c.coupling, 2.0);
                assert_eq!(c.evolution.steps, DEFAULT_STEPS);
                assert_eq!(c.coupling_mode, RotorCoupling::Continuous);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml_str("experiment = \"rotors\"\nkk = 3\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
        assert_eq!(err.exit_code(), 2);
        let err = ExperimentConfig::from_toml_str("experiment = \"rotors\"\n[evolution]\nstep = 3\n").unwrap_err();
        assert!(err.to_string().contains("step"), "{err}");
        assert!(ExperimentConfig::from_toml_str("experiment = \"nope\"\n").is_err());
    }

    #[test]
    fn field_level_messages() {
        let err = ExperimentConfig::from_toml_str("experiment = \"harper-pair\"\nhbar = -1.0\n").unwrap_err();
        assert!(err.to_string().contains("hbar"), "{err}");
        let err = ExperimentConfig::from_toml_str(
            "experiment = \"spin-proto\"\n[evolution]\nsteps = 100\n[diagnostics]\nmax_lag = 500\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("diagnostics.max_lag"), "{err}");
    }

    #[test]
    fn initial_state_variants() {
        let cfg = ExperimentConfig::from_toml_str(
            "experiment = \"harper-pair\"\n[initial]\nkind = \"coherent-product\"\nq1 = 1.0\np1 = 2.0\nq2 = 0.5\np2 = 0.1\n",
        )
        .unwrap();
        let ExperimentConfig::HarperPair(c) = cfg else { panic!() };
        assert_eq!(
            c.initial,
            InitialState::CoherentProduct {
                q1: 1.0,
                p1: 2.0,
                q2: 0.5,
                p2: 0.1,
                width: 1.0
            }
        );
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = ExperimentConfig::from_toml_str("experiment = \"intervals\"\nseed = 9\n").unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(back.seed(), 9);
    }

    #[test]
    fn json_keeps_every_bit_of_a_resolved_dt() {
        let mut cfg = ExperimentConfig::from_toml_str("experiment = \"spin-proto\"\n").unwrap();
        let dt = 0.11767416458330364;
        if let ExperimentConfig::SpinProto(c) = &mut cfg {
            c.evolution.dt = Some(dt);
            c.hbar = 0.1 + 0.2;
        }
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
        let ExperimentConfig::SpinProto(c) = back else { unreachable!() };
        assert_eq!(c.evolution.dt.unwrap().to_bits(), dt.to_bits());
    }
}
