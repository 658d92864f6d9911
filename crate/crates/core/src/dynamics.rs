//! Unitary evolution of composite states and the reduced-density-matrix
//! records sampled along it.
//!
//! Spectral evolution uses an eigen-decomposition `H = V diag(E) V†` and
//! evaluates `exp(−iHt/ħ)` exactly at every sample time. Floquet evolution
//! applies a one-kick operator repeatedly. Both stream [`RdmRecord`]s through
//! a [`Records`] iterator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    linear_entropy, partial_trace, purity, reduced_density, von_neumann_entropy, BipartiteDims,
    ComplexMatrix, DensityMatrix, Spectrum, StateVector, Subsystem, UnitaryOperator, C64,
};

pub const DEFAULT_STEPS: usize = 4096;
pub const DEFAULT_CHECK_EVERY: usize = 64;

/// Tolerances of the mid-run conservation checks.
pub const TRACE_DRIFT_TOL: f64 = 1e-10;
pub const PURITY_DRIFT_TOL: f64 = 1e-9;
pub const NORM_DRIFT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolutionMode {
    Spectral,
    Floquet,
}

/// Sampling schedule and bipartition of one evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionPlan {
    pub mode: EvolutionMode,
    /// Sample interval; for Floquet runs, the kick period (one sample per kick).
    pub dt: f64,
    pub steps: usize,
    pub hbar: f64,
    pub dims: BipartiteDims,
    pub keep: Subsystem,
    pub check_every: usize,
}

impl EvolutionPlan {
    pub fn spectral(dt: f64, steps: usize, hbar: f64, dims: BipartiteDims) -> Result<Self> {
        let plan = Self {
            mode: EvolutionMode::Spectral,
            dt,
            steps,
            hbar,
            dims,
            keep: Subsystem::A,
            check_every: DEFAULT_CHECK_EVERY,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn floquet(period: f64, steps: usize, dims: BipartiteDims) -> Result<Self> {
        let plan = Self {
            mode: EvolutionMode::Floquet,
            dt: period,
            steps,
            hbar: 1.0,
            dims,
            keep: Subsystem::A,
            check_every: DEFAULT_CHECK_EVERY,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn keeping(mut self, keep: Subsystem) -> Self {
        self.keep = keep;
        self
    }

    pub fn checking_every(mut self, every: usize) -> Self {
        self.check_every = every.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(Error::Validation("evolution needs at least one step".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Validation(format!("sample interval must be positive, got {}", self.dt)));
        }
        if self.mode == EvolutionMode::Spectral && !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::Validation(format!("hbar must be positive, got {}", self.hbar)));
        }
        if self.check_every == 0 {
            return Err(Error::Validation("check interval must be positive".into()));
        }
        Ok(())
    }

    fn require(&self, mode: EvolutionMode, dim: usize) -> Result<()> {
        self.validate()?;
        if self.mode != mode {
            return Err(Error::Validation(format!(
                "plan is for {:?} evolution, expected {mode:?}",
                self.mode
            )));
        }
        self.dims.check(dim)
    }

    fn due_for_check(&self, step: usize) -> bool {
        step.is_multiple_of(self.check_every) || step == self.steps
    }
}

/// Sample interval keeping the fastest phase `ω_max·dt` at `π/4`, with
/// `ω_max = (E_max − E_min)/ħ`.
pub fn anti_alias_dt(spec: &Spectrum, hbar: f64) -> f64 {
    let omega_max = spec.spread() / hbar;
    if omega_max > 0.0 {
        PI / 4.0 / omega_max
    } else {
        1.0
    }
}

/// Subsystem state and its entropies at one sample time.
#[derive(Clone, Debug)]
pub struct RdmRecord {
    pub time: f64,
    pub rdm: DensityMatrix,
    pub s_vn: f64,
    pub s_l: f64,
    pub purity: f64,
}

impl RdmRecord {
    pub fn new(time: f64, rdm: DensityMatrix) -> Result<Self> {
        let p = purity(&rdm);
        Ok(Self {
            time,
            s_vn: von_neumann_entropy(&rdm)?,
            s_l: linear_entropy(&rdm),
            purity: p,
            rdm,
        })
    }
}

type StepFn<'a> = Box<dyn FnMut(usize) -> Result<RdmRecord> + Send + 'a>;

/// Lazily evaluated records for steps `0..=steps`. Iteration stops after the
/// first error.
pub struct Records<'a> {
    next: usize,
    steps: usize,
    step: StepFn<'a>,
    failed: bool,
}

impl<'a> Records<'a> {
    fn new(steps: usize, step: StepFn<'a>) -> Self {
        Self {
            next: 0,
            steps,
            step,
            failed: false,
        }
    }
}

impl Iterator for Records<'_> {
    type Item = Result<RdmRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.next > self.steps {
            return None;
        }
        let out = (self.step)(self.next);
        self.next += 1;
        self.failed = out.is_err();
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = if self.failed { 0 } else { self.steps + 1 - self.next.min(self.steps + 1) };
        (0, Some(left))
    }
}

fn phases(energies: &[f64], time: f64, hbar: f64) -> Vec<C64> {
    energies
        .iter()
        .map(|&e| C64::from_polar(1.0, -e * time / hbar))
        .collect()
}

/// Full density matrix `ρ(t) = V e^{−iEt/ħ} V† ρ0 V e^{iEt/ħ} V†` at `t`.
pub fn density_at(spec: &Spectrum, rho0_energy: &ComplexMatrix, time: f64, hbar: f64) -> ComplexMatrix {
    let v = spec.eigenvectors().matrix();
    let ph = phases(spec.eigenvalues(), time, hbar);
    let rotated = ComplexMatrix::from_fn(v.rows(), v.cols(), |a, b| {
        rho0_energy[(a, b)] * ph[a] * ph[b].conj()
    });
    v.matmul(&rotated).matmul(&v.adjoint())
}

/// Dense density-matrix evolution under `H = V diag(E) V†`.
pub fn evolve_density_spectral<'a>(
    spec: &'a Spectrum,
    rho0: &DensityMatrix,
    plan: EvolutionPlan,
) -> Result<Records<'a>> {
    plan.require(EvolutionMode::Spectral, spec.dim())?;
    if rho0.dim() != spec.dim() {
        return Err(Error::Validation(format!(
            "initial state of dimension {} for a {}-dimensional Hamiltonian",
            rho0.dim(),
            spec.dim()
        )));
    }
    let v = spec.eigenvectors().matrix();
    let rho0_energy = v.adjoint().matmul(rho0.matrix()).matmul(v);
    let purity0 = purity(rho0);
    Ok(Records::new(
        plan.steps,
        Box::new(move |k| {
            let time = k as f64 * plan.dt;
            let rho = DensityMatrix::new_unchecked(density_at(spec, &rho0_energy, time, plan.hbar));
            if plan.due_for_check(k) {
                let tr = rho.matrix().trace();
                if (tr.re - 1.0).abs() > TRACE_DRIFT_TOL || tr.im.abs() > TRACE_DRIFT_TOL {
                    return Err(Error::InvariantViolation {
                        step: k,
                        detail: format!("trace drifted to {tr}"),
                    });
                }
                let p = purity(&rho);
                if (p - purity0).abs() > PURITY_DRIFT_TOL {
                    return Err(Error::InvariantViolation {
                        step: k,
                        detail: format!("full-system purity drifted from {purity0} to {p}"),
                    });
                }
            }
            RdmRecord::new(time, partial_trace(&rho, plan.dims, plan.keep)?)
        }),
    ))
}

fn check_norm(psi: &[C64], step: usize) -> Result<()> {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_DRIFT_TOL {
        return Err(Error::InvariantViolation {
            step,
            detail: format!("state norm drifted to {norm}"),
        });
    }
    Ok(())
}

/// `ψ(t) = V e^{−iEt/ħ} V† ψ0`.
pub fn state_at(spec: &Spectrum, coefficients: &[C64], time: f64, hbar: f64) -> Vec<C64> {
    let ph = phases(spec.eigenvalues(), time, hbar);
    let rotated: Vec<C64> = coefficients.iter().zip(&ph).map(|(c, p)| c * p).collect();
    spec.eigenvectors().matrix().mul_vec(&rotated)
}

/// Energy-basis coefficients `V†ψ`.
pub fn energy_coefficients(spec: &Spectrum, psi: &StateVector) -> Vec<C64> {
    spec.eigenvectors().matrix().adjoint().mul_vec(psi.amplitudes())
}

/// Pure-state evolution; equivalent to the density path for `ρ0 = |ψ0⟩⟨ψ0|`.
pub fn evolve_state_spectral<'a>(
    spec: &'a Spectrum,
    psi0: &StateVector,
    plan: EvolutionPlan,
) -> Result<Records<'a>> {
    plan.require(EvolutionMode::Spectral, spec.dim())?;
    if psi0.dim() != spec.dim() {
        return Err(Error::Validation(format!(
            "initial state of dimension {} for a {}-dimensional Hamiltonian",
            psi0.dim(),
            spec.dim()
        )));
    }
    let coefficients = energy_coefficients(spec, psi0);
    Ok(Records::new(
        plan.steps,
        Box::new(move |k| {
            let time = k as f64 * plan.dt;
            let psi = state_at(spec, &coefficients, time, plan.hbar);
            if plan.due_for_check(k) {
                check_norm(&psi, k)?;
            }
            let psi = StateVector::new_unchecked(psi);
            RdmRecord::new(time, reduced_density(&psi, plan.dims, plan.keep)?)
        }),
    ))
}

/// One period of a stroboscopic map acting in place on a state.
pub trait FloquetStep: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, psi: &mut Vec<C64>);
}

impl FloquetStep for UnitaryOperator {
    fn dim(&self) -> usize {
        UnitaryOperator::dim(self)
    }
    fn apply(&self, psi: &mut Vec<C64>) {
        *psi = self.matrix().mul_vec(psi);
    }
}

/// Stroboscopic evolution `ψ_{k+1} = U ψ_k`, one record per kick.
pub fn evolve_floquet<'a, U: FloquetStep>(
    u: &'a U,
    psi0: &StateVector,
    plan: EvolutionPlan,
) -> Result<Records<'a>> {
    plan.require(EvolutionMode::Floquet, u.dim())?;
    if psi0.dim() != u.dim() {
        return Err(Error::Validation(format!(
            "initial state of dimension {} for a {}-dimensional Floquet operator",
            psi0.dim(),
            u.dim()
        )));
    }
    let mut psi = psi0.amplitudes().to_vec();
    Ok(Records::new(
        plan.steps,
        Box::new(move |k| {
            if k > 0 {
                u.apply(&mut psi);
            }
            if plan.due_for_check(k) {
                check_norm(&psi, k)?;
            }
            let state = StateVector::new_unchecked(psi.clone());
            RdmRecord::new(k as f64 * plan.dt, reduced_density(&state, plan.dims, plan.keep)?)
        }),
    ))
}

/// Scalar observable of a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    VonNeumann,
    Linear,
    Purity,
    RdmElement { m: usize, n: usize, part: Part },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    Re,
    Im,
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::VonNeumann => "s_vn".into(),
            Observable::Linear => "s_l".into(),
            Observable::Purity => "purity".into(),
            Observable::RdmElement { m, n, part } => {
                let p = match part {
                    Part::Re => "re",
                    Part::Im => "im",
                };
                format!("rdm_{p}_{m}_{n}")
            }
        }
    }
}

/// Uniformly sampled real-valued record; `values[0]` is at `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub dt: f64,
    pub values: Vec<f64>,
    pub label: String,
}

impl TimeSeries {
    pub fn new(dt: f64, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("series value {k} is not finite")));
        }
        Ok(Self {
            dt,
            values,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

pub fn extract_series(records: &[RdmRecord], observable: Observable) -> Result<TimeSeries> {
    let first = records
        .first()
        .ok_or_else(|| Error::Validation("no records to extract a series from".into()))?;
    if let Observable::RdmElement { m, n, .. } = observable {
        let dim = first.rdm.dim();
        if m >= dim || n >= dim {
            return Err(Error::Validation(format!(
                "RDM element ({m}, {n}) out of range for dimension {dim}"
            )));
        }
    }
    let dt = if records.len() > 1 {
        records[1].time - records[0].time
    } else {
        0.0
    };
    let values = records
        .iter()
        .map(|r| match observable {
            Observable::VonNeumann => r.s_vn,
            Observable::Linear => r.s_l,
            Observable::Purity => r.purity,
            Observable::RdmElement { m, n, part } => {
                let z = r.rdm.matrix()[(m, n)];
                match part {
                    Part::Re => z.re,
                    Part::Im => z.im,
                }
            }
        })
        .collect();
    TimeSeries::new(dt, values, observable.label())
}

/// Convenience: run an evolution to completion.
pub fn collect_records(records: Records<'_>) -> Result<Vec<RdmRecord>> {
    records.collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_coupled_harper, CoupledHarperParams, TorusParams};
    use crate::linalg::{eigh, random_pure_product, HermitianOperator};
    use std::f64::consts::TAU;

    fn harper_pair(n: usize, coupling: f64) -> Spectrum {
        let torus = TorusParams::new(n, TAU, TAU, 2.0, 2.0).unwrap();
        eigh(&build_coupled_harper(&CoupledHarperParams { torus, coupling }).unwrap()).unwrap()
    }

    #[test]
    fn stationary_state_gives_constant_records() {
        let spec = harper_pair(3, 1.0);
        let v = spec.eigenvectors().matrix();
        // mixture of energy eigenstates
        let weights: Vec<f64> = (0..9).map(|a| (a + 1) as f64 / 45.0).collect();
        let rho_e = ComplexMatrix::from_real_diagonal(&weights);
        let rho0 = DensityMatrix::new(v.matmul(&rho_e).matmul(&v.adjoint()).hermitian_part()).unwrap();
        let dims = BipartiteDims::new(3, 3).unwrap();
        let plan = EvolutionPlan::spectral(0.3, 10, 1.0, dims).unwrap();
        let recs = collect_records(evolve_density_spectral(&spec, &rho0, plan).unwrap()).unwrap();
        for r in &recs {
            assert!(r.rdm.matrix().sub(recs[0].rdm.matrix()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn separable_dynamics_keeps_product_state() {
        let spec = harper_pair(4, 0.0);
        let dims = BipartiteDims::new(4, 4).unwrap();
        let psi = random_pure_product(dims, 1);
        let plan = EvolutionPlan::spectral(0.2, 50, 0.7, dims).unwrap();
        for r in evolve_state_spectral(&spec, &psi, plan).unwrap() {
            assert!(r.unwrap().s_l.abs() < 1e-10);
        }
        let recs = collect_records(evolve_density_spectral(&spec, &psi.density(), plan).unwrap()).unwrap();
        assert!(recs.iter().all(|r| r.s_l.abs() < 1e-10));
    }

    #[test]
    fn state_and_density_paths_agree() {
        let spec = harper_pair(4, 3.0);
        let dims = BipartiteDims::new(4, 4).unwrap();
        let psi = random_pure_product(dims, 2);
        let plan = EvolutionPlan::spectral(0.37, 20, 0.628, dims).unwrap();
        let fast = collect_records(evolve_state_spectral(&spec, &psi, plan).unwrap()).unwrap();
        let slow = collect_records(evolve_density_spectral(&spec, &psi.density(), plan).unwrap()).unwrap();
        assert_eq!(fast.len(), 21);
        assert!(fast[0].s_vn.abs() < 1e-10);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a.s_l - b.s_l).abs() < 1e-10);
            assert!((a.s_vn - b.s_vn).abs() < 1e-9);
        }
        assert!(fast.last().unwrap().s_l > 1e-3, "coupling must entangle");
    }

    #[test]
    fn identity_floquet_is_constant() {
        let dims = BipartiteDims::new(3, 4).unwrap();
        let u = UnitaryOperator::identity(12);
        let psi = random_pure_product(dims, 3);
        let plan = EvolutionPlan::floquet(1.0, 8, dims).unwrap();
        let recs = collect_records(evolve_floquet(&u, &psi, plan).unwrap()).unwrap();
        assert_eq!(recs.len(), 9);
        assert!(recs.iter().all(|r| r.rdm == recs[0].rdm));
    }

    #[test]
    fn plan_mode_and_dimension_checks() {
        let dims = BipartiteDims::new(3, 3).unwrap();
        let spec = harper_pair(3, 1.0);
        let psi = random_pure_product(dims, 3);
        let floquet = EvolutionPlan::floquet(1.0, 4, dims).unwrap();
        assert!(evolve_state_spectral(&spec, &psi, floquet).is_err());
        let wrong = EvolutionPlan::spectral(0.1, 4, 1.0, BipartiteDims::new(2, 4).unwrap()).unwrap();
        assert!(evolve_state_spectral(&spec, &psi, wrong).is_err());
        assert!(EvolutionPlan::spectral(0.0, 4, 1.0, dims).is_err());
        assert!(EvolutionPlan::spectral(0.1, 0, 1.0, dims).is_err());
    }

    #[test]
    fn invariant_violation_reports_step() {
        // slightly non-unitary, but inside the constructor tolerance
        let dims = BipartiteDims::new(2, 2).unwrap();
        let scaled = ComplexMatrix::identity(4).scale(C64::new(1.0 + 1e-11, 0.0));
        let u = UnitaryOperator::new(scaled).unwrap();
        let psi = random_pure_product(dims, 4);
        let plan = EvolutionPlan::floquet(1.0, 200, dims).unwrap().checking_every(64);
        let err = collect_records(evolve_floquet(&u, &psi, plan).unwrap()).unwrap_err();
        match err {
            Error::InvariantViolation { step, .. } => assert_eq!(step, 64),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn series_extraction() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let spec = harper_pair(2, 1.5);
        let psi = random_pure_product(dims, 9);
        let plan = EvolutionPlan::spectral(0.25, 30, 1.0, dims).unwrap();
        let recs = collect_records(evolve_state_spectral(&spec, &psi, plan).unwrap()).unwrap();
        let s_l = extract_series(&recs, Observable::Linear).unwrap();
        let p = extract_series(&recs, Observable::Purity).unwrap();
        assert_eq!(s_l.len(), 31);
        assert!((s_l.dt - 0.25).abs() < 1e-15);
        for (a, b) in s_l.values.iter().zip(&p.values) {
            assert!((a - (1.0 - b)).abs() < 1e-12);
        }
        let d0 = extract_series(&recs, Observable::RdmElement { m: 0, n: 0, part: Part::Re }).unwrap();
        let d1 = extract_series(&recs, Observable::RdmElement { m: 1, n: 1, part: Part::Re }).unwrap();
        for (a, b) in d0.values.iter().zip(&d1.values) {
            assert!((a + b - 1.0).abs() < 1e-12);
        }
        assert!(extract_series(&recs, Observable::RdmElement { m: 2, n: 0, part: Part::Im }).is_err());
        assert!(extract_series(&[], Observable::Linear).is_err());
    }

    #[test]
    fn maximally_mixed_purity_series() {
        let dims = BipartiteDims::new(3, 2).unwrap();
        let spec = eigh(&HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0])).unwrap()).unwrap();
        let rho0 = DensityMatrix::maximally_mixed(6);
        let plan = EvolutionPlan::spectral(0.1, 5, 1.0, dims).unwrap();
        let recs = collect_records(evolve_density_spectral(&spec, &rho0, plan).unwrap()).unwrap();
        let p = extract_series(&recs, Observable::Purity).unwrap();
        assert!(p.values.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-14));
    }
}
