//! Model systems: random symmetric matrices, torus-quantized Harper
//! Hamiltonians, coupled Harper pairs, coupled kicked rotors and hybrid
//! eigenvalue/eigenvector swaps.
//!
//! Position eigenstates `|j⟩` on a torus of period `Q` sit at `q_j = jQ/N`;
//! the DFT `F` maps them to momentum eigenstates. Composite systems use the
//! A-major index `j1·N + j2` throughout.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dynamics::FloquetStep;
use crate::error::{Error, Result};
use crate::linalg::{
    dft_unitary, eigh, tensor_product, ComplexMatrix, HermitianOperator, Spectrum, StateVector,
    UnitaryOperator, C64, DEFAULT_MAX_DIM,
};

/// Phase-space cell of one torus-quantized degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusParams {
    pub n: usize,
    pub period_p: f64,
    pub period_q: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    hbar: f64,
}

impl TorusParams {
    /// `ħ` is derived as `PQ/(2πN)`.
    pub fn new(n: usize, period_p: f64, period_q: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!("torus needs N >= 2 states, got {n}")));
        }
        if !(period_p > 0.0 && period_q > 0.0 && period_p.is_finite() && period_q.is_finite()) {
            return Err(Error::Validation(format!(
                "torus periods must be positive, got P={period_p}, Q={period_q}"
            )));
        }
        if !(gamma1.is_finite() && gamma2.is_finite()) {
            return Err(Error::Validation("Harper amplitudes must be finite".into()));
        }
        let hbar = period_p * period_q / (TAU * n as f64);
        Ok(Self {
            n,
            period_p,
            period_q,
            gamma1,
            gamma2,
            hbar,
        })
    }

    /// Picks the integer `N = PQ/(2πħ)`; the requested `ħ` must land within
    /// 1% of an admissible value, which then replaces it.
    pub fn from_hbar(hbar: f64, period_p: f64, period_q: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Validation(format!("hbar must be positive, got {hbar}")));
        }
        let exact = period_p * period_q / (TAU * hbar);
        let n = exact.round();
        if n < 2.0 || ((exact - n) / n).abs() > 1e-2 {
            return Err(Error::Validation(format!(
                "PQ/(2πħ) = {exact:.4} is not close to an integer >= 2"
            )));
        }
        Self::new(n as usize, period_p, period_q, gamma1, gamma2)
    }

    /// Square torus `P = Q = √(2πNħ)` with exactly `N` states.
    pub fn square(n: usize, hbar: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Validation(format!("hbar must be positive, got {hbar}")));
        }
        let side = (TAU * n as f64 * hbar).sqrt();
        let mut params = Self::new(n, side, side, gamma1, gamma2)?;
        // keep the requested ħ bit-exact; the periods absorb the rounding
        params.period_q = TAU * n as f64 * hbar / side;
        params.hbar = params.period_p * params.period_q / (TAU * n as f64);
        Ok(params)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn position(&self, j: usize) -> f64 {
        j as f64 * self.period_q / self.n as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotorCoupling {
    /// `c_r sin q1 sin q2` acts together with the cosine kicks.
    #[default]
    Kicked,
    /// `c_r sin q1 sin q2` acts continuously with the kinetic energy between kicks.
    Continuous,
}

/// Two kicked rotors truncated to `N` momentum states each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotorParams {
    pub n: usize,
    pub k1: f64,
    pub k2: f64,
    pub tau: f64,
    pub coupling: f64,
    pub hbar: f64,
    #[serde(default)]
    pub coupling_mode: RotorCoupling,
}

impl RotorParams {
    /// Uses `ħ = 2π/N`, for which the truncated momentum window spans one
    /// classical momentum period and the kinetic phases are periodic in it.
    pub fn new(n: usize, k1: f64, k2: f64, tau: f64, coupling: f64) -> Result<Self> {
        let params = Self {
            n,
            k1,
            k2,
            tau,
            coupling,
            hbar: TAU / n.max(1) as f64,
            coupling_mode: RotorCoupling::Kicked,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn with_coupling_mode(mut self, mode: RotorCoupling) -> Self {
        self.coupling_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Validation(format!("rotor truncation N must be >= 2, got {}", self.n)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Validation(format!("kick period must be positive, got {}", self.tau)));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::Validation(format!("hbar must be positive, got {}", self.hbar)));
        }
        if ![self.k1, self.k2, self.coupling].iter().all(|x| x.is_finite()) {
            return Err(Error::Validation("kick and coupling strengths must be finite".into()));
        }
        Ok(())
    }
}

/// Two identical Harper systems coupled through `c_h sin q1 sin q2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledHarperParams {
    pub torus: TorusParams,
    pub coupling: f64,
}

/// Real symmetric Gaussian random matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoeParams {
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl GoeParams {
    /// Off-diagonal deviation `1/√N`, giving a spectrum of width about 4.
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            sigma: 1.0 / (n.max(1) as f64).sqrt(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Validation(format!("GOE dimension must be >= 2, got {}", self.n)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Validation(format!("GOE sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

fn check_capacity(what: &'static str, requested: usize) -> Result<()> {
    if requested > DEFAULT_MAX_DIM {
        return Err(Error::Capacity {
            what,
            requested,
            cap: DEFAULT_MAX_DIM,
        });
    }
    Ok(())
}

/// Upper triangle drawn row by row; off-diagonals `N(0, σ²)`, diagonal `N(0, 2σ²)`.
pub fn build_goe(params: &GoeParams) -> Result<HermitianOperator> {
    params.validate()?;
    let n = params.n;
    check_capacity("GOE matrix", n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let off = Normal::new(0.0, params.sigma).expect("sigma validated");
    let diag = Normal::new(0.0, params.sigma * 2f64.sqrt()).expect("sigma validated");
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let x = if i == j { diag.sample(&mut rng) } else { off.sample(&mut rng) };
            entries[i * n + j] = x;
            entries[j * n + i] = x;
        }
    }
    HermitianOperator::new(ComplexMatrix::from_fn(n, n, |i, j| C64::new(entries[i * n + j], 0.0)))
}

/// Harper Hamiltonian `γ1 cos(2πp/P) + γ2 cos(2πq/Q)` in the position basis.
pub fn build_harper(params: &TorusParams) -> Result<HermitianOperator> {
    let n = params.n;
    check_capacity("Harper", n)?;
    let f = dft_unitary(n);
    let kinetic: Vec<f64> = (0..n)
        .map(|k| params.gamma1 * (TAU * k as f64 / n as f64).cos())
        .collect();
    let kinetic = f
        .matrix()
        .adjoint()
        .matmul(&ComplexMatrix::from_real_diagonal(&kinetic))
        .matmul(f.matrix());
    let potential: Vec<f64> = (0..n)
        .map(|j| params.gamma2 * (TAU * j as f64 / n as f64).cos())
        .collect();
    let h = kinetic.add(&ComplexMatrix::from_real_diagonal(&potential));
    HermitianOperator::from_hermitian_part(&h)
}

/// `diag(sin(2πq_j/Q))`.
pub fn torus_sine(params: &TorusParams) -> ComplexMatrix {
    let n = params.n;
    let s: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).sin()).collect();
    ComplexMatrix::from_real_diagonal(&s)
}

/// `H1⊗I + I⊗H2 + c_h S⊗S` on the `N²`-dimensional product space.
pub fn build_coupled_harper(params: &CoupledHarperParams) -> Result<HermitianOperator> {
    let n = params.torus.n;
    check_capacity("coupled Harper", n.saturating_mul(n))?;
    let h = build_harper(&params.torus)?;
    let id = ComplexMatrix::identity(n);
    let s = torus_sine(&params.torus);
    let total = tensor_product(h.matrix(), &id)?
        .add(&tensor_product(&id, h.matrix())?)
        .add(&tensor_product(&s, &s)?.scale(C64::new(params.coupling, 0.0)));
    HermitianOperator::new(total)
}

/// Momentum quantum number of DFT bin `k`, folded into `[−⌊N/2⌋, N − ⌊N/2⌋)`.
pub fn momentum_number(k: usize, n: usize) -> i64 {
    let half = (n / 2) as i64;
    ((k as i64 + half).rem_euclid(n as i64)) - half
}

/// Unitary taking position amplitudes to momentum amplitudes ordered by
/// ascending momentum `m = k − ⌊N/2⌋`.
pub fn ordered_momentum_transform(n: usize) -> UnitaryOperator {
    let f = dft_unitary(n);
    let half = n / 2;
    let m = ComplexMatrix::from_fn(n, n, |k, j| {
        let bin = (k + n - half) % n;
        f.matrix()[(bin, j)]
    });
    UnitaryOperator::new(m).expect("row permutation of a unitary")
}

fn kinetic_phases(n: usize, tau: f64, hbar: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let p = hbar * momentum_number(k, n) as f64;
            tau * p * p / (2.0 * hbar)
        })
        .collect()
}

/// One-kick operator of a single rotor, `F† D_kin F D_kick`.
pub fn build_floquet_rotor(n: usize, k: f64, tau: f64, hbar: f64) -> Result<UnitaryOperator> {
    let f = dft_unitary(n);
    let kin: Vec<C64> = kinetic_phases(n, tau, hbar)
        .into_iter()
        .map(|phi| C64::from_polar(1.0, -phi))
        .collect();
    let kick: Vec<C64> = (0..n)
        .map(|j| {
            let q = TAU * j as f64 / n as f64;
            C64::from_polar(1.0, -k * q.cos() / hbar)
        })
        .collect();
    let u = f
        .matrix()
        .adjoint()
        .matmul(&ComplexMatrix::from_diagonal(&kin))
        .matmul(f.matrix())
        .matmul(&ComplexMatrix::from_diagonal(&kick));
    UnitaryOperator::new(u)
}

/// One-kick operator of the coupled rotors in the joint position basis.
///
/// Kicked coupling: `U = G† D_kin G D_kick` with `G = F⊗F` and the coupling
/// inside `D_kick`. Continuous coupling: `U = exp(−iτ(T + V_c)/ħ) D_kick`
/// with only the cosine terms in `D_kick`.
pub fn build_floquet_coupled_rotors(params: &RotorParams) -> Result<UnitaryOperator> {
    params.validate()?;
    let n = params.n;
    let dim = n.saturating_mul(n);
    check_capacity("coupled rotors", dim)?;
    let hbar = params.hbar;
    let grid: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let coupling_in_kick = params.coupling_mode == RotorCoupling::Kicked;
    let kick: Vec<C64> = (0..dim)
        .map(|i| {
            let (q1, q2) = (grid[i / n], grid[i % n]);
            let mut v = params.k1 * q1.cos() + params.k2 * q2.cos();
            if coupling_in_kick {
                v += params.coupling * q1.sin() * q2.sin();
            }
            C64::from_polar(1.0, -v / hbar)
        })
        .collect();
    let kick = ComplexMatrix::from_diagonal(&kick);
    let f = dft_unitary(n);
    let g = tensor_product(f.matrix(), f.matrix())?;
    let single = kinetic_phases(n, params.tau, hbar);
    let free = match params.coupling_mode {
        RotorCoupling::Kicked => {
            let kin: Vec<C64> = (0..dim)
                .map(|i| C64::from_polar(1.0, -(single[i / n] + single[i % n])))
                .collect();
            g.adjoint().matmul(&ComplexMatrix::from_diagonal(&kin)).matmul(&g)
        }
        RotorCoupling::Continuous => {
            // T/ħ·τ phases are already scaled; rebuild T itself for the joint generator
            let kinetic: Vec<f64> = (0..dim)
                .map(|i| (single[i / n] + single[i % n]) * hbar / params.tau)
                .collect();
            let t = g
                .adjoint()
                .matmul(&ComplexMatrix::from_real_diagonal(&kinetic))
                .matmul(&g);
            let vc: Vec<f64> = (0..dim)
                .map(|i| params.coupling * grid[i / n].sin() * grid[i % n].sin())
                .collect();
            let h = HermitianOperator::from_hermitian_part(&t.add(&ComplexMatrix::from_real_diagonal(&vc)))?;
            propagator(&eigh(&h)?, params.tau / hbar)
        }
    };
    Ok(UnitaryOperator::new(free.matmul(&kick))?.polished())
}

/// Kicked-coupling rotor map applied as `G† D_kin G D_kick` with FFTs.
///
/// Every factor is a unit-modulus diagonal or a transform, so rounding does
/// not pile up in one direction the way it does for a dense product whose
/// `U†U − I` floor is biased. Costs `O(N² log N)` per kick.
#[derive(Clone)]
pub struct SplitRotorFloquet {
    n: usize,
    kick: Vec<C64>,
    kinetic: Vec<C64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SplitRotorFloquet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SplitRotorFloquet").field("n", &self.n).finish()
    }
}

impl SplitRotorFloquet {
    pub fn new(params: &RotorParams) -> Result<Self> {
        params.validate()?;
        if params.coupling_mode != RotorCoupling::Kicked {
            return Err(Error::Validation(
                "split-operator stepping needs the coupling inside the kick".into(),
            ));
        }
        let n = params.n;
        let dim = n.saturating_mul(n);
        check_capacity("coupled rotors", dim)?;
        let grid: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        let kick = (0..dim)
            .map(|i| {
                let (q1, q2) = (grid[i / n], grid[i % n]);
                let v = params.k1 * q1.cos() + params.k2 * q2.cos() + params.coupling * q1.sin() * q2.sin();
                C64::from_polar(1.0, -v / params.hbar)
            })
            .collect();
        let single = kinetic_phases(n, params.tau, params.hbar);
        // the 1/N² of the two unnormalized transforms is folded in here
        let kinetic = (0..dim)
            .map(|i| C64::from_polar(1.0 / dim as f64, -(single[i / n] + single[i % n])))
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            kick,
            kinetic,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    /// Transform over both rotor indices of the row-major `N×N` array.
    fn transform2(&self, fft: &dyn Fft<f64>, psi: &mut [C64], scratch: &mut [C64]) {
        let n = self.n;
        fft.process(psi);
        for a in 0..n {
            for b in 0..n {
                scratch[b * n + a] = psi[a * n + b];
            }
        }
        fft.process(scratch);
        for a in 0..n {
            for b in 0..n {
                psi[a * n + b] = scratch[b * n + a];
            }
        }
    }
}

impl FloquetStep for SplitRotorFloquet {
    fn dim(&self) -> usize {
        self.n * self.n
    }

    fn apply(&self, psi: &mut Vec<C64>) {
        let mut scratch = vec![C64::new(0.0, 0.0); psi.len()];
        for (x, k) in psi.iter_mut().zip(&self.kick) {
            *x *= k;
        }
        self.transform2(self.forward.as_ref(), psi, &mut scratch);
        for (x, k) in psi.iter_mut().zip(&self.kinetic) {
            *x *= k;
        }
        self.transform2(self.inverse.as_ref(), psi, &mut scratch);
    }
}

/// `V exp(−i·E·scale) V†`.
pub fn propagator(spec: &Spectrum, scale: f64) -> ComplexMatrix {
    let v = spec.eigenvectors().matrix();
    let e = spec.eigenvalues();
    let left = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, a| {
        v[(i, a)] * C64::from_polar(1.0, -e[a] * scale)
    });
    left.matmul(&v.adjoint())
}

/// Coupled-rotor operator re-expressed in the product of ordered momentum bases.
pub fn rotor_momentum_basis(u: &UnitaryOperator, n: usize) -> Result<UnitaryOperator> {
    if u.dim() != n * n {
        return Err(Error::Validation(format!(
            "operator of dimension {} is not a pair of {n}-state rotors",
            u.dim()
        )));
    }
    let w = ordered_momentum_transform(n);
    let ww = UnitaryOperator::new(tensor_product(w.matrix(), w.matrix())?)?;
    UnitaryOperator::new(ww.conjugate(u.matrix()))
}

/// `V_b diag(E_a) V_b†`: eigenvalues of one spectrum on the eigenvectors of another.
pub fn hybrid_hamiltonian(eigenvalue_source: &Spectrum, eigenvector_source: &Spectrum) -> Result<HermitianOperator> {
    if eigenvalue_source.dim() != eigenvector_source.dim() {
        return Err(Error::Validation(format!(
            "hybrid needs equal dimensions, got {} and {}",
            eigenvalue_source.dim(),
            eigenvector_source.dim()
        )));
    }
    let hybrid = Spectrum::new(
        eigenvalue_source.eigenvalues().to_vec(),
        eigenvector_source.eigenvectors().clone(),
    )?;
    HermitianOperator::from_hermitian_part(&hybrid.reconstruct())
}

/// Periodized Gaussian wavepacket centred at `(q0, p0)` with unit width scale.
pub fn coherent_state_on_torus(params: &TorusParams, q0: f64, p0: f64) -> Result<StateVector> {
    coherent_state_with_width(params, q0, p0, 1.0)
}

/// Position width `σ_q = scale·√(ħQ/(2P))`, which splits the uncertainty
/// between `q` and `p` in proportion to the torus periods.
pub fn coherent_state_with_width(params: &TorusParams, q0: f64, p0: f64, scale: f64) -> Result<StateVector> {
    let (q_period, p_period) = (params.period_q, params.period_p);
    if !(0.0..q_period).contains(&q0) || !(0.0..p_period).contains(&p0) {
        return Err(Error::Validation(format!(
            "coherent-state centre ({q0}, {p0}) outside [0,{q_period})x[0,{p_period})"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Validation(format!("width scale must be positive, got {scale}")));
    }
    let hbar = params.hbar();
    let sigma = scale * (hbar * q_period / (2.0 * p_period)).sqrt();
    let images = 3i32;
    let amps: Vec<C64> = (0..params.n)
        .map(|j| {
            let q = params.position(j);
            let d = (q - q0 + q_period / 2.0).rem_euclid(q_period) - q_period / 2.0;
            let envelope: f64 = (-images..=images)
                .map(|w| {
                    let x = d + w as f64 * q_period;
                    (-x * x / (4.0 * sigma * sigma)).exp()
                })
                .sum();
            C64::from_polar(envelope, p0 * q / hbar)
        })
        .collect();
    StateVector::normalized(amps)
}
