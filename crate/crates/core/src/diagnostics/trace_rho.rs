//! `Tr ρ_A(t)²` reconstructed from energy eigendata, without time stepping.
//!
//! With `ρ0` in the energy basis, `ρ_A(t)_{mn} = Σ_ab e^{−iω_ab t} φ^{ab}_{mn}`
//! where `φ^{ab}_{mn} = ⟨E_a|ρ0|E_b⟩ Σ_l ⟨m,l|E_a⟩⟨E_b|n,l⟩`. The purity is
//! then `Σ_mn |ρ_A(t)_{mn}|²`, which equals the contraction
//! `Σ φ^{ab}_{mn} φ^{a'b'}_{nm}` with both phase factors.

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::linalg::{BipartiteDims, DensityMatrix, Spectrum, C64};

/// Largest composite dimension for the reconstruction.
pub const MAX_TRACE_RHO_DIM: usize = 64;
pub const IMAG_RESIDUAL_TOL: f64 = 1e-9;

/// Pre-contracted `φ^{ab}_{mn}` for a fixed spectrum and initial state.
pub struct PhiTensor {
    dim: usize,
    dim_a: usize,
    energies: Vec<f64>,
    hbar: f64,
    /// Indexed `[(m·dimA + n)·D² + a·D + b]`.
    data: Vec<C64>,
}

impl PhiTensor {
    pub fn new(spec: &Spectrum, rho0: &DensityMatrix, dims: BipartiteDims, hbar: f64) -> Result<Self> {
        let dim = spec.dim();
        dims.check(dim)?;
        if rho0.dim() != dim {
            return Err(Error::Validation(format!(
                "initial state has dimension {}, spectrum {dim}",
                rho0.dim()
            )));
        }
        if dim > MAX_TRACE_RHO_DIM {
            return Err(Error::Capacity {
                what: "spectral purity reconstruction dimension",
                requested: dim,
                cap: MAX_TRACE_RHO_DIM,
            });
        }
        if !(hbar > 0.0) {
            return Err(Error::Validation(format!("hbar must be positive, got {hbar}")));
        }
        let v = spec.eigenvectors().matrix();
        let rho_e = v.adjoint().matmul(rho0.matrix()).matmul(v);
        let (da, db) = (dims.dim_a, dims.dim_b);
        let d2 = dim * dim;
        let mut data = vec![C64::new(0.0, 0.0); da * da * d2];
        for m in 0..da {
            for n in 0..da {
                let block = &mut data[(m * da + n) * d2..(m * da + n + 1) * d2];
                for a in 0..dim {
                    for b in 0..dim {
                        let overlap: C64 = (0..db)
                            .map(|l| v[(dims.index(m, l), a)] * v[(dims.index(n, l), b)].conj())
                            .sum();
                        block[a * dim + b] = rho_e[(a, b)] * overlap;
                    }
                }
            }
        }
        Ok(Self {
            dim,
            dim_a: da,
            energies: spec.eigenvalues().to_vec(),
            hbar,
            data,
        })
    }

    /// `φ^{ab}_{mn}`.
    pub fn get(&self, m: usize, n: usize, a: usize, b: usize) -> C64 {
        self.data[(m * self.dim_a + n) * self.dim * self.dim + a * self.dim + b]
    }

    pub fn reduced_at(&self, time: f64) -> Vec<C64> {
        let d = self.dim;
        let ph: Vec<C64> = self
            .energies
            .iter()
            .map(|&e| C64::from_polar(1.0, -e * time / self.hbar))
            .collect();
        let weights: Vec<C64> = (0..d * d).map(|ab| ph[ab / d] * ph[ab % d].conj()).collect();
        self.data
            .chunks(d * d)
            .map(|block| block.iter().zip(&weights).map(|(p, w)| p * w).sum())
            .collect()
    }

    /// `Tr ρ_A(t)²` as `Σ_mn ρ_mn ρ_nm`, checking the imaginary residue.
    pub fn purity_at(&self, time: f64) -> Result<f64> {
        let r = self.reduced_at(time);
        let da = self.dim_a;
        let tr: C64 = (0..da)
            .flat_map(|m| (0..da).map(move |n| (m, n)))
            .map(|(m, n)| r[m * da + n] * r[n * da + m])
            .sum();
        if tr.im.abs() > IMAG_RESIDUAL_TOL {
            return Err(Error::Validation(format!(
                "purity at t={time} has imaginary part {:.3e}",
                tr.im
            )));
        }
        Ok(tr.re)
    }
}

/// `Tr ρ_A(t)²` on the given times; the series `dt` is taken from the first
/// two times.
pub fn trace_rho_squared_spectral(
    spec: &Spectrum,
    rho0: &DensityMatrix,
    dims: BipartiteDims,
    hbar: f64,
    times: &[f64],
) -> Result<TimeSeries> {
    let phi = PhiTensor::new(spec, rho0, dims, hbar)?;
    let values = times.iter().map(|&t| phi.purity_at(t)).collect::<Result<Vec<_>>>()?;
    let dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    TimeSeries::new(dt, values, "tr_rho2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::density_at;
    use crate::linalg::{eigh, partial_trace, purity, random_pure_product, ComplexMatrix, HermitianOperator, Subsystem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spectrum(dim: usize, seed: u64) -> Spectrum {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = ComplexMatrix::from_fn(dim, dim, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        eigh(&HermitianOperator::from_hermitian_part(&m).unwrap()).unwrap()
    }

    /// Quadruple sum over energy labels, written out directly.
    fn literal(phi: &PhiTensor, t: f64) -> C64 {
        let d = phi.dim;
        let da = phi.dim_a;
        let w = |a: usize, b: usize| (phi.energies[a] - phi.energies[b]) / phi.hbar;
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                for a2 in 0..d {
                    for b2 in 0..d {
                        let mut inner = C64::new(0.0, 0.0);
                        for m in 0..da {
                            for n in 0..da {
                                inner += phi.get(m, n, a, b) * phi.get(n, m, a2, b2);
                            }
                        }
                        acc += inner * C64::from_polar(1.0, -(w(a, b) + w(a2, b2)) * t);
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn matches_literal_sum_and_direct_evolution() {
        let dims = BipartiteDims::new(3, 4).unwrap();
        let spec = random_spectrum(12, 5);
        let psi = random_pure_product(dims, 9);
        let rho0 = psi.density();
        let hbar = 0.7;
        let phi = PhiTensor::new(&spec, &rho0, dims, hbar).unwrap();
        let v = spec.eigenvectors().matrix();
        let rho_e = v.adjoint().matmul(rho0.matrix()).matmul(v);
        for &t in &[0.0, 0.3, 1.7, 12.5] {
            let fast = phi.purity_at(t).unwrap();
            let lit = literal(&phi, t);
            assert!((fast - lit.re).abs() < 1e-10 && lit.im.abs() < 1e-10, "t={t}");
            let full = density_at(&spec, &rho_e, t, hbar);
            let full = DensityMatrix::new(full.hermitian_part()).unwrap();
            let red = partial_trace(&full, dims, Subsystem::A).unwrap();
            assert!((fast - purity(&red)).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn product_state_starts_pure() {
        let dims = BipartiteDims::new(4, 4).unwrap();
        let spec = random_spectrum(16, 1);
        let rho0 = random_pure_product(dims, 2).density();
        let s = trace_rho_squared_spectral(&spec, &rho0, dims, 1.0, &[0.0, 0.5]).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-12);
        assert!(s.values[1] <= 1.0 + 1e-12);
    }

    #[test]
    fn stationary_state_is_constant() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let spec = random_spectrum(6, 4);
        // mixture of two eigenprojectors commutes with H
        let v = spec.eigenvectors().matrix();
        let rho = ComplexMatrix::from_fn(6, 6, |i, j| 0.7 * v[(i, 1)] * v[(j, 1)].conj() + 0.3 * v[(i, 4)] * v[(j, 4)].conj());
        let rho0 = DensityMatrix::new(rho.hermitian_part()).unwrap();
        let times: Vec<f64> = (0..20).map(|k| k as f64 * 0.9).collect();
        let s = trace_rho_squared_spectral(&spec, &rho0, dims, 1.0, &times).unwrap();
        assert!(s.values.iter().all(|v| (v - s.values[0]).abs() < 1e-10));
    }

    #[test]
    fn capacity_limit() {
        let dims = BipartiteDims::new(9, 9).unwrap();
        let spec = random_spectrum(81, 1);
        let rho0 = DensityMatrix::maximally_mixed(81);
        assert!(matches!(
            PhiTensor::new(&spec, &rho0, dims, 1.0),
            Err(Error::Capacity { .. })
        ));
    }
}
