//! Entropy functionals of density matrices.

use super::operators::DensityMatrix;
use crate::error::Result;

/// Eigenvalues at or below this contribute nothing to `−λ ln λ`.
pub const ZERO_EIGEN_THRESHOLD: f64 = 1e-12;

/// `Tr ρ²`, computed as `Σ |ρ_ij|²` for Hermitian `ρ`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().as_nalgebra().iter().map(|z| z.norm_sqr()).sum()
}

/// `−Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let s = rho
        .eigenvalues()?
        .into_iter()
        .filter(|&l| l > ZERO_EIGEN_THRESHOLD)
        .map(|l| -l * l.ln())
        .sum::<f64>();
    Ok(s.max(0.0))
}

/// `1 − Tr ρ²`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - purity(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, StateVector, C64};

    fn diag(values: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_diagonal(values)).unwrap()
    }

    #[test]
    fn pure_state_values() {
        let psi = StateVector::normalized(vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.3)]).unwrap();
        let rho = psi.density();
        assert!((purity(&rho) - 1.0).abs() < 1e-14);
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-10);
        assert!(linear_entropy(&rho).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_values() {
        for d in [2usize, 3, 7] {
            let rho = DensityMatrix::maximally_mixed(d);
            assert!((purity(&rho) - 1.0 / d as f64).abs() < 1e-15);
            assert!((von_neumann_entropy(&rho).unwrap() - (d as f64).ln()).abs() < 1e-12);
            assert!((linear_entropy(&rho) - (1.0 - 1.0 / d as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_examples() {
        let rho = diag(&[0.5, 0.3, 0.2]);
        assert!((purity(&rho) - 0.38).abs() < 1e-15);
        assert!((linear_entropy(&rho) - 0.62).abs() < 1e-15);
        let rho = diag(&[0.5, 0.25, 0.25]);
        let expect = 0.5 * 2f64.ln() + 0.5 * 4f64.ln();
        assert!((von_neumann_entropy(&rho).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 1.039721).abs() < 1e-6);
    }
}
