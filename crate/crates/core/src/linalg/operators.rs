//! Typed operators: Hermitian, unitary, density matrices and spectra.

use std::f64::consts::TAU;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;

use super::matrix::ComplexMatrix;
use super::C64;
use crate::error::{Error, Result};

/// Per-entry tolerance on `|H_ij - conj(H_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Per-dimension tolerance on `‖U†U − I‖_F`.
pub const UNITARY_TOL_PER_DIM: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues of a density matrix in `[-NEGATIVE_EIGEN_TOL, 0)` are clamped to zero.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

fn require_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{what} must be square, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

fn require_hermitian(m: &ComplexMatrix, what: &str) -> Result<()> {
    require_square(m, what)?;
    let (defect, (i, j)) = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::Validation(format!(
            "{what} is not Hermitian: |H[{i},{j}] - conj(H[{j},{i}])| = {defect:.3e} exceeds {HERMITIAN_TOL:e}"
        )));
    }
    Ok(())
}

/// Self-adjoint matrix, usually a Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        require_hermitian(&matrix, "Hermitian operator")?;
        Ok(Self { matrix })
    }

    /// Symmetrizes `matrix` before validating it, absorbing round-off from
    /// products such as `F† D F`.
    pub fn from_hermitian_part(matrix: &ComplexMatrix) -> Result<Self> {
        require_square(matrix, "Hermitian operator")?;
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Unitary matrix, e.g. a one-kick Floquet operator or an eigenvector basis.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        require_square(&matrix, "unitary operator")?;
        let residual = unitarity_residual(&matrix);
        let tol = UNITARY_TOL_PER_DIM * matrix.rows() as f64;
        if residual > tol {
            return Err(Error::Validation(format!(
                "operator is not unitary: ‖U†U − I‖_F = {residual:.3e} exceeds {tol:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, rhs: &UnitaryOperator) -> UnitaryOperator {
        Self {
            matrix: self.matrix.matmul(&rhs.matrix),
        }
    }

    /// `‖U†U − I‖_F`.
    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    /// Projects onto the nearest unitary with Newton–Schulz steps
    /// `X ← X(3I − X†X)/2`, stopping once the residual stops improving.
    pub fn polished(&self) -> UnitaryOperator {
        let three = ComplexMatrix::identity(self.dim()).scale(C64::new(3.0, 0.0));
        let mut x = self.matrix.clone();
        let mut residual = unitarity_residual(&x);
        for _ in 0..4 {
            let next = x
                .matmul(&three.sub(&x.adjoint().matmul(&x)))
                .scale(C64::new(0.5, 0.0));
            let r = unitarity_residual(&next);
            if r >= residual {
                break;
            }
            x = next;
            residual = r;
        }
        Self { matrix: x }
    }

    /// `U A U†`.
    pub fn conjugate(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.matrix.matmul(a).matmul(&self.matrix.adjoint())
    }
}

pub fn unitarity_residual(m: &ComplexMatrix) -> f64 {
    let gram = m.adjoint().matmul(m);
    gram.sub(&ComplexMatrix::identity(m.cols())).frobenius_norm()
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        require_hermitian(&matrix, "density matrix")?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!(
                "density matrix trace {tr} differs from 1 by more than {TRACE_TOL:e}"
            )));
        }
        let rho = Self { matrix };
        rho.eigenvalues()?;
        Ok(rho)
    }

    /// Skips the eigenvalue check; callers guarantee positivity by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(amplitudes: &[C64]) -> Self {
        let n = amplitudes.len();
        Self {
            matrix: ComplexMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj()),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Ascending eigenvalues with round-off negatives clamped to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let h = HermitianOperator {
            matrix: self.matrix.hermitian_part(),
        };
        let mut values = eigenvalues_only(&h)?;
        for v in values.iter_mut() {
            if *v < -NEGATIVE_EIGEN_TOL {
                return Err(Error::Validation(format!(
                    "density matrix has eigenvalue {v:.3e} below -{NEGATIVE_EIGEN_TOL:e}"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(values)
    }

    /// `W ρ W†`.
    pub fn transformed(&self, w: &UnitaryOperator) -> DensityMatrix {
        Self {
            matrix: w.conjugate(&self.matrix).hermitian_part(),
        }
    }
}

/// Eigen-decomposition `H = V diag(E) V†` with ascending `E`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: UnitaryOperator,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: UnitaryOperator) -> Result<Self> {
        if eigenvalues.len() != eigenvectors.dim() {
            return Err(Error::Validation(format!(
                "{} eigenvalues for a {}-dimensional eigenvector matrix",
                eigenvalues.len(),
                eigenvectors.dim()
            )));
        }
        if let Some(k) = eigenvalues.windows(2).position(|w| !(w[0] <= w[1])) {
            return Err(Error::Validation(format!(
                "eigenvalues not ascending at index {k}: {} > {}",
                eigenvalues[k],
                eigenvalues[k + 1]
            )));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `a` is the eigenvector of `eigenvalues()[a]`.
    pub fn eigenvectors(&self) -> &UnitaryOperator {
        &self.eigenvectors
    }

    /// `V diag(E) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = self.eigenvectors.matrix();
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, a| {
            v[(i, a)] * self.eigenvalues[a]
        });
        scaled.matmul(&v.adjoint())
    }

    pub fn spread(&self) -> f64 {
        self.eigenvalues[self.dim() - 1] - self.eigenvalues[0]
    }
}

fn solve(h: &HermitianOperator) -> Result<SymmetricEigen<C64, nalgebra::Dyn>> {
    let dim = h.dim();
    let m: DMatrix<C64> = h.matrix.as_nalgebra().clone();
    SymmetricEigen::try_new(m, f64::EPSILON, 1000 * dim.max(10))
        .ok_or(Error::Convergence { dim })
}

fn eigenvalues_only(h: &HermitianOperator) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = solve(h)?.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Hermitian eigen-decomposition with eigenvalues sorted ascending.
pub fn eigh(h: &HermitianOperator) -> Result<Spectrum> {
    let dim = h.dim();
    let decomposition = solve(h)?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&a| decomposition.eigenvalues[a]).collect();
    let vectors = &decomposition.eigenvectors;
    let v = ComplexMatrix::from_fn(dim, dim, |i, a| vectors[(i, order[a])]);
    Spectrum::new(eigenvalues, UnitaryOperator::new(v)?)
}

/// Validates Hermiticity of a raw matrix, then decomposes it.
pub fn eigh_matrix(m: &ComplexMatrix) -> Result<Spectrum> {
    eigh(&HermitianOperator::new(m.clone())?)
}

/// Unitary DFT matrix `F[k, j] = exp(−2πi·k·j/N)/√N`.
pub fn dft_unitary(n: usize) -> UnitaryOperator {
    assert!(n >= 1, "DFT dimension must be positive");
    let norm = 1.0 / (n as f64).sqrt();
    let m = ComplexMatrix::from_fn(n, n, |k, j| {
        let phase = -TAU * ((k * j) % n) as f64 / n as f64;
        C64::from_polar(norm, phase)
    });
    UnitaryOperator { matrix: m }
}
