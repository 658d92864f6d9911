//! Dense complex matrices.

use std::fmt;
use std::ops::Index;

use nalgebra::DMatrix;

use super::C64;
use crate::error::{Error, Result};

/// Largest composite dimension any builder will allocate.
pub const DEFAULT_MAX_DIM: usize = 16384;

/// Dense complex matrix with finite entries.
///
/// Entries are addressed as `(row, col)`; constructors take row-major data.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Validation(format!(
                "matrix shape {rows}x{cols} has an empty dimension"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Validation(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, &data))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix shape {rows}x{cols}");
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    /// Wraps an nalgebra matrix, rejecting empty shapes and non-finite entries.
    pub fn from_nalgebra(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::Validation("matrix has an empty dimension".into()));
        }
        if let Some((idx, z)) = inner.iter().enumerate().find(|(_, z)| !is_finite(z)) {
            let (r, c) = (idx % inner.nrows(), idx / inner.nrows());
            return Err(Error::Validation(format!(
                "non-finite entry {z} at ({r}, {c})"
            )));
        }
        Ok(Self { inner })
    }

    pub(crate) fn from_nalgebra_unchecked(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| C64::new(0.0, 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.inner
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    /// Matrix product; panics on a shape mismatch.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows(),
            self.cols(),
            rhs.rows(),
            rhs.cols()
        );
        Self {
            inner: &self.inner * &rhs.inner,
        }
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        Self {
            inner: &self.inner + &rhs.inner,
        }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        Self {
            inner: &self.inner - &rhs.inner,
        }
    }

    pub fn scale(&self, factor: C64) -> ComplexMatrix {
        Self {
            inner: &self.inner * factor,
        }
    }

    pub fn map(&self, f: impl FnMut(C64) -> C64) -> ComplexMatrix {
        Self {
            inner: self.inner.map(f),
        }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij - conj(A_ji)|` together with its position.
    pub fn hermiticity_defect(&self) -> (f64, (usize, usize)) {
        let mut worst = (0.0, (0, 0));
        for i in 0..self.rows() {
            for j in i..self.cols() {
                let d = (self.inner[(i, j)] - self.inner[(j, i)].conj()).norm();
                if d > worst.0 {
                    worst = (d, (i, j));
                }
            }
        }
        worst
    }

    /// `(A + A†)/2`, the Hermitian part of a square matrix.
    pub fn hermitian_part(&self) -> ComplexMatrix {
        let adj = self.inner.adjoint();
        Self {
            inner: (&self.inner + adj) * C64::new(0.5, 0.0),
        }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows()];
        for (j, &vj) in v.iter().enumerate() {
            let col = self.inner.column(j);
            for (o, &a) in out.iter_mut().zip(col.iter()) {
                *o += a * vj;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} ", self.rows(), self.cols())?;
        f.debug_list()
            .entries((0..self.rows()).map(|i| {
                (0..self.cols())
                    .map(|j| self.inner[(i, j)])
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

fn is_finite(z: &C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Kronecker product `A ⊗ B` with composite index `a·dimB + b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_product_capped(a, b, DEFAULT_MAX_DIM)
}

pub fn tensor_product_capped(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cap: usize,
) -> Result<ComplexMatrix> {
    let rows = a.rows().saturating_mul(b.rows());
    let cols = a.cols().saturating_mul(b.cols());
    let requested = rows.max(cols);
    if requested > cap {
        return Err(Error::Capacity {
            what: "tensor product",
            requested,
            cap,
        });
    }
    Ok(ComplexMatrix::from_nalgebra_unchecked(
        a.inner.kronecker(&b.inner),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rejects_non_finite_entries() {
        let err = ComplexMatrix::from_row_major(1, 2, vec![c(1.0), C64::new(f64::NAN, 0.0)]);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(ComplexMatrix::from_row_major(2, 2, vec![c(1.0); 3]).is_err());
        assert!(ComplexMatrix::from_row_major(0, 2, vec![]).is_err());
    }

    #[test]
    fn row_major_round_trip() {
        let data: Vec<C64> = (0..6).map(|k| C64::new(k as f64, -(k as f64))).collect();
        let m = ComplexMatrix::from_row_major(2, 3, data.clone()).unwrap();
        assert_eq!(m[(1, 0)], data[3]);
        assert_eq!(m.to_row_major(), data);
    }

    #[test]
    fn identity_kron_identity() {
        let i6 = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(i6, ComplexMatrix::identity(6));
    }

    #[test]
    fn diagonal_kron_diagonal() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diagonal(&[3.0, 4.0]);
        let p = tensor_product(&a, &b).unwrap();
        assert_eq!(p, ComplexMatrix::from_real_diagonal(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn tensor_product_capacity() {
        let a = ComplexMatrix::identity(8);
        let err = tensor_product_capped(&a, &a, 32).unwrap_err();
        assert!(matches!(err, Error::Capacity { requested: 64, .. }));
    }

    #[test]
    fn hermiticity_defect_names_worst_entry() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1.0), c(2.0), c(2.5), c(0.0)]).unwrap();
        let (d, pos) = m.hermiticity_defect();
        assert!((d - 0.5).abs() < 1e-15);
        assert_eq!(pos, (0, 1));
    }
}
