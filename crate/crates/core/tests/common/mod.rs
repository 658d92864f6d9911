#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rdm_chaos::linalg::{eigh, ComplexMatrix, DensityMatrix, HermitianOperator, StateVector, UnitaryOperator, C64};

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(&mut rng))
}

pub fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
    HermitianOperator::from_hermitian_part(&random_matrix(dim, dim, seed)).unwrap()
}

pub fn random_unitary(dim: usize, seed: u64) -> UnitaryOperator {
    eigh(&random_hermitian(dim, seed)).unwrap().eigenvectors().clone()
}

pub fn random_state(dim: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::normalized((0..dim).map(|_| gaussian(&mut rng)).collect()).unwrap()
}

/// `G G† / Tr(G G†)`: a full-rank mixed state.
pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let g = random_matrix(dim, dim, seed);
    let gg = g.matmul(&g.adjoint());
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale(C64::new(1.0 / tr, 0.0)).hermitian_part()).unwrap()
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).max_abs()
}
