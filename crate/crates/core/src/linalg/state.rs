//! Bipartite structure: pure states, partial traces and seeded random product states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::matrix::{tensor_product, ComplexMatrix};
use super::operators::DensityMatrix;
use super::C64;
use crate::error::{Error, Result};

/// Name of the generator behind every seeded draw, echoed into run manifests.
pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

pub const NORM_TOL: f64 = 1e-12;

/// Factor dimensions of a composite space.
///
/// The composite basis index is `i = a·dim_b + b`, with `a` labelling
/// subsystem A and `b` labelling subsystem B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteDims {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteDims {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Validation(format!(
                "bipartition ({dim_a}, {dim_b}) has an empty factor"
            )));
        }
        Ok(Self { dim_a, dim_b })
    }

    /// `2^kept × 2^(n−kept)` split of an `n`-spin register.
    pub fn spins(n: u32, kept: u32) -> Result<Self> {
        if kept > n || n > 20 {
            return Err(Error::Validation(format!(
                "cannot keep {kept} of {n} spins"
            )));
        }
        Self::new(1 << kept, 1 << (n - kept))
    }

    pub fn composite(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.dim_b + b
    }

    pub fn kept_dim(&self, keep: Subsystem) -> usize {
        match keep {
            Subsystem::A => self.dim_a,
            Subsystem::B => self.dim_b,
        }
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if dim == self.composite() {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "dimension {dim} does not match bipartition {}x{}",
                self.dim_a, self.dim_b
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Subsystem {
    #[default]
    A,
    B,
}

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Validation("empty state vector".into()));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "state norm {norm} differs from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Validation(format!("cannot normalize vector of norm {n}")));
        }
        for z in amplitudes.iter_mut() {
            *z /= n;
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn new_unchecked(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Validation(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes)
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for &x in &self.amplitudes {
            for &y in &other.amplitudes {
                out.push(x * y);
            }
        }
        Self { amplitudes: out }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    /// Amplitudes reshaped to a `dim_a × dim_b` matrix `M[a, b] = ψ[a·dim_b + b]`.
    pub fn reshape(&self, dims: BipartiteDims) -> Result<ComplexMatrix> {
        dims.check(self.dim())?;
        Ok(ComplexMatrix::from_fn(dims.dim_a, dims.dim_b, |a, b| {
            self.amplitudes[dims.index(a, b)]
        }))
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Traces out the complementary factor of `rho`.
pub fn partial_trace(rho: &DensityMatrix, dims: BipartiteDims, keep: Subsystem) -> Result<DensityMatrix> {
    dims.check(rho.dim())?;
    let m = rho.matrix();
    let (da, db) = (dims.dim_a, dims.dim_b);
    let reduced = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|l| m[(dims.index(i, l), dims.index(j, l))]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|l| m[(dims.index(l, i), dims.index(l, j))]).sum()
        }),
    };
    Ok(DensityMatrix::new_unchecked(reduced.hermitian_part()))
}

/// Reduced density matrix of a pure state: `M M†` (keep A) or `Mᵀ M*` (keep B).
pub fn reduced_density(psi: &StateVector, dims: BipartiteDims, keep: Subsystem) -> Result<DensityMatrix> {
    dims.check(psi.dim())?;
    let amps = psi.amplitudes();
    let (da, db) = (dims.dim_a, dims.dim_b);
    let reduced = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |m, n| {
            let (rm, rn) = (&amps[m * db..(m + 1) * db], &amps[n * db..(n + 1) * db]);
            rm.iter().zip(rn).map(|(x, y)| x * y.conj()).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |m, n| {
            (0..da).map(|a| amps[a * db + m] * amps[a * db + n].conj()).sum()
        }),
    };
    Ok(DensityMatrix::new_unchecked(reduced.hermitian_part()))
}

/// Complex-Gaussian amplitudes, normalized. A one-dimensional factor is `[1]`
/// and consumes no randomness.
pub fn random_pure_factor(dim: usize, rng: &mut ChaCha8Rng) -> StateVector {
    assert!(dim >= 1);
    if dim == 1 {
        return StateVector::new_unchecked(vec![C64::new(1.0, 0.0)]);
    }
    let amps: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    StateVector::normalized(amps).expect("Gaussian draw is almost surely non-zero")
}

/// `|ψ_A⟩ ⊗ |ψ_B⟩` with both factors drawn from one seeded stream, A first.
pub fn random_pure_product(dims: BipartiteDims, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_pure_factor(dims.dim_a, &mut rng);
    let b = random_pure_factor(dims.dim_b, &mut rng);
    a.kron(&b)
}

/// `ρ_A ⊗ ρ_B` as a density matrix.
pub fn product_density(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(tensor_product(a.matrix(), b.matrix())?))
}
