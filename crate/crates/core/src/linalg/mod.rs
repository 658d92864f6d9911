//! Dense complex linear algebra, bipartite states and entropies.

pub mod entropy;
pub mod io;
pub mod matrix;
pub mod operators;
pub mod state;

pub use num_complex::Complex64 as C64;

pub use entropy::{linear_entropy, purity, von_neumann_entropy};
pub use matrix::{tensor_product, tensor_product_capped, ComplexMatrix, DEFAULT_MAX_DIM};
pub use operators::{
    dft_unitary, eigh, eigh_matrix, DensityMatrix, HermitianOperator, Spectrum, UnitaryOperator,
};
pub use state::{
    partial_trace, product_density, random_pure_factor, random_pure_product, reduced_density,
    BipartiteDims, StateVector, Subsystem,
};
