//! Quantum chaos diagnostics from the temporal fluctuations of reduced
//! density matrices.
//!
//! The crate builds the model Hamiltonians and Floquet operators
//! ([`hamiltonians`]), evolves product states and records subsystem
//! entropies ([`dynamics`]), analyses matrices and time series
//! ([`diagnostics`]), provides the classical counterparts ([`classical`])
//! and ties everything together in a reproducible experiment runner
//! ([`experiments`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;

pub mod dynamics;
pub mod classical;
pub mod diagnostics;
pub mod hamiltonians;
pub mod experiments;

pub use error::{Error, Result};
