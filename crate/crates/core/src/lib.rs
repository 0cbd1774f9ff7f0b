//! Spin-truncated compact Abelian Higgs targets and their Rydberg-array
//! simulators: Hamiltonians, parameter matching, time evolution and
//! Trotterized circuits.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod evolution;
pub mod matching;
pub mod numerics;
pub mod rydberg;
pub mod target;
pub mod trotter;

pub use error::{Error, Result};
pub use numerics::{eig_hermitian, evolve, ComplexMatrix, HermitianOperator, Propagator, Spectrum, StateVector, C64};
