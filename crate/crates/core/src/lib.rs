//! Numerical laboratory for non-Hermitian delocalization in one dimension.
//!
//! The library is generic over the real scalar type (`f32` or `f64`); the `*64` aliases
//! below fix it to double precision, which every tolerance in the test suites assumes.

pub mod error;
pub mod hatano_nelson;
pub mod lattice;
pub mod numerics;
pub mod quantum_walk;
pub mod scalar;
pub mod transfer_matrix;

pub use error::{ModelError, NumericsError};
pub use lattice::Boundary;
pub use numerics::{ComplexMatrix, EigenDecomposition, SeededRng};
pub use scalar::Scalar;

pub type Complex64 = num_complex::Complex<f64>;
pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type EigenDecomposition64 = EigenDecomposition<f64>;
pub type HnParams64 = hatano_nelson::HnParams<f64>;
pub type DisorderRealization64 = hatano_nelson::DisorderRealization<f64>;
pub type CoinParams64 = quantum_walk::CoinParams<f64>;
pub type CoinField64 = quantum_walk::CoinField<f64>;
pub type WalkState64 = quantum_walk::WalkState<f64>;
pub type CoinEnsemble64 = quantum_walk::CoinEnsemble<f64>;
pub type LyapunovResult64 = transfer_matrix::LyapunovResult<f64>;
