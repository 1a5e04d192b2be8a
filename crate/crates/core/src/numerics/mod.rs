//! Dense complex linear algebra and the seeded random stream.

pub mod eigen;
pub mod matrix;
pub mod rng;

pub use eigen::{biorthonormalize, eigendecompose, eigenvalues, EigenDecomposition, DEFAULT_TOL, PAIRING_TOL};
pub use matrix::{bilinear, vec_norm, ComplexMatrix};
pub use rng::{mix_seed, SeededRng};
