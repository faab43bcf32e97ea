//! Complex vectors, PSK alphabets, seeded random streams and small Hermitian
//! eigen-solves.

pub mod complex;
pub mod hermitian;
pub mod psk;
pub mod rng;

pub use complex::{inner_product, sample_circular_gaussian, ComplexVector};
pub use hermitian::{eigen_decomposition, eigenvalues_hermitian, EigenDecomposition, HermitianMatrix};
pub use num_complex::Complex64;
pub use psk::{nearest_psk_phase_distance, wrap_phase, PskAlphabet};
pub use rng::RngStream;
