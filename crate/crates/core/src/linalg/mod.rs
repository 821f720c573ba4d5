//! Dense Hermitian linear algebra.
//!
//! Everything downstream is built on [`HermitianMatrix`] and its
//! [`SpectralDecomposition`]: matrix functions are applied eigenvalue-wise,
//! Fréchet derivatives use the Daleckii–Krein divided-difference form, and the
//! random ensembles are seeded so that every run is reproducible.

mod frechet;
mod hermitian;
mod json;
mod random;
mod spectral;

pub use frechet::{frechet_derivative, frechet_derivative_with, DD_TOL};
pub use hermitian::{
    trace_product, ContractionMatrix, DensityMatrix, HermitianMatrix, PositiveDefiniteMatrix, CONTRACTION_TOL,
    DENSITY_TRACE_TOL, ISOMETRY_TOL, PD_FLOOR,
};
pub use json::{matrix_from_json, matrix_to_json, read_matrix_file, MatrixJson};
pub use random::{
    gaussian_matrix, random_contraction, random_density, random_hermitian, random_isometry, random_matrix,
    random_negative_definite, random_positive_definite, random_unitary, random_with_spectrum, trial_rng, EnsembleKind,
    RandomEnsembleSpec, RandomMatrix, TrialRng,
};
pub use spectral::{eigh, matrix_power, spectral_map, SpectralDecomposition};

pub use num_complex::Complex64;

/// Dense complex matrix used as the raw storage for every operand.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
