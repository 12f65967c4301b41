//! Spectral analysis of self-similar measures on the line.
//!
//! An affine IFS `(R, B)` defines a probability measure `mu_B`; a digit set `L`
//! defines the frequency set `Gamma(L)` of base-`R` expansions. This crate
//! decides when `{e^{2 pi i gamma x} : gamma in Gamma(L)}` is an orthonormal
//! basis of `L^2(mu_B)`, builds dual pairs from complementing digit sets, and
//! evaluates the associated Szegő-type kernels with certified error bounds.

pub mod analysis;
pub mod boundary;
pub mod complement;
pub mod cycles;
pub mod cyclotomic;
pub mod error;
pub mod hadamard;
pub mod ifs;
pub mod kernel;
pub mod numeric;
pub mod spectrum;

pub use analysis::{
    classify_system, gram_matrix, measure_class_membership, sigma_gamma, Classification,
    GramReport, SigmaProfile, SigmaValue, SystemReport,
};
pub use boundary::{
    boundary_evaluate, embed_j_coeffs, gamma_szego_boundary_kernel, parseval_check,
    GammaPolynomial,
};
pub use complement::{dual_spectra_sets, is_complementing, DualSets};
pub use cycles::{extreme_cycles, is_spectral_pair, ExtremeCycle, SpectralVerdict};
pub use error::{Error, Result};
pub use hadamard::{HadamardTriple, HadamardVerdict};
pub use ifs::{AffineIfs, QuadratureRule};
pub use kernel::{
    factorization_residual, gamma_kernel_product, gamma_kernel_series, kernel_gram,
    szego_classical, KernelQuery,
};
pub use numeric::BoundedComplex;
pub use spectrum::SpectrumSpec;
