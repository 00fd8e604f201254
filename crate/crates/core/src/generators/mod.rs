//! Gaussian and QBM generators on the torus, `O_θ(2n)` and `O₊(2n)`, and
//! convolution exponentials on matrix corepresentations.

mod convolution;
mod derivations;
pub mod linalg;
mod oplus;
mod otheta;
mod torus;

/// Minimum eigenvalue allowed for a positive semidefinite matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Minimum singular value of an invertible matrix.
pub const INVERTIBLE_TOL: f64 = 1e-10;

pub use convolution::{convolution_exp, convolution_power, CoalgebraMatrix};
pub use derivations::{epsilon_derivation_dim, DerivationDimension, QuantumGroup};
pub use linalg::CMatrix;
pub use oplus::{
    check_oplus_generator, oplus_from_b, solve_biinvariant_oplus, BiinvariantSolution, OPlusGeneratorSpec,
    OPlusVerdict, PairIndex,
};
pub use otheta::{
    build_otheta_schurmann, check_otheta_generator, Letter, OThetaGeneratorSpec, OThetaVerdict, SchurmannTriple,
    WordValue,
};
pub use torus::{check_torus_generator, TorusGeneratorSpec, TorusVerdict};
