use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("incompatible theta: {0} vs {1}")]
    IncompatibleTheta(f64, f64),
    #[error("theta must lie in (0,1), got {0}")]
    InvalidTheta(f64),
    #[error("non-unit modulus: |{0}| deviates from 1")]
    NonUnitModulus(f64),
    #[error("epsilon out of range: need 0 < epsilon < {angle} and angle + epsilon <= 1, got {epsilon}")]
    EpsilonOutOfRange { epsilon: f64, angle: f64 },
    #[error("grid size must be a power of two >= 8, got {0}")]
    InvalidGrid(usize),
    #[error("CHI hypothesis violated: |s - s'| = {gap} must be < epsilon/4 = {limit}")]
    ChiHypothesisViolated { gap: f64, limit: f64 },
    #[error("path too rough for ε: increments still exceed {limit} after {levels} refinement levels")]
    PathTooRough { limit: f64, levels: u32 },
    #[error("orbit component exceeds {0} sites; element is not finitely banded on this fiber")]
    FiberTooLarge(usize),
    #[error("rational theta: continued fraction terminates at step {0}")]
    RationalTheta(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no asymptotic detected: log-log slope {slope} is not within 0.25 of 2/n for n <= 6")]
    NoAsymptotic { slope: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPositiveSemidefinite(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
