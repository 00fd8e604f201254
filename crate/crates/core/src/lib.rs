//! Numerical laboratory for quantum Brownian motion on the noncommutative
//! two-torus `A_θ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`torus`] — exact arithmetic with finitely supported twisted Laurent
//!   series `Σ a_{mn} UᵐVⁿ`.
//! * [`crossed`] — the banded crossed-product picture `Σ f_k(U)Vᵏ`, the
//!   trapezoid projection and its translates.
//! * [`lattice`] — circle interval sets and meets of projections, both by
//!   von Neumann iteration and by the closed form `χ_S(U)`.
//! * [`generators`] — Gaussian / QBM generator validators for the torus,
//!   `O_θ(2n)` and `O₊(2n)`, plus convolution exponentials.
//! * [`flow`] — Brownian paths, the classically driven flow and its heat
//!   semigroup.
//! * [`exit`] — exit-time asymptotics and the extraction of dimension and
//!   curvature invariants.

pub mod crossed;
pub mod error;
pub mod exit;
pub mod flow;
pub mod generators;
pub mod lattice;
pub mod torus;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// `e^{2πi x}`.
#[inline]
pub fn unit_phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * x)
}

/// Reduce `x` into `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}
