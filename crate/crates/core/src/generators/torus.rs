use serde::{Deserialize, Serialize};

use super::linalg::{min_hermitian_eigenvalue, min_singular_value, CMatrix};
use super::{INVERTIBLE_TOL, PSD_TOL};
use crate::Complex64;

/// Eigenvalues of a Gaussian generator on `U`, `V` and `UV`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGeneratorSpec {
    pub l10: Complex64,
    pub l01: Complex64,
    pub l11: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusVerdict {
    pub gaussian_valid: bool,
    pub qbm: bool,
    /// `l11 − l10 − l01`.
    pub cross: Complex64,
    pub cross_is_real: bool,
    pub gram_min_eigenvalue: f64,
    pub gram_invertible: bool,
    /// `2√(Re l10 · Re l01)`.
    pub inequality_bound: f64,
}

impl TorusGeneratorSpec {
    pub fn new(l10: Complex64, l01: Complex64, l11: Complex64) -> Self {
        Self { l10, l01, l11 }
    }

    pub fn real(l10: f64, l01: f64, l11: f64) -> Self {
        Self::new(Complex64::new(l10, 0.0), Complex64::new(l01, 0.0), Complex64::new(l11, 0.0))
    }

    /// Generator induced by Brownian motion with variance `σ²t` per
    /// coordinate.
    pub fn heat(sigma2: f64) -> Self {
        let q = -2.0 * std::f64::consts::PI.powi(2) * sigma2;
        Self::real(q, q, 2.0 * q)
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.l01, self.l10, self.l11)
    }

    /// `[[−2Re l10, c], [c̄, −2Re l01]]` with `c = l11 − l10 − l01`.
    pub fn gram(&self) -> CMatrix {
        let c = self.l11 - self.l10 - self.l01;
        CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(-2.0 * self.l10.re, 0.0),
                c,
                c.conj(),
                Complex64::new(-2.0 * self.l01.re, 0.0),
            ],
        )
    }
}

pub fn check_torus_generator(g: &TorusGeneratorSpec) -> TorusVerdict {
    let gram = g.gram();
    let cross = g.l11 - g.l10 - g.l01;
    let gram_min_eigenvalue = min_hermitian_eigenvalue(&gram);
    let gaussian_valid = g.l10.re <= 0.0 && g.l01.re <= 0.0 && gram_min_eigenvalue >= -PSD_TOL;
    let cross_is_real = cross.im.abs() <= PSD_TOL;
    let inequality_bound = 2.0 * (g.l10.re * g.l01.re).max(0.0).sqrt();
    TorusVerdict {
        gaussian_valid,
        qbm: gaussian_valid && cross_is_real && cross.re < inequality_bound,
        cross,
        cross_is_real,
        gram_min_eigenvalue,
        gram_invertible: min_singular_value(&gram) > INVERTIBLE_TOL,
        inequality_bound,
    }
}
