use serde::{Deserialize, Serialize};

use super::linalg::{matrix_from_rows, CMatrix};
use crate::{Complex64, Error, Result};

/// Values `[l(u_{ij})]` of a functional on the coefficients of a matrix
/// corepresentation `Δ(u_{ij}) = Σ_k u_{ik} ⊗ u_{kj}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalgebraMatrix {
    pub d: usize,
    pub lmat: Vec<Vec<Complex64>>,
}

impl CoalgebraMatrix {
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch("generator matrix must be square".into()));
        }
        Ok(Self {
            d: m.nrows(),
            lmat: super::linalg::matrix_to_rows(m),
        })
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        matrix_from_rows(&self.lmat, self.d, self.d, "Lmat")
    }
}

/// `k`-fold convolution power `l^{*k}` on the corepresentation, which is
/// the matrix power.
pub fn convolution_power(c: &CoalgebraMatrix, k: u32) -> Result<CMatrix> {
    let l = c.matrix()?;
    let mut out = CMatrix::identity(c.d, c.d);
    for _ in 0..k {
        out = &out * &l;
    }
    Ok(out)
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `φ_t = ε + tl + t²/2!·l∗l + …` evaluated on the corepresentation,
/// summed by scaling and squaring.
pub fn convolution_exp(c: &CoalgebraMatrix, t: f64) -> Result<CMatrix> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t must be non-negative, got {t}")));
    }
    let l = c.matrix()? * Complex64::new(t, 0.0);
    let norm = one_norm(&l);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = l.unscale(2f64.powi(squarings as i32));
    let mut sum = CMatrix::identity(c.d, c.d);
    let mut term = CMatrix::identity(c.d, c.d);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
        if one_norm(&term) < 1e-18 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}
