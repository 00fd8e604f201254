use nalgebra::DMatrix;

use crate::{Complex64, Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Builds a matrix from rows, checking the shape.
pub fn matrix_from_rows(rows: &[Vec<Complex64>], nrows: usize, ncols: usize, what: &str) -> Result<CMatrix> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be {nrows}×{ncols}, got {}×{}",
            rows.len(),
            rows.first().map_or(0, Vec::len)
        )));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// `max |M − M*|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn min_singular_value(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// eigenvalues within `tol` below zero are clamped.
pub fn psd_sqrt(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = hermitian_part(m).symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::NotPositiveSemidefinite(min));
    }
    let roots = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    Ok(v * CMatrix::from_diagonal(&roots) * v.adjoint())
}

/// `dim ker M`, counting singular values at or below `tol·max(1, σ_max)`.
pub fn null_space_dim(m: &CMatrix, tol: f64) -> usize {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return cols;
    }
    let sv = m.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max).max(1.0);
    let rank = sv.iter().filter(|&&s| s > tol * smax).count();
    cols - rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(4.0), c(9.0), c(0.0)]));
        let p = psd_sqrt(&m, 1e-12).unwrap();
        assert!((p[(0, 0)].re - 2.0).abs() < 1e-14);
        assert!((p[(1, 1)].re - 3.0).abs() < 1e-14);
        assert!(p[(2, 2)].norm() < 1e-14);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(1.0)]);
        assert!(psd_sqrt(&m, 1e-10).is_err());
        assert!((min_hermitian_eigenvalue(&m) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_dimension() {
        let m = CMatrix::from_row_slice(2, 3, &[c(1.0), c(1.0), c(0.0), c(0.0), c(0.0), c(1.0)]);
        assert_eq!(null_space_dim(&m, 1e-10), 1);
        assert_eq!(null_space_dim(&CMatrix::zeros(0, 4), 1e-10), 4);
    }

    #[test]
    fn shape_checked() {
        assert!(matrix_from_rows(&[vec![c(1.0)]], 2, 1, "A").is_err());
    }
}
