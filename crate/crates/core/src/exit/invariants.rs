use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::gamma::exit_time_oracle_exact;
use crate::{Error, Result};

/// `α_n = 2Γ(½)ⁿ/Γ(n/2)`, the area of the unit sphere in `ℝⁿ`, in closed
/// form for integer `n` (so `α₁ = 2` exactly).
pub fn sphere_constant(n: u32) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    if n.is_multiple_of(2) {
        let half = n / 2;
        let fact: f64 = (1..half).map(f64::from).product();
        2.0 * PI.powi(half as i32) / fact
    } else {
        // Γ(n/2) = √π (n−2)!! / 2^{(n−1)/2}
        let k = (n - 1) / 2;
        let dfact: f64 = (1..=n.saturating_sub(2)).rev().step_by(2).map(f64::from).product();
        2.0 * (2.0 * PI).powi(k as i32) / dfact
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Invariants {
    pub n0: u32,
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    /// Extrinsic dimension.
    pub d: f64,
    /// `H²` as computed; negative when `c₂ < 0`.
    pub h_squared: f64,
    /// `√|H²|`.
    pub h: f64,
    pub h_imaginary: bool,
}

/// `d = (1/(2c₁))(n₀/α)^{2/n₀} + 1` and `H² = 8(d+1)c₂(α/n₀)^{4/n₀}`.
pub fn extract_invariants(n0: u32, c1: f64, c2: f64) -> Result<Invariants> {
    if n0 == 0 {
        return Err(Error::InvalidArgument("n0 must be positive".into()));
    }
    if !(c1 > 0.0) {
        return Err(Error::InvalidArgument(format!("c1 must be positive, got {c1}")));
    }
    let alpha = sphere_constant(n0);
    let n = n0 as f64;
    let d = (n / alpha).powf(2.0 / n) / (2.0 * c1) + 1.0;
    let h_squared = 8.0 * (d + 1.0) * c2 * (alpha / n).powf(4.0 / n);
    Ok(Invariants {
        n0,
        c1,
        c2,
        alpha,
        d,
        h_squared,
        h: h_squared.abs().sqrt(),
        h_imaginary: h_squared < 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesCheck {
    pub g_at_zero: f64,
    pub v2_coefficient: f64,
    pub v2_paper: f64,
    pub v4_coefficient: f64,
    pub v4_paper: f64,
    /// Only the `v²` coefficient is asserted.
    pub passed: bool,
}

fn richardson(mut estimate: impl FnMut(f64) -> f64, h0: f64, levels: usize) -> f64 {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let mut row = vec![estimate(h0 / 2f64.powi(i as i32))];
        for j in 1..=i {
            let factor = 4f64.powi(j as i32);
            let prev = row[j - 1];
            row.push(prev + (prev - table[i - 1][j - 1]) / (factor - 1.0));
        }
        table.push(row);
    }
    *table.last().and_then(|r| r.last()).expect("at least one level")
}

/// Taylor coefficients of `g(v) = 2sin²(v/8) + (2/3)sin⁴(v/8)` at 0 by
/// Richardson-extrapolated central differences.
pub fn paper_series_check() -> SeriesCheck {
    let g = |v: f64| {
        let s = (v / 8.0).sin();
        2.0 * s * s + (2.0 / 3.0) * s.powi(4)
    };
    let d2 = richardson(|h| (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h), 1.0, 6);
    let d4 = richardson(
        |h| (g(2.0 * h) - 4.0 * g(h) + 6.0 * g(0.0) - 4.0 * g(-h) + g(-2.0 * h)) / h.powi(4),
        1.0,
        5,
    );
    let v2 = d2 / 2.0;
    let v2_paper = 1.0 / 32.0;
    SeriesCheck {
        g_at_zero: g(0.0),
        v2_coefficient: v2,
        v2_paper,
        v4_coefficient: d4 / 24.0,
        v4_paper: 1.0 / 6144.0,
        passed: (v2 - v2_paper).abs() < 1e-8,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleRow {
    pub epsilon: f64,
    pub exit_time: f64,
    pub series: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleBenchmark {
    pub rows: Vec<CircleRow>,
    /// Coefficients of `ε²`, `ε⁴`, `ε⁶`.
    pub coefficients: [f64; 3],
    pub d: f64,
    pub h_squared: f64,
}

pub const DEFAULT_CIRCLE_RADII: [f64; 6] = [0.4, 0.3, 0.2, 0.15, 0.1, 0.05];

/// Exit times of the unit circle (σ² = 2) from extrinsic balls of radius
/// `ε`, fitted to `Aε² + Bε⁴ + Cε⁶`, giving `d = 1 + 1/(2A)` and
/// `H² = 8(d+1)B`.
pub fn classical_circle_benchmark(eps_list: &[f64]) -> Result<CircleBenchmark> {
    if eps_list.len() < 3 || eps_list.iter().any(|&e| !(e > 0.0 && e < 2.0)) {
        return Err(Error::InvalidArgument("need at least three radii in (0, 2)".into()));
    }
    let times: Vec<f64> = eps_list
        .iter()
        .map(|&e| {
            let a = 2.0 * (e / 2.0).asin();
            exit_time_oracle_exact(a, 2.0)
        })
        .collect();
    let m = eps_list.len();
    let design = DMatrix::from_fn(m, 3, |i, j| eps_list[i].powi(2 * (j as i32 + 1)) / times[i]);
    let target = DVector::from_element(m, 1.0);
    let coef = design
        .svd(true, true)
        .solve(&target, 1e-14)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let coefficients = [coef[0], coef[1], coef[2]];
    let d = 1.0 + 1.0 / (2.0 * coefficients[0]);
    let h_squared = 8.0 * (d + 1.0) * coefficients[1];
    let rows = eps_list
        .iter()
        .zip(&times)
        .map(|(&epsilon, &exit_time)| {
            let series = epsilon.powi(2) / 2.0 + epsilon.powi(4) / 24.0;
            CircleRow {
                epsilon,
                exit_time,
                series,
                residual: exit_time - series,
            }
        })
        .collect();
    Ok(CircleBenchmark {
        rows,
        coefficients,
        d,
        h_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_constants() {
        assert_eq!(sphere_constant(1), 2.0);
        assert!((sphere_constant(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_constant(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_constant(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_constant(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn remark_constants() {
        let inv = extract_invariants(1, 1.0 / 32.0, 1.0 / 6144.0).unwrap();
        assert_eq!(inv.d, 5.0);
        assert!((inv.h - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!(!inv.h_imaginary);
    }

    #[test]
    fn formula_smoke() {
        let inv = extract_invariants(1, 0.5, 1.0 / 24.0).unwrap();
        assert!((inv.d - 1.25).abs() < 1e-15);
        assert_eq!(extract_invariants(2, 0.1, 0.0).unwrap().h, 0.0);
        assert!(extract_invariants(1, 0.1, -0.01).unwrap().h_imaginary);
        assert!(extract_invariants(1, 0.0, 0.0).is_err());
    }

    #[test]
    fn series_coefficients() {
        let s = paper_series_check();
        assert_eq!(s.g_at_zero, 0.0);
        assert!(s.passed);
        assert!(s.v4_coefficient.abs() < 1e-7, "{}", s.v4_coefficient);
    }

    #[test]
    fn circle_recovers_dimension_and_curvature() {
        let b = classical_circle_benchmark(&DEFAULT_CIRCLE_RADII).unwrap();
        assert!((b.d - 2.0).abs() < 0.05);
        assert!((b.h_squared - 1.0).abs() < 0.05);
        let row = b.rows.iter().find(|r| r.epsilon == 0.1).unwrap();
        assert!(row.residual.abs() < 1e-5);
    }
}
