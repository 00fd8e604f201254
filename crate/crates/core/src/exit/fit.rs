use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::{Error, Result};

pub const MAX_INTRINSIC_DIMENSION: u32 = 6;
pub const SLOPE_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub v: f64,
    pub gamma: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub n0: u32,
    pub c1: f64,
    pub c2: f64,
    /// Ordinary least-squares slope of `ln γ` against `ln v`.
    pub slope: f64,
    pub slope_deviation: f64,
    /// `γ − c₁v^{2/n₀} − c₂v^{4/n₀}` per point.
    pub residuals: Vec<f64>,
}

/// OLS slope of `ln y` on `ln x`.
pub fn log_log_slope(points: &[SeriesPoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.v.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.gamma.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Detects `n₀` from the log-log slope, then fits
/// `γ = c₁v^{2/n₀} + c₂v^{4/n₀}` by weighted least squares.
pub fn fit_asymptotics(points: &[SeriesPoint]) -> Result<AsymptoticFit> {
    if points.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 points, got {}", points.len())));
    }
    if points.iter().any(|p| !(p.v > 0.0 && p.gamma > 0.0 && p.stderr >= 0.0)) {
        return Err(Error::InvalidArgument("points need v > 0, γ > 0, stderr ≥ 0".into()));
    }
    let vmin = points.iter().map(|p| p.v).fold(f64::INFINITY, f64::min);
    let vmax = points.iter().map(|p| p.v).fold(0.0, f64::max);
    if vmax / vmin < 10.0 {
        return Err(Error::InvalidArgument(format!("v spans {vmin}..{vmax}, less than a decade")));
    }
    let slope = log_log_slope(points);
    let (n0, slope_deviation) = (1..=MAX_INTRINSIC_DIMENSION)
        .map(|n| (n, (slope - 2.0 / n as f64).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty search range");
    if slope_deviation > SLOPE_TOLERANCE {
        return Err(Error::NoAsymptotic { slope });
    }
    let p1 = 2.0 / n0 as f64;
    let p2 = 4.0 / n0 as f64;
    let use_stderr = points.iter().all(|p| p.stderr > 0.0);
    let mut normal = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for p in points {
        let w = if use_stderr { p.stderr.powi(-2) } else { p.gamma.powi(-2) };
        let row = Vector2::new(p.v.powf(p1), p.v.powf(p2));
        normal += w * row * row.transpose();
        rhs += w * p.gamma * row;
    }
    let coef = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidArgument("degenerate fit design".into()))?;
    let (c1, c2) = (coef[0], coef[1]);
    let residuals = points
        .iter()
        .map(|p| p.gamma - c1 * p.v.powf(p1) - c2 * p.v.powf(p2))
        .collect();
    Ok(AsymptoticFit {
        n0,
        c1,
        c2,
        slope,
        slope_deviation,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(f: impl Fn(f64) -> f64) -> Vec<SeriesPoint> {
        [0.4, 0.25, 0.15, 0.09, 0.055, 0.034]
            .iter()
            .map(|&v| SeriesPoint {
                v,
                gamma: f(v),
                stderr: 0.0,
            })
            .collect()
    }

    #[test]
    fn exact_leading_term() {
        let fit = fit_asymptotics(&synth(|v| v * v / 32.0)).unwrap();
        assert_eq!(fit.n0, 1);
        assert!((fit.c1 - 1.0 / 32.0).abs() < 1e-12);
        assert!(fit.c2.abs() < 1e-10);
    }

    #[test]
    fn recovers_second_coefficient() {
        let fit = fit_asymptotics(&synth(|v| v * v / 32.0 + v.powi(4) / 6144.0)).unwrap();
        assert_eq!(fit.n0, 1);
        assert!((fit.c2 * 6144.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn other_dimensions() {
        let fit = fit_asymptotics(&synth(|v| 0.3 * v)).unwrap();
        assert_eq!(fit.n0, 2);
        let err = fit_asymptotics(&synth(|v| v.powf(3.0))).unwrap_err();
        assert!(err.to_string().starts_with("no asymptotic detected"));
    }

    #[test]
    fn needs_a_decade() {
        let pts: Vec<_> = [0.3, 0.25, 0.2, 0.1]
            .iter()
            .map(|&v| SeriesPoint {
                v,
                gamma: v * v,
                stderr: 0.0,
            })
            .collect();
        assert!(fit_asymptotics(&pts).is_err());
    }
}
