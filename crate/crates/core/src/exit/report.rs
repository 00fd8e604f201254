use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use super::family::ExitFamily;
use super::fit::{fit_asymptotics, AsymptoticFit, SeriesPoint};
use super::gamma::{compare_engines, gamma_estimate, Engine, GammaEstimate, McSettings};
use super::invariants::{extract_invariants, paper_series_check, Invariants, SeriesCheck};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsRow {
    pub n: usize,
    pub k: u64,
    pub v: f64,
    pub reduced: GammaEstimate,
    pub operator: Option<GammaEstimate>,
    pub mismatched_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub theta: f64,
    pub sigma2: f64,
    pub rows: Vec<AsymptoticsRow>,
    pub fit: AsymptoticFit,
    pub fitted_invariants: Option<Invariants>,
    /// The printed constants `(1, 2⁻⁵, 2⁻¹¹·3⁻¹)`.
    pub paper_invariants: Invariants,
    pub series: SeriesCheck,
    pub warnings: Vec<String>,
}

/// Convergents → γ per member → fit → invariants → series check.
pub fn run_exit_asymptotics(
    family: &ExitFamily,
    mc: &McSettings,
    sigma2: f64,
    with_operator: bool,
) -> Result<AsymptoticsReport> {
    let mut rows = Vec::with_capacity(family.members.len());
    let mut warnings = Vec::new();
    for (n, member) in family.members.iter().enumerate() {
        let (reduced, operator, mismatched_paths) = if with_operator {
            let cmp = compare_engines(family, n, mc, sigma2)?;
            if !cmp.agrees() {
                warnings.push(format!("k = {}: engines disagree", member.k));
            }
            (cmp.reduced, Some(cmp.operator), cmp.mismatched_paths)
        } else {
            (gamma_estimate(family, n, Engine::Reduced, mc, sigma2)?, None, 0)
        };
        for est in std::iter::once(&reduced).chain(operator.as_ref()) {
            if est.truncation_flag {
                warnings.push(format!("k = {}: tail truncation above 1% of γ", member.k));
            }
            if est.censored_paths > 0 {
                warnings.push(format!("k = {}: {} paths censored at the horizon", member.k, est.censored_paths));
            }
        }
        rows.push(AsymptoticsRow {
            n,
            k: member.k,
            v: member.v,
            reduced,
            operator,
            mismatched_paths,
        });
    }
    let points: Vec<SeriesPoint> = rows
        .iter()
        .map(|r| SeriesPoint {
            v: r.v,
            gamma: r.reduced.gamma,
            stderr: r.reduced.stderr,
        })
        .collect();
    let fit = fit_asymptotics(&points)?;
    let fitted_invariants = extract_invariants(fit.n0, fit.c1, fit.c2).ok();
    Ok(AsymptoticsReport {
        theta: family.theta,
        sigma2,
        rows,
        fit,
        fitted_invariants,
        paper_invariants: extract_invariants(1, 1.0 / 32.0, 1.0 / 6144.0)?,
        series: paper_series_check(),
        warnings,
    })
}

impl AsymptoticsReport {
    /// `n,k_n,v_n,gamma_n,stderr[,gamma_operator,stderr_operator]`.
    pub fn to_csv(&self) -> String {
        let with_op = self.rows.iter().any(|r| r.operator.is_some());
        let mut out = String::from("n,k_n,v_n,gamma_n,stderr");
        if with_op {
            out.push_str(",gamma_operator,stderr_operator");
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{},{},{:e},{:e},{:e}", r.n, r.k, r.v, r.reduced.gamma, r.reduced.stderr)
                .expect("writing to String");
            if let Some(op) = &r.operator {
                write!(out, ",{:e},{:e}", op.gamma, op.stderr).expect("writing to String");
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let fitted = self.fitted_invariants.as_ref();
        json!({
            "theta": self.theta,
            "sigma2": self.sigma2,
            "n0": self.fit.n0,
            "slope": self.fit.slope,
            "c1": self.fit.c1,
            "c2": self.fit.c2,
            "d": fitted.map(|i| i.d),
            "H": fitted.map(|i| i.h),
            "H_imaginary": fitted.map(|i| i.h_imaginary),
            "paper_constants": {
                "c1": self.paper_invariants.c1,
                "c2": self.paper_invariants.c2,
                "d": self.paper_invariants.d,
                "H": self.paper_invariants.h,
            },
            "series_check": self.series,
            "warnings": self.warnings,
        })
    }
}
