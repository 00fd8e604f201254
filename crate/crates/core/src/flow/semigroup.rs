use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::path::{path_rng, BrownianPath};
use crate::torus::TorusElement;
use crate::{unit_phase, Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupSpec {
    pub sigma2: f64,
    #[serde(default)]
    pub drift: Option<(f64, f64)>,
}

impl SemigroupSpec {
    pub fn new(sigma2: f64) -> Result<Self> {
        let s = Self { sigma2, drift: None };
        s.validate()?;
        Ok(s)
    }

    pub fn with_drift(sigma2: f64, mu: f64, nu: f64) -> Result<Self> {
        let s = Self {
            sigma2,
            drift: Some((mu, nu)),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma2 > 0.0 && self.sigma2.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("sigma2 must be positive, got {}", self.sigma2)))
        }
    }

    fn drift_pair(&self) -> (f64, f64) {
        self.drift.unwrap_or((0.0, 0.0))
    }

    /// Exponent of `T_t` on `UᵐVⁿ` per unit time.
    pub fn eigenvalue(&self, m: i64, n: i64) -> Complex64 {
        let (mu, nu) = self.drift_pair();
        let (m, n) = (m as f64, n as f64);
        Complex64::new(-2.0 * PI * PI * self.sigma2 * (m * m + n * n), 2.0 * PI * (mu * m + nu * n))
    }
}

/// The flow for one driving path: `a ↦ α_{(e^{2πiW¹_t}, e^{2πiW²_t})}(a)`.
pub fn flow_apply(a: &TorusElement, path: &BrownianPath, t: f64) -> Result<TorusElement> {
    if path.dim() != 2 {
        return Err(Error::InvalidArgument("flow needs a two-dimensional path".into()));
    }
    Ok(a.act_angles(path.at(t, 0)?, path.at(t, 1)?))
}

pub fn heat_semigroup_exact(a: &TorusElement, t: f64, spec: &SemigroupSpec) -> TorusElement {
    a.map_coeffs(|m, n, c| c * (spec.eigenvalue(m, n) * t).exp())
}

/// Eigenvalues are real exactly when there is no drift.
pub fn is_symmetric_generator(spec: &SemigroupSpec) -> bool {
    let (mu, nu) = spec.drift_pair();
    mu == 0.0 && nu == 0.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientStats {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
}

impl CoefficientStats {
    /// `√(se_re² + se_im²)`.
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }
}

#[derive(Debug, Clone)]
pub struct McReport {
    pub mean: TorusElement,
    pub coefficients: BTreeMap<(i64, i64), CoefficientStats>,
    pub n_paths: usize,
}

impl McReport {
    pub fn coefficient(&self, m: i64, n: i64) -> Option<&CoefficientStats> {
        self.coefficients.get(&(m, n))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .coefficients
            .iter()
            .map(|((m, n), s)| {
                json!({"m": m, "n": n, "re": s.mean.re, "im": s.mean.im,
                       "stderr_re": s.stderr_re, "stderr_im": s.stderr_im})
            })
            .collect();
        json!({"n_paths": self.n_paths, "coefficients": rows})
    }
}

/// Average of the flow over independent paths, each with
/// `W_t ~ N(drift·t, σ²t)` per coordinate.
pub fn vacuum_expectation_mc(
    a: &TorusElement,
    t: f64,
    spec: &SemigroupSpec,
    n_paths: usize,
    seed: u64,
) -> Result<McReport> {
    spec.validate()?;
    if n_paths < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 paths, got {n_paths}")));
    }
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let (mu, nu) = spec.drift_pair();
    let sd = (spec.sigma2 * t).sqrt();
    let terms: Vec<((i64, i64), Complex64)> = a.terms().collect();
    let samples: Vec<Vec<Complex64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i as u64);
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            let (w1, w2) = (mu * t + sd * z1, nu * t + sd * z2);
            terms
                .iter()
                .map(|&((m, n), c)| c * unit_phase(m as f64 * w1 + n as f64 * w2))
                .collect()
        })
        .collect();
    let count = n_paths as f64;
    let mut coefficients = BTreeMap::new();
    for (j, &(key, _)) in terms.iter().enumerate() {
        let mean: Complex64 = samples.iter().map(|s| s[j]).sum::<Complex64>() / count;
        let (mut vr, mut vi) = (0.0, 0.0);
        for s in &samples {
            let d = s[j] - mean;
            vr += d.re * d.re;
            vi += d.im * d.im;
        }
        let norm = (count - 1.0) * count;
        coefficients.insert(
            key,
            CoefficientStats {
                mean,
                stderr_re: (vr / norm).sqrt(),
                stderr_im: (vi / norm).sqrt(),
            },
        );
    }
    let mean = TorusElement::from_terms(*a.context(), coefficients.iter().map(|(&k, s)| (k, s.mean)));
    Ok(McReport {
        mean,
        coefficients,
        n_paths,
    })
}
