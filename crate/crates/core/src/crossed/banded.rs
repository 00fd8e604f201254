use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use super::circle::{check_grid, CircleFunction, ExactForm};
use crate::torus::{AlgebraContext, TorusElement, DROP_TOLERANCE};
use crate::{unit_phase, Complex64, Error, Result};

/// Element `Σ_k f_k(U)Vᵏ` with `U` multiplication by `e^{2πix}` and
/// `(Vξ)(x) = ξ(x − θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedElement {
    ctx: AlgebraContext,
    grid: usize,
    bands: BTreeMap<i64, CircleFunction>,
}

/// Residuals of the projection identities, measured as grid sup-norms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub is_projection: bool,
    pub idempotent_residual: f64,
    pub selfadjoint_residual: f64,
    /// Sup of `(a² − a)_k` for every band `k` present in either term.
    pub band_residuals: BTreeMap<i64, f64>,
}

impl ProjectionReport {
    pub fn band(&self, k: i64) -> f64 {
        self.band_residuals.get(&k).copied().unwrap_or(0.0)
    }
}

impl BandedElement {
    pub fn zero(ctx: AlgebraContext, grid: usize) -> Result<Self> {
        check_grid(grid)?;
        Ok(Self {
            ctx,
            grid,
            bands: BTreeMap::new(),
        })
    }

    pub fn identity(ctx: AlgebraContext, grid: usize) -> Result<Self> {
        Self::from_bands(ctx, [(0, CircleFunction::constant(Complex64::new(1.0, 0.0), grid)?)])
    }

    pub fn from_bands<I>(ctx: AlgebraContext, bands: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, CircleFunction)>,
    {
        let bands: BTreeMap<_, _> = bands.into_iter().collect();
        let grid = bands.values().next().map(CircleFunction::grid_len).unwrap_or(0);
        if let Some(bad) = bands.values().find(|f| f.grid_len() != grid) {
            return Err(Error::DimensionMismatch(format!(
                "band grids {grid} and {}",
                bad.grid_len()
            )));
        }
        check_grid(grid)?;
        Ok(Self { ctx, grid, bands })
    }

    /// `f(U)` as a diagonal element.
    pub fn diagonal(ctx: AlgebraContext, f: CircleFunction) -> Result<Self> {
        Self::from_bands(ctx, [(0, f)])
    }

    /// Fourier-expands each `Vⁿ` column of a torus element into a
    /// trigonometric polynomial in `U`.
    pub fn from_torus(a: &TorusElement, grid: usize) -> Result<Self> {
        let mut modes: BTreeMap<i64, Vec<(i64, Complex64)>> = BTreeMap::new();
        for ((m, n), c) in a.terms() {
            modes.entry(n).or_default().push((m, c));
        }
        let mut bands = BTreeMap::new();
        for (n, list) in modes {
            bands.insert(n, CircleFunction::from_exact(ExactForm::Trig(list), grid)?);
        }
        let mut out = Self::zero(*a.context(), grid)?;
        out.bands = bands;
        Ok(out)
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn grid_len(&self) -> usize {
        self.grid
    }

    pub fn band(&self, k: i64) -> Option<&CircleFunction> {
        self.bands.get(&k)
    }

    pub fn bands(&self) -> &BTreeMap<i64, CircleFunction> {
        &self.bands
    }

    pub fn band_indices(&self) -> Vec<i64> {
        self.bands.keys().copied().collect()
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.ctx.ensure_same(&other.ctx)?;
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch(format!(
                "grids {} and {}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    fn pruned(mut self) -> Self {
        self.bands.retain(|_, f| f.sup_norm() > DROP_TOLERANCE);
        self
    }

    fn accumulate(acc: &mut BTreeMap<i64, CircleFunction>, k: i64, f: CircleFunction) {
        match acc.remove(&k) {
            Some(prev) => {
                acc.insert(k, prev.add(&f));
            }
            None => {
                acc.insert(k, f);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let mut bands = self.bands.clone();
        for (&k, f) in &other.bands {
            Self::accumulate(&mut bands, k, f.clone());
        }
        Ok(Self {
            ctx: self.ctx,
            grid: self.grid,
            bands,
        }
        .pruned())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            ctx: self.ctx,
            grid: self.grid,
            bands: self.bands.iter().map(|(&k, f)| (k, f.scale(c))).collect(),
        }
    }

    /// Product with `f_k(x)·g_j(x − kθ)` accumulated into band `k + j`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let theta = self.ctx.theta();
        let mut bands = BTreeMap::new();
        for (&k, f) in &self.bands {
            for (&j, g) in &other.bands {
                Self::accumulate(&mut bands, k + j, f.mul_shifted(g, k as f64 * theta));
            }
        }
        Ok(Self {
            ctx: self.ctx,
            grid: self.grid,
            bands,
        }
        .pruned())
    }

    /// `(f_k(U)Vᵏ)* = conj f_k(x + kθ) V^{−k}`.
    pub fn star(&self) -> Self {
        let theta = self.ctx.theta();
        Self {
            ctx: self.ctx,
            grid: self.grid,
            bands: self
                .bands
                .iter()
                .map(|(&k, f)| (-k, f.translate(k as f64 * theta).conj()))
                .collect(),
        }
    }

    /// `f_k(x) ↦ f_k(x + s)·e^{2πikt}`.
    pub fn translate_action(&self, s: f64, t: f64) -> Self {
        Self {
            ctx: self.ctx,
            grid: self.grid,
            bands: self
                .bands
                .iter()
                .map(|(&k, f)| (k, f.translate(s).scale(unit_phase(k as f64 * t))))
                .collect(),
        }
    }

    /// `∫ f₀`.
    pub fn trace(&self) -> Complex64 {
        self.bands
            .get(&0)
            .map(CircleFunction::integral)
            .unwrap_or_default()
    }

    /// Largest band-wise grid sup of `self − other`.
    pub fn sup_diff(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<i64> =
            self.bands.keys().chain(other.bands.keys()).copied().collect();
        keys.into_iter()
            .map(|k| match (self.bands.get(&k), other.bands.get(&k)) {
                (Some(a), Some(b)) => a.sup_diff(b),
                (Some(a), None) | (None, Some(a)) => a.sup_norm(),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    pub fn is_projection(&self, tol: f64) -> ProjectionReport {
        let sq = self.mul(self).expect("self-compatible");
        let mut band_residuals = BTreeMap::new();
        let keys: std::collections::BTreeSet<i64> =
            sq.bands.keys().chain(self.bands.keys()).copied().collect();
        for k in keys {
            let r = match (sq.bands.get(&k), self.bands.get(&k)) {
                (Some(a), Some(b)) => a.sup_diff(b),
                (Some(a), None) | (None, Some(a)) => a.sup_norm(),
                (None, None) => 0.0,
            };
            band_residuals.insert(k, r);
        }
        let idempotent_residual = band_residuals.values().copied().fold(0.0, f64::max);
        let selfadjoint_residual = self.star().sup_diff(self);
        ProjectionReport {
            is_projection: idempotent_residual < tol && selfadjoint_residual < tol,
            idempotent_residual,
            selfadjoint_residual,
            band_residuals,
        }
    }

    /// Membership in the subspace `f₋₁(U)V⁻¹ + f₀(U) + f₁(U)V` with
    /// `f₋₁(x) = conj f₁(x + θ)`.
    pub fn member_of_x(&self, tol: f64) -> bool {
        if self.bands.keys().any(|k| k.abs() > 1) {
            return false;
        }
        let theta = self.ctx.theta();
        let n = self.grid;
        let m1 = self.bands.get(&-1);
        let p1 = self.bands.get(&1);
        (0..n).all(|j| {
            let x = j as f64 / n as f64;
            let lhs = m1.map(|f| f.samples()[j]).unwrap_or_default();
            let rhs = p1.map(|f| f.eval(x + theta).conj()).unwrap_or_default();
            (lhs - rhs).norm() <= tol
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let bands: Vec<_> = self
            .bands
            .iter()
            .map(|(k, f)| {
                json!({
                    "k": k,
                    "re": f.samples().iter().map(|v| v.re).collect::<Vec<_>>(),
                    "im": f.samples().iter().map(|v| v.im).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "theta": self.ctx.theta(), "grid": self.grid, "bands": bands })
    }
}
