//! The rotation algebra `A_θ` as finitely supported twisted Laurent series.
//!
//! Elements are stored in normal order `Σ a_{mn} UᵐVⁿ`. The commutation
//! relation `UV = e^{2πiθ}VU` is applied in the form
//! `(UᵃVᵇ)(UᶜVᵈ) = e^{−2πiθ·bc} U^{a+c} V^{b+d}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{unit_phase, Complex64, Error, Result};

/// Coefficients with modulus at or below this are dropped after arithmetic.
pub const DROP_TOLERANCE: f64 = 1e-15;

/// The deformation parameter `θ` together with `λ = e^{2πiθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraContext {
    theta: f64,
    lambda: Complex64,
}

impl AlgebraContext {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(Self {
            theta,
            lambda: unit_phase(theta),
        })
    }

    /// The golden-ratio context `θ = (√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::new((5f64.sqrt() - 1.0) / 2.0).expect("golden ratio lies in (0,1)")
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// `e^{2πiθ·k}` for an integer power.
    pub fn phase(&self, k: i64) -> Complex64 {
        unit_phase(self.theta * k as f64)
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.theta == other.theta {
            Ok(())
        } else {
            Err(Error::IncompatibleTheta(self.theta, other.theta))
        }
    }
}

/// Element `Σ a_{mn} UᵐVⁿ` of `A_θ` with finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    ctx: AlgebraContext,
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

impl TorusElement {
    pub fn zero(ctx: AlgebraContext) -> Self {
        Self {
            ctx,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(ctx: AlgebraContext) -> Self {
        Self::monomial(ctx, 0, 0, Complex64::new(1.0, 0.0))
    }

    /// `c · UᵐVⁿ`.
    pub fn monomial(ctx: AlgebraContext, m: i64, n: i64, c: Complex64) -> Self {
        Self::from_terms(ctx, [((m, n), c)])
    }

    pub fn u(ctx: AlgebraContext) -> Self {
        Self::monomial(ctx, 1, 0, Complex64::new(1.0, 0.0))
    }

    pub fn v(ctx: AlgebraContext) -> Self {
        Self::monomial(ctx, 0, 1, Complex64::new(1.0, 0.0))
    }

    /// Build from `(m, n) → a_{mn}` pairs; repeated keys accumulate.
    pub fn from_terms<I>(ctx: AlgebraContext, terms: I) -> Self
    where
        I: IntoIterator<Item = ((i64, i64), Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut out = Self { ctx, coeffs };
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() > DROP_TOLERANCE);
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.coeffs
            .get(&(m, n))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(Self::from_terms(self.ctx, self.terms().chain(other.terms())))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(Self::from_terms(
            self.ctx,
            self.terms().chain(other.terms().map(|(k, c)| (k, -c))),
        ))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.ctx, self.terms().map(|(k, c)| (k, c * s)))
    }

    /// Normal-ordered product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        let mut acc: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
        for (&(a, b), &x) in &self.coeffs {
            for (&(c, d), &y) in &other.coeffs {
                let crossing = unit_phase(-self.ctx.theta * (b as f64) * (c as f64));
                *acc.entry((a + c, b + d)).or_insert(Complex64::new(0.0, 0.0)) +=
                    x * y * crossing;
            }
        }
        let mut out = Self {
            ctx: self.ctx,
            coeffs: acc,
        };
        out.prune();
        Ok(out)
    }

    /// `(a UᵐVⁿ)* = conj(a) e^{−2πiθmn} U^{−m}V^{−n}`.
    pub fn star(&self) -> Self {
        let theta = self.ctx.theta;
        Self::from_terms(
            self.ctx,
            self.terms().map(|((m, n), c)| {
                (
                    (-m, -n),
                    c.conj() * unit_phase(-theta * (m as f64) * (n as f64)),
                )
            }),
        )
    }

    /// The canonical trace `a₀₀`.
    pub fn trace(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    /// Gauge action `a_{mn} ↦ xᵐyⁿ a_{mn}` of `(x, y) ∈ 𝕋²`.
    pub fn act(&self, x: Complex64, y: Complex64) -> Result<Self> {
        for z in [x, y] {
            if (z.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::NonUnitModulus(z.norm()));
            }
        }
        Ok(self.act_unchecked(x, y))
    }

    /// Gauge action by angles: `(e^{2πis}, e^{2πit})`.
    pub fn act_angles(&self, s: f64, t: f64) -> Self {
        Self::from_terms(
            self.ctx,
            self.terms()
                .map(|((m, n), c)| ((m, n), c * unit_phase(s * m as f64 + t * n as f64))),
        )
    }

    fn act_unchecked(&self, x: Complex64, y: Complex64) -> Self {
        Self::from_terms(
            self.ctx,
            self.terms()
                .map(|((m, n), c)| ((m, n), c * x.powi(m as i32) * y.powi(n as i32))),
        )
    }

    /// Conditional expectation onto `C*(U)` (axis 1, keeps `n = 0`) or onto
    /// `C*(V)` (axis 2, keeps `m = 0`).
    pub fn cond_expectation(&self, axis: Axis) -> Self {
        Self::from_terms(
            self.ctx,
            self.terms().filter(|((m, n), _)| match axis {
                Axis::First => *n == 0,
                Axis::Second => *m == 0,
            }),
        )
    }

    /// Apply `a_{mn} ↦ g(m, n) a_{mn}`.
    pub fn map_coeffs<F>(&self, mut g: F) -> Self
    where
        F: FnMut(i64, i64, Complex64) -> Complex64,
    {
        Self::from_terms(self.ctx, self.terms().map(|((m, n), c)| ((m, n), g(m, n, c))))
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient difference against `other` over the union of supports.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|&(m, n)| (self.coeff(m, n) - other.coeff(m, n)).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TorusElementJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: TorusElementJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let ctx = AlgebraContext::new(raw.theta)?;
        Ok(Self::from_terms(
            ctx,
            raw.terms
                .into_iter()
                .map(|t| ((t.m, t.n), Complex64::new(t.re, t.im))),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    First,
    Second,
}

impl TryFrom<u8> for Axis {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Axis::First),
            2 => Ok(Axis::Second),
            _ => Err(Error::InvalidArgument(format!("axis must be 1 or 2, got {v}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    m: i64,
    n: i64,
    re: f64,
    im: f64,
}

/// Wire form: `{"theta": θ, "terms": [{m, n, re, im}, …]}`.
#[derive(Debug, Serialize, Deserialize)]
struct TorusElementJson {
    theta: f64,
    terms: Vec<TermJson>,
}

impl From<&TorusElement> for TorusElementJson {
    fn from(a: &TorusElement) -> Self {
        Self {
            theta: a.ctx.theta,
            terms: a
                .terms()
                .map(|((m, n), c)| TermJson {
                    m,
                    n,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn uv_is_normal_ordered() {
        let ctx = AlgebraContext::golden();
        let uv = TorusElement::u(ctx).mul(&TorusElement::v(ctx)).unwrap();
        assert_eq!(uv.support_len(), 1);
        assert_abs_diff_eq!((uv.coeff(1, 1) - c(1.0, 0.0)).norm(), 0.0);
    }

    #[test]
    fn vu_picks_up_inverse_lambda() {
        let ctx = AlgebraContext::golden();
        let vu = TorusElement::v(ctx).mul(&TorusElement::u(ctx)).unwrap();
        let want = ctx.lambda().conj();
        assert!((vu.coeff(1, 1) - want).norm() < 1e-15);
        // UV = λ VU
        let uv = TorusElement::u(ctx).mul(&TorusElement::v(ctx)).unwrap();
        assert!(uv.max_coeff_diff(&vu.scale(ctx.lambda())) < 1e-15);
    }

    #[test]
    fn mismatched_theta_is_rejected() {
        let a = TorusElement::u(AlgebraContext::new(0.3).unwrap());
        let b = TorusElement::u(AlgebraContext::new(0.4).unwrap());
        let err = a.mul(&b).unwrap_err();
        assert!(err.to_string().contains("incompatible theta"));
    }

    #[test]
    fn star_of_uv() {
        let ctx = AlgebraContext::golden();
        let uv = TorusElement::monomial(ctx, 1, 1, c(1.0, 0.0));
        let s = uv.star();
        assert!((s.coeff(-1, -1) - ctx.lambda().conj()).norm() < 1e-15);
        assert!(TorusElement::one(ctx).star() == TorusElement::one(ctx));
    }

    #[test]
    fn trace_and_expectations() {
        let ctx = AlgebraContext::golden();
        let a = TorusElement::from_terms(ctx, [((0, 0), c(3.0, 0.0)), ((1, 1), c(2.0, 0.0))]);
        assert_eq!(a.trace(), c(3.0, 0.0));
        assert_eq!(TorusElement::u(ctx).trace(), c(0.0, 0.0));

        let upv = TorusElement::u(ctx).add(&TorusElement::v(ctx)).unwrap();
        assert_eq!(upv.cond_expectation(Axis::Second), TorusElement::v(ctx));
        assert_eq!(upv.cond_expectation(Axis::First), TorusElement::u(ctx));
        assert_eq!(
            TorusElement::one(ctx).cond_expectation(Axis::First),
            TorusElement::one(ctx)
        );
    }

    #[test]
    fn act_on_generators() {
        let ctx = AlgebraContext::golden();
        let x = unit_phase(0.17);
        let y = unit_phase(0.41);
        let au = TorusElement::u(ctx).act(x, y).unwrap();
        assert!((au.coeff(1, 0) - x).norm() < 1e-15);
        let a = TorusElement::from_terms(ctx, [((2, -1), c(0.5, 1.0)), ((0, 3), c(-1.0, 0.2))]);
        assert_eq!(a.act(c(1.0, 0.0), c(1.0, 0.0)).unwrap(), a);
        assert!(a.act(c(1.1, 0.0), y).is_err());
    }

    #[test]
    fn json_round_trip() {
        let ctx = AlgebraContext::golden();
        let a = TorusElement::from_terms(ctx, [((2, -1), c(0.5, 1.0)), ((0, 3), c(-1.0, 0.2))]);
        let back = TorusElement::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn drop_tolerance_cancels_noise() {
        let ctx = AlgebraContext::golden();
        let a = TorusElement::u(ctx);
        assert!(a.sub(&a).unwrap().is_zero());
    }
}
