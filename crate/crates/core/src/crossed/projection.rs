use serde::{Deserialize, Serialize};

use super::banded::BandedElement;
use super::circle::{CircleFunction, ExactForm, Piece, PieceKind};
use crate::torus::AlgebraContext;
use crate::{frac, Error, Result};

/// Parameters of the trapezoid projection built in `Uᵏ, V^{±k}`.
///
/// The working angle is `{kθ}`, or `1 − {kθ}` when `reversed` (which
/// corresponds to building in `V^{−k}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieffelProjectionSpec {
    pub theta: f64,
    pub epsilon: f64,
    pub scale_k: u64,
    #[serde(default)]
    pub reversed: bool,
}

impl RieffelProjectionSpec {
    pub fn new(theta: f64, epsilon: f64, scale_k: u64) -> Result<Self> {
        let spec = Self {
            theta,
            epsilon,
            scale_k,
            reversed: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same family built along `V^{−k}`, with angle `1 − {kθ}`.
    pub fn reversed(theta: f64, epsilon: f64, scale_k: u64) -> Result<Self> {
        let spec = Self {
            theta,
            epsilon,
            scale_k,
            reversed: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn angle(&self) -> f64 {
        let a = frac(self.scale_k as f64 * self.theta);
        if self.reversed {
            1.0 - a
        } else {
            a
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidTheta(self.theta));
        }
        if self.scale_k == 0 {
            return Err(Error::InvalidArgument("scale_k must be positive".into()));
        }
        let angle = self.angle();
        if !(self.epsilon > 0.0 && self.epsilon < angle && angle + self.epsilon <= 1.0) {
            return Err(Error::EpsilonOutOfRange {
                epsilon: self.epsilon,
                angle,
            });
        }
        Ok(())
    }

    pub fn context(&self) -> Result<AlgebraContext> {
        AlgebraContext::new(self.angle())
    }

    /// Trapezoid `f₀` on `[0,1)`.
    pub fn f0_form(&self) -> ExactForm {
        let (v, e) = (self.angle(), self.epsilon);
        let mut pieces = vec![
            Piece {
                start: 0.0,
                end: e,
                kind: PieceKind::Linear {
                    origin: 0.0,
                    value: 0.0,
                    slope: 1.0 / e,
                },
            },
            Piece {
                start: e,
                end: v,
                kind: PieceKind::Constant(1.0),
            },
            Piece {
                start: v,
                end: v + e,
                kind: PieceKind::Linear {
                    origin: v + e,
                    value: 0.0,
                    slope: -1.0 / e,
                },
            },
        ];
        pieces.retain(|p| p.end > p.start);
        ExactForm::piecewise(pieces)
    }

    /// Bump `f₁ = √(f₀ − f₀²)` supported on `[v, v+ε]`.
    pub fn f1_form(&self) -> ExactForm {
        let (v, e) = (self.angle(), self.epsilon);
        ExactForm::piecewise(vec![Piece {
            start: v,
            end: v + e,
            kind: PieceKind::SqrtQuadratic {
                kappa: 1.0 / (e * e),
                r1: v,
                r2: v + e,
            },
        }])
    }
}

/// `P = f₋₁(U)V⁻¹ + f₀(U) + f₁(U)V` on the given grid.
pub fn build_rieffel_projection(spec: &RieffelProjectionSpec, grid: usize) -> Result<BandedElement> {
    spec.validate()?;
    let ctx = spec.context()?;
    let f0 = CircleFunction::from_exact(spec.f0_form(), grid)?;
    let f1 = CircleFunction::from_exact(spec.f1_form(), grid)?;
    let fm1 = f1.translate(ctx.theta()).conj();
    BandedElement::from_bands(ctx, [(-1, fm1), (0, f0), (1, f1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossed::DEFAULT_GRID;

    fn golden_spec() -> RieffelProjectionSpec {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        RieffelProjectionSpec::new(theta, theta / 2.0, 1).unwrap()
    }

    #[test]
    fn trace_is_angle() {
        let spec = golden_spec();
        let p = build_rieffel_projection(&spec, DEFAULT_GRID).unwrap();
        assert!((p.trace().re - spec.theta).abs() < 1e-12);
    }

    #[test]
    fn f0_breakpoints() {
        let spec = golden_spec();
        let f0 = spec.f0_form();
        assert_eq!(f0.eval(spec.epsilon).re, 1.0);
        assert_eq!(f0.eval(spec.theta + spec.epsilon).re, 0.0);
    }

    #[test]
    fn projection_identities_hold() {
        let p = build_rieffel_projection(&golden_spec(), DEFAULT_GRID).unwrap();
        let rep = p.is_projection(1e-10);
        assert!(rep.is_projection, "{rep:?}");
        assert!(p.member_of_x(1e-12));
    }

    #[test]
    fn dropping_f1_breaks_idempotence() {
        let spec = golden_spec();
        let p = build_rieffel_projection(&spec, DEFAULT_GRID).unwrap();
        let q = BandedElement::from_bands(*p.context(), [(0, p.band(0).unwrap().clone())]).unwrap();
        let rep = q.is_projection(1e-10);
        assert!(!rep.is_projection);
        // sup |f₀ − f₀²| = 1/4
        assert!((rep.band(0) - 0.25).abs() < 1e-3);
    }

    #[test]
    fn epsilon_range_enforced() {
        let theta = 0.3;
        assert!(RieffelProjectionSpec::new(theta, 0.3, 1).is_err());
        assert!(RieffelProjectionSpec::new(theta, 0.0, 1).is_err());
        assert!(RieffelProjectionSpec::new(theta, 0.2, 1).is_ok());
        assert!(RieffelProjectionSpec::new(0.8, 0.25, 1).is_err());
    }

    #[test]
    fn scaled_family_uses_fractional_angle() {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let spec = RieffelProjectionSpec::new(theta, 0.1, 3).unwrap();
        assert!((spec.angle() - frac(3.0 * theta)).abs() < 1e-15);
        let rev = RieffelProjectionSpec::reversed(theta, 0.05, 2).unwrap();
        assert!((rev.angle() - (1.0 - frac(2.0 * theta))).abs() < 1e-15);
        let p = build_rieffel_projection(&rev, 1024).unwrap();
        assert!(p.is_projection(1e-10).is_projection);
    }
}
