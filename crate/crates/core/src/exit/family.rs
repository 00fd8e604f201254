use serde::Serialize;

use crate::crossed::RieffelProjectionSpec;
use crate::{frac, Error, Result};

const MAX_CONVERGENTS: usize = 20;

/// Distinct continued-fraction denominators `q₁ < q₂ < …` of `θ`.
pub fn convergents(theta: f64, count: usize) -> Result<Vec<u64>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidTheta(theta));
    }
    if count == 0 || count > MAX_CONVERGENTS {
        return Err(Error::InvalidArgument(format!(
            "count must be in 1..={MAX_CONVERGENTS}, got {count}"
        )));
    }
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut out = vec![1u64];
    let mut x = theta;
    let mut step = 0;
    while out.len() < count {
        step += 1;
        let r = x - x.floor();
        if r < 1e-9 {
            return Err(Error::RationalTheta(step));
        }
        x = 1.0 / r;
        let a = x.floor() as u64;
        let next = a * q + q_prev;
        q_prev = q;
        q = next;
        if out.last() != Some(&q) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Distance from `x` to the nearest integer.
pub fn nearest_integer_distance(x: f64) -> f64 {
    let f = frac(x);
    f.min(1.0 - f)
}

/// One projection of the shrinking family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExitMember {
    pub k: u64,
    /// `‖kθ‖`.
    pub v: f64,
    pub epsilon: f64,
    pub state_angle: f64,
    /// True when `{kθ} > 1/2`, so the projection is built along `V^{−k}`.
    pub reversed: bool,
}

impl ExitMember {
    pub fn half_width(&self) -> f64 {
        self.v / 4.0
    }

    pub fn spec(&self, theta: f64) -> Result<RieffelProjectionSpec> {
        if self.reversed {
            RieffelProjectionSpec::reversed(theta, self.epsilon, self.k)
        } else {
            RieffelProjectionSpec::new(theta, self.epsilon, self.k)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitFamily {
    pub theta: f64,
    pub members: Vec<ExitMember>,
}

impl ExitFamily {
    pub fn new(theta: f64, count: usize) -> Result<Self> {
        Self::from_ks(theta, &convergents(theta, count)?)
    }

    pub fn from_ks(theta: f64, ks: &[u64]) -> Result<Self> {
        let mut members = Vec::with_capacity(ks.len());
        for &k in ks {
            let f = frac(k as f64 * theta);
            let v = f.min(1.0 - f);
            if let Some(prev) = members.last().map(|m: &ExitMember| m.v) {
                if v >= prev {
                    return Err(Error::InvalidArgument(format!(
                        "‖kθ‖ must decrease along the family; k = {k} gives {v} after {prev}"
                    )));
                }
            }
            members.push(ExitMember {
                k,
                v,
                epsilon: v / 2.0,
                state_angle: 0.75 * v,
                reversed: f > 0.5,
            });
        }
        Ok(Self { theta, members })
    }

    pub fn golden(count: usize) -> Result<Self> {
        Self::new((5f64.sqrt() - 1.0) / 2.0, count)
    }

    /// One-member family with `θ = v` and `k = 1`, for probing a single
    /// projection angle directly.
    pub fn single_angle(v: f64) -> Result<Self> {
        if !(v > 0.0 && v <= 0.5) {
            return Err(Error::InvalidArgument(format!("angle must lie in (0, 1/2], got {v}")));
        }
        Self::from_ks(v, &[1])
    }

    pub fn ks(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_denominators_are_fibonacci() {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(convergents(theta, 8).unwrap(), vec![1, 2, 3, 5, 8, 13, 21, 34]);
    }

    #[test]
    fn single_angle_member() {
        let f = ExitFamily::single_angle(0.2).unwrap();
        let m = f.members[0];
        assert_eq!((m.k, m.reversed), (1, false));
        assert!((m.v - 0.2).abs() < 1e-15 && (m.epsilon - 0.1).abs() < 1e-15);
        assert!(ExitFamily::single_angle(0.7).is_err());
    }

    #[test]
    fn rational_theta_rejected() {
        let err = convergents(0.5, 4).unwrap_err();
        assert!(err.to_string().starts_with("rational theta"));
    }

    #[test]
    fn diophantine_bound() {
        for theta in [(5f64.sqrt() - 1.0) / 2.0, std::f64::consts::PI - 3.0, 2f64.sqrt() - 1.0] {
            let q = convergents(theta, 10).unwrap();
            for w in q.windows(2) {
                let d0 = nearest_integer_distance(w[0] as f64 * theta);
                let d1 = nearest_integer_distance(w[1] as f64 * theta);
                assert!(d1 < d0);
                assert!(d0 < 1.0 / w[1] as f64);
            }
        }
    }

    #[test]
    fn family_geometry() {
        let fam = ExitFamily::golden(6).unwrap();
        assert_eq!(fam.ks(), vec![1, 2, 3, 5, 8, 13]);
        for m in &fam.members {
            assert_eq!(m.epsilon, m.v / 2.0);
            let spec = m.spec(fam.theta).unwrap();
            assert!((spec.angle() - m.v).abs() < 1e-12);
        }
        assert!(fam.members[0].reversed);
        assert!(!fam.members[1].reversed);
    }
}
