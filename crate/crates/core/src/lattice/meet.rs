use serde::Serialize;
use serde_json::json;

use super::fiber::{grid_limit, FiberSettings};
use super::interval::IntervalSet;
use crate::crossed::{build_rieffel_projection, BandedElement, RieffelProjectionSpec};
use crate::flow::BrownianPath;
use crate::{frac, Error, Result};

/// Fibers larger than this are treated as a failure of the banded picture.
pub const MAX_FIBER_SITES: usize = 512;

#[derive(Debug, Clone)]
pub struct MeetReport {
    pub result: BandedElement,
    /// Largest number of squarings used on any fiber.
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
}

impl MeetReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "converged": self.converged,
            "bands": self.result.band_indices(),
        })
    }
}

/// `lim (E₁⋯E_r)^{2^j}`, which converges to the meet of the projections.
pub fn meet_iterative(factors: &[BandedElement], max_iter: usize, tol: f64) -> Result<MeetReport> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("meet of an empty family".into()));
    }
    let refs: Vec<&BandedElement> = factors.iter().collect();
    let cfg = FiberSettings {
        max_iter,
        tol,
        max_sites: MAX_FIBER_SITES,
    };
    let (result, iterations, final_residual) = grid_limit(&refs, &cfg)?;
    Ok(MeetReport {
        result,
        iterations,
        final_residual,
        converged: final_residual < tol,
    })
}

/// `P ∧ Q` through the squaring schedule `PQ, (PQ)², (PQ)⁴, …`.
pub fn meet_pair_iterative(p: &BandedElement, q: &BandedElement, max_iter: usize, tol: f64) -> Result<MeetReport> {
    meet_iterative(&[p.clone(), q.clone()], max_iter, tol)
}

/// Closed-form meet of two translates of the trapezoid projection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ClosedMeet {
    /// `χ_S(U)`.
    Indicator(IntervalSet),
    /// Both translates coincide, so the meet is the translate itself.
    Same { s: f64, t: f64 },
}

impl ClosedMeet {
    pub fn to_banded(&self, spec: &RieffelProjectionSpec, grid: usize) -> Result<BandedElement> {
        match self {
            ClosedMeet::Indicator(set) => BandedElement::diagonal(spec.context()?, set.indicator(grid)?),
            ClosedMeet::Same { s, t } => Ok(build_rieffel_projection(spec, grid)?.translate_action(*s, *t)),
        }
    }
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

/// `{f₁ = 0}` for the trapezoid.
pub fn f1_zero_set(spec: &RieffelProjectionSpec) -> IntervalSet {
    let v = spec.angle();
    IntervalSet::arc(v, v + spec.epsilon).complement()
}

/// `{f₀ = 1}` for the trapezoid.
pub fn f0_one_set(spec: &RieffelProjectionSpec) -> IntervalSet {
    IntervalSet::arc(spec.epsilon, spec.angle())
}

/// `S = X₁ ∩ X₂ ∩ X₃ ∩ X₄` with `X₁ = τ_{−s}{f₁=0}`, `X₂ = τ_{−s′}{f₁=0}`,
/// `X₃ = τ_{−s}{f₀=1}`, `X₄ = τ_{−s′}{f₀=1}`.
pub fn meet_closed_form(spec: &RieffelProjectionSpec, s: f64, t: f64, s2: f64, t2: f64) -> Result<ClosedMeet> {
    spec.validate()?;
    let gap = circle_distance(s, s2);
    let limit = spec.epsilon / 4.0;
    if gap >= limit {
        return Err(Error::ChiHypothesisViolated { gap, limit });
    }
    if s == s2 && t == t2 {
        return Ok(ClosedMeet::Same { s, t });
    }
    let zero = f1_zero_set(spec);
    let one = f0_one_set(spec);
    let set = zero
        .translate(-s)
        .intersect(&zero.translate(-s2))
        .intersect(&one.translate(-s))
        .intersect(&one.translate(-s2));
    Ok(ClosedMeet::Indicator(set))
}

/// The meet along a sampled path together with the survival flag of a
/// state angle.
#[derive(Debug, Clone)]
pub struct PathMeet {
    pub set: IntervalSet,
    pub survived: bool,
    /// Bridge refinements applied before the increments were small enough.
    pub refinements: u32,
    pub path: BrownianPath,
}

/// `∩_i τ_{−W_{s_i}}{f₀=1}` over the sample times of the first path
/// coordinate, refining the path by Brownian bridges (at most `levels`
/// times) until every increment is below `ε/4`.
pub fn meet_along_path(
    spec: &RieffelProjectionSpec,
    path: &BrownianPath,
    levels: u32,
    state_angle: f64,
) -> Result<PathMeet> {
    spec.validate()?;
    let limit = spec.epsilon / 4.0;
    let mut current = path.clone();
    let mut refinements = 0;
    while current.max_increment(0) >= limit {
        if refinements >= levels {
            return Err(Error::PathTooRough { limit, levels });
        }
        current = current.refine();
        refinements += 1;
    }
    let set = intersect_translates(spec, current.component(0).iter().copied());
    Ok(PathMeet {
        survived: set.contains(state_angle),
        set,
        refinements,
        path: current,
    })
}

/// `∩ τ_{−w}{f₀=1}` over the given shifts.
pub fn intersect_translates<I: IntoIterator<Item = f64>>(spec: &RieffelProjectionSpec, shifts: I) -> IntervalSet {
    let one = f0_one_set(spec);
    let mut set = IntervalSet::full();
    for w in shifts {
        set = set.intersect(&one.translate(-w));
        if set.is_empty() {
            break;
        }
    }
    set
}

/// `r·p = r` within `tol`, i.e. `r ≤ p` for projections.
pub fn is_dominated(r: &BandedElement, p: &BandedElement, tol: f64) -> Result<bool> {
    Ok(r.mul(p)?.sup_diff(r) < tol)
}
