use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{ExitFamily, ExitMember};
use crate::crossed::RieffelProjectionSpec;
use crate::flow::path_rng;
use crate::lattice::{f0_one_set, IntervalSet};
use crate::{Error, Result};

/// Survival below this level ends the operator-engine quadrature.
pub const SURVIVAL_CUTOFF: f64 = 1e-4;
/// Steps per unit `a²/σ²` when `dt` is not given.
pub const DEFAULT_STEPS_PER_SCALE: f64 = 2500.0;
/// Paths are abandoned after this many multiples of `a²/σ²`.
pub const HORIZON_SCALES: f64 = 60.0;
/// Maximum depth of bridge refinement inside a single step.
pub const MAX_REFINE_LEVELS: u32 = 12;

/// `E τ` for Brownian motion with variance `σ²t` leaving `[−a, a]` from 0.
pub fn exit_time_oracle_exact(a: f64, sigma2: f64) -> f64 {
    a * a / sigma2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Reduced,
    Operator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub n_paths: usize,
    /// Requested step; tightened so that `σ√dt ≤ a/50`.
    pub dt: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub dt: f64,
    /// Tail bound `S(T)·8a²/(σ²π²)` beyond the quadrature cut (operator).
    pub truncation_bound: f64,
    /// Truncation bound exceeds 1% of the estimate.
    pub truncation_flag: bool,
    /// Paths that never left before the hard horizon.
    pub censored_paths: usize,
}

/// Per-path outcome under both engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathOutcome {
    /// First monitored index outside `[−a, a)`.
    pub reduced_exit: usize,
    /// First monitored index where the state angle leaves the meet set.
    pub operator_exit: usize,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineComparison {
    pub reduced: GammaEstimate,
    pub operator: GammaEstimate,
    /// Paths whose survival indicators differ at some monitored time.
    pub mismatched_paths: usize,
    pub combined_stderr: f64,
}

impl EngineComparison {
    pub fn agrees(&self) -> bool {
        self.mismatched_paths == 0 && (self.reduced.gamma - self.operator.gamma).abs() < 3.0 * self.combined_stderr
    }
}

pub(crate) fn effective_dt(member: &ExitMember, sigma2: f64, requested: Option<f64>) -> f64 {
    let a = member.half_width();
    let cap = a * a / (sigma2 * DEFAULT_STEPS_PER_SCALE);
    requested.map_or(cap, |dt| dt.min(cap))
}

/// Monitored points of one path, produced step by step from its own
/// generator. Steps whose increment reaches `limit` are split by Brownian
/// bridges.
struct PathStream {
    rng: ChaCha8Rng,
    w: f64,
    sd: f64,
    var_step: f64,
    limit: f64,
    pending: Vec<f64>,
}

impl PathStream {
    fn new(rng: ChaCha8Rng, sigma2: f64, dt: f64, limit: f64) -> Self {
        Self {
            rng,
            w: 0.0,
            sd: (sigma2 * dt).sqrt(),
            var_step: sigma2 * dt,
            limit,
            pending: Vec::new(),
        }
    }

    fn bridge(&mut self, w0: f64, w1: f64, var: f64, depth: u32, out: &mut Vec<f64>) -> Result<()> {
        if (w1 - w0).abs() < self.limit {
            out.push(w1);
            return Ok(());
        }
        if depth >= MAX_REFINE_LEVELS {
            return Err(Error::PathTooRough {
                limit: self.limit,
                levels: MAX_REFINE_LEVELS,
            });
        }
        let z: f64 = self.rng.sample(StandardNormal);
        let mid = 0.5 * (w0 + w1) + (var / 4.0).sqrt() * z;
        self.bridge(w0, mid, var / 2.0, depth + 1, out)?;
        self.bridge(mid, w1, var / 2.0, depth + 1, out)
    }

    /// Values at the next step, including any bridge points in between.
    fn next_step(&mut self) -> Result<&[f64]> {
        let z: f64 = self.rng.sample(StandardNormal);
        let w1 = self.w + self.sd * z;
        let mut out = std::mem::take(&mut self.pending);
        out.clear();
        let w0 = self.w;
        self.bridge(w0, w1, self.var_step, 0, &mut out)?;
        self.w = w1;
        self.pending = out;
        Ok(&self.pending)
    }
}

/// Incremental meet `∩ τ_{−W_i}{f₀=1}` along one path.
struct MeetTracker {
    one: IntervalSet,
    set: IntervalSet,
    state: f64,
}

impl MeetTracker {
    fn new(spec: &RieffelProjectionSpec, state: f64) -> Self {
        let one = f0_one_set(spec);
        let set = one.clone();
        Self { one, set, state }
    }

    fn push(&mut self, w: f64) -> bool {
        if !self.set.is_empty() {
            self.set = self.set.intersect(&self.one.translate(-w));
        }
        self.set.contains(self.state)
    }
}

fn inside(w: f64, a: f64) -> bool {
    -a <= w && w < a
}

/// Runs one path until both engines have seen it leave.
fn simulate_path(
    member: &ExitMember,
    spec: &RieffelProjectionSpec,
    sigma2: f64,
    dt: f64,
    max_steps: usize,
    rng: ChaCha8Rng,
    with_operator: bool,
) -> Result<PathOutcome> {
    let a = member.half_width();
    let mut stream = PathStream::new(rng, sigma2, dt, spec.epsilon / 4.0);
    let mut tracker = with_operator.then(|| MeetTracker::new(spec, member.state_angle));
    let mut reduced_exit = None;
    let mut operator_exit = if with_operator { None } else { Some(0) };
    for step in 1..=max_steps {
        let points = stream.next_step()?;
        // a step counts as an exit if any monitored point inside it leaves
        let reduced_alive = points.iter().all(|&w| inside(w, a));
        if reduced_exit.is_none() && !reduced_alive {
            reduced_exit = Some(step);
        }
        if let (Some(t), None) = (tracker.as_mut(), operator_exit) {
            let mut alive = true;
            for &w in points {
                alive &= t.push(w);
            }
            if !alive {
                operator_exit = Some(step);
            }
        }
        if let (Some(r), Some(o)) = (reduced_exit, operator_exit) {
            return Ok(PathOutcome {
                reduced_exit: r,
                operator_exit: if with_operator { o } else { r },
                censored: false,
            });
        }
    }
    Ok(PathOutcome {
        reduced_exit: reduced_exit.unwrap_or(max_steps),
        operator_exit: operator_exit.unwrap_or(max_steps),
        censored: true,
    })
}

fn derive_seed(master: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn reduced_estimate(exits: &[usize], dt: f64, censored: usize) -> GammaEstimate {
    let taus: Vec<f64> = exits.iter().map(|&e| e as f64 * dt).collect();
    let (gamma, stderr) = mean_and_stderr(&taus);
    GammaEstimate {
        gamma,
        stderr,
        n_paths: exits.len(),
        dt,
        truncation_bound: 0.0,
        truncation_flag: false,
        censored_paths: censored,
    }
}

/// Trapezoid integral of the survival curve `S_i = #{e > i}/n`, stopped at
/// the first `i` with `S_i < SURVIVAL_CUTOFF`. Written per path so the
/// standard error comes from the same sum.
fn operator_estimate(exits: &[usize], dt: f64, a: f64, sigma2: f64, censored: usize) -> GammaEstimate {
    let n = exits.len();
    let mut sorted = exits.to_vec();
    sorted.sort_unstable();
    // survival at step i is the share of exits strictly beyond i
    let survival = |i: usize| (n - sorted.partition_point(|&e| e <= i)) as f64 / n as f64;
    let max_exit = *sorted.last().unwrap_or(&0);
    let mut cut = max_exit;
    for i in 0..=max_exit {
        if survival(i) < SURVIVAL_CUTOFF {
            cut = i;
            break;
        }
    }
    let contributions: Vec<f64> = exits
        .iter()
        .map(|&e| {
            // Σ_{i<cut} dt·(1{e>i} + 1{e>i+1})/2
            let full = e.min(cut) as f64;
            let upper = e.saturating_sub(1).min(cut) as f64;
            dt * 0.5 * (full + upper)
        })
        .collect();
    let (gamma, stderr) = mean_and_stderr(&contributions);
    let truncation_bound = survival(cut) * 8.0 * a * a / (sigma2 * PI * PI);
    GammaEstimate {
        gamma,
        stderr,
        n_paths: n,
        dt,
        truncation_bound,
        truncation_flag: truncation_bound > 0.01 * gamma,
        censored_paths: censored,
    }
}

fn run_paths(
    family: &ExitFamily,
    index: usize,
    mc: &McSettings,
    sigma2: f64,
    with_operator: bool,
) -> Result<(Vec<PathOutcome>, f64)> {
    let member = family
        .members
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("no family member {index}")))?;
    if mc.n_paths < 2 {
        return Err(Error::InvalidArgument("need at least two paths".into()));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma2 must be positive, got {sigma2}")));
    }
    let spec = member.spec(family.theta)?;
    let dt = effective_dt(member, sigma2, mc.dt);
    let a = member.half_width();
    let max_steps = (HORIZON_SCALES * exit_time_oracle_exact(a, sigma2) / dt).ceil() as usize;
    let seed = derive_seed(mc.seed, index);
    let outcomes = (0..mc.n_paths)
        .into_par_iter()
        .map(|p| simulate_path(member, &spec, sigma2, dt, max_steps, path_rng(seed, p as u64), with_operator))
        .collect::<Result<Vec<_>>>()?;
    Ok((outcomes, dt))
}

/// `γ_n` and its standard error from the chosen engine.
pub fn gamma_estimate(
    family: &ExitFamily,
    index: usize,
    engine: Engine,
    mc: &McSettings,
    sigma2: f64,
) -> Result<GammaEstimate> {
    let (outcomes, dt) = run_paths(family, index, mc, sigma2, engine == Engine::Operator)?;
    let censored = outcomes.iter().filter(|o| o.censored).count();
    let a = family.members[index].half_width();
    Ok(match engine {
        Engine::Reduced => reduced_estimate(&outcomes.iter().map(|o| o.reduced_exit).collect::<Vec<_>>(), dt, censored),
        Engine::Operator => operator_estimate(
            &outcomes.iter().map(|o| o.operator_exit).collect::<Vec<_>>(),
            dt,
            a,
            sigma2,
            censored,
        ),
    })
}

/// Both engines on the same paths.
pub fn compare_engines(family: &ExitFamily, index: usize, mc: &McSettings, sigma2: f64) -> Result<EngineComparison> {
    let (outcomes, dt) = run_paths(family, index, mc, sigma2, true)?;
    let censored = outcomes.iter().filter(|o| o.censored).count();
    let a = family.members[index].half_width();
    let reduced = reduced_estimate(&outcomes.iter().map(|o| o.reduced_exit).collect::<Vec<_>>(), dt, censored);
    let operator = operator_estimate(
        &outcomes.iter().map(|o| o.operator_exit).collect::<Vec<_>>(),
        dt,
        a,
        sigma2,
        censored,
    );
    let mismatched_paths = outcomes.iter().filter(|o| o.reduced_exit != o.operator_exit).count();
    let combined_stderr = reduced.stderr.hypot(operator.stderr);
    Ok(EngineComparison {
        reduced,
        operator,
        mismatched_paths,
        combined_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_values() {
        assert_eq!(exit_time_oracle_exact(1.0, 1.0), 1.0);
        let v = 0.2;
        assert!((exit_time_oracle_exact(v / 4.0, 2.0) - v * v / 32.0).abs() < 1e-18);
        assert!((exit_time_oracle_exact(0.6, 1.3) - 4.0 * exit_time_oracle_exact(0.3, 1.3)).abs() < 1e-15);
    }

    #[test]
    fn survival_quadrature_of_fixed_exits() {
        // every path leaves at step 4: ∫S = dt·(1 + 1 + 1 + 1/2)
        let est = operator_estimate(&[4, 4, 4], 0.5, 1.0, 2.0, 0);
        assert!((est.gamma - 0.5 * 3.5).abs() < 1e-15);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.truncation_bound, 0.0);
    }

    #[test]
    fn engines_agree_pathwise() {
        let fam = ExitFamily::from_ks((5f64.sqrt() - 1.0) / 2.0, &[2]).unwrap();
        let mc = McSettings {
            n_paths: 200,
            dt: None,
            seed: 9,
        };
        let cmp = compare_engines(&fam, 0, &mc, 2.0).unwrap();
        assert_eq!(cmp.mismatched_paths, 0);
        assert!(cmp.agrees());
    }

    #[test]
    fn deterministic_in_seed() {
        let fam = ExitFamily::golden(3).unwrap();
        let mc = McSettings {
            n_paths: 50,
            dt: None,
            seed: 3,
        };
        let a = gamma_estimate(&fam, 2, Engine::Reduced, &mc, 2.0).unwrap();
        let b = gamma_estimate(&fam, 2, Engine::Reduced, &mc, 2.0).unwrap();
        assert_eq!(a, b);
    }
}
