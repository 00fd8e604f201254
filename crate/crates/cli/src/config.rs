use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::Failure;

/// How `ε` is chosen for a projection of angle `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonPolicy {
    /// Fixed value.
    Value(f64),
    /// `"half"` means `ε = v/2`.
    Named(EpsilonName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonName {
    Half,
}

impl EpsilonPolicy {
    pub fn resolve(&self, angle: f64) -> f64 {
        match *self {
            EpsilonPolicy::Value(e) => e,
            EpsilonPolicy::Named(EpsilonName::Half) => angle / 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct General {
    pub theta: f64,
    pub grid: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for General {
    fn default() -> Self {
        Self {
            theta: (5f64.sqrt() - 1.0) / 2.0,
            grid: 4096,
            seed: 20240517,
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionSection {
    pub epsilon: EpsilonPolicy,
    pub scale_k: u64,
    pub tolerance: f64,
}

impl Default for ProjectionSection {
    fn default() -> Self {
        Self {
            epsilon: EpsilonPolicy::Named(EpsilonName::Half),
            scale_k: 1,
            tolerance: 1e-10,
        }
    }
}

/// One `(s, t, s′, t′)` row of the meet demo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeetCase {
    pub s: f64,
    pub t: f64,
    pub s2: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeetSection {
    pub grid: usize,
    pub max_iter: usize,
    pub tolerance: f64,
    /// Random admissible rows drawn from the master seed.
    pub random_cases: usize,
    pub cases: Vec<MeetCase>,
}

impl Default for MeetSection {
    fn default() -> Self {
        Self {
            grid: 2048,
            max_iter: 500,
            tolerance: 1e-6,
            random_cases: 20,
            cases: vec![
                MeetCase {
                    s: 0.1,
                    t: 0.2,
                    s2: 0.12,
                    t2: 0.7,
                },
                // forced violation of |s − s′| < ε/4
                MeetCase {
                    s: 0.1,
                    t: 0.0,
                    s2: 0.4,
                    t2: 0.0,
                },
                MeetCase {
                    s: 0.3,
                    t: 0.5,
                    s2: 0.3,
                    t2: 0.5,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupSection {
    pub t: f64,
    pub sigma2: f64,
    pub n_paths: usize,
    /// Monomials `UᵐVⁿ` to test, as `[m, n]` pairs.
    pub monomials: Vec<[i64; 2]>,
}

impl Default for SemigroupSection {
    fn default() -> Self {
        Self {
            t: 0.05,
            sigma2: 1.0,
            n_paths: 100_000,
            monomials: vec![[1, 0], [0, 1], [1, 1], [2, -1]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExitSection {
    pub sigma2: f64,
    pub n_paths: usize,
    /// Requested time step; omitted means automatic.
    pub dt: Option<f64>,
    /// Explicit `k_n`; empty means the first `convergents` denominators.
    pub ks: Vec<u64>,
    pub convergents: usize,
    pub with_operator: bool,
}

impl Default for ExitSection {
    fn default() -> Self {
        Self {
            sigma2: 2.0,
            n_paths: 10_000,
            dt: None,
            ks: Vec::new(),
            convergents: 6,
            with_operator: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSection {
    /// JSON spec files; empty means the bundled examples.
    pub specs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub general: General,
    pub projection: ProjectionSection,
    pub meet: MeetSection,
    pub semigroup: SemigroupSection,
    pub exit: ExitSection,
    pub generators: GeneratorSection,
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn check_grid(name: &str, n: usize) -> Result<(), Failure> {
    if n < 8 || !n.is_power_of_two() {
        return Err(invalid(format!("{name} must be a power of two >= 8, got {n}")));
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<(), Failure> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(invalid(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Failure::Input(msg) => invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let g = &self.general;
        if !(g.theta > 0.0 && g.theta < 1.0) {
            return Err(invalid(format!("general.theta must lie in (0,1), got {}", g.theta)));
        }
        check_grid("general.grid", g.grid)?;
        check_grid("meet.grid", self.meet.grid)?;
        let p = &self.projection;
        if let EpsilonPolicy::Value(e) = p.epsilon {
            if !e.is_finite() {
                return Err(invalid("projection.epsilon must be finite"));
            }
        }
        if p.scale_k == 0 {
            return Err(invalid("projection.scale_k must be positive"));
        }
        positive("projection.tolerance", p.tolerance)?;
        positive("meet.tolerance", self.meet.tolerance)?;
        if self.meet.max_iter == 0 {
            return Err(invalid("meet.max_iter must be positive"));
        }
        let s = &self.semigroup;
        if !(s.t >= 0.0 && s.t.is_finite()) {
            return Err(invalid(format!("semigroup.t must be non-negative, got {}", s.t)));
        }
        positive("semigroup.sigma2", s.sigma2)?;
        if s.n_paths < 100 {
            return Err(invalid(format!("semigroup.n_paths must be at least 100, got {}", s.n_paths)));
        }
        let x = &self.exit;
        positive("exit.sigma2", x.sigma2)?;
        if x.n_paths < 2 {
            return Err(invalid(format!("exit.n_paths must be at least 2, got {}", x.n_paths)));
        }
        if let Some(dt) = x.dt {
            positive("exit.dt", dt)?;
        }
        if x.ks.is_empty() && x.convergents < 4 {
            return Err(invalid("exit.convergents must be at least 4 for the fit"));
        }
        if !x.ks.is_empty() && x.ks.len() < 4 {
            return Err(invalid("exit.ks needs at least 4 entries for the fit"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
        cfg.validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = ExperimentConfig::parse("[general]\ntheta = 0.3\n[projection]\nepsilon = 0.05\n").unwrap();
        assert_eq!(cfg.general.theta, 0.3);
        assert_eq!(cfg.projection.epsilon, EpsilonPolicy::Value(0.05));
        assert_eq!(cfg.exit, ExitSection::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::parse("[general]\nthetta = 0.3\n").is_err());
    }

    #[test]
    fn bad_values_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.general.grid = 1000;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.general.theta = 1.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn epsilon_policy() {
        assert_eq!(EpsilonPolicy::Named(EpsilonName::Half).resolve(0.4), 0.2);
        assert_eq!(EpsilonPolicy::Value(0.1).resolve(0.4), 0.1);
    }
}
