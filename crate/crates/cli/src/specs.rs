//! JSON generator spec files for `generator-check`.
//!
//! A file holds one entry or an array of entries:
//!
//! ```json
//! {"name": "heat", "kind": "torus", "spec": {"l10": -1, "l01": -1, "l11": -2},
//!  "expect": {"gaussian_valid": true, "qbm": true}}
//! ```
//!
//! Numbers may be written as `x` or `[re, im]`. `expect` lists verdict
//! fields that must match; without it an entry passes when its verdict is
//! valid.

use std::path::Path;

use qbm_core::generators::{
    build_otheta_schurmann, check_oplus_generator, check_otheta_generator, check_torus_generator,
    epsilon_derivation_dim, solve_biinvariant_oplus, OPlusGeneratorSpec, OThetaGeneratorSpec, QuantumGroup,
    TorusGeneratorSpec,
};
use qbm_core::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::Failure;

pub const BUNDLED: [(&str, &str); 4] = [
    ("specs/torus.json", include_str!("../specs/torus.json")),
    ("specs/otheta.json", include_str!("../specs/otheta.json")),
    ("specs/oplus.json", include_str!("../specs/oplus.json")),
    ("specs/structure.json", include_str!("../specs/structure.json")),
];

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Number> for Complex64 {
    fn from(n: Number) -> Self {
        match n {
            Number::Real(x) => Complex64::new(x, 0.0),
            Number::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn vector(v: &[Number]) -> Vec<Complex64> {
    v.iter().map(|&x| x.into()).collect()
}

fn matrix(m: &[Vec<Number>]) -> Vec<Vec<Complex64>> {
    m.iter().map(|r| vector(r)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupName {
    Otheta,
    Oplus,
    Torus,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", content = "spec", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Torus {
        l10: Number,
        l01: Number,
        l11: Number,
    },
    Otheta {
        n: usize,
        z: Vec<Number>,
        a: Vec<Vec<Number>>,
    },
    Oplus {
        n: usize,
        l: Vec<Vec<Number>>,
        a: Vec<Vec<Number>>,
    },
    OplusBiinvariant {
        n: usize,
    },
    Derivations {
        group: GroupName,
        #[serde(default)]
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecEntry {
    pub name: String,
    pub spec: GeneratorSpec,
    pub expect: Option<Map<String, Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    kind: String,
    spec: Value,
    #[serde(default)]
    expect: Option<Map<String, Value>>,
}

impl TryFrom<RawEntry> for SpecEntry {
    type Error = serde_json::Error;

    fn try_from(raw: RawEntry) -> Result<Self, Self::Error> {
        let spec = serde_json::from_value(json!({"kind": raw.kind, "spec": raw.spec}))?;
        Ok(Self {
            name: raw.name,
            spec,
            expect: raw.expect,
        })
    }
}

/// Parses a spec file, reporting errors with the offending line.
pub fn parse(origin: &str, text: &str) -> Result<Vec<SpecEntry>, Failure> {
    // parse to a value first so syntax errors carry exact positions
    let value: Value = serde_json::from_str(text).map_err(|e| located(origin, text, e))?;
    let entries = match value {
        Value::Array(items) => items,
        other => vec![other],
    };
    entries
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value::<RawEntry>(v)
                .and_then(SpecEntry::try_from)
                .map_err(|e| Failure::Input(format!("{origin}: entry {i}: {e}{}", entry_line(text, i))))
        })
        .collect()
}

fn located(origin: &str, text: &str, e: serde_json::Error) -> Failure {
    let line = e.line();
    let snippet = text.lines().nth(line.saturating_sub(1)).unwrap_or("");
    Failure::Input(format!("{origin}:{line}:{}: {e}\n  | {snippet}", e.column()))
}

/// Line on which the `i`-th top-level `"name"` key appears, for context.
fn entry_line(text: &str, i: usize) -> String {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.contains("\"name\""))
        .nth(i)
        .map(|(n, l)| format!(" (near line {}: {})", n + 1, l.trim()))
        .unwrap_or_default()
}

pub fn load(path: &Path) -> Result<Vec<SpecEntry>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse(&path.display().to_string(), &text)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

/// Runs the checker for one entry and returns `(verdict, default_pass)`.
pub fn evaluate(spec: &GeneratorSpec) -> Result<(Value, bool), Failure> {
    let core = |e: qbm_core::Error| Failure::Input(e.to_string());
    Ok(match spec {
        GeneratorSpec::Torus { l10, l01, l11 } => {
            let v = check_torus_generator(&TorusGeneratorSpec::new((*l10).into(), (*l01).into(), (*l11).into()));
            (to_value(&v), v.gaussian_valid)
        }
        GeneratorSpec::Otheta { n, z, a } => {
            let g = OThetaGeneratorSpec {
                n: *n,
                z: vector(z),
                a: matrix(a),
            };
            let v = check_otheta_generator(&g).map_err(core)?;
            let mut value = to_value(&v);
            if v.valid {
                let s = build_otheta_schurmann(&g).map_err(core)?;
                value["schurmann_reconstruction_error"] = json!(s.reconstruction_error(&g).map_err(core)?);
                value["schurmann_third_order_residual"] = json!(s.third_order_residual());
            }
            (value, v.valid)
        }
        GeneratorSpec::Oplus { n, l, a } => {
            let g = OPlusGeneratorSpec {
                n: *n,
                l: matrix(l),
                a: matrix(a),
            };
            let v = check_oplus_generator(&g).map_err(core)?;
            (to_value(&v), v.valid)
        }
        GeneratorSpec::OplusBiinvariant { n } => {
            let sol = solve_biinvariant_oplus(*n).map_err(core)?;
            let mut value = to_value(&sol);
            value["solution_space"] = if sol.dimension == 0 {
                json!("{0}")
            } else {
                json!(format!("dimension {}", sol.dimension))
            };
            (value, sol.dimension == 0)
        }
        GeneratorSpec::Derivations { group, n } => {
            let g = match group {
                GroupName::Otheta => QuantumGroup::Otheta(*n),
                GroupName::Oplus => QuantumGroup::Oplus(*n),
                GroupName::Torus => QuantumGroup::Torus,
            };
            let d = epsilon_derivation_dim(g).map_err(core)?;
            (to_value(&d), d.computed == d.formula)
        }
    })
}

/// Fields of `expect` that differ from the verdict. Numbers compare within
/// `1e-9`.
pub fn mismatches(verdict: &Value, expect: &Map<String, Value>) -> Vec<String> {
    expect
        .iter()
        .filter(|(key, want)| {
            let got = &verdict[key.as_str()];
            match (got.as_f64(), want.as_f64()) {
                (Some(a), Some(b)) => (a - b).abs() > 1e-9,
                _ => got != *want,
            }
        })
        .map(|(key, want)| format!("{key}: expected {want}, got {}", verdict[key.as_str()]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_specs_parse() {
        for (origin, text) in BUNDLED {
            let entries = parse(origin, text).unwrap();
            assert!(!entries.is_empty(), "{origin}");
        }
    }

    #[test]
    fn numbers_accept_pairs() {
        let e = parse(
            "inline",
            r#"{"name": "x", "kind": "torus", "spec": {"l10": [-1, 0.5], "l01": -1, "l11": -2}}"#,
        )
        .unwrap();
        let GeneratorSpec::Torus { l10, .. } = e[0].spec else { panic!() };
        assert_eq!(Complex64::from(l10), Complex64::new(-1.0, 0.5));
    }

    #[test]
    fn syntax_error_names_the_line() {
        let err = parse("bad.json", "[\n  {\"name\": \"x\",\n   \"kind\": torus}\n]").unwrap_err();
        let Failure::Input(msg) = err else { panic!() };
        assert!(msg.starts_with("bad.json:3:"), "{msg}");
        assert!(msg.contains("\"kind\": torus"), "{msg}");
    }

    #[test]
    fn expectation_mismatch_listed() {
        let verdict = json!({"valid": true, "qbm": false, "dimension": 0});
        let expect: Map<String, Value> = serde_json::from_str(r#"{"valid": true, "qbm": true}"#).unwrap();
        assert_eq!(mismatches(&verdict, &expect).len(), 1);
    }
}
