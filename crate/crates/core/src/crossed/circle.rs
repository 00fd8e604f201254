//! Functions on the circle `[0,1) mod 1`, the coefficients `f_k(U)` of
//! banded elements.
//!
//! A [`CircleFunction`] always carries samples on the uniform grid `j/N`.
//! When it was built analytically it also carries an [`ExactForm`], and
//! every evaluation (including at off-grid, θ-shifted points) goes through
//! the exact form. Without one, off-grid values are linearly interpolated.

use std::fmt::Write as _;

use crate::{frac, unit_phase, Complex64, Error, Result};

pub const DEFAULT_GRID: usize = 4096;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Real-valued piece shapes on a half-open interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PieceKind {
    Constant(f64),
    /// `value + slope·(t − origin)`.
    Linear { origin: f64, value: f64, slope: f64 },
    /// `√(κ (t − r1)(r2 − t))`, clamped at zero.
    SqrtQuadratic { kappa: f64, r1: f64, r2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub kind: PieceKind,
}

impl Piece {
    fn value(&self, t: f64) -> f64 {
        match self.kind {
            PieceKind::Constant(c) => c,
            PieceKind::Linear {
                origin,
                value,
                slope,
            } => value + slope * (t - origin),
            PieceKind::SqrtQuadratic { kappa, r1, r2 } => (kappa * (t - r1) * (r2 - t)).max(0.0).sqrt(),
        }
    }

    fn integral(&self) -> f64 {
        let (a, b) = (self.start, self.end);
        match self.kind {
            PieceKind::Constant(c) => c * (b - a),
            PieceKind::Linear {
                origin,
                value,
                slope,
            } => value * (b - a) + 0.5 * slope * ((b - origin).powi(2) - (a - origin).powi(2)),
            PieceKind::SqrtQuadratic { kappa, r1, r2 } => {
                // √κ ∫ √(R² − y²) dy with y = t − mid
                let mid = 0.5 * (r1 + r2);
                let rad = 0.5 * (r2 - r1);
                let anti = |t: f64| {
                    // snap the endpoints, asin is too steep near ±1 to absorb rounding
                    let y = if t >= r2 {
                        rad
                    } else if t <= r1 {
                        -rad
                    } else {
                        (t - mid).clamp(-rad, rad)
                    };
                    0.5 * (y * (rad * rad - y * y).max(0.0).sqrt() + rad * rad * (y / rad).asin())
                };
                let lo = a.max(r1);
                let hi = b.min(r2);
                if hi <= lo {
                    0.0
                } else {
                    kappa.sqrt() * (anti(hi) - anti(lo))
                }
            }
        }
    }
}

/// Analytic description of a circle function.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactForm {
    /// `x ↦ scale · p(frac(x + shift))` with `p` given by disjoint pieces on
    /// `[0,1)` and zero elsewhere.
    Piecewise {
        pieces: Vec<Piece>,
        shift: f64,
        scale: Complex64,
    },
    /// Trigonometric polynomial `Σ c_m e^{2πimx}`.
    Trig(Vec<(i64, Complex64)>),
}

impl ExactForm {
    pub fn piecewise(pieces: Vec<Piece>) -> Self {
        ExactForm::Piecewise {
            pieces,
            shift: 0.0,
            scale: Complex64::new(1.0, 0.0),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            ExactForm::Piecewise {
                pieces,
                shift,
                scale,
            } => {
                let t = frac(x + shift);
                pieces
                    .iter()
                    .find(|p| p.start <= t && t < p.end)
                    .map(|p| *scale * p.value(t))
                    .unwrap_or_else(czero)
            }
            ExactForm::Trig(modes) => modes
                .iter()
                .map(|&(m, c)| c * unit_phase(m as f64 * x))
                .sum(),
        }
    }

    /// `x ↦ f(x + s)`.
    pub fn translated(&self, s: f64) -> Self {
        match self {
            ExactForm::Piecewise {
                pieces,
                shift,
                scale,
            } => ExactForm::Piecewise {
                pieces: pieces.clone(),
                shift: shift + s,
                scale: *scale,
            },
            ExactForm::Trig(modes) => ExactForm::Trig(
                modes
                    .iter()
                    .map(|&(m, c)| (m, c * unit_phase(m as f64 * s)))
                    .collect(),
            ),
        }
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        match self {
            ExactForm::Piecewise {
                pieces,
                shift,
                scale,
            } => ExactForm::Piecewise {
                pieces: pieces.clone(),
                shift: *shift,
                scale: *scale * k,
            },
            ExactForm::Trig(modes) => {
                ExactForm::Trig(modes.iter().map(|&(m, c)| (m, c * k)).collect())
            }
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            ExactForm::Piecewise {
                pieces,
                shift,
                scale,
            } => ExactForm::Piecewise {
                pieces: pieces.clone(),
                shift: *shift,
                scale: scale.conj(),
            },
            ExactForm::Trig(modes) => {
                ExactForm::Trig(modes.iter().map(|&(m, c)| (-m, c.conj())).collect())
            }
        }
    }

    /// `∫₀¹ f`.
    pub fn integral(&self) -> Complex64 {
        match self {
            ExactForm::Piecewise { pieces, scale, .. } => {
                *scale * pieces.iter().map(Piece::integral).sum::<f64>()
            }
            ExactForm::Trig(modes) => modes
                .iter()
                .filter(|(m, _)| *m == 0)
                .map(|&(_, c)| c)
                .sum(),
        }
    }

    fn trig_product(a: &[(i64, Complex64)], b: &[(i64, Complex64)]) -> Self {
        let mut acc: std::collections::BTreeMap<i64, Complex64> = Default::default();
        for &(m, x) in a {
            for &(n, y) in b {
                *acc.entry(m + n).or_insert_with(czero) += x * y;
            }
        }
        ExactForm::Trig(acc.into_iter().filter(|(_, c)| c.norm() > 1e-15).collect())
    }
}

/// A function on the circle, sampled on `N` grid points `j/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    samples: Vec<Complex64>,
    exact: Option<ExactForm>,
}

pub(crate) fn check_grid(n: usize) -> Result<()> {
    if n >= 8 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidGrid(n))
    }
}

impl CircleFunction {
    pub fn from_exact(exact: ExactForm, n: usize) -> Result<Self> {
        check_grid(n)?;
        let samples = (0..n).map(|j| exact.eval(j as f64 / n as f64)).collect();
        Ok(Self {
            samples,
            exact: Some(exact),
        })
    }

    pub fn from_samples(samples: Vec<Complex64>) -> Result<Self> {
        check_grid(samples.len())?;
        Ok(Self {
            samples,
            exact: None,
        })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(n: usize, f: F) -> Result<Self> {
        check_grid(n)?;
        Self::from_samples((0..n).map(|j| f(j as f64 / n as f64)).collect())
    }

    pub fn constant(c: Complex64, n: usize) -> Result<Self> {
        Self::from_exact(ExactForm::Trig(vec![(0, c)]), n)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::from_exact(ExactForm::Trig(vec![]), n)
    }

    pub fn grid_len(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn exact(&self) -> Option<&ExactForm> {
        self.exact.as_ref()
    }

    pub fn grid_point(&self, j: usize) -> f64 {
        j as f64 / self.samples.len() as f64
    }

    /// Evaluate at any point, periodically.
    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.exact {
            Some(e) => e.eval(x),
            None => {
                let n = self.samples.len();
                let pos = frac(x) * n as f64;
                let i = (pos.floor() as usize) % n;
                let w = pos - pos.floor();
                self.samples[i] * (1.0 - w) + self.samples[(i + 1) % n] * w
            }
        }
    }

    /// `x ↦ f(x + s)`.
    pub fn translate(&self, s: f64) -> Self {
        match &self.exact {
            Some(e) => Self::from_exact(e.translated(s), self.grid_len()).expect("grid already valid"),
            None => {
                let n = self.grid_len();
                Self {
                    samples: (0..n).map(|j| self.eval(j as f64 / n as f64 + s)).collect(),
                    exact: None,
                }
            }
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|&v| v * k).collect(),
            exact: self.exact.as_ref().map(|e| e.scaled(k)),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v.conj()).collect(),
            exact: self.exact.as_ref().map(ExactForm::conj),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let exact = match (&self.exact, &other.exact) {
            (Some(ExactForm::Trig(a)), Some(ExactForm::Trig(b))) => {
                let mut all = a.clone();
                all.extend_from_slice(b);
                Some(ExactForm::trig_product(&all, &[(0, Complex64::new(1.0, 0.0))]))
            }
            _ => None,
        };
        Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            exact,
        }
    }

    /// `x ↦ f(x) · g(x − shift)`, the building block of banded products.
    pub fn mul_shifted(&self, other: &Self, shift: f64) -> Self {
        let n = self.grid_len();
        if let (Some(ExactForm::Trig(a)), Some(ExactForm::Trig(_))) = (&self.exact, &other.exact) {
            if let Some(ExactForm::Trig(b)) = other.exact.as_ref().map(|e| e.translated(-shift)) {
                return Self::from_exact(ExactForm::trig_product(a, &b), n).expect("grid already valid");
            }
        }
        let samples = (0..n)
            .map(|j| {
                let x = j as f64 / n as f64;
                self.samples[j] * other.eval(x - shift)
            })
            .collect();
        Self {
            samples,
            exact: None,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sup_diff(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `∫₀¹ f`, exact when an analytic form is present.
    pub fn integral(&self) -> Complex64 {
        match &self.exact {
            Some(e) => e.integral(),
            None => self.samples.iter().sum::<Complex64>() / self.grid_len() as f64,
        }
    }

    /// CSV with header `index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (j, v) in self.samples.iter().enumerate() {
            writeln!(out, "{j},{:e},{:e}", v.re, v.im).expect("writing to String");
        }
        out
    }
}
