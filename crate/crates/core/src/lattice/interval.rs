use serde::{Deserialize, Serialize};

use crate::crossed::{CircleFunction, ExactForm, Piece, PieceKind};
use crate::{frac, Result};

/// Finite union of disjoint half-open arcs `[a, b)` of the circle `[0,1)`,
/// kept sorted. An arc crossing `0` is stored as two pieces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    arcs: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            arcs: vec![(0.0, 1.0)],
        }
    }

    /// The arc running counter-clockwise from `start` to `end`, both read
    /// mod 1 after `end` is taken relative to `start`.
    pub fn arc(start: f64, end: f64) -> Self {
        let len = end - start;
        if len <= 0.0 {
            return Self::empty();
        }
        if len >= 1.0 {
            return Self::full();
        }
        let a = frac(start);
        let b = a + len;
        if b <= 1.0 {
            Self::from_arcs(vec![(a, b)])
        } else {
            Self::from_arcs(vec![(0.0, b - 1.0), (a, 1.0)])
        }
    }

    /// Normalizes arbitrary arcs inside `[0,1]`: sorts, drops empties and
    /// merges overlaps.
    pub fn from_arcs(mut arcs: Vec<(f64, f64)>) -> Self {
        arcs.retain(|&(a, b)| b > a);
        arcs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Self { arcs: out }
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let x = frac(x);
        self.arcs.iter().any(|&(a, b)| a <= x && x < b)
    }

    /// `A + c`.
    pub fn translate(&self, c: f64) -> Self {
        let mut pieces = Vec::with_capacity(self.arcs.len() + 1);
        for &(a, b) in &self.arcs {
            pieces.extend(Self::arc(a + c, b + c).arcs);
        }
        Self::from_arcs(pieces)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a0, a1) = self.arcs[i];
            let (b0, b1) = other.arcs[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { arcs: out }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.arcs.clone();
        all.extend_from_slice(&other.arcs);
        Self::from_arcs(all)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        let mut cursor = 0.0;
        for &(a, b) in &self.arcs {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < 1.0 {
            out.push((cursor, 1.0));
        }
        Self { arcs: out }
    }

    /// `χ_A` as an exactly described circle function.
    pub fn indicator(&self, grid: usize) -> Result<CircleFunction> {
        let pieces = self
            .arcs
            .iter()
            .map(|&(a, b)| Piece {
                start: a,
                end: b,
                kind: PieceKind::Constant(1.0),
            })
            .collect();
        CircleFunction::from_exact(ExactForm::piecewise(pieces), grid)
    }
}
