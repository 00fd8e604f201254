//! Exact fiberwise representation of banded elements.
//!
//! Over a point `x`, a banded element acts on the orbit `x + mθ` as the
//! matrix `M[m, m−k] = f_k(x + mθ)`. Products of banded elements become
//! matrix products on each orbit, and a finite set of sites closed under
//! all nonzero couplings is invariant, so powers and limits can be taken
//! on small matrices without any interpolation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::crossed::{BandedElement, CircleFunction};
use crate::{Complex64, Error, Result};

/// Outcome of the power iteration on one fiber.
#[derive(Debug, Clone)]
pub(crate) struct FiberLimit {
    /// `(k, r_k(x))` read off the row of site 0.
    pub bands: Vec<(i64, Complex64)>,
    pub iterations: usize,
    pub residual: f64,
}

pub(crate) struct FiberSettings {
    pub max_iter: usize,
    pub tol: f64,
    pub max_sites: usize,
}

fn component(factors: &[&BandedElement], x: f64, max_sites: usize) -> Result<Vec<i64>> {
    let theta = factors[0].context().theta();
    let mut seen = BTreeSet::from([0i64]);
    let mut queue = VecDeque::from([0i64]);
    while let Some(m) = queue.pop_front() {
        let y = x + m as f64 * theta;
        for e in factors {
            for (&k, f) in e.bands() {
                if k == 0 {
                    continue;
                }
                // row coupling m → m−k and column coupling m+k → m
                let links = [
                    (m - k, f.eval(y)),
                    (m + k, f.eval(y + k as f64 * theta)),
                ];
                for (site, value) in links {
                    if value.norm() > 0.0 && seen.insert(site) {
                        if seen.len() > max_sites {
                            return Err(Error::FiberTooLarge(max_sites));
                        }
                        queue.push_back(site);
                    }
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn fiber_matrix(e: &BandedElement, sites: &[i64], x: f64) -> DMatrix<Complex64> {
    let theta = e.context().theta();
    let index: BTreeMap<i64, usize> = sites.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut mat = DMatrix::zeros(sites.len(), sites.len());
    for (row, &m) in sites.iter().enumerate() {
        let y = x + m as f64 * theta;
        for (&k, f) in e.bands() {
            if let Some(&col) = index.get(&(m - k)) {
                mat[(row, col)] = f.eval(y);
            }
        }
    }
    mat
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `lim (E₁E₂⋯E_r)^{2^j}` on the fiber over `x`.
pub(crate) fn fiber_limit(factors: &[&BandedElement], x: f64, cfg: &FiberSettings) -> Result<FiberLimit> {
    let sites = component(factors, x, cfg.max_sites)?;
    let mut r = fiber_matrix(factors[0], &sites, x);
    for e in &factors[1..] {
        r = &r * fiber_matrix(e, &sites, x);
    }
    let mut iterations = 0;
    let mut residual;
    loop {
        let sq = &r * &r;
        residual = max_abs(&(&sq - &r));
        if residual < cfg.tol || iterations >= cfg.max_iter {
            break;
        }
        r = sq;
        iterations += 1;
    }
    let row = sites.iter().position(|&m| m == 0).expect("site 0 is in its component");
    let bands = sites
        .iter()
        .enumerate()
        .map(|(col, &m)| (-m, r[(row, col)]))
        .collect();
    Ok(FiberLimit {
        bands,
        iterations,
        residual,
    })
}

/// Runs [`fiber_limit`] on every grid point and assembles the result as a
/// banded element sampled on the grid.
pub(crate) fn grid_limit(
    factors: &[&BandedElement],
    cfg: &FiberSettings,
) -> Result<(BandedElement, usize, f64)> {
    let first = factors[0];
    for e in factors {
        if e.grid_len() != first.grid_len() || e.context() != first.context() {
            return Err(Error::DimensionMismatch("factors differ in grid or theta".into()));
        }
    }
    let n = first.grid_len();
    let limits: Vec<FiberLimit> = (0..n)
        .into_par_iter()
        .map(|j| fiber_limit(factors, j as f64 / n as f64, cfg))
        .collect::<Result<_>>()?;
    let mut columns: BTreeMap<i64, Vec<Complex64>> = BTreeMap::new();
    for (j, lim) in limits.iter().enumerate() {
        for &(k, v) in &lim.bands {
            columns.entry(k).or_insert_with(|| vec![Complex64::default(); n])[j] = v;
        }
    }
    let iterations = limits.iter().map(|l| l.iterations).max().unwrap_or(0);
    let residual = limits.iter().map(|l| l.residual).fold(0.0, f64::max);
    let bands = columns
        .into_iter()
        .filter(|(_, s)| s.iter().any(|v| v.norm() > 0.0))
        .map(|(k, s)| CircleFunction::from_samples(s).map(|f| (k, f)))
        .collect::<Result<Vec<_>>>()?;
    let result = if bands.is_empty() {
        BandedElement::zero(*first.context(), n)?
    } else {
        BandedElement::from_bands(*first.context(), bands)?
    };
    Ok((result, iterations, residual))
}
