//! Dimensions of the spaces of ε-derivations `η(ab) = η(a)ε(b) + ε(a)η(b)`,
//! computed as null spaces of the constraints coming from the degree-two
//! defining relations.

use serde::{Deserialize, Serialize};

use super::linalg::{null_space_dim, CMatrix};
use crate::{unit_phase, Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "group", content = "n", rename_all = "lowercase")]
pub enum QuantumGroup {
    Otheta(usize),
    Oplus(usize),
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DerivationDimension {
    pub group: QuantumGroup,
    /// `2n`, `n(2n−1)` or `2`.
    pub formula: usize,
    pub computed: usize,
}

impl QuantumGroup {
    pub fn formula_dim(&self) -> usize {
        match *self {
            QuantumGroup::Otheta(n) => 2 * n,
            QuantumGroup::Oplus(n) => n * (2 * n - 1),
            QuantumGroup::Torus => 2,
        }
    }
}

type Row = Vec<(usize, Complex64)>;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn assemble(rows: &[Row], unknowns: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows.len(), unknowns);
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            m[(r, c)] += v;
        }
    }
    m
}

/// Commutative torus: letters `U, V, U*, V*`, counit 1, relations
/// `UV = VU`, `UU* = U*U = 1`, `VV* = V*V = 1`.
fn torus_rows() -> (Vec<Row>, usize) {
    let (u, v, us, vs) = (0, 1, 2, 3);
    let d = |a: usize, b: usize| -> Row { vec![(a, one()), (b, one())] };
    let rows = vec![
        // η(UV) − η(VU)
        vec![(u, one()), (v, one()), (v, -one()), (u, -one())],
        d(u, us),
        d(us, u),
        d(v, vs),
        d(vs, v),
    ];
    (rows, 4)
}

/// Generic skew matrix used for the `O_θ` commutation phases.
fn skew_theta(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|m| {
            (0..dim)
                .map(|n| {
                    let f = |a: usize, b: usize| ((a as f64 + 1.0) * 0.754_877_666 + (b as f64 + 2.0).sqrt()).fract();
                    f(m, n) - f(n, m)
                })
                .collect()
        })
        .collect()
}

/// `O_θ(N)`: letters `u_{ij}` and `u_{ij}*`, counit `δᵢⱼ`, unitarity
/// `Σ_k u*_{ki}u_{kj} = δᵢⱼ = Σ_k u_{ik}u*_{jk}`, and
/// `u_{ij}u_{kl} = e^{2πi(θ_{ik} − θ_{jl})} u_{kl}u_{ij}` with its adjoint.
fn otheta_rows(n: usize) -> (Vec<Row>, usize) {
    let dim = 2 * n;
    let th = skew_theta(dim);
    let var = |i: usize, j: usize, star: bool| (if star { dim * dim } else { 0 }) + i * dim + j;
    let delta = |a: usize, b: usize| if a == b { one() } else { Complex64::default() };
    let mut rows = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            let mut r1 = Vec::new();
            let mut r2 = Vec::new();
            for k in 0..dim {
                // η(u*_{ki})δ_{kj} + δ_{ki}η(u_{kj})
                r1.push((var(k, i, true), delta(k, j)));
                r1.push((var(k, j, false), delta(k, i)));
                // η(u_{ik})δ_{jk} + δ_{ik}η(u*_{jk})
                r2.push((var(i, k, false), delta(j, k)));
                r2.push((var(j, k, true), delta(i, k)));
            }
            rows.push(r1);
            rows.push(r2);
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let c = unit_phase(th[i][k] - th[j][l]);
                    for (star, phase) in [(false, c), (true, c.conj())] {
                        let f = one() - phase;
                        rows.push(vec![
                            (var(i, j, star), f * delta(k, l)),
                            (var(k, l, star), f * delta(i, j)),
                        ]);
                    }
                }
            }
        }
    }
    (rows, 2 * dim * dim)
}

/// `O₊(N)`: self-adjoint letters `u_{ij}`, counit `δᵢⱼ`, relations
/// `Σ_k u_{ki}u_{kj} = δᵢⱼ = Σ_k u_{ik}u_{jk}`.
fn oplus_rows(n: usize) -> (Vec<Row>, usize) {
    let dim = 2 * n;
    let var = |i: usize, j: usize| i * dim + j;
    let mut rows = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            rows.push(vec![(var(j, i), one()), (var(i, j), one())]);
            rows.push(vec![(var(i, j), one()), (var(j, i), one())]);
        }
    }
    (rows, dim * dim)
}

pub fn epsilon_derivation_dim(group: QuantumGroup) -> Result<DerivationDimension> {
    let (rows, unknowns) = match group {
        QuantumGroup::Torus => torus_rows(),
        QuantumGroup::Otheta(n) | QuantumGroup::Oplus(n) if !(1..=4).contains(&n) => {
            return Err(Error::InvalidArgument(format!("n must be in 1..=4, got {n}")));
        }
        QuantumGroup::Otheta(n) => otheta_rows(n),
        QuantumGroup::Oplus(n) => oplus_rows(n),
    };
    Ok(DerivationDimension {
        group,
        formula: group.formula_dim(),
        computed: null_space_dim(&assemble(&rows, unknowns), 1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(epsilon_derivation_dim(QuantumGroup::Torus).unwrap().computed, 2);
        assert_eq!(epsilon_derivation_dim(QuantumGroup::Otheta(1)).unwrap().computed, 2);
        assert_eq!(epsilon_derivation_dim(QuantumGroup::Oplus(2)).unwrap().computed, 6);
    }

    #[test]
    fn theta_is_skew_and_generic() {
        let t = skew_theta(6);
        for i in 0..6 {
            assert_eq!(t[i][i], 0.0);
            for j in 0..6 {
                assert_eq!(t[i][j], -t[j][i]);
            }
        }
    }
}
