use serde::{Deserialize, Serialize};

use super::linalg::{hermitian_defect, matrix_from_rows, min_hermitian_eigenvalue, min_singular_value, psd_sqrt, CMatrix};
use super::{INVERTIBLE_TOL, PSD_TOL};
use crate::{Complex64, Error, Result};

/// `l(aⁱᵢ) = zᵢ` and `l(aⁱ*ᵢ aʲⱼ) = Aᵢⱼ` on `O_θ(2n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OThetaGeneratorSpec {
    pub n: usize,
    pub z: Vec<Complex64>,
    pub a: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OThetaVerdict {
    pub valid: bool,
    pub qbm: bool,
    pub biinvariant: bool,
    pub b: Vec<Vec<Complex64>>,
    pub b_min_eigenvalue: f64,
    pub b_min_singular_value: f64,
    pub reasons: Vec<String>,
}

impl OThetaGeneratorSpec {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn a_matrix(&self) -> Result<CMatrix> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if self.z.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "z has {} entries, expected {}",
                self.z.len(),
                self.dim()
            )));
        }
        matrix_from_rows(&self.a, self.dim(), self.dim(), "A")
    }

    /// `B = [Aᵢⱼ − conj(zᵢ) − zⱼ]`.
    pub fn b_matrix(&self) -> Result<CMatrix> {
        let a = self.a_matrix()?;
        Ok(CMatrix::from_fn(self.dim(), self.dim(), |i, j| a[(i, j)] - self.z[i].conj() - self.z[j]))
    }
}

pub fn check_otheta_generator(g: &OThetaGeneratorSpec) -> Result<OThetaVerdict> {
    let a = g.a_matrix()?;
    let b = g.b_matrix()?;
    let mut reasons = Vec::new();
    if let Some(i) = g.z.iter().position(|z| z.re > 0.0) {
        reasons.push(format!("Re z[{i}] = {} > 0", g.z[i].re));
    }
    if let Some(i) = (0..g.dim()).find(|&i| a[(i, i)].norm() > PSD_TOL) {
        reasons.push(format!("A[{i}][{i}] = {} is not zero", a[(i, i)]));
    }
    let defect = hermitian_defect(&b);
    if defect > PSD_TOL {
        reasons.push(format!("B is not Hermitian (defect {defect:e})"));
    }
    let b_min_eigenvalue = min_hermitian_eigenvalue(&b);
    if b_min_eigenvalue < -PSD_TOL {
        reasons.push(format!("B has eigenvalue {b_min_eigenvalue:e} < 0"));
    }
    let b_min_singular_value = min_singular_value(&b);
    let valid = reasons.is_empty();
    let z0 = g.z[0];
    let biinvariant = g
        .z
        .iter()
        .all(|z| (z - z0).norm() <= PSD_TOL && z.im.abs() <= PSD_TOL && z.re <= 0.0);
    Ok(OThetaVerdict {
        valid,
        qbm: valid && b_min_singular_value > INVERTIBLE_TOL,
        biinvariant,
        b: super::linalg::matrix_to_rows(&b),
        b_min_eigenvalue,
        b_min_singular_value,
        reasons,
    })
}

/// A generator letter `aⁱᵢ` or its adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Letter {
    pub index: usize,
    pub star: bool,
}

impl Letter {
    pub fn plain(index: usize) -> Self {
        Self { index, star: false }
    }

    pub fn starred(index: usize) -> Self {
        Self { index, star: true }
    }

    pub fn adjoint(self) -> Self {
        Self {
            index: self.index,
            star: !self.star,
        }
    }

    pub fn label(&self) -> String {
        if self.star {
            format!("a{}*", self.index + 1)
        } else {
            format!("a{}", self.index + 1)
        }
    }
}

/// Gaussian extension of `(z, A)` through the cocycle `η(aⁱᵢ) = P eᵢ`,
/// `η(aⁱ*ᵢ) = −η(aⁱᵢ)`, with every letter having counit 1.
#[derive(Debug, Clone)]
pub struct SchurmannTriple {
    pub p: CMatrix,
    z: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordValue {
    pub word: String,
    pub value: Complex64,
}

impl SchurmannTriple {
    fn eta(&self, l: Letter) -> Vec<Complex64> {
        let col: Vec<Complex64> = self.p.column(l.index).iter().copied().collect();
        if l.star {
            col.into_iter().map(|c| -c).collect()
        } else {
            col
        }
    }

    fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn letter_value(&self, l: Letter) -> Complex64 {
        if l.star {
            self.z[l.index].conj()
        } else {
            self.z[l.index]
        }
    }

    /// `l(w₁⋯w_k) = Σ l(wᵢ) + Σ_{i<j} ⟨η(wᵢ*), η(wⱼ)⟩`.
    pub fn eval_word(&self, word: &[Letter]) -> Complex64 {
        let mut total: Complex64 = word.iter().map(|&l| self.letter_value(l)).sum();
        for i in 0..word.len() {
            let left = self.eta(word[i].adjoint());
            for &w in &word[i + 1..] {
                total += Self::inner(&left, &self.eta(w));
            }
        }
        total
    }

    fn letters(&self) -> Vec<Letter> {
        (0..self.z.len()).flat_map(|i| [Letter::plain(i), Letter::starred(i)]).collect()
    }

    /// Values on every word of length one and two.
    pub fn table(&self) -> Vec<WordValue> {
        let letters = self.letters();
        let mut out: Vec<WordValue> = letters
            .iter()
            .map(|&l| WordValue {
                word: l.label(),
                value: self.eval_word(&[l]),
            })
            .collect();
        for &a in &letters {
            for &b in &letters {
                out.push(WordValue {
                    word: format!("{}{}", a.label(), b.label()),
                    value: self.eval_word(&[a, b]),
                });
            }
        }
        out
    }

    /// Largest violation of the third-order Gaussian identity on all
    /// length-3 words (all counits equal 1).
    pub fn third_order_residual(&self) -> f64 {
        let letters = self.letters();
        let mut worst: f64 = 0.0;
        for &a in &letters {
            for &b in &letters {
                for &c in &letters {
                    let lhs = self.eval_word(&[a, b, c]);
                    let rhs = self.eval_word(&[a, b]) - self.eval_word(&[c]) + self.eval_word(&[b, c])
                        - self.eval_word(&[a])
                        + self.eval_word(&[a, c])
                        - self.eval_word(&[b]);
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }

    /// `max |l(aⁱ*ᵢ aʲⱼ) − Aᵢⱼ|`.
    pub fn reconstruction_error(&self, g: &OThetaGeneratorSpec) -> Result<f64> {
        let a = g.a_matrix()?;
        let mut worst: f64 = 0.0;
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                let v = self.eval_word(&[Letter::starred(i), Letter::plain(j)]);
                worst = worst.max((v - a[(i, j)]).norm());
            }
        }
        Ok(worst)
    }
}

pub fn build_otheta_schurmann(g: &OThetaGeneratorSpec) -> Result<SchurmannTriple> {
    let b = g.b_matrix()?;
    let p = psd_sqrt(&b, PSD_TOL)?;
    Ok(SchurmannTriple { p, z: g.z.clone() })
}
