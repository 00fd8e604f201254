use serde::{Deserialize, Serialize};

use super::linalg::{
    hermitian_defect, matrix_from_rows, matrix_to_rows, min_hermitian_eigenvalue, min_singular_value, null_space_dim,
    CMatrix,
};
use super::{INVERTIBLE_TOL, PSD_TOL};
use crate::{Complex64, Error, Result};

/// Flattening of the pairs `(i, j)`, `1 ≤ i < j ≤ 2n`, into `0..n(2n−1)`.
///
/// Block `i` holds the `2n − i` pairs `(i, i+1), …, (i, 2n)` in order, and
/// blocks follow each other for `i = 1, …, 2n−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairIndex {
    dim: usize,
}

impl PairIndex {
    pub fn new(n: usize) -> Self {
        Self { dim: 2 * n }
    }

    pub fn len(&self) -> usize {
        self.dim * (self.dim - 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First flat index of block `i` (1-based).
    pub fn block_start(&self, i: usize) -> usize {
        (1..i).map(|r| self.dim - r).sum()
    }

    /// Flat index of `(i, j)` with `1 ≤ i < j ≤ 2n`.
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        (1 <= i && i < j && j <= self.dim).then(|| self.block_start(i) + (j - i - 1))
    }

    pub fn pair(&self, flat: usize) -> Option<(usize, usize)> {
        (1..self.dim).find_map(|i| {
            let start = self.block_start(i);
            (flat >= start && flat < start + self.dim - i).then(|| (i, i + 1 + flat - start))
        })
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len()).map(|f| self.pair(f).expect("in range")).collect()
    }
}

/// `L = [l(xᵢⱼ)]` and `A = [a_{(i,j,k,l)}]` on `O₊(2n)`, indices 1-based in
/// the formulas and 0-based in storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OPlusGeneratorSpec {
    pub n: usize,
    pub l: Vec<Vec<Complex64>>,
    pub a: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OPlusVerdict {
    pub valid: bool,
    pub qbm: bool,
    pub b: Vec<Vec<Complex64>>,
    pub b_min_eigenvalue: f64,
    pub b_min_singular_value: f64,
    /// Largest violation of the `Lᵢⱼ + Lⱼᵢ` constraint.
    pub constraint_residual: f64,
    pub reasons: Vec<String>,
}

impl OPlusGeneratorSpec {
    pub fn index(&self) -> PairIndex {
        PairIndex::new(self.n)
    }

    fn matrices(&self) -> Result<(CMatrix, CMatrix)> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let d = 2 * self.n;
        let p = self.index().len();
        Ok((matrix_from_rows(&self.l, d, d, "L")?, matrix_from_rows(&self.a, p, p, "A")?))
    }

    /// `L_ij` with 1-based indices.
    fn l_at(l: &CMatrix, i: usize, j: usize) -> Complex64 {
        l[(i - 1, j - 1)]
    }

    /// `a_{(i,j,k,l)}` with 1-based indices.
    fn a_at(idx: &PairIndex, a: &CMatrix, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let p = idx.index(i, j).expect("i < j");
        let q = idx.index(k, l).expect("k < l");
        a[(p, q)]
    }

    /// `B = [a_{(i,j,k,l)} − conj(Lᵢⱼ) − L_{kl}]` over flattened pairs.
    pub fn b_matrix(&self) -> Result<CMatrix> {
        let (l, a) = self.matrices()?;
        let idx = self.index();
        let pairs = idx.pairs();
        Ok(CMatrix::from_fn(pairs.len(), pairs.len(), |p, q| {
            let (i, j) = pairs[p];
            let (k, m) = pairs[q];
            a[(p, q)] - Self::l_at(&l, i, j).conj() - Self::l_at(&l, k, m)
        }))
    }

    /// Right-hand side of the `Lᵢⱼ + Lⱼᵢ` constraint for `i < j`:
    /// `−Σ_{k<i} a(k,i,k,j) + Σ_{i<k<j} a(i,k,k,j) − Σ_{k>j} a(i,k,j,k)`.
    pub fn constraint_rhs(&self, i: usize, j: usize) -> Result<Complex64> {
        let (_, a) = self.matrices()?;
        Ok(constraint_rhs_from(&self.index(), &a, i, j))
    }
}

fn constraint_rhs_from(idx: &PairIndex, a: &CMatrix, i: usize, j: usize) -> Complex64 {
    let d = idx.dim;
    let mut s = Complex64::default();
    for k in 1..i {
        s -= OPlusGeneratorSpec::a_at(idx, a, k, i, k, j);
    }
    for k in i + 1..j {
        s += OPlusGeneratorSpec::a_at(idx, a, i, k, k, j);
    }
    for k in j + 1..=d {
        s -= OPlusGeneratorSpec::a_at(idx, a, i, k, j, k);
    }
    s
}

pub fn check_oplus_generator(g: &OPlusGeneratorSpec) -> Result<OPlusVerdict> {
    let (l, a) = g.matrices()?;
    let idx = g.index();
    let b = g.b_matrix()?;
    let mut reasons = Vec::new();
    let mut constraint_residual: f64 = 0.0;
    let d = 2 * g.n;
    for i in 1..=d {
        for j in i + 1..=d {
            let lhs = OPlusGeneratorSpec::l_at(&l, i, j) + OPlusGeneratorSpec::l_at(&l, j, i);
            let r = (lhs - constraint_rhs_from(&idx, &a, i, j)).norm();
            constraint_residual = constraint_residual.max(r);
        }
    }
    if constraint_residual > PSD_TOL {
        reasons.push(format!("L_ij + L_ji constraint violated by {constraint_residual:e}"));
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
    Ok(OPlusVerdict {
        valid,
        qbm: valid && b_min_singular_value > INVERTIBLE_TOL,
        b: matrix_to_rows(&b),
        b_min_eigenvalue,
        b_min_singular_value,
        constraint_residual,
        reasons,
    })
}

/// Builds `(L, A)` from a Hermitian PSD `B` and free upper entries of `L`,
/// choosing the lower entries so that the constraint holds.
pub fn oplus_from_b(n: usize, b: &CMatrix, upper: &CMatrix) -> Result<OPlusGeneratorSpec> {
    let idx = PairIndex::new(n);
    let d = 2 * n;
    if b.nrows() != idx.len() || b.ncols() != idx.len() || upper.nrows() != d || upper.ncols() != d {
        return Err(Error::DimensionMismatch("B or L has the wrong shape".into()));
    }
    let pairs = idx.pairs();
    let a = CMatrix::from_fn(idx.len(), idx.len(), |p, q| {
        let (i, j) = pairs[p];
        let (k, m) = pairs[q];
        b[(p, q)] + upper[(i - 1, j - 1)].conj() + upper[(k - 1, m - 1)]
    });
    let mut l = upper.clone();
    for i in 1..=d {
        for j in i + 1..=d {
            l[(j - 1, i - 1)] = constraint_rhs_from(&idx, &a, i, j) - l[(i - 1, j - 1)];
        }
    }
    Ok(OPlusGeneratorSpec {
        n,
        l: matrix_to_rows(&l),
        a: matrix_to_rows(&a),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiinvariantSolution {
    pub n: usize,
    pub unknowns: usize,
    pub constraints: usize,
    /// Dimension of the space of `(L, G)` meeting every constraint.
    pub dimension: usize,
    /// Same system with the bi-invariance rows removed.
    pub dimension_without_biinvariance: usize,
}

/// Linear system in the unknowns `L = [l(xᵢⱼ)]` and the cocycle Gram
/// matrix `G` over flattened pairs, for a Gaussian generator on `O₊(2n)`.
///
/// The Gaussian ansatz is `l(xᵢⱼx_{kl}) = Lᵢⱼδ_{kl} + δᵢⱼL_{kl} + ⟨η(xᵢⱼ), η(x_{kl})⟩`,
/// with `η(xⱼᵢ) = −η(xᵢⱼ)` and `η(xᵢᵢ) = 0`.
struct BiinvariantSystem {
    d: usize,
    idx: PairIndex,
}

type Row = Vec<(usize, Complex64)>;

impl BiinvariantSystem {
    fn l_var(&self, i: usize, j: usize) -> usize {
        i * self.d + j
    }

    fn g_var(&self, p: usize, q: usize) -> usize {
        self.d * self.d + p * self.idx.len() + q
    }

    fn unknowns(&self) -> usize {
        self.d * self.d + self.idx.len() * self.idx.len()
    }

    /// `(sign, flat)` of `η(xᵢⱼ)` in the pair basis, 0-based inputs.
    fn eta(&self, i: usize, j: usize) -> Option<(f64, usize)> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Some((1.0, self.idx.index(i + 1, j + 1)?)),
            std::cmp::Ordering::Greater => Some((-1.0, self.idx.index(j + 1, i + 1)?)),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// `l(xᵢⱼ x_{kl})` as a linear form.
    fn second_order(&self, i: usize, j: usize, k: usize, l: usize) -> Row {
        let mut row = Vec::new();
        if k == l {
            row.push((self.l_var(i, j), Complex64::new(1.0, 0.0)));
        }
        if i == j {
            row.push((self.l_var(k, l), Complex64::new(1.0, 0.0)));
        }
        if let (Some((s1, p)), Some((s2, q))) = (self.eta(i, j), self.eta(k, l)) {
            row.push((self.g_var(p, q), Complex64::new(s1 * s2, 0.0)));
        }
        row
    }

    fn biinvariance_rows(&self) -> Vec<Row> {
        let d = self.d;
        let mut rows = Vec::new();
        // (l⊗id)Δ(xᵢⱼ) = (id⊗l)Δ(xᵢⱼ): coefficient of x_{pq} is L_{ip}δ_{jq} − δ_{ip}L_{qj}
        for i in 0..d {
            for j in 0..d {
                for p in 0..d {
                    for q in 0..d {
                        let mut row = Vec::new();
                        if j == q {
                            row.push((self.l_var(i, p), Complex64::new(1.0, 0.0)));
                        }
                        if i == p {
                            row.push((self.l_var(q, j), Complex64::new(-1.0, 0.0)));
                        }
                        rows.push(row);
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    rows.push(vec![(self.l_var(i, j), Complex64::new(1.0, 0.0))]);
                    for k in 0..d {
                        for l in 0..d {
                            if k != l {
                                rows.push(self.second_order(i, j, k, l));
                            }
                        }
                    }
                }
            }
        }
        rows
    }

    /// `Σ_k l(x_{ki} x_{kj}) = 0`, from `Σ_k x_{ki}x_{kj} = δᵢⱼ` and `l(1) = 0`.
    fn relation_rows(&self) -> Vec<Row> {
        let d = self.d;
        let mut rows = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut row = Vec::new();
                for k in 0..d {
                    row.extend(self.second_order(k, i, k, j));
                }
                rows.push(row);
            }
        }
        rows
    }

    fn matrix(&self, rows: &[Row]) -> CMatrix {
        let mut m = CMatrix::zeros(rows.len(), self.unknowns());
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }
}

pub fn solve_biinvariant_oplus(n: usize) -> Result<BiinvariantSolution> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!("n must be in 1..=4, got {n}")));
    }
    let sys = BiinvariantSystem {
        d: 2 * n,
        idx: PairIndex::new(n),
    };
    let relations = sys.relation_rows();
    let mut all = sys.biinvariance_rows();
    all.extend(relations.iter().cloned());
    let full = sys.matrix(&all);
    let relaxed = sys.matrix(&relations);
    Ok(BiinvariantSolution {
        n,
        unknowns: sys.unknowns(),
        constraints: all.len(),
        dimension: null_space_dim(&full, 1e-10),
        dimension_without_biinvariance: null_space_dim(&relaxed, 1e-10),
    })
}
