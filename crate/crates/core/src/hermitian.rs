//! Hermitian matrices, vector systems and ordered k-partitions.

use num::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, LdlTerm};
use crate::poly::RealPoly;
use crate::scalar::{cabs2, c_to_f64, creal, C, C64, Scalar};

/// Rank threshold: eigenvalues below this fraction of the norm count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Float-mode slack of the `A ⪯ I` test.
pub const CONTRACTION_TOL: f64 = 1e-10;

/// Dense complex Hermitian matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Scalar> {
    dim: usize,
    entries: Vec<C<T>>,
}

impl<T: Scalar> HermitianMatrix<T> {
    /// Validates the Hermitian symmetry: exactly in exact mode, to `1e-12`
    /// relative in float mode (the float matrix is then symmetrized).
    pub fn new(dim: usize, entries: Vec<C<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let scale = entries
            .iter()
            .map(|z| c_to_f64(z).norm())
            .fold(0.0, f64::max);
        let mut entries = entries;
        for i in 0..dim {
            for j in i..dim {
                let a = entries[i * dim + j].clone();
                let b = entries[j * dim + i].conj();
                let gap = cabs2(&(a.clone() - b.clone()));
                if !gap.negligible(scale * scale) {
                    return Err(Error::InvalidInput(format!("matrix is not Hermitian at ({i},{j})")));
                }
                if !T::EXACT {
                    let avg = (a + b) / creal(T::int(2));
                    entries[i * dim + j] = avg.clone();
                    entries[j * dim + i] = avg.conj();
                }
            }
            if !T::EXACT {
                entries[i * dim + i].im = T::zero();
            }
        }
        Ok(HermitianMatrix { dim, entries })
    }

    /// Builds from the upper triangle of `f`; the lower triangle is mirrored.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C<T>) -> Self {
        let mut entries = vec![C::<T>::zero(); dim * dim];
        for i in 0..dim {
            let d = f(i, i);
            entries[i * dim + i] = creal(d.re);
            for j in i + 1..dim {
                let z = f(i, j);
                entries[j * dim + i] = z.conj();
                entries[i * dim + j] = z;
            }
        }
        HermitianMatrix { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| C::zero())
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, T::one())
    }

    pub fn scalar(dim: usize, c: T) -> Self {
        Self::from_fn(dim, |i, j| if i == j { creal(c.clone()) } else { C::zero() })
    }

    pub fn diagonal(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                creal(diag[i].clone())
            } else {
                C::zero()
            }
        })
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|x| creal(x.clone())))
            .collect();
        Self::new(n, entries)
    }

    /// `v v*`.
    pub fn rank_one(v: &[C<T>]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i].clone() * v[j].conj())
    }

    /// `Σ weight·v v*` over the terms.
    pub fn from_terms(dim: usize, terms: &[LdlTerm<T>]) -> Self {
        terms.iter().fold(Self::zeros(dim), |acc, t| {
            acc.plus(&Self::rank_one(&t.vector).scale(&t.weight))
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &C<T> {
        &self.entries[i * self.dim + j]
    }

    pub fn diag(&self, i: usize) -> T {
        self.get(i, i).re.clone()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.diag(i))
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matrix sum");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        HermitianMatrix { dim: self.dim, entries }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        let c = creal(c.clone());
        HermitianMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.clone() * c.clone()).collect(),
        }
    }

    /// Block-diagonal matrix `diag(B_1, …, B_n)`.
    pub fn block_diag(blocks: &[Self]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut entries = vec![C::<T>::zero(); dim * dim];
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    entries[(off + i) * dim + off + j] = b.get(i, j).clone();
                }
            }
            off += b.dim;
        }
        HermitianMatrix { dim, entries }
    }

    /// `diag(B, …, B)` with `copies` blocks.
    pub fn lift(&self, copies: usize) -> Self {
        Self::block_diag(&vec![self.clone(); copies])
    }

    /// Rows and columns at the given indices, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let n = idx.len();
        let mut entries = Vec::with_capacity(n * n);
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j).clone());
            }
        }
        HermitianMatrix { dim: n, entries }
    }

    /// `A(S_1 ∪ (m+S_2) ∪ …)` for an ordered k-partition of `[m]`.
    pub fn principal_submatrix(&self, s: &KPartition) -> Result<Self> {
        if self.dim != s.k() * s.m() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix with a {}-partition of [{}]",
                self.dim,
                self.dim,
                s.k(),
                s.m()
            )));
        }
        Ok(self.submatrix(&s.indices()))
    }

    /// `A(S_1 ∪ (m+S_2) ∪ …)` for an arbitrary tuple of subsets of `[m]`
    /// (the sets may overlap, as in the index tuples `T_{t,S}`).
    pub fn tuple_submatrix(&self, sets: &[Vec<usize>], m: usize) -> Result<Self> {
        if self.dim != sets.len() * m || sets.iter().flatten().any(|&i| i >= m) {
            return Err(Error::DimensionMismatch(format!(
                "{}-tuple of subsets of [{m}] on a {}x{} matrix",
                sets.len(),
                self.dim,
                self.dim
            )));
        }
        Ok(self.submatrix(&tuple_indices(sets, m)))
    }

    pub fn char_poly(&self) -> RealPoly<T> {
        RealPoly::new(T::char_poly(self.dim, &self.entries))
    }

    pub fn det(&self) -> T {
        if self.dim == 0 {
            return T::one();
        }
        T::det_hermitian(self.dim, &self.entries)
    }

    pub fn is_psd(&self) -> bool {
        T::psd(self.dim, &self.entries).0
    }

    /// Whether `A ⪯ I`.
    /// `A ⪯ I`: exactly in exact mode, `λ_max ≤ 1 + CONTRACTION_TOL` in float.
    pub fn is_contraction(&self) -> bool {
        if T::EXACT {
            Self::identity(self.dim).minus(self).is_psd()
        } else {
            self.max_eigenvalue() <= 1.0 + CONTRACTION_TOL
        }
    }

    pub fn to_f64(&self) -> HermitianMatrix<f64> {
        HermitianMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(c_to_f64).collect(),
        }
    }

    /// Eigenvalues (ascending) and eigenvectors, computed in float.
    pub fn eigh(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        linalg::eigh_f64(self.dim, &self.to_f64().entries)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().0
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Rank: pivot count in exact mode, eigenvalues above `RANK_TOL·‖A‖` in float mode.
    pub fn rank(&self) -> usize {
        if T::EXACT {
            return match linalg::ldl_pivoted(self.dim, &self.entries) {
                Ok(terms) => terms.len(),
                Err(_) => {
                    // Indefinite: fall back to the float spectrum.
                    self.to_f64().rank()
                }
            };
        }
        let eig = self.eigenvalues();
        let norm = eig.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        eig.iter().filter(|x| x.abs() > RANK_TOL * norm).count()
    }

    /// Pivoted LDL* rank-one terms `A = Σ w·v v*` (PSD inputs only).
    pub fn rank_one_terms(&self) -> Result<Vec<LdlTerm<T>>> {
        linalg::ldl_pivoted(self.dim, &self.entries).map_err(|w| Error::NotPsd { min_eig: w })
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|z| Value::Array(vec![z.re.to_json(), z.im.to_json()]))
            .collect();
        json!({ "dim": self.dim, "entries": entries })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dim = v["dim"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("matrix needs a \"dim\"".into()))? as usize;
        let entries = v["entries"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("matrix needs \"entries\"".into()))?
            .iter()
            .map(complex_from_json)
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, entries)
    }
}

pub fn complex_to_json<T: Scalar>(z: &C<T>) -> Value {
    Value::Array(vec![z.re.to_json(), z.im.to_json()])
}

pub fn complex_from_json<T: Scalar>(v: &Value) -> Result<C<T>> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(C::new(T::from_json(re)?, T::from_json(im)?)),
        _ => Err(Error::InvalidInput(format!("expected [re, im], got {v}"))),
    }
}

/// `det[xI - A]`.
pub fn char_poly<T: Scalar>(a: &HermitianMatrix<T>) -> RealPoly<T> {
    a.char_poly()
}

pub fn psd_check<T: Scalar>(a: &HermitianMatrix<T>) -> bool {
    a.is_psd()
}

pub fn operator_norm<T: Scalar>(a: &HermitianMatrix<T>) -> f64 {
    a.operator_norm()
}

/// Truncated spectral decomposition `X = Σ_j u_j u_j*` into exactly `k`
/// vectors (zero-padded), largest eigenvalue first, each eigenvector rotated
/// so its first non-negligible component is real and positive.
pub fn decompose_rank_k(x: &HermitianMatrix<f64>, k: usize) -> Result<Vec<Vec<C64>>> {
    let (eig, vecs) = x.eigh();
    let norm = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = eig.first().copied().unwrap_or(0.0);
    if min < -RANK_TOL * norm {
        return Err(Error::NotPsd { min_eig: min });
    }
    let keep: Vec<usize> = (0..eig.len())
        .rev()
        .filter(|&i| eig[i] > RANK_TOL * norm)
        .collect();
    if keep.len() > k {
        return Err(Error::RankTooHigh { rank: keep.len(), k });
    }
    let mut out: Vec<Vec<C64>> = keep
        .iter()
        .map(|&i| {
            let v = &vecs[i];
            let phase = v
                .iter()
                .find(|z| z.norm() > 1e-12)
                .map(|z| z.conj() / z.norm())
                .unwrap_or(C64::one());
            let s = eig[i].sqrt();
            v.iter().map(|z| z * phase * s).collect()
        })
        .collect();
    out.resize(k, vec![C64::zero(); x.dim()]);
    Ok(out)
}

/// Ordered k-tuple `(S_1, …, S_k)` of disjoint sets covering `[m]` (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPartition {
    m: usize,
    parts: Vec<Vec<usize>>,
}

impl KPartition {
    pub fn new(m: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; m];
        let mut parts = parts;
        for p in &mut parts {
            p.sort_unstable();
            for &i in p.iter() {
                if i >= m {
                    return Err(Error::InvalidPartition(format!("index {i} outside [0,{m})")));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!("index {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {i} is not covered")));
        }
        if parts.is_empty() {
            return Err(Error::InvalidPartition("a partition needs at least one part".into()));
        }
        Ok(KPartition { m, parts })
    }

    /// `S_j = {i : assignment[i] = j}`.
    pub fn from_assignment(assignment: &[usize], k: usize) -> Result<Self> {
        let mut parts = vec![Vec::new(); k];
        for (i, &j) in assignment.iter().enumerate() {
            if j >= k {
                return Err(Error::InvalidPartition(format!("part {j} outside [0,{k})")));
            }
            parts[j].push(i);
        }
        Ok(KPartition { m: assignment.len(), parts })
    }

    /// The partition at position `word` of the lexicographic enumeration of
    /// assignment words `(j_1, …, j_m)`, `j_1` most significant.
    pub fn from_word(word: u64, k: usize, m: usize) -> Self {
        let mut assignment = vec![0; m];
        word_to_assignment(word, k, &mut assignment);
        Self::from_assignment(&assignment, k).expect("digits are below k")
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn assignment(&self) -> Vec<usize> {
        let mut a = vec![0; self.m];
        for (j, p) in self.parts.iter().enumerate() {
            for &i in p {
                a[i] = j;
            }
        }
        a
    }

    /// Ascending index set `S_1 ∪ (m+S_2) ∪ … ∪ ((k-1)m+S_k)`.
    pub fn indices(&self) -> Vec<usize> {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(j, p)| p.iter().map(move |&i| i + j * self.m))
            .collect()
    }
}

/// Ascending indices `S_1 ∪ (m+S_2) ∪ …` of a tuple of sorted subsets of `[m]`.
pub fn tuple_indices(sets: &[Vec<usize>], m: usize) -> Vec<usize> {
    sets.iter()
        .enumerate()
        .flat_map(|(j, p)| p.iter().map(move |&i| i + j * m))
        .collect()
}

/// Decodes a lexicographic word into base-`k` digits, most significant first.
pub fn word_to_assignment(mut word: u64, k: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = (word % k as u64) as usize;
        word /= k as u64;
    }
}

/// The vectors `u_{i,j} ∈ ℂ^d`, `i < m`, `j < k`, with `X_i = Σ_j u_{i,j}u_{i,j}*`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSystem<T: Scalar> {
    d: usize,
    k: usize,
    vectors: Vec<Vec<Vec<C<T>>>>,
}

impl<T: Scalar> VectorSystem<T> {
    pub fn new(d: usize, k: usize, vectors: Vec<Vec<Vec<C<T>>>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        for (i, g) in vectors.iter().enumerate() {
            if g.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "group {i} has {} vectors, expected {k}",
                    g.len()
                )));
            }
            if let Some(v) = g.iter().find(|v| v.len() != d) {
                return Err(Error::DimensionMismatch(format!(
                    "vector of length {} in dimension {d}",
                    v.len()
                )));
            }
        }
        Ok(VectorSystem { d, k, vectors })
    }

    /// Groups of possibly fewer than `k` vectors, zero-padded to `k`.
    pub fn padded(d: usize, k: usize, groups: Vec<Vec<Vec<C<T>>>>) -> Result<Self> {
        let mut vectors = groups;
        for g in &mut vectors {
            if g.len() > k {
                return Err(Error::RankTooHigh { rank: g.len(), k });
            }
            g.resize(k, vec![C::zero(); d]);
        }
        Self::new(d, k, vectors)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.vectors.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vectors(&self) -> &[Vec<Vec<C<T>>>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize, j: usize) -> &[C<T>] {
        &self.vectors[i][j]
    }

    /// `X_i`.
    pub fn matrix(&self, i: usize) -> HermitianMatrix<T> {
        self.vectors[i]
            .iter()
            .fold(HermitianMatrix::zeros(self.d), |acc, u| {
                acc.plus(&HermitianMatrix::rank_one(u))
            })
    }

    pub fn matrices(&self) -> Vec<HermitianMatrix<T>> {
        (0..self.m()).map(|i| self.matrix(i)).collect()
    }

    pub fn sum_matrix(&self) -> HermitianMatrix<T> {
        self.matrices()
            .iter()
            .fold(HermitianMatrix::zeros(self.d), |acc, x| acc.plus(x))
    }

    /// `tr(X_i) = Σ_j ‖u_{i,j}‖²`.
    pub fn traces(&self) -> Vec<T> {
        self.vectors
            .iter()
            .map(|g| {
                g.iter()
                    .flat_map(|u| u.iter())
                    .fold(T::zero(), |acc, z| acc + cabs2(z))
            })
            .collect()
    }

    /// `ε = max_i tr(X_i)`.
    pub fn epsilon(&self) -> T {
        self.traces()
            .into_iter()
            .fold(T::zero(), |a, t| if t > a { t } else { a })
    }

    /// Column `c = i + j·m` of `U` is `u_{i,j}`.
    pub fn column(&self, c: usize) -> &[C<T>] {
        let m = self.m();
        &self.vectors[c % m][c / m]
    }

    /// `A = U*U` with the column order `u_{1,1},…,u_{m,1},…,u_{1,k},…,u_{m,k}`.
    pub fn gram_matrix(&self) -> HermitianMatrix<T> {
        HermitianMatrix::from_fn(self.k * self.m(), |a, b| {
            self.column(a)
                .iter()
                .zip(self.column(b))
                .fold(C::<T>::zero(), |acc, (x, y)| acc + x.conj() * y.clone())
        })
    }

    /// Multiplies every vector by `c` (so every `X_i` scales by `c²`).
    pub fn scale_vectors(&self, c: &T) -> Self {
        let c = creal(c.clone());
        VectorSystem {
            d: self.d,
            k: self.k,
            vectors: self
                .vectors
                .iter()
                .map(|g| g.iter().map(|u| u.iter().map(|z| z.clone() * c.clone()).collect()).collect())
                .collect(),
        }
    }

    pub fn to_f64(&self) -> VectorSystem<f64> {
        VectorSystem {
            d: self.d,
            k: self.k,
            vectors: self
                .vectors
                .iter()
                .map(|g| g.iter().map(|u| u.iter().map(c_to_f64).collect()).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let vectors: Vec<Value> = self
            .vectors
            .iter()
            .map(|g| {
                Value::Array(
                    g.iter()
                        .map(|u| Value::Array(u.iter().map(complex_to_json).collect()))
                        .collect(),
                )
            })
            .collect();
        json!({ "d": self.d, "m": self.m(), "k": self.k, "vectors": vectors })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v[name]
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::InvalidInput(format!("vector system needs \"{name}\"")))
        };
        let (d, m, k) = (field("d")?, field("m")?, field("k")?);
        let groups = v["vectors"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("vector system needs \"vectors\"".into()))?;
        let vectors = groups
            .iter()
            .map(|g| {
                g.as_array()
                    .ok_or_else(|| Error::InvalidInput("group must be an array".into()))?
                    .iter()
                    .map(|u| {
                        u.as_array()
                            .ok_or_else(|| Error::InvalidInput("vector must be an array".into()))?
                            .iter()
                            .map(complex_from_json)
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let sys = Self::new(d, k, vectors)?;
        if sys.m() != m {
            return Err(Error::DimensionMismatch(format!("declared m={m}, found {}", sys.m())));
        }
        Ok(sys)
    }
}

impl VectorSystem<f64> {
    /// Decomposes each PSD `X_i` into `k` vectors.
    pub fn from_matrices(xs: &[HermitianMatrix<f64>], k: usize) -> Result<Self> {
        let d = xs.first().map(|x| x.dim()).unwrap_or(0);
        if xs.iter().any(|x| x.dim() != d) {
            return Err(Error::DimensionMismatch("pieces of different sizes".into()));
        }
        let vectors = xs
            .iter()
            .map(|x| decompose_rank_k(x, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, k, vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    type Q = BigRational;

    fn cq(a: i64) -> C<Q> {
        creal(Q::int(a))
    }

    #[test]
    fn char_poly_examples() {
        let d = HermitianMatrix::<Q>::diagonal(&[Q::int(1), Q::int(2)]);
        assert_eq!(d.char_poly().coeffs(), &[Q::int(2), Q::int(-3), Q::int(1)]);
        assert_eq!(HermitianMatrix::<Q>::zeros(2).char_poly().coeffs(), &[Q::int(0), Q::int(0), Q::int(1)]);
        let swap = HermitianMatrix::<Q>::new(2, vec![cq(0), cq(1), cq(1), cq(0)]).unwrap();
        assert_eq!(swap.char_poly().coeffs(), &[Q::int(-1), Q::int(0), Q::int(1)]);
        let swapf = swap.to_f64().char_poly();
        assert!(swapf.approx_eq(&RealPoly::new(vec![-1.0, 0.0, 1.0])));
    }

    #[test]
    fn rejects_non_hermitian() {
        let bad = HermitianMatrix::<Q>::new(2, vec![cq(0), cq(1), cq(2), cq(0)]);
        assert!(bad.is_err());
        let complex_diag = HermitianMatrix::<Q>::new(1, vec![C::new(Q::int(1), Q::int(1))]);
        assert!(complex_diag.is_err());
    }

    #[test]
    fn figure_submatrix_indices() {
        // 0-based version of S = ({1,2},{2,3,4},{3}) with m = 4, k = 3.
        // The sets overlap, so this is an index tuple rather than a partition.
        let tuple = vec![vec![0usize, 1], vec![1, 2, 3], vec![2]];
        assert!(KPartition::new(4, tuple.clone()).is_err());
        assert_eq!(tuple_indices(&tuple, 4), vec![0, 1, 5, 6, 7, 10]);
        let a = HermitianMatrix::<f64>::from_fn(12, |i, j| C64::new((i * 12 + j) as f64, 0.0));
        let sub = a.tuple_submatrix(&tuple, 4).unwrap();
        assert_eq!(sub.dim(), 6);
        assert_eq!(sub.get(2, 4).re, (5 * 12 + 7) as f64);
    }

    #[test]
    fn partition_indices_and_words() {
        let s = KPartition::new(3, vec![vec![2], vec![0, 1]]).unwrap();
        assert_eq!(s.indices(), vec![2, 3, 4]);
        assert_eq!(s.assignment(), vec![1, 1, 0]);
        // word 6 = 110 in base 2 -> j = (1,1,0)
        assert_eq!(KPartition::from_word(6, 2, 3), s);
        assert!(KPartition::new(2, vec![vec![0]]).is_err());
        let a = HermitianMatrix::<Q>::identity(6);
        assert_eq!(a.principal_submatrix(&s).unwrap(), HermitianMatrix::identity(3));
        assert!(HermitianMatrix::<Q>::identity(5).principal_submatrix(&s).is_err());
    }

    #[test]
    fn psd_examples() {
        assert!(HermitianMatrix::<Q>::identity(3).is_psd());
        assert!(!HermitianMatrix::<Q>::diagonal(&[Q::int(1), Q::int(-1)]).is_psd());
        assert!(!HermitianMatrix::<f64>::diagonal(&[1.0, -1.0]).is_psd());
    }

    #[test]
    fn gram_examples() {
        let s = 0.5f64.sqrt();
        let sys = VectorSystem::new(
            2,
            1,
            vec![
                vec![vec![C64::new(1.0, 0.0), C64::zero()]],
                vec![vec![C64::new(s, 0.0), C64::new(s, 0.0)]],
            ],
        )
        .unwrap();
        let a = sys.gram_matrix();
        assert_eq!(a.get(0, 1).re, s);
        assert_eq!(a.diag(1), 2.0 * s * s);
        assert!((a.operator_norm() - sys.sum_matrix().operator_norm()).abs() < 1e-12);
    }

    #[test]
    fn gram_column_order() {
        // m = 2, k = 2: column c = i + j*m holds u_{i,j}
        let e = |i: usize| {
            let mut v = vec![C64::zero(); 4];
            v[i] = C64::one();
            v
        };
        let sys = VectorSystem::new(4, 2, vec![vec![e(0), e(1)], vec![e(2), e(3)]]).unwrap();
        assert_eq!(sys.column(1), e(2).as_slice());
        assert_eq!(sys.column(2), e(1).as_slice());
        assert_eq!(sys.gram_matrix(), HermitianMatrix::identity(4));
    }

    #[test]
    fn decomposition_examples() {
        let e1 = HermitianMatrix::<f64>::diagonal(&[1.0, 0.0]);
        let u = decompose_rank_k(&e1, 1).unwrap();
        assert!((u[0][0] - C64::one()).norm() < 1e-12);
        let z = decompose_rank_k(&HermitianMatrix::zeros(3), 2).unwrap();
        assert!(z.iter().flatten().all(|c| *c == C64::zero()));
        let x = HermitianMatrix::<f64>::diagonal(&[4.0, 1.0, 0.0]);
        let u = decompose_rank_k(&x, 2).unwrap();
        let back = u.iter().fold(HermitianMatrix::zeros(3), |acc, v| {
            acc.plus(&HermitianMatrix::rank_one(v))
        });
        assert!(back.minus(&x).operator_norm() < 1e-12);
        assert!(matches!(decompose_rank_k(&x, 1), Err(Error::RankTooHigh { rank: 2, k: 1 })));
        let neg = HermitianMatrix::<f64>::diagonal(&[1.0, -1.0]);
        assert!(matches!(decompose_rank_k(&neg, 2), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(HermitianMatrix::<f64>::identity(3).operator_norm(), 1.0);
        assert!((HermitianMatrix::<f64>::diagonal(&[0.3, 0.7]).operator_norm() - 0.7).abs() < 1e-15);
        let swap = HermitianMatrix::<f64>::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((swap.operator_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let a = HermitianMatrix::<Q>::from_fn(2, |i, j| C::new(Q::int((i + j) as i64), Q::ratio(if i < j { 1 } else { 0 }, 3)));
        let back = HermitianMatrix::<Q>::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
        let sys = VectorSystem::<Q>::new(1, 1, vec![vec![vec![cq(2)]]]).unwrap();
        assert_eq!(VectorSystem::<Q>::from_json(&sys.to_json()).unwrap(), sys);
    }
}
