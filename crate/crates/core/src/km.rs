//! The (k,m)-determinant, the (k,m)-characteristic polynomial `ψ_{k,m}`,
//! and the wrappers that tie it to mixed determinants and to the
//! rank-one characteristic and mixed determinantal polynomials.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermitian::{word_to_assignment, HermitianMatrix};
use crate::interp::{derivative_weight_polys, integer_nodes};
use crate::poly::RealPoly;
use crate::reduce::{chunked_tree_sum, tree_reduce};
use crate::scalar::{creal, factorial, powi, C, C64, Scalar};

/// Work gate for the `k^m` partition sum.
pub const PARTITION_GATE: u64 = 1 << 20;

/// Largest `k·m` accepted by the dense differential oracle.
pub const ORACLE_KM_LIMIT: usize = 10;

/// The pair `(k, m)`; matrices used with it are `km × km`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KmContext {
    pub k: usize,
    pub m: usize,
    /// Lifts the `k^m ≤ 2^20` work gate.
    pub override_gate: bool,
}

impl KmContext {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::InvalidInput(format!("k and m must be positive (k={k}, m={m})")));
        }
        Ok(KmContext { k, m, override_gate: false })
    }

    pub fn with_override(mut self, on: bool) -> Self {
        self.override_gate = on;
        self
    }

    pub fn dim(&self) -> usize {
        self.k * self.m
    }

    /// `k^m`, or `None` on overflow.
    pub fn partition_count(&self) -> Option<u64> {
        (self.k as u64).checked_pow(self.m as u32)
    }

    pub fn check_matrix<T: Scalar>(&self, a: &HermitianMatrix<T>) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for k={}, m={}",
                a.dim(),
                a.dim(),
                self.k,
                self.m
            )));
        }
        Ok(())
    }

    fn gated_count(&self) -> Result<u64> {
        match self.partition_count() {
            Some(n) if n <= PARTITION_GATE || self.override_gate => Ok(n),
            _ => Err(Error::SizeLimitExceeded(format!(
                "k^m = {}^{} partitions exceeds 2^20 (set the override to proceed)",
                self.k, self.m
            ))),
        }
    }
}

/// Writes the ascending index set of the partition encoded by `assignment`.
fn partition_indices(assignment: &[usize], k: usize, out: &mut Vec<usize>) {
    let m = assignment.len();
    out.clear();
    for j in 0..k {
        for (i, &a) in assignment.iter().enumerate() {
            if a == j {
                out.push(i + j * m);
            }
        }
    }
}

/// Folds `f(A(S))` over all partitions in lexicographic word order.
fn partition_sum<T, R, F>(a: &HermitianMatrix<T>, ctx: &KmContext, zero: R, f: F) -> Result<R>
where
    T: Scalar,
    R: Send + Clone + Sync,
    F: Fn(&HermitianMatrix<T>) -> R + Sync + Send,
    R: std::ops::Add<Output = R>,
{
    ctx.check_matrix(a)?;
    let total = ctx.gated_count()?;
    let (k, m) = (ctx.k, ctx.m);
    let sum = chunked_tree_sum(
        total,
        |start, end| {
            let mut assignment = vec![0; m];
            let mut idx = Vec::with_capacity(m);
            let mut acc = zero.clone();
            for w in start..end {
                word_to_assignment(w, k, &mut assignment);
                partition_indices(&assignment, k, &mut idx);
                acc = acc + f(&a.submatrix(&idx));
            }
            acc
        },
        |x, y| x + y,
    );
    Ok(sum.unwrap_or(zero))
}

/// `D_{k,m}[A] = Σ_S det A(S)`.
pub fn km_determinant<T: Scalar>(a: &HermitianMatrix<T>, ctx: &KmContext) -> Result<T> {
    partition_sum(a, ctx, T::zero(), |sub| sub.det())
}

/// `ψ_{k,m}[A](x) = k^{-m}·Σ_S det[xI_m - A(S)]`, by the partition sum.
pub fn km_char_poly<T: Scalar>(a: &HermitianMatrix<T>, ctx: &KmContext) -> Result<RealPoly<T>> {
    let sum = partition_sum(a, ctx, RealPoly::zero(), |sub| sub.char_poly())?;
    let kk = powi(&T::int(ctx.k as i64), ctx.m);
    Ok(sum.scale(&(T::one() / kk)))
}

/// Number of determinants evaluated by the principal-minor route.
pub fn minor_route_terms(ctx: &KmContext, max_order: usize) -> Option<u64> {
    let mut total: u64 = 0;
    let mut binom: u64 = 1;
    for s in 0..=max_order.min(ctx.m) {
        if s > 0 {
            binom = binom.checked_mul((ctx.m - s + 1) as u64)? / s as u64;
        }
        total = total.checked_add(binom.checked_mul((ctx.k as u64).checked_pow(s as u32)?)?)?;
    }
    Some(total)
}

/// All `s`-subsets of `0..m` in lexicographic order.
fn combinations(m: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..s).collect();
    if s > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..s).rev().find(|&p| cur[p] < m - s + p) else {
            return out;
        };
        cur[pos] += 1;
        for q in pos + 1..s {
            cur[q] = cur[q - 1] + 1;
        }
    }
}

/// `e_s = Σ_{|T|=s} Σ_{g:T→[k]} det A({i + g(i)·m : i ∈ T})` for `s ≤ max_order`.
///
/// Expanding each `det[xI - A(S)]` into principal minors and regrouping by
/// the row set `T` gives
/// `ψ_{k,m}[A](x) = Σ_s (-1)^s k^{-s} e_s x^{m-s}`.
/// When `rank A ≤ r` every minor of order above `r` vanishes, so the sum may
/// stop at `max_order = r`.
pub fn minor_sums<T: Scalar>(a: &HermitianMatrix<T>, ctx: &KmContext, max_order: usize) -> Result<Vec<T>> {
    ctx.check_matrix(a)?;
    let terms = minor_route_terms(ctx, max_order);
    if !matches!(terms, Some(n) if n <= PARTITION_GATE * 16 || ctx.override_gate) {
        return Err(Error::SizeLimitExceeded(format!(
            "principal-minor expansion for k={}, m={}, order {max_order}",
            ctx.k, ctx.m
        )));
    }
    let (k, m) = (ctx.k, ctx.m);
    let mut out = Vec::new();
    for s in 0..=max_order.min(m) {
        let combos = combinations(m, s);
        let words = (k as u64).pow(s as u32);
        let values: Vec<T> = combos
            .par_iter()
            .map(|t| {
                let mut g = vec![0; s];
                let mut idx = vec![0; s];
                let mut acc = T::zero();
                for w in 0..words {
                    word_to_assignment(w, k, &mut g);
                    for p in 0..s {
                        idx[p] = t[p] + g[p] * m;
                    }
                    acc = acc + a.submatrix(&idx).det();
                }
                acc
            })
            .collect();
        out.push(tree_reduce(values, |x, y| x + y).unwrap_or_else(T::zero));
    }
    Ok(out)
}

/// `ψ_{k,m}[A]` through the principal-minor expansion, truncated at `max_order`
/// (exact whenever `rank A ≤ max_order`).
pub fn km_char_poly_minors<T: Scalar>(
    a: &HermitianMatrix<T>,
    ctx: &KmContext,
    max_order: usize,
) -> Result<RealPoly<T>> {
    let e = minor_sums(a, ctx, max_order)?;
    let k = T::int(ctx.k as i64);
    let mut coeffs = vec![T::zero(); ctx.m + 1];
    for (s, es) in e.into_iter().enumerate() {
        let sign = if s % 2 == 0 { T::one() } else { -T::one() };
        coeffs[ctx.m - s] = sign * es / powi(&k, s);
    }
    Ok(RealPoly::new(coeffs))
}

/// Which evaluation of `ψ` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiRoute {
    /// The `k^m` partition sum of the definition.
    Partitions,
    /// The principal-minor expansion truncated at the given rank bound.
    Minors(usize),
}

/// The cheaper of the two exact routes for a matrix of rank at most `rank_bound`.
pub fn choose_route(ctx: &KmContext, rank_bound: usize) -> PsiRoute {
    let r = rank_bound.min(ctx.m);
    let cube = |n: usize| (n * n * n + 1) as f64;
    let part = ctx
        .partition_count()
        .map(|n| n as f64 * cube(ctx.m))
        .unwrap_or(f64::INFINITY);
    let mut minors = 0.0;
    let mut binom = 1.0;
    for s in 0..=r {
        if s > 0 {
            binom = binom * (ctx.m - s + 1) as f64 / s as f64;
        }
        minors += binom * (ctx.k as f64).powi(s as i32) * cube(s);
    }
    if minors < part {
        PsiRoute::Minors(r)
    } else {
        PsiRoute::Partitions
    }
}

pub fn km_char_poly_route<T: Scalar>(
    a: &HermitianMatrix<T>,
    ctx: &KmContext,
    route: PsiRoute,
) -> Result<RealPoly<T>> {
    match route {
        PsiRoute::Partitions => km_char_poly(a, ctx),
        PsiRoute::Minors(r) => km_char_poly_minors(a, ctx, r),
    }
}

/// `Z_k - A` at the point `z ∈ ℝ^m` (diagonal entry `c` gets `z_{c mod m}`).
pub fn shifted<T: Scalar>(a: &HermitianMatrix<T>, m: usize, z: &[T]) -> Vec<C<T>> {
    let n = a.dim();
    let mut e: Vec<C<T>> = a.entries().iter().map(|v| -v.clone()).collect();
    for c in 0..n {
        e[c * n + c] = e[c * n + c].clone() + creal(z[c % m].clone());
    }
    e
}

/// The differential formula
/// `ψ = (k!)^{-m} Π_i ∂_{z_i}^{k-1} det[Z_k - A] |_{z_i = x}`.
///
/// `det[Z_k - A]` has degree `k` in each `z_i`, so it is determined by its
/// values on the grid `{0,…,k}^m`. Writing it in the tensor Lagrange basis,
/// the `(k-1)`-st derivative of each basis factor `ℓ_n(z_i)` is linear in
/// `z_i`; substituting `z_i = x` leaves a product of `m` linear polynomials
/// per grid point. No multivariate expansion is ever formed.
pub fn km_char_poly_differential_oracle<T: Scalar>(
    a: &HermitianMatrix<T>,
    ctx: &KmContext,
) -> Result<RealPoly<T>> {
    ctx.check_matrix(a)?;
    if ctx.dim() > ORACLE_KM_LIMIT {
        return Err(Error::SizeLimitExceeded(format!(
            "differential oracle needs k*m <= {ORACLE_KM_LIMIT}, got {}",
            ctx.dim()
        )));
    }
    let (k, m) = (ctx.k, ctx.m);
    let nodes = integer_nodes::<T>(k + 1);
    let lin = derivative_weight_polys(&nodes, k - 1);
    let grid = ((k + 1) as u64).pow(m as u32);
    let sum = chunked_tree_sum(
        grid,
        |start, end| {
            let mut n = vec![0; m];
            let mut acc = RealPoly::zero();
            for w in start..end {
                word_to_assignment(w, k + 1, &mut n);
                let z: Vec<T> = n.iter().map(|&v| nodes[v].clone()).collect();
                let det = T::det_hermitian(a.dim(), &shifted(a, m, &z));
                if det.is_zero() {
                    continue;
                }
                let term = n
                    .iter()
                    .fold(RealPoly::constant(det), |p, &v| &p * &lin[v]);
                acc = &acc + &term;
            }
            acc
        },
        |x, y| &x + &y,
    )
    .unwrap_or_else(RealPoly::zero);
    let kf = powi(&factorial::<T>(k), m);
    Ok(sum.scale(&(T::one() / kf)))
}

/// `p_t(z) = ((k-1)!)^t Σ_{S ∈ P_k(t)} det[(Z_k - A)(T_{t,S})]` where
/// `T_{t,S} = (S_1 ∪ {t,…,m-1}, …, S_k ∪ {t,…,m-1})`: the partially
/// differentiated determinant `Π_{i<t} ∂_{z_i}^{k-1} det[Z_k - A]`.
pub fn p_t_partition_formula<T: Scalar>(
    a: &HermitianMatrix<T>,
    ctx: &KmContext,
    t: usize,
    z: &[T],
) -> Result<T> {
    ctx.check_matrix(a)?;
    let (k, m) = (ctx.k, ctx.m);
    if t > m || z.len() != m {
        return Err(Error::DimensionMismatch(format!("t={t}, |z|={} for m={m}", z.len())));
    }
    let full = HermitianMatrix::new(a.dim(), shifted(a, m, z))?;
    let words = (k as u64)
        .checked_pow(t as u32)
        .filter(|&n| n <= PARTITION_GATE || ctx.override_gate)
        .ok_or_else(|| Error::SizeLimitExceeded(format!("k^t = {k}^{t}")))?;
    let mut g = vec![0; t];
    let mut acc = T::zero();
    for w in 0..words {
        word_to_assignment(w, k, &mut g);
        let sets: Vec<Vec<usize>> = (0..k)
            .map(|j| (0..t).filter(|&i| g[i] == j).chain(t..m).collect())
            .collect();
        acc = acc + full.tuple_submatrix(&sets, m)?.det();
    }
    Ok(acc * powi(&factorial::<T>(k - 1), t))
}

/// `D[A_1,…,A_k] = Σ_{(S_1,…,S_k)} Π_i det A_i(S_i)`.
pub fn mixed_determinant<T: Scalar>(list: &[HermitianMatrix<T>]) -> Result<T> {
    let k = list.len();
    let m = check_same_dim(list)?;
    let ctx = KmContext::new(k, m)?;
    let total = ctx.gated_count()?;
    let sum = chunked_tree_sum(
        total,
        |start, end| {
            let mut assignment = vec![0; m];
            let mut acc = T::zero();
            for w in start..end {
                word_to_assignment(w, k, &mut assignment);
                let prod = list.iter().enumerate().fold(T::one(), |p, (j, aj)| {
                    let idx: Vec<usize> = (0..m).filter(|&i| assignment[i] == j).collect();
                    p * aj.submatrix(&idx).det()
                });
                acc = acc + prod;
            }
            acc
        },
        |x, y| x + y,
    );
    Ok(sum.unwrap_or_else(T::zero))
}

fn check_same_dim<T: Scalar>(list: &[HermitianMatrix<T>]) -> Result<usize> {
    let m = list
        .first()
        .ok_or_else(|| Error::InvalidInput("empty matrix list".into()))?
        .dim();
    if list.iter().any(|a| a.dim() != m) {
        return Err(Error::DimensionMismatch("matrices of different sizes".into()));
    }
    Ok(m)
}

/// `χ_k[B](x) = k^m·ψ_{k,m}[diag(B,…,B)](x)`.
pub fn rl_char_poly<T: Scalar>(b: &HermitianMatrix<T>, k: usize) -> Result<RealPoly<T>> {
    let ctx = KmContext::new(k, b.dim())?;
    let psi = km_char_poly(&b.lift(k), &ctx)?;
    Ok(psi.scale(&powi(&T::int(k as i64), b.dim())))
}

/// `χ[A_1,…,A_k](x) = ψ_{k,m}[diag(A_1,…,A_k)](x)`.
pub fn mixed_determinantal_poly<T: Scalar>(list: &[HermitianMatrix<T>]) -> Result<RealPoly<T>> {
    let m = check_same_dim(list)?;
    let ctx = KmContext::new(list.len(), m)?;
    km_char_poly(&HermitianMatrix::block_diag(list), &ctx)
}

/// `(maxroot ψ[A], maxroot ψ[A + vv*])`; the first never exceeds the second.
pub fn rank_one_update_maxroot_check(
    a: &HermitianMatrix<f64>,
    v: &[C64],
    ctx: &KmContext,
) -> Result<(f64, f64)> {
    ctx.check_matrix(a)?;
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!("vector of length {}", v.len())));
    }
    let before = km_char_poly(a, ctx)?.maxroot()?;
    let after = km_char_poly(&a.plus(&HermitianMatrix::rank_one(v)), ctx)?.maxroot()?;
    Ok((before, after))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::int(n)
    }

    #[test]
    fn determinant_examples() {
        let ctx = KmContext::new(2, 1).unwrap();
        let a = HermitianMatrix::<Q>::diagonal(&[q(1), q(3)]);
        assert_eq!(km_determinant(&a, &ctx).unwrap(), q(4));
        let ctx = KmContext::new(3, 2).unwrap();
        assert_eq!(km_determinant(&HermitianMatrix::<Q>::identity(6), &ctx).unwrap(), q(9));
    }

    #[test]
    fn char_poly_examples() {
        let a = HermitianMatrix::<Q>::diagonal(&[q(1), q(3)]);
        let ctx = KmContext::new(2, 1).unwrap();
        let psi = km_char_poly(&a, &ctx).unwrap();
        assert_eq!(psi.coeffs(), &[q(-2), q(1)]);
        assert_eq!(psi.roots().unwrap().roots, vec![2.0]);
        let ctx = KmContext::new(2, 2).unwrap();
        let psi = km_char_poly(&HermitianMatrix::<Q>::identity(4), &ctx).unwrap();
        assert_eq!(psi.coeffs(), &[q(1), q(-2), q(1)]);
        assert_eq!(km_char_poly_differential_oracle(&a, &KmContext::new(2, 1).unwrap()).unwrap().coeffs(), &[q(-2), q(1)]);
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(minor_route_terms(&KmContext::new(2, 3).unwrap(), 3), Some(27));
    }

    #[test]
    fn mixed_determinant_examples() {
        let a = HermitianMatrix::<Q>::diagonal(&[q(5)]);
        let b = HermitianMatrix::<Q>::diagonal(&[q(7)]);
        assert_eq!(mixed_determinant(&[a, b]).unwrap(), q(12));
        let i = HermitianMatrix::<Q>::identity(3);
        assert_eq!(mixed_determinant(&[i.clone(), i]).unwrap(), q(8));
    }

    #[test]
    fn rl_and_mixed_determinantal_examples() {
        let z = HermitianMatrix::<Q>::zeros(1);
        assert_eq!(rl_char_poly(&z, 2).unwrap().coeffs(), &[q(0), q(2)]);
        let p = mixed_determinantal_poly(&[
            HermitianMatrix::<Q>::diagonal(&[q(1)]),
            HermitianMatrix::<Q>::diagonal(&[q(3)]),
        ])
        .unwrap();
        assert_eq!(p.coeffs(), &[q(-2), q(1)]);
    }

    #[test]
    fn rank_one_update_example() {
        let ctx = KmContext::new(2, 1).unwrap();
        let (a, b) = rank_one_update_maxroot_check(
            &HermitianMatrix::zeros(2),
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            &ctx,
        )
        .unwrap();
        assert_eq!(a, 0.0);
        assert!((b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gate_refuses_huge_partition_sums() {
        let ctx = KmContext::new(2, 21).unwrap();
        let a = HermitianMatrix::<f64>::zeros(42);
        assert!(matches!(km_char_poly(&a, &ctx), Err(Error::SizeLimitExceeded(_))));
    }
}
