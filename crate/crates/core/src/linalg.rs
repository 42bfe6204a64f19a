//! Dense complex kernels on row-major slices.
//!
//! Float mode leans on nalgebra for the Hermitian eigen-solver; the exact
//! kernels (Bareiss, Faddeev–LeVerrier, pivoted LDL*) are generic so the
//! float versions double as cross-checks in tests.

use nalgebra::DMatrix;
use num::{One, Zero};

use crate::scalar::{cabs2, C, C64, Scalar};

/// Eigenvalues (ascending) and matching orthonormal eigenvectors of a
/// Hermitian matrix.
pub fn eigh_f64(n: usize, a: &[C64]) -> (Vec<f64>, Vec<Vec<C64>>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let m = DMatrix::from_row_slice(n, n, a);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Determinant by LU with partial pivoting.
pub fn det_lu_f64(n: usize, a: &[C64]) -> C64 {
    let mut m = a.to_vec();
    let mut det = C64::one();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].norm_sqr();
        for row in col + 1..n {
            let v = m[row * n + col].norm_sqr();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return C64::zero();
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = m[row * n + col] / p;
            if f == C64::zero() {
                continue;
            }
            for j in col + 1..n {
                let sub = f * m[col * n + j];
                m[row * n + j] -= sub;
            }
        }
    }
    det
}

/// Fraction-free Bareiss elimination; every division is exact.
pub fn det_bareiss<T: Scalar>(n: usize, a: &[C<T>]) -> C<T> {
    if n == 0 {
        return C::one();
    }
    let mut m = a.to_vec();
    let mut sign = false;
    let mut prev = C::<T>::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r * n + k].is_zero()) else {
                return C::zero();
            };
            for j in 0..n {
                m.swap(k * n + j, swap * n + j);
            }
            sign = !sign;
        }
        let pivot = m[k * n + k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (pivot.clone() * m[i * n + j].clone()
                    - m[i * n + k].clone() * m[k * n + j].clone())
                    / prev.clone();
                m[i * n + j] = v;
            }
            m[i * n + k] = C::zero();
        }
        prev = pivot;
    }
    let d = m[n * n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Faddeev–LeVerrier: ascending coefficients of `det(xI - A)`.
pub fn faddeev_leverrier<T: Scalar>(n: usize, a: &[C<T>]) -> Vec<C<T>> {
    let mut coeffs = vec![C::<T>::zero(); n + 1];
    coeffs[n] = C::one();
    // mk holds M_k; start from M_1 = I.
    let mut mk: Vec<C<T>> = vec![C::zero(); n * n];
    for i in 0..n {
        mk[i * n + i] = C::one();
    }
    for k in 1..=n {
        let am = matmul(n, a, &mk);
        let tr = (0..n).fold(C::<T>::zero(), |acc, i| acc + am[i * n + i].clone());
        let c = -tr / C::new(T::int(k as i64), T::zero());
        coeffs[n - k] = c.clone();
        if k < n {
            mk = am;
            for i in 0..n {
                mk[i * n + i] = mk[i * n + i].clone() + c.clone();
            }
        }
    }
    coeffs
}

pub fn matmul<T: Scalar>(n: usize, a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    let mut out = vec![C::<T>::zero(); n * n];
    for i in 0..n {
        for l in 0..n {
            let x = &a[i * n + l];
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j].clone() + x.clone() * b[l * n + j].clone();
            }
        }
    }
    out
}

/// One rank-one term `d * v v*` of a pivoted LDL* factorization.
#[derive(Clone, Debug)]
pub struct LdlTerm<T: Scalar> {
    pub weight: T,
    pub vector: Vec<C<T>>,
}

/// Pivoted outer-product LDL* of a PSD Hermitian matrix.
///
/// Returns the nonzero terms with `A = Σ weight·v v*` (each `v` has a unit
/// entry at its pivot). On failure returns a witness of indefiniteness: the
/// offending negative pivot, or `-|a_ij|` for a nonzero entry sitting in a
/// zero-diagonal row.
pub fn ldl_pivoted<T: Scalar>(n: usize, a: &[C<T>]) -> std::result::Result<Vec<LdlTerm<T>>, f64> {
    let scale = (0..n)
        .map(|i| a[i * n + i].re.to_f64_lossy().abs())
        .fold(0.0, f64::max);
    let mut m = a.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let mut terms = Vec::new();
    while !active.is_empty() {
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|(_, &i), (_, &j)| {
                m[i * n + i]
                    .re
                    .partial_cmp(&m[j * n + j].re)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty");
        let d = m[p * n + p].re.clone();
        if d.negligible(scale) || d < T::zero() {
            // Whatever is left must vanish for A to be PSD.
            for &i in &active {
                let dii = m[i * n + i].re.clone();
                if dii < T::zero() && !dii.negligible(scale) {
                    return Err(dii.to_f64_lossy());
                }
                for &j in &active {
                    if i != j {
                        let v = cabs2(&m[i * n + j]);
                        if !v.negligible(scale * scale) {
                            return Err(-v.to_f64_lossy().sqrt());
                        }
                    }
                }
            }
            break;
        }
        active.swap_remove(pos);
        let mut v = vec![C::<T>::zero(); n];
        v[p] = C::one();
        let dc = C::new(d.clone(), T::zero());
        for &i in &active {
            v[i] = m[i * n + p].clone() / dc.clone();
        }
        for &i in &active {
            for &j in &active {
                let upd = v[i].clone() * m[p * n + j].clone();
                m[i * n + j] = m[i * n + j].clone() - upd;
            }
        }
        terms.push(LdlTerm { weight: d, vector: v });
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn q(n: i64, d: i64) -> C<BigRational> {
        C::new(BigRational::ratio(n, d), BigRational::zero())
    }

    #[test]
    fn bareiss_matches_lu() {
        let a = [
            C64::new(2.0, 0.0),
            C64::new(1.0, 1.0),
            C64::new(0.5, 0.0),
            C64::new(1.0, -1.0),
            C64::new(3.0, 0.0),
            C64::new(0.0, 2.0),
            C64::new(0.5, 0.0),
            C64::new(0.0, -2.0),
            C64::new(4.0, 0.0),
        ];
        let lu = det_lu_f64(3, &a);
        let ba = det_bareiss::<f64>(3, &a);
        assert!((lu - ba).norm() < 1e-12);
    }

    #[test]
    fn faddeev_on_swap_matrix() {
        // [[0,1],[1,0]] -> x^2 - 1
        let a = [q(0, 1), q(1, 1), q(1, 1), q(0, 1)];
        let c = faddeev_leverrier::<BigRational>(2, &a);
        assert_eq!(c, vec![q(-1, 1), q(0, 1), q(1, 1)]);
    }

    #[test]
    fn ldl_rebuilds_matrix_and_rejects_indefinite() {
        let a = [q(4, 1), q(2, 1), q(2, 1), q(1, 1)];
        let terms = ldl_pivoted::<BigRational>(2, &a).unwrap();
        assert_eq!(terms.len(), 1);
        let t = &terms[0];
        for i in 0..2 {
            for j in 0..2 {
                let v = C::new(t.weight.clone(), BigRational::zero())
                    * t.vector[i].clone()
                    * t.vector[j].conj();
                assert_eq!(v, a[i * 2 + j]);
            }
        }
        let bad = [q(1, 1), q(0, 1), q(0, 1), q(-1, 1)];
        assert!(ldl_pivoted::<BigRational>(2, &bad).is_err());
        let zero_diag = [q(0, 1), q(1, 1), q(1, 1), q(0, 1)];
        assert!(ldl_pivoted::<BigRational>(2, &zero_diag).is_err());
    }
}
