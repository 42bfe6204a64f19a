//! Univariate real polynomials with certified real-rootedness.

use std::ops::{Add, Mul, Neg, Sub};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::roots::RootBundle;
use crate::scalar::Scalar;

/// Relative coefficient tolerance of the float-mode polynomial comparator.
pub const POLY_REL_TOL: f64 = 1e-9;

/// Absolute slack (scaled by `1 + max |root|`) for non-strict root comparisons.
pub const INTERLACE_SLACK: f64 = 1e-9;

/// Relative coefficient noise assumed for computed float polynomials when
/// comparing roots; a root of multiplicity `μ` may move by about its `1/μ`-th
/// power (see [`RealPoly::root_sensitivity`]).
pub const ROOT_NOISE: f64 = 1e-13;

/// Polynomial with ascending coefficients: `coeffs[i]` multiplies `x^i`.
///
/// The zero polynomial has no coefficients; otherwise the last coefficient
/// is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly<T: Scalar> {
    coeffs: Vec<T>,
}

impl<T: Scalar> RealPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RealPoly { coeffs }
    }

    pub fn zero() -> Self {
        RealPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c·x^n`.
    pub fn monomial(c: T, n: usize) -> Self {
        let mut coeffs = vec![T::zero(); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    /// `a0 + a1·x`.
    pub fn linear(a0: T, a1: T) -> Self {
        Self::new(vec![a0, a1])
    }

    /// Monic polynomial `Π (x - r)`.
    pub fn from_roots(roots: &[T]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            &acc * &Self::linear(-r.clone(), T::one())
        })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == T::one()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::int(i as i64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiplies by `x^n`.
    pub fn mul_xpow(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Divides by `x^n`, refusing when the dropped coefficients are not zero
    /// (exactly in exact mode, relative to the largest coefficient in float mode).
    pub fn div_xpow(&self, n: usize) -> Result<Self> {
        let scale = self.max_abs_coeff();
        if self.coeffs.iter().take(n).any(|c| !c.negligible(scale)) {
            return Err(Error::DivisibilityFailure(n));
        }
        Ok(Self::new(self.coeffs.iter().skip(n).cloned().collect()))
    }

    /// `p(c·x)`.
    pub fn compose_scale(&self, c: &T) -> Self {
        let mut pow = T::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a.clone() * pow.clone());
            pow = pow * c.clone();
        }
        Self::new(coeffs)
    }

    /// Polynomial long division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = d.degree();
        let lead = d.leading();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dd].clone() / lead.clone();
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - q.clone() * c.clone();
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let inv = T::one() / self.leading();
        self.scale(&inv)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_f64_lossy().abs())
            .fold(0.0, f64::max)
    }

    /// How far a root at `x` can move when each coefficient carries relative
    /// noise `rel`: `min_j (η / |p^{(j)}(x)/j!|)^{1/j}` with
    /// `η = rel·Σ|c_i||x|^i`. Near a cluster of multiplicity `μ` this is of
    /// order `η^{1/μ}`. Zero in exact mode.
    pub fn root_sensitivity(&self, x: f64, rel: f64) -> f64 {
        if T::EXACT || self.is_zero() {
            return 0.0;
        }
        let mut taylor: Vec<f64> = self.coeffs.iter().map(|c| c.to_f64_lossy()).collect();
        let eta = rel * taylor.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs());
        // Repeated synthetic division leaves the Taylor coefficients at x.
        let n = taylor.len();
        for start in 0..n {
            for i in (start..n - 1).rev() {
                let next = taylor[i + 1];
                taylor[i] += x * next;
            }
        }
        taylor[1..]
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| (eta / c.abs()).powf(1.0 / (j + 1) as f64))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_f64(&self) -> RealPoly<f64> {
        RealPoly::new(self.coeffs.iter().map(|c| c.to_f64_lossy()).collect())
    }

    /// Largest coefficient difference relative to the largest coefficient of either side.
    pub fn coeff_gap(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let scale = self.max_abs_coeff().max(other.max_abs_coeff());
        if scale == 0.0 {
            return 0.0;
        }
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).to_f64_lossy().abs())
            .fold(0.0, f64::max)
            / scale
    }

    /// The canonical comparator: identity in exact mode, relative `1e-9` in float mode.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if T::EXACT {
            self == other
        } else {
            self.coeff_gap(other) <= POLY_REL_TOL
        }
    }

    pub fn roots(&self) -> Result<RootBundle> {
        roots_certified(self)
    }

    pub fn maxroot(&self) -> Result<f64> {
        Ok(self.roots()?.maxroot())
    }

    pub fn minroot(&self) -> Result<f64> {
        Ok(self.roots()?.minroot())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(T::to_json).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput("polynomial must be a JSON array".into()))?;
        Ok(Self::new(arr.iter().map(T::from_json).collect::<Result<_>>()?))
    }
}

impl<T: Scalar> Add for &RealPoly<T> {
    type Output = RealPoly<T>;
    fn add(self, rhs: Self) -> RealPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Sub for &RealPoly<T> {
    type Output = RealPoly<T>;
    fn sub(self, rhs: Self) -> RealPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Mul for &RealPoly<T> {
    type Output = RealPoly<T>;
    fn mul(self, rhs: Self) -> RealPoly<T> {
        if self.is_zero() || rhs.is_zero() {
            return RealPoly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        RealPoly::new(out)
    }
}

impl<T: Scalar> Neg for &RealPoly<T> {
    type Output = RealPoly<T>;
    fn neg(self) -> RealPoly<T> {
        RealPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> Add for RealPoly<T> {
    type Output = RealPoly<T>;
    fn add(self, rhs: Self) -> RealPoly<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for RealPoly<T> {
    type Output = RealPoly<T>;
    fn sub(self, rhs: Self) -> RealPoly<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul for RealPoly<T> {
    type Output = RealPoly<T>;
    fn mul(self, rhs: Self) -> RealPoly<T> {
        &self * &rhs
    }
}

/// All roots in ascending order, with real-rootedness certified.
pub fn roots_certified<T: Scalar>(p: &RealPoly<T>) -> Result<RootBundle> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    T::certify_roots(p.coeffs())
}

/// Coefficient-wise `(1 - t)·p + t·q`.
pub fn convex_combination<T: Scalar>(p: &RealPoly<T>, q: &RealPoly<T>, t: &T) -> Result<RealPoly<T>> {
    if p.degree() != q.degree() {
        return Err(Error::DegreeMismatch(format!(
            "convex combination of degrees {} and {}",
            p.degree(),
            q.degree()
        )));
    }
    let s = T::one() - t.clone();
    Ok(&p.scale(&s) + &q.scale(t))
}

fn slack(values: &[f64]) -> f64 {
    INTERLACE_SLACK * (1.0 + values.iter().fold(0.0f64, |a, v| a.max(v.abs())))
}

/// Whether the roots of `g` interlace those of `f` (non-strictly).
pub fn interlaces<T: Scalar>(g: &RealPoly<T>, f: &RealPoly<T>) -> Result<bool> {
    if g.degree() + 1 != f.degree() || f.is_zero() || g.is_zero() {
        return Err(Error::DegreeMismatch(format!(
            "interlacer of degree {} for a polynomial of degree {}",
            g.degree(),
            f.degree()
        )));
    }
    let (beta, sb) = roots_with_wobble(f)?;
    let (alpha, sa) = roots_with_wobble(g)?;
    let tol = slack(&beta).max(slack(&alpha));
    Ok(alpha.iter().enumerate().all(|(i, a)| {
        beta[i] <= a + tol + sb[i] + sa[i] && *a <= beta[i + 1] + tol + sa[i] + sb[i + 1]
    }))
}

/// Certified roots and the sensitivity of each one to coefficient noise.
fn roots_with_wobble<T: Scalar>(p: &RealPoly<T>) -> Result<(Vec<f64>, Vec<f64>)> {
    let roots = p.roots()?.roots;
    let wobble = roots.iter().map(|&r| p.root_sensitivity(r, ROOT_NOISE)).collect();
    Ok((roots, wobble))
}

/// Pairwise bracket test: for sorted roots `a`, `b` of any two members,
/// `max(a_i, b_i) <= min(a_{i+1}, b_{i+1})`.
pub fn common_interlacing<T: Scalar>(family: &[RealPoly<T>]) -> Result<bool> {
    let Some(first) = family.first() else {
        return Ok(true);
    };
    let n = first.degree();
    if let Some(bad) = family.iter().find(|p| p.degree() != n || p.is_zero()) {
        return Err(Error::DegreeMismatch(format!(
            "family mixes degrees {} and {}",
            n,
            bad.degree()
        )));
    }
    let (roots, wobble): (Vec<Vec<f64>>, Vec<Vec<f64>>) = family
        .iter()
        .map(roots_with_wobble)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(bracket_test(&roots, &wobble))
}

/// The bracket test on already-certified sorted root lists of equal length.
pub fn roots_share_interlacing(roots: &[Vec<f64>]) -> bool {
    let zero: Vec<Vec<f64>> = roots.iter().map(|r| vec![0.0; r.len()]).collect();
    bracket_test(roots, &zero)
}

/// Bracket test where root `j` of member `x` may move by `wobble[x][j]`.
fn bracket_test(roots: &[Vec<f64>], wobble: &[Vec<f64>]) -> bool {
    let tol = roots.iter().map(|r| slack(r)).fold(0.0, f64::max);
    for (x, a) in roots.iter().enumerate() {
        for (y, b) in roots.iter().enumerate().skip(x + 1) {
            let (wa, wb) = (&wobble[x], &wobble[y]);
            for i in 0..a.len().saturating_sub(1) {
                let lo = (a[i] - wa[i]).max(b[i] - wb[i]);
                let hi = (a[i + 1] + wa[i + 1]).min(b[i + 1] + wb[i + 1]);
                if lo > hi + tol {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn p(c: &[f64]) -> RealPoly<f64> {
        RealPoly::new(c.to_vec())
    }

    #[test]
    fn sensitivity_grows_with_multiplicity() {
        // x - 1 at 1: η = 2ρ over a unit slope.
        assert!((p(&[-1.0, 1.0]).root_sensitivity(1.0, 1e-12) - 2e-12).abs() < 1e-24);
        // (x - 1)^2 at 1: η = 4ρ, Taylor coefficients (0, 0, 1), so √(4ρ).
        assert!((p(&[1.0, -2.0, 1.0]).root_sensitivity(1.0, 1e-12) - 2e-6).abs() < 1e-15);
        assert_eq!(RealPoly::new(vec![BigRational::from_integer(1.into())]).root_sensitivity(0.0, 1.0), 0.0);
    }

    #[test]
    fn arithmetic_basics() {
        let a = RealPoly::from_roots(&[1.0, 3.0]);
        assert_eq!(a.coeffs(), &[3.0, -4.0, 1.0]);
        assert_eq!(a.derivative().coeffs(), &[-4.0, 2.0]);
        assert_eq!(a.eval(&3.0), 0.0);
        let (q, r) = a.div_rem(&p(&[-1.0, 1.0]));
        assert_eq!(q.coeffs(), &[-3.0, 1.0]);
        assert!(r.is_zero());
        assert_eq!(a.mul_xpow(2).div_xpow(2).unwrap(), a);
        assert!(a.div_xpow(1).is_err());
    }

    #[test]
    fn compose_scale_substitutes() {
        let a = RealPoly::from_roots(&[2.0]);
        // p(2x) = 2x - 2 has root 1
        assert_eq!(a.compose_scale(&2.0).coeffs(), &[-2.0, 2.0]);
    }

    #[test]
    fn convex_combination_midpoint() {
        let f = RealPoly::from_roots(&[1.0, 3.0]);
        let g = RealPoly::from_roots(&[1.0, 5.0]);
        let h = convex_combination(&f, &g, &0.5).unwrap();
        assert_eq!(h.coeffs(), &[4.0, -5.0, 1.0]);
        assert_eq!(convex_combination(&f, &g, &0.0).unwrap(), f);
        assert_eq!(convex_combination(&f, &g, &1.0).unwrap(), g);
        assert!(convex_combination(&f, &p(&[1.0, 1.0]), &0.5).is_err());
    }

    #[test]
    fn interlacing_examples() {
        let f = RealPoly::from_roots(&[1.0, 3.0]);
        assert!(interlaces(&RealPoly::from_roots(&[2.0]), &f).unwrap());
        assert!(!interlaces(&RealPoly::from_roots(&[5.0]), &f).unwrap());
        let sq = RealPoly::from_roots(&[1.0, 1.0]);
        assert!(interlaces(&RealPoly::from_roots(&[1.0]), &sq).unwrap());
        assert!(matches!(interlaces(&f, &f), Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn split_double_root_still_interlaces() {
        // (x - 1/2)(x - 1)^2(x - 3/2) with rounding in the coefficients, next to (x - 1)^4.
        let a = p(&[0.7500000000000002, -3.500000000000002, 5.7500000000000036, -4.000000000000001, 1.0]);
        let b = p(&[1.0000000000000004, -4.0000000000000036, 6.000000000000003, -4.000000000000001, 1.0]);
        let ra = a.roots().unwrap().roots;
        assert!(ra[2] - ra[1] > 1e-9, "the double root splits in float");
        assert!(common_interlacing(&[a, b]).unwrap());
    }

    #[test]
    fn common_interlacing_examples() {
        let a = RealPoly::from_roots(&[1.0, 3.0]);
        assert!(common_interlacing(&[a.clone(), a]).unwrap());
        let b = RealPoly::from_roots(&[1.0, 4.0]);
        let c = RealPoly::from_roots(&[2.0, 3.0]);
        assert!(common_interlacing(&[b, c]).unwrap());
        let d = RealPoly::from_roots(&[1.0, 2.0]);
        let e = RealPoly::from_roots(&[3.0, 4.0]);
        assert!(!common_interlacing(&[d, e]).unwrap());
    }

    #[test]
    fn json_round_trip_exact() {
        let q = RealPoly::<BigRational>::new(vec![BigRational::ratio(1, 3), BigRational::int(-2)]);
        let v = q.to_json();
        assert_eq!(v.to_string(), r#"["1/3","-2/1"]"#);
        assert_eq!(RealPoly::from_json(&v).unwrap(), q);
    }
}
