//! The dual numeric tower: `f64` for speed, `BigRational` for identities.
//!
//! Everything above this module is written once, generically over
//! [`Scalar`]. The handful of operations whose algorithm depends on the
//! mode (eigen-solvers, root certification, serialization) dispatch here.

use std::fmt::Debug;
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, Complex, FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg;
use crate::roots::{self, RootBundle};

pub type C<T> = Complex<T>;
pub type C64 = Complex<f64>;

/// Relative tolerance used by float-mode zero tests.
pub const FLOAT_ZERO_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;
    const MODE: &'static str;

    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer conversion")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::int(num) / Self::int(den)
    }

    /// Lossless in float mode, exact binary expansion in exact mode.
    fn from_f64_value(x: f64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Zero test: equality in exact mode, `|x| <= tol * scale` in float mode.
    fn negligible(&self, scale: f64) -> bool;

    /// Coefficients (ascending) of `det(xI - A)` for a Hermitian `A`.
    fn char_poly(n: usize, a: &[C<Self>]) -> Vec<Self>;

    /// Determinant of a Hermitian matrix (real by symmetry).
    fn det_hermitian(n: usize, a: &[C<Self>]) -> Self;

    /// Determinant of a general square complex matrix.
    fn det_general(n: usize, a: &[C<Self>]) -> C<Self>;

    /// PSD verdict plus the smallest eigenvalue (or a pivot witness in exact mode).
    fn psd(n: usize, a: &[C<Self>]) -> (bool, f64);

    fn certify_roots(coeffs: &[Self]) -> Result<RootBundle>;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_f64_value(x: f64) -> Self {
        x
    }

    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_ZERO_TOL * scale.max(f64::MIN_POSITIVE)
    }

    fn char_poly(n: usize, a: &[C64]) -> Vec<f64> {
        let (eig, _) = linalg::eigh_f64(n, a);
        let mut coeffs = vec![1.0];
        for lam in eig {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= lam * c;
            }
            coeffs = next;
        }
        coeffs
    }

    fn det_hermitian(n: usize, a: &[C64]) -> f64 {
        linalg::det_lu_f64(n, a).re
    }

    fn det_general(n: usize, a: &[C64]) -> C64 {
        linalg::det_lu_f64(n, a)
    }

    fn psd(n: usize, a: &[C64]) -> (bool, f64) {
        if n == 0 {
            return (true, 0.0);
        }
        let (eig, _) = linalg::eigh_f64(n, a);
        let norm = eig.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let min = eig[0];
        (min >= -1e-10 * norm, min)
    }

    fn certify_roots(coeffs: &[f64]) -> Result<RootBundle> {
        roots::certify_float(coeffs)
    }

    fn to_json(&self) -> Value {
        serde_json::json!(self)
    }

    fn from_json(v: &Value) -> Result<f64> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::InvalidInput(format!("bad number {n}"))),
            Value::String(s) => parse_rational(s).map(|q| q.to_f64_lossy()),
            other => Err(Error::InvalidInput(format!("expected a number, got {other}"))),
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn from_f64_value(x: f64) -> Self {
        BigRational::from_f64(x).expect("finite float")
    }

    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn char_poly(n: usize, a: &[C<Self>]) -> Vec<Self> {
        linalg::faddeev_leverrier(n, a)
            .into_iter()
            .map(|c| {
                debug_assert!(c.im.is_zero());
                c.re
            })
            .collect()
    }

    fn det_hermitian(n: usize, a: &[C<Self>]) -> Self {
        let d = linalg::det_bareiss(n, a);
        debug_assert!(d.im.is_zero());
        d.re
    }

    fn det_general(n: usize, a: &[C<Self>]) -> C<Self> {
        linalg::det_bareiss(n, a)
    }

    fn psd(n: usize, a: &[C<Self>]) -> (bool, f64) {
        match linalg::ldl_pivoted(n, a) {
            Ok(_) => (true, 0.0),
            Err(witness) => (false, witness),
        }
    }

    fn certify_roots(coeffs: &[Self]) -> Result<RootBundle> {
        roots::certify_exact(coeffs)
    }

    fn to_json(&self) -> Value {
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(BigRational::from_integer(BigInt::from(i)))
                } else {
                    let f = n.as_f64().unwrap_or(f64::NAN);
                    BigRational::from_f64(f)
                        .ok_or_else(|| Error::InvalidInput(format!("bad number {n}")))
                }
            }
            other => Err(Error::InvalidInput(format!("expected a rational, got {other}"))),
        }
    }
}

/// Parses `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Ok(BigRational::from_integer(i));
    }
    let f: f64 = s.parse().map_err(|_| bad())?;
    BigRational::from_f64(f).ok_or_else(bad)
}

pub fn cabs2<T: Scalar>(z: &C<T>) -> T {
    z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()
}

pub fn creal<T: Scalar>(x: T) -> C<T> {
    C::new(x, T::zero())
}

pub fn cone<T: Scalar>() -> C<T> {
    C::new(T::one(), T::zero())
}

pub fn c_to_f64<T: Scalar>(z: &C<T>) -> C64 {
    C64::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

/// `n!` as a scalar.
pub fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::int(i as i64))
}

/// `base^exp` by repeated multiplication (exact in both modes for small exponents).
pub fn powi<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_json_round_trip() {
        let q = BigRational::new(BigInt::from(-7), BigInt::from(12));
        let v = q.to_json();
        assert_eq!(v, Value::String("-7/12".into()));
        assert_eq!(BigRational::from_json(&v).unwrap(), q);
    }

    #[test]
    fn parse_accepts_integers_and_decimals() {
        assert_eq!(parse_rational("3").unwrap(), BigRational::int(3));
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::ratio(1, 4));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn factorial_small() {
        assert_eq!(factorial::<f64>(5), 120.0);
        assert_eq!(factorial::<BigRational>(0), <BigRational as num::One>::one());
    }
}
