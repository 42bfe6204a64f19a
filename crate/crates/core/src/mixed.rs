//! The mixed characteristic polynomial `μ[X_1,…,X_m]` by three independent
//! routes, and the maxroot sandwich around it.
//!
//! * Gram route: `μ(x) = x^{d-m} k^m ψ_{k,m}[A](x/k)` with `A = U*U`.
//! * Derivative route: `Π(1-∂_{z_i}) det[xI + Σ z_i X_i]` at `z = 0`, each
//!   `(1-∂_{z_i})` realized as a functional on integer interpolation nodes.
//! * Expectation route: the average of `det[xI - Σ W_i]` over independent
//!   rank-one randomizations built from a pivoted LDL* of each `X_i`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds;
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, VectorSystem};
use crate::interp::{derivative_weight_polys, integer_nodes};
use crate::km::{choose_route, km_char_poly_route, KmContext, PsiRoute};
use crate::poly::RealPoly;
use crate::reduce::chunked_tree_sum;
use crate::scalar::{powi, Scalar};

/// Grid-size gate for the derivative-definition oracle.
pub const DERIVATIVE_GRID_GATE: u64 = 1 << 20;
/// Largest `m` and `d` accepted by the derivative-definition oracle.
pub const DERIVATIVE_ORACLE_LIMIT: usize = 8;
/// Gate on support combinations in the expectation identity.
pub const EXPECTATION_GATE: u64 = 1 << 16;
/// Gate on rank-one outcome combinations inside one expectation.
pub const RANK_ONE_GATE: u64 = 1 << 20;
/// Slack for theorem checks in float mode, scaled by `1 + ‖ΣX‖`.
pub const CHECK_SLACK: f64 = 1e-9;

/// `X_i = Σ_j u_{i,j}u_{i,j}*` with `ΣX_i ⪯ I`, plus the paving parameter `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionInstance<T: Scalar> {
    r: usize,
    system: VectorSystem<T>,
    epsilon: T,
}

impl<T: Scalar> DecompositionInstance<T> {
    /// Validates `ΣX_i ⪯ I_d` and recomputes `ε = max tr X_i`.
    pub fn new(system: VectorSystem<T>, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InstanceInvalid("r must be at least 1".into()));
        }
        let sum = system.sum_matrix();
        if !sum.is_contraction() {
            return Err(Error::InstanceInvalid(format!(
                "sum of pieces is not below the identity (norm {:.6})",
                sum.operator_norm()
            )));
        }
        let epsilon = system.epsilon();
        Ok(DecompositionInstance { r, system, epsilon })
    }

    pub fn d(&self) -> usize {
        self.system.d()
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    pub fn k(&self) -> usize {
        self.system.k()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn system(&self) -> &VectorSystem<T> {
        &self.system
    }

    pub fn epsilon(&self) -> &T {
        &self.epsilon
    }

    pub fn matrices(&self) -> Vec<HermitianMatrix<T>> {
        self.system.matrices()
    }

    pub fn to_f64(&self) -> DecompositionInstance<f64> {
        DecompositionInstance {
            r: self.r,
            system: self.system.to_f64(),
            epsilon: self.epsilon.to_f64_lossy(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "mode": T::MODE,
            "r": self.r,
            "epsilon": self.epsilon.to_json(),
            "system": self.system.to_json(),
        })
    }

    /// Reads an instance; any stored `epsilon` is ignored and recomputed.
    pub fn from_json(v: &Value) -> Result<Self> {
        let r = v["r"].as_u64().unwrap_or(1) as usize;
        let system = VectorSystem::from_json(&v["system"])?;
        Self::new(system, r)
    }
}

/// `μ` from a vector system through the Gram matrix and `ψ_{k,m}`.
pub fn mu_of_system<T: Scalar>(system: &VectorSystem<T>, override_gate: bool) -> Result<RealPoly<T>> {
    let (d, m, k) = (system.d(), system.m(), system.k());
    if m == 0 {
        return Ok(RealPoly::monomial(T::one(), d));
    }
    let ctx = KmContext::new(k, m)?.with_override(override_gate);
    let route = choose_route(&ctx, d);
    mu_of_system_route(system, &ctx, route)
}

/// As [`mu_of_system`], with the `ψ` route fixed by the caller.
pub fn mu_of_system_route<T: Scalar>(
    system: &VectorSystem<T>,
    ctx: &KmContext,
    route: PsiRoute,
) -> Result<RealPoly<T>> {
    let d = system.d();
    let psi = km_char_poly_route(&system.gram_matrix(), ctx, route)?;
    psi_to_mu(&psi, ctx.k, d)
}

/// `x^{d-m} k^m ψ(x/k)`, dividing by `x^{m-d}` when `d < m`.
pub fn psi_to_mu<T: Scalar>(psi: &RealPoly<T>, k: usize, d: usize) -> Result<RealPoly<T>> {
    let m = psi.degree();
    let kk = T::int(k as i64);
    let scaled = psi.compose_scale(&(T::one() / kk.clone())).scale(&powi(&kk, m));
    if d >= m {
        Ok(scaled.mul_xpow(d - m))
    } else {
        scaled.div_xpow(m - d)
    }
}

pub fn mu_via_gram<T: Scalar>(inst: &DecompositionInstance<T>) -> Result<RealPoly<T>> {
    mu_of_system(&inst.system, false)
}

/// `Π(1-∂_{z_i}) det[xI + Σ z_i X_i] |_{z=0}` for arbitrary Hermitian `X_i`.
///
/// The polynomial has degree at most `rank X_i` in `z_i`, so `z_i` is sampled
/// on the nodes `0..=rank X_i` and `(1-∂)` at zero becomes a weight vector.
pub fn mu_via_derivative_definition<T: Scalar>(xs: &[HermitianMatrix<T>], d: usize) -> Result<RealPoly<T>> {
    Ok(derivative_oracle(xs, d)?.0)
}

/// Float tolerance factor applied to the rounding scale of the derivative oracle.
pub const ORACLE_ROUNDING: f64 = 1e-12;

/// Whether `poly` matches a derivative-oracle result.
///
/// The oracle's weights alternate in sign, so its float error follows
/// `Σ|w|·|coefficients|` (the `scale`) rather than the result itself.
pub fn agrees_with_oracle<T: Scalar>(poly: &RealPoly<T>, oracle: &RealPoly<T>, scale: &RealPoly<f64>) -> bool {
    if T::EXACT {
        return poly == oracle;
    }
    if poly.approx_eq(oracle) {
        return true;
    }
    let n = poly.degree().max(oracle.degree()) + 1;
    (0..n).all(|i| {
        let gap = (poly.coeff(i) - oracle.coeff(i)).to_f64_lossy().abs();
        gap <= ORACLE_ROUNDING * scale.max_abs_coeff() + 1e-9 * scale.coeff(i).abs()
    })
}

/// The derivative oracle together with its rounding scale `Σ|w|·|coefficients|`.
pub fn derivative_oracle<T: Scalar>(xs: &[HermitianMatrix<T>], d: usize) -> Result<(RealPoly<T>, RealPoly<f64>)> {
    let m = xs.len();
    if m > DERIVATIVE_ORACLE_LIMIT || d > DERIVATIVE_ORACLE_LIMIT {
        return Err(Error::SizeLimitExceeded(format!(
            "derivative oracle needs m, d <= {DERIVATIVE_ORACLE_LIMIT} (m={m}, d={d})"
        )));
    }
    if let Some(x) = xs.iter().find(|x| x.dim() != d) {
        return Err(Error::DimensionMismatch(format!("{}x{} piece in dimension {d}", x.dim(), x.dim())));
    }
    let zero = T::zero();
    let weights: Vec<Vec<T>> = xs
        .iter()
        .map(|x| {
            let nodes = integer_nodes::<T>(x.rank() + 1);
            let l = derivative_weight_polys(&nodes, 0);
            let dl = derivative_weight_polys(&nodes, 1);
            l.iter().zip(&dl).map(|(a, b)| a.eval(&zero) - b.eval(&zero)).collect()
        })
        .collect();
    let sizes: Vec<u64> = weights.iter().map(|w| w.len() as u64).collect();
    let total = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s))
        .filter(|&t| t <= DERIVATIVE_GRID_GATE)
        .ok_or_else(|| Error::SizeLimitExceeded("derivative oracle grid exceeds 2^20 points".into()))?;
    let point = |mut idx: u64| -> (T, HermitianMatrix<T>) {
        let mut w = T::one();
        let mut mat = HermitianMatrix::zeros(d);
        for (i, x) in xs.iter().enumerate() {
            let n = (idx % sizes[i]) as usize;
            idx /= sizes[i];
            w = w * weights[i][n].clone();
            if n > 0 {
                mat = mat.plus(&x.scale(&T::int(n as i64)));
            }
        }
        (w, mat)
    };
    let sum = chunked_tree_sum(
        total,
        |start, end| {
            (start..end).fold((RealPoly::zero(), RealPoly::zero()), |(acc, mag), idx| {
                let (w, mat) = point(idx);
                if w.is_zero() {
                    return (acc, mag);
                }
                // det[xI + M] is the characteristic polynomial of -M.
                let term = mat.scale(&-T::one()).char_poly().scale(&w);
                let abs = RealPoly::new((0..=term.degree()).map(|i| term.coeff(i).to_f64_lossy().abs()).collect());
                (&acc + &term, &mag + &abs)
            })
        },
        |a, b| (&a.0 + &b.0, &a.1 + &b.1),
    );
    Ok(sum.unwrap_or_else(|| (RealPoly::monomial(T::one(), d), RealPoly::monomial(1.0, d))))
}

/// `𝔼 det[xI - Σ W_i]` where `W_i` equals `n_i w v v*` with probability
/// `1/n_i` over the `n_i` LDL* terms of `X_i` (and is zero when `X_i = 0`).
pub fn mu_rank_one_expectation<T: Scalar>(xs: &[HermitianMatrix<T>], d: usize) -> Result<RealPoly<T>> {
    if let Some(x) = xs.iter().find(|x| x.dim() != d) {
        return Err(Error::DimensionMismatch(format!("{}x{} piece in dimension {d}", x.dim(), x.dim())));
    }
    let outcomes: Vec<Vec<HermitianMatrix<T>>> = xs
        .iter()
        .map(|x| {
            let terms = x.rank_one_terms()?;
            let n = T::int(terms.len() as i64);
            Ok(terms
                .iter()
                .map(|t| HermitianMatrix::rank_one(&t.vector).scale(&(t.weight.clone() * n.clone())))
                .collect::<Vec<_>>())
        })
        .collect::<Result<_>>()?;
    let sizes: Vec<u64> = outcomes.iter().map(|o| o.len().max(1) as u64).collect();
    let total = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s))
        .filter(|&t| t <= RANK_ONE_GATE)
        .ok_or_else(|| Error::SizeLimitExceeded("rank-one expectation exceeds 2^20 outcomes".into()))?;
    let sum = chunked_tree_sum(
        total,
        |start, end| {
            (start..end).fold(RealPoly::zero(), |acc, mut idx| {
                let mut mat = HermitianMatrix::zeros(d);
                for (i, o) in outcomes.iter().enumerate() {
                    let n = (idx % sizes[i]) as usize;
                    idx /= sizes[i];
                    if let Some(w) = o.get(n) {
                        mat = mat.plus(w);
                    }
                }
                &acc + &mat.char_poly()
            })
        },
        |a, b| &a + &b,
    )
    .expect("at least one outcome");
    Ok(sum.scale(&(T::one() / T::int(total as i64))))
}

/// A finitely supported random Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Support<T: Scalar> {
    pub outcomes: Vec<(T, HermitianMatrix<T>)>,
}

impl<T: Scalar> Support<T> {
    pub fn new(outcomes: Vec<(T, HermitianMatrix<T>)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidInput("empty support".into()));
        }
        let total = outcomes.iter().fold(T::zero(), |acc, (p, _)| acc + p.clone());
        if !(total - T::one()).negligible(1.0) || outcomes.iter().any(|(p, _)| *p < T::zero()) {
            return Err(Error::InvalidInput("support probabilities must be non-negative and sum to 1".into()));
        }
        Ok(Support { outcomes })
    }

    pub fn deterministic(x: HermitianMatrix<T>) -> Self {
        Support { outcomes: vec![(T::one(), x)] }
    }

    pub fn uniform(xs: Vec<HermitianMatrix<T>>) -> Self {
        let p = T::one() / T::int(xs.len() as i64);
        Support { outcomes: xs.into_iter().map(|x| (p.clone(), x)).collect() }
    }

    pub fn mean(&self) -> HermitianMatrix<T> {
        let d = self.outcomes[0].1.dim();
        self.outcomes
            .iter()
            .fold(HermitianMatrix::zeros(d), |acc, (p, x)| acc.plus(&x.scale(p)))
    }
}

/// Both sides of `𝔼 μ[W_1,…,W_m] = μ[𝔼W_1,…,𝔼W_m]`; returns the right side
/// after checking it against the left.
pub fn mu_via_expectation<T: Scalar>(supports: &[Support<T>], d: usize) -> Result<RealPoly<T>> {
    let sizes: Vec<u64> = supports.iter().map(|s| s.outcomes.len() as u64).collect();
    let total = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s))
        .filter(|&t| t <= EXPECTATION_GATE)
        .ok_or_else(|| Error::SizeLimitExceeded("more than 2^16 support combinations".into()))?;
    let means: Vec<HermitianMatrix<T>> = supports.iter().map(Support::mean).collect();
    let right = mu_rank_one_expectation(&means, d)?;
    if total == 1 {
        return Ok(right);
    }
    let mut left = RealPoly::zero();
    for mut idx in 0..total {
        let mut p = T::one();
        let mut chosen = Vec::with_capacity(supports.len());
        for (i, s) in supports.iter().enumerate() {
            let (q, w) = &s.outcomes[(idx % sizes[i]) as usize];
            idx /= sizes[i];
            p = p * q.clone();
            chosen.push(w.clone());
        }
        if p.is_zero() {
            continue;
        }
        left = &left + &mu_rank_one_expectation(&chosen, d)?.scale(&p);
    }
    if !left.approx_eq(&right) {
        return Err(Error::AffineLinearityViolation(left.coeff_gap(&right)));
    }
    Ok(right)
}

/// The maxroot sandwich `‖ΣX‖ ≤ maxroot μ ≤ (√(1-ε/(k-1)) + √ε)²`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MaxrootReport {
    pub k: usize,
    pub epsilon: f64,
    pub maxroot: f64,
    pub norm_sum: f64,
    pub lower_ok: bool,
    /// `None` when the ε-hypothesis fails.
    pub upper_bound: Option<f64>,
    pub upper_ok: Option<bool>,
    pub residual_imag: f64,
}

impl MaxrootReport {
    /// Turns a failed check into an error; a skipped upper bound is not an error.
    pub fn ensure(&self) -> Result<()> {
        if !self.lower_ok {
            return Err(Error::BoundViolated(format!(
                "norm {} exceeds maxroot {}",
                self.norm_sum, self.maxroot
            )));
        }
        if self.upper_ok == Some(false) {
            return Err(Error::BoundViolated(format!(
                "maxroot {} exceeds {}",
                self.maxroot,
                self.upper_bound.unwrap_or(f64::NAN)
            )));
        }
        Ok(())
    }
}

pub fn maxroot_mu<T: Scalar>(inst: &DecompositionInstance<T>) -> Result<MaxrootReport> {
    maxroot_report(&mu_via_gram(inst)?, inst)
}

/// Evaluates the sandwich for an already computed `μ`.
pub fn maxroot_report<T: Scalar>(mu: &RealPoly<T>, inst: &DecompositionInstance<T>) -> Result<MaxrootReport> {
    let roots = mu.roots()?;
    let maxroot = roots.maxroot();
    let norm_sum = inst.system.sum_matrix().operator_norm();
    let slack = CHECK_SLACK * (1.0 + norm_sum);
    let epsilon = inst.epsilon.to_f64_lossy();
    let upper_bound = bounds::mu_maxroot_bound(inst.k(), epsilon);
    Ok(MaxrootReport {
        k: inst.k(),
        epsilon,
        maxroot,
        norm_sum,
        lower_ok: norm_sum <= maxroot + slack,
        upper_bound,
        upper_ok: upper_bound.map(|b| maxroot <= b + slack),
        residual_imag: roots.residual_imag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{creal, C};
    use num::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> C<Q> {
        creal(Q::ratio(n, d))
    }

    /// m = 4, d = 2, k = 2, X_i = I/4 with u_{i,j} = e_j / 2.
    fn quarter_identity() -> DecompositionInstance<Q> {
        let group = vec![vec![q(1, 2), q(0, 1)], vec![q(0, 1), q(1, 2)]];
        let sys = VectorSystem::new(2, 2, vec![group; 4]).unwrap();
        DecompositionInstance::new(sys, 1).unwrap()
    }

    #[test]
    fn quarter_identity_three_routes() {
        let inst = quarter_identity();
        let gram = mu_via_gram(&inst).unwrap();
        // μ[X] = x² - 2x + 3/4 from the rank-two expansion by hand.
        assert_eq!(gram.coeffs(), &[Q::ratio(3, 4), Q::int(-2), Q::int(1)]);
        let xs = inst.matrices();
        assert_eq!(mu_via_derivative_definition(&xs, 2).unwrap(), gram);
        assert_eq!(mu_rank_one_expectation(&xs, 2).unwrap(), gram);
        let report = maxroot_mu(&inst).unwrap();
        assert!((report.maxroot - 1.5).abs() < 1e-12);
        assert_eq!(report.upper_bound, Some(2.0));
        report.ensure().unwrap();
    }

    #[test]
    fn single_rank_one_piece() {
        let sys = VectorSystem::new(2, 1, vec![vec![vec![q(1, 1), q(0, 1)]]]).unwrap();
        let inst = DecompositionInstance::new(sys, 1).unwrap();
        let mu = mu_via_gram(&inst).unwrap();
        assert_eq!(mu.coeffs(), &[Q::int(0), Q::int(-1), Q::int(1)]);
    }

    #[test]
    fn fewer_dimensions_than_pieces_divides_out() {
        // d = 1 < m = 4, X_i = [1/4].
        let v = vec![vec![vec![creal(Q::int(1))]]; 4];
        let sys = VectorSystem::new(1, 1, v).unwrap().scale_vectors(&Q::ratio(1, 2));
        let xs = sys.matrices();
        assert_eq!(xs[0].get(0, 0).re, Q::ratio(1, 4));
        let inst = DecompositionInstance::new(sys, 1).unwrap();
        let mu = mu_via_gram(&inst).unwrap();
        assert_eq!(mu, mu_via_derivative_definition(&xs, 1).unwrap());
        assert_eq!(mu.coeffs(), &[Q::int(-1), Q::int(1)]);
    }

    #[test]
    fn expectation_of_two_point_support() {
        // W uniform on {2e1e1*, 2e2e2*}; 𝔼W = I.
        let e1 = HermitianMatrix::<Q>::diagonal(&[Q::int(2), Q::int(0)]);
        let e2 = HermitianMatrix::<Q>::diagonal(&[Q::int(0), Q::int(2)]);
        let mu = mu_via_expectation(&[Support::uniform(vec![e1, e2])], 2).unwrap();
        let direct = mu_via_derivative_definition(&[HermitianMatrix::identity(2)], 2).unwrap();
        assert_eq!(mu, direct);
        assert_eq!(mu.coeffs(), &[Q::int(0), Q::int(-2), Q::int(1)]);
    }

    #[test]
    fn rejects_sum_above_identity() {
        let sys = VectorSystem::new(1, 1, vec![vec![vec![creal(Q::int(1))]]; 2]).unwrap();
        assert!(matches!(DecompositionInstance::new(sys, 1), Err(Error::InstanceInvalid(_))));
    }

    #[test]
    fn derivative_oracle_gate() {
        let xs = vec![HermitianMatrix::<f64>::zeros(2); 9];
        assert!(matches!(mu_via_derivative_definition(&xs, 2), Err(Error::SizeLimitExceeded(_))));
        let zeros = vec![HermitianMatrix::<f64>::zeros(3); 2];
        assert_eq!(mu_via_derivative_definition(&zeros, 3).unwrap(), RealPoly::monomial(1.0, 3));
    }
}
