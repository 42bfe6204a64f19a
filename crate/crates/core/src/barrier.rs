//! Barrier-function certificates for `maxroot ψ_{k,m}[A]`.
//!
//! `p_0(z) = det[Z_k - A]` and `p_t = ∂_{z_t}^{k-1} p_{t-1}`. Starting from
//! `b_0 = a·1`, each step lowers coordinate `t` by
//! `δ_t = ((k-1)²/k) / (Φ^t_{p_{t-1}}(b_{t-1}) - 1/(a - λ_t))`, where `λ_t` is
//! the smallest root of the axis-`t` slice of `p_{t-1}` through `b_{t-1}`.
//! After `m` steps `p_m(x·1) ∝ ψ(x)` and `b_m` sits above its roots.

use serde::Serialize;

use crate::bounds;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::interp::{derivative_weights, integer_nodes, interpolate};
use crate::km::{choose_route, km_char_poly_route, shifted, KmContext};
use crate::poly::RealPoly;
use crate::scalar::{creal, Scalar};

/// Absolute slack of every step assertion, multiplied by `1 + ‖A‖`.
pub const STEP_SLACK: f64 = 1e-9;

/// Smallest starting height used when `a₀ ≤ 1`.
pub const MIN_HEIGHT: f64 = 1.0 + 1e-6;

/// `Π_i ∂_{z_i}^{orders_i} det[Z_k - A]`.
#[derive(Clone, Debug)]
pub struct MultiDetPoly<T: Scalar> {
    ctx: KmContext,
    a: HermitianMatrix<T>,
    orders: Vec<usize>,
    /// Derivative weights on the offsets `0..=k`, indexed by order.
    weights: Vec<Vec<T>>,
}

impl<T: Scalar> MultiDetPoly<T> {
    /// `p_0 = det[Z_k - A]`.
    pub fn base(a: &HermitianMatrix<T>, ctx: &KmContext) -> Result<Self> {
        ctx.check_matrix(a)?;
        let nodes = integer_nodes::<T>(ctx.k + 1);
        let weights = (0..ctx.k).map(|o| derivative_weights(&nodes, &T::zero(), o)).collect();
        Ok(MultiDetPoly { ctx: *ctx, a: a.clone(), orders: vec![0; ctx.m], weights })
    }

    /// `p_t`: the first `t` axes differentiated `k-1` times.
    pub fn p_t(a: &HermitianMatrix<T>, ctx: &KmContext, t: usize) -> Result<Self> {
        let mut p = Self::base(a, ctx)?;
        for axis in 0..t.min(ctx.m) {
            p = p.differentiate(axis)?;
        }
        Ok(p)
    }

    /// `∂_{z_axis}^{k-1}` of this polynomial (the axis must be untouched).
    pub fn differentiate(&self, axis: usize) -> Result<Self> {
        if axis >= self.ctx.m || self.orders[axis] != 0 {
            return Err(Error::InvalidInput(format!("axis {axis} cannot be differentiated again")));
        }
        let mut out = self.clone();
        out.orders[axis] = self.ctx.k - 1;
        Ok(out)
    }

    pub fn ctx(&self) -> &KmContext {
        &self.ctx
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.a
    }

    pub fn is_base(&self) -> bool {
        self.orders.iter().all(|&o| o == 0)
    }

    /// Degree of the polynomial in `z_axis`.
    pub fn axis_degree(&self, axis: usize) -> usize {
        self.ctx.k - self.orders[axis]
    }

    pub fn eval(&self, z: &[T]) -> Result<T> {
        if z.len() != self.ctx.m {
            return Err(Error::DimensionMismatch(format!("point of length {} for m={}", z.len(), self.ctx.m)));
        }
        let axes: Vec<usize> = (0..self.ctx.m).filter(|&i| self.orders[i] > 0).collect();
        let base = self.ctx.k as u64 + 1;
        let total = base.pow(axes.len() as u32);
        let n = self.a.dim();
        let mut acc = T::zero();
        let mut point = z.to_vec();
        for mut word in 0..total {
            let mut w = T::one();
            for &i in &axes {
                let off = (word % base) as usize;
                word /= base;
                w = w * self.weights[self.orders[i]][off].clone();
                point[i] = z[i].clone() + T::int(off as i64);
            }
            if w.is_zero() {
                continue;
            }
            acc = acc + w * T::det_hermitian(n, &shifted(&self.a, self.ctx.m, &point));
        }
        Ok(acc)
    }

    /// The univariate restriction `s ↦ p(z with z_axis = s)`.
    pub fn slice(&self, z: &[T], axis: usize) -> Result<RealPoly<T>> {
        let deg = self.axis_degree(axis);
        let nodes = integer_nodes::<T>(deg + 1);
        let mut point = z.to_vec();
        let values = nodes
            .iter()
            .map(|s| {
                point[axis] = s.clone();
                self.eval(&point)
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(interpolate(&nodes, &values))
    }
}

impl MultiDetPoly<f64> {
    /// Membership of `z` in the region above the roots.
    ///
    /// For `p_0` this is positive definiteness of `Z_k - A`. For derivative
    /// polynomials every axis slice must be real-rooted with its largest root
    /// strictly below `z_axis`, and `p(z) > 0`.
    pub fn above_roots(&self, z: &[f64]) -> Result<bool> {
        if self.is_base() {
            let n = self.a.dim();
            let entries = shifted(&self.a, self.ctx.m, z);
            let m = HermitianMatrix::new(n, entries)?;
            return Ok(m.eigenvalues().first().is_none_or(|&l| l > 0.0));
        }
        if self.eval(z)? <= 0.0 {
            return Ok(false);
        }
        for axis in 0..self.ctx.m {
            let q = self.slice(z, axis)?;
            if q.degree() == 0 {
                continue;
            }
            if q.maxroot()? >= z[axis] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Φ^i_p(z) = ∂_{z_i} p / p`.
    pub fn barrier_phi(&self, z: &[f64], i: usize) -> Result<f64> {
        if i >= self.ctx.m {
            return Err(Error::DimensionMismatch(format!("direction {i} for m={}", self.ctx.m)));
        }
        if self.is_base() {
            return self.base_phi(z, i);
        }
        let value = self.eval(z)?;
        if value <= 0.0 {
            return Err(Error::NotAboveRoots(format!("p(z) = {value:e}")));
        }
        let deg = self.axis_degree(i);
        let nodes = integer_nodes::<f64>(deg + 1);
        let w = derivative_weights(&nodes, &0.0, 1);
        let mut point = z.to_vec();
        let mut deriv = 0.0;
        for (off, wn) in w.iter().enumerate() {
            point[i] = z[i] + off as f64;
            deriv += wn * self.eval(&point)?;
        }
        Ok(deriv / value)
    }

    /// Closed form `Σ_j [(Z_k - A)^{-1}]_{c,c}` over `c = i + j·m`.
    fn base_phi(&self, z: &[f64], i: usize) -> Result<f64> {
        let n = self.a.dim();
        let m = HermitianMatrix::new(n, shifted(&self.a, self.ctx.m, z))?;
        let (eig, vecs) = m.eigh();
        if eig.first().is_some_and(|&l| l <= 0.0) {
            return Err(Error::NotAboveRoots(format!("smallest eigenvalue {:e}", eig[0])));
        }
        let mut phi = 0.0;
        for j in 0..self.ctx.k {
            let c = i + j * self.ctx.m;
            phi += eig.iter().zip(&vecs).map(|(l, v)| v[c].norm_sqr() / l).sum::<f64>();
        }
        Ok(phi)
    }
}

/// Largest diagonal mass `max_i Σ_j A_{i+jm, i+jm}`.
pub fn diagonal_mass<T: Scalar>(a: &HermitianMatrix<T>, ctx: &KmContext) -> f64 {
    (0..ctx.m)
        .map(|i| (0..ctx.k).map(|j| a.diag(i + j * ctx.m).to_f64_lossy()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_contraction(a: &HermitianMatrix<f64>) -> Result<()> {
    if !a.is_psd() || !a.is_contraction() {
        return Err(Error::HypothesisOutOfRange("A must satisfy 0 ⪯ A ⪯ I".into()));
    }
    Ok(())
}

/// Returns `ε/(a-1) + (k-ε)/a` after checking it dominates `Φ^i_{p_0}(a·1)`
/// in every direction.
pub fn initial_phi_bound(a_mat: &HermitianMatrix<f64>, ctx: &KmContext, a: f64, eps: f64) -> Result<f64> {
    ctx.check_matrix(a_mat)?;
    if a <= 1.0 {
        return Err(Error::HypothesisOutOfRange(format!("height {a} must exceed 1")));
    }
    check_contraction(a_mat)?;
    let slack = STEP_SLACK * (1.0 + a_mat.operator_norm());
    let mass = diagonal_mass(a_mat, ctx);
    if eps + slack < mass {
        return Err(Error::HypothesisOutOfRange(format!("eps {eps} below diagonal mass {mass}")));
    }
    let bound = bounds::initial_phi_bound_value(ctx.k, eps, a);
    let p0 = MultiDetPoly::base(a_mat, ctx)?;
    let z = vec![a; ctx.m];
    for i in 0..ctx.m {
        let phi = p0.barrier_phi(&z, i)?;
        if phi > bound + slack {
            return Err(Error::BoundViolated(format!("Φ^{i} = {phi} exceeds {bound}")));
        }
    }
    Ok(bound)
}

/// The point `b_t`, the steps so far, and the barrier values seen.
#[derive(Clone, Debug, Serialize)]
pub struct BarrierState {
    #[serde(skip)]
    p: MultiDetPoly<f64>,
    pub k: usize,
    pub m: usize,
    pub height: f64,
    pub t: usize,
    pub b: Vec<f64>,
    pub deltas: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// `Φ^i_{p_t}(b_t)` for every direction, one row per `t = 0..=steps`.
    pub phi_trace: Vec<Vec<f64>>,
    #[serde(skip)]
    slack: f64,
}

impl BarrierState {
    pub fn new(a_mat: &HermitianMatrix<f64>, ctx: &KmContext, height: f64) -> Result<Self> {
        let p = MultiDetPoly::base(a_mat, ctx)?;
        let b = vec![height; ctx.m];
        if !p.above_roots(&b)? {
            return Err(Error::NotAboveRoots(format!("height {height} is not above the roots of p_0")));
        }
        let phi = (0..ctx.m).map(|i| p.barrier_phi(&b, i)).collect::<Result<Vec<_>>>()?;
        Ok(BarrierState {
            k: ctx.k,
            m: ctx.m,
            height,
            t: 0,
            b,
            deltas: Vec::new(),
            lambdas: Vec::new(),
            phi_trace: vec![phi],
            slack: STEP_SLACK * (1.0 + a_mat.operator_norm()),
            p,
        })
    }

    pub fn poly(&self) -> &MultiDetPoly<f64> {
        &self.p
    }

    pub fn is_complete(&self) -> bool {
        self.t == self.m
    }
}

/// One `δ`-step: differentiates axis `t` and lowers `b_t` along it.
pub fn delta_step(state: &BarrierState) -> Result<BarrierState> {
    let t = state.t;
    if t >= state.m {
        return Err(Error::InvalidInput("all steps already taken".into()));
    }
    let kf = state.k as f64;
    let q = state.p.slice(&state.b, t)?;
    let lambda = q.minroot()?;
    if lambda < -state.slack {
        return Err(Error::MinrootNegative(lambda));
    }
    let phi = state.phi_trace[t][t];
    let zt = state.b[t];
    let delta = (kf - 1.0) * (kf - 1.0) / kf / (phi - 1.0 / (zt - lambda));
    if !(delta > 0.0) {
        return Err(Error::NotAboveRoots(format!("non-positive step {delta}")));
    }
    let p = state.p.differentiate(t)?;
    let mut b = state.b.clone();
    b[t] -= delta;
    if !p.above_roots(&b)? {
        return Err(Error::NotAboveRoots(format!("b_{} left the region above the roots", t + 1)));
    }
    let phi_next = (0..state.m).map(|i| p.barrier_phi(&b, i)).collect::<Result<Vec<_>>>()?;
    for (i, (after, before)) in phi_next.iter().zip(&state.phi_trace[t]).enumerate() {
        // Φ is only relatively accurate, and it is huge near the boundary height.
        if *after > before + state.slack * (1.0 + before.abs()) {
            return Err(Error::MonotonicityViolation {
                direction: i,
                before: *before,
                after: *after,
            });
        }
    }
    let mut next = state.clone();
    next.p = p;
    next.t = t + 1;
    next.b = b;
    next.deltas.push(delta);
    next.lambdas.push(lambda);
    next.phi_trace.push(phi_next);
    Ok(next)
}

/// Runs all `m` steps from height `a`.
pub fn replay(a_mat: &HermitianMatrix<f64>, ctx: &KmContext, height: f64) -> Result<BarrierState> {
    let mut state = BarrierState::new(a_mat, ctx, height)?;
    while !state.is_complete() {
        state = delta_step(&state)?;
    }
    Ok(state)
}

/// Certificate report for `maxroot ψ_{k,m}[A] ≤ (1/k)(√(1-ε/(k-1)) + √ε)²`.
#[derive(Clone, Debug, Serialize)]
pub struct BarrierCertificate {
    pub k: usize,
    pub m: usize,
    pub eps: f64,
    pub a0: f64,
    pub height: f64,
    pub bound: f64,
    pub maxroot: f64,
    pub b_final: Vec<f64>,
    pub deltas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub phi_trace: Vec<Vec<f64>>,
}

pub fn certify_maxroot_bound(a_mat: &HermitianMatrix<f64>, ctx: &KmContext) -> Result<BarrierCertificate> {
    ctx.check_matrix(a_mat)?;
    if ctx.k < 2 {
        return Err(Error::HypothesisOutOfRange("the barrier certificate needs k >= 2".into()));
    }
    check_contraction(a_mat)?;
    let eps = diagonal_mass(a_mat, ctx);
    let bound = bounds::psi_maxroot_bound(ctx.k, eps).ok_or_else(|| {
        Error::HypothesisOutOfRange(format!("eps = {eps} exceeds (k-1)^2/k = {}", bounds::mu_hypothesis_limit(ctx.k)))
    })?;
    let a0 = bounds::barrier_a0(ctx.k, eps);
    let height = a0.max(MIN_HEIGHT);
    let state = replay(a_mat, ctx, height)?;
    let psi = km_char_poly_route(a_mat, ctx, choose_route(ctx, ctx.dim()))?;
    let maxroot = psi.maxroot()?;
    let slack = state.slack;
    let top = state.b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if maxroot > bound + slack {
        return Err(Error::BoundViolated(format!("maxroot ψ = {maxroot} exceeds {bound}")));
    }
    if maxroot > top + slack {
        return Err(Error::BoundViolated(format!("b_m = {top} does not dominate maxroot {maxroot}")));
    }
    if let Some(c) = state.b.iter().find(|&&c| c > bound + slack) {
        return Err(Error::BoundViolated(format!("coordinate {c} of b_m exceeds {bound}")));
    }
    Ok(BarrierCertificate {
        k: ctx.k,
        m: ctx.m,
        eps,
        a0,
        height,
        bound,
        maxroot,
        b_final: state.b,
        deltas: state.deltas,
        lambdas: state.lambdas,
        phi_trace: state.phi_trace,
    })
}

/// Checks that the roots of the axis slice do not increase as each other
/// coordinate runs up through `heights` (the rest held at the top height).
pub fn slice_minroot_monotonicity_check(p: &MultiDetPoly<f64>, axis: usize, heights: &[f64]) -> Result<bool> {
    let m = p.ctx().m;
    let top = *heights.last().ok_or_else(|| Error::InvalidInput("no heights".into()))?;
    if heights.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("heights must ascend".into()));
    }
    let base = vec![top; m];
    if !p.above_roots(&base)? {
        return Err(Error::NotAboveRoots(format!("top height {top}")));
    }
    let tol = STEP_SLACK * (1.0 + p.matrix().operator_norm());
    for probe in (0..m).filter(|&j| j != axis) {
        let mut prev: Option<Vec<f64>> = None;
        for &h in heights {
            let mut z = base.clone();
            z[probe] = h;
            let roots = p.slice(&z, axis)?.roots()?.roots;
            if let Some(before) = &prev {
                if roots.iter().zip(before).any(|(r, b)| *r > b + tol) {
                    return Ok(false);
                }
            }
            prev = Some(roots);
        }
    }
    Ok(true)
}

/// `p_t` evaluated on the diagonal: `p_m(x·1) = (k-1)!^m k^m ψ(x)`.
pub fn diagonal_value<T: Scalar>(p: &MultiDetPoly<T>, x: &T) -> Result<T> {
    p.eval(&vec![x.clone(); p.ctx().m])
}

/// `c·I` of size `km` (a convenience for examples and tests).
pub fn scalar_matrix(ctx: &KmContext, c: f64) -> HermitianMatrix<f64> {
    HermitianMatrix::from_fn(ctx.dim(), |i, j| if i == j { creal(c) } else { creal(0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::km::{km_char_poly, p_t_partition_formula};
    use crate::scalar::{factorial, powi};
    use num::BigRational;

    type Q = BigRational;

    #[test]
    fn scalar_resolvent() {
        let ctx = KmContext::new(2, 3).unwrap();
        let p = MultiDetPoly::base(&scalar_matrix(&ctx, 0.5), &ctx).unwrap();
        let phi = p.barrier_phi(&[2.0; 3], 1).unwrap();
        assert!((phi - 4.0 / 3.0).abs() < 1e-14);
        assert!(phi <= bounds::initial_phi_bound_value(2, 1.0, 2.0));
        assert!(!MultiDetPoly::base(&HermitianMatrix::identity(2), &KmContext::new(1, 2).unwrap())
            .unwrap()
            .above_roots(&[0.5, 0.5])
            .unwrap());
    }

    #[test]
    fn evaluator_matches_partition_formula_exactly() {
        let ctx = KmContext::new(2, 3).unwrap();
        let a = HermitianMatrix::<Q>::from_fn(6, |i, j| {
            creal(Q::ratio(((i * 7 + j * 7 + i * j) % 5) as i64, 3))
        });
        let z = [Q::ratio(3, 2), Q::ratio(-1, 3), Q::int(2)];
        for t in 0..=3 {
            let p = MultiDetPoly::p_t(&a, &ctx, t).unwrap();
            assert_eq!(p.eval(&z).unwrap(), p_t_partition_formula(&a, &ctx, t, &z).unwrap(), "t={t}");
        }
        // p_m on the diagonal is (k-1)!^m k^m ψ.
        let pm = MultiDetPoly::p_t(&a, &ctx, 3).unwrap();
        let psi = km_char_poly(&a, &ctx).unwrap();
        let x = Q::ratio(5, 7);
        let scale = powi(&(factorial::<Q>(1) * Q::int(2)), 3);
        assert_eq!(diagonal_value(&pm, &x).unwrap(), psi.eval(&x) * scale);
    }

    #[test]
    fn one_step_lands_on_the_root() {
        // k=2, m=1, A = I: ψ = x - 1.
        let ctx = KmContext::new(2, 1).unwrap();
        let a = HermitianMatrix::<f64>::identity(2);
        let s = delta_step(&BarrierState::new(&a, &ctx, 2.0).unwrap()).unwrap();
        assert!(s.b[0] >= 1.0 - 1e-12);
        assert!((s.lambdas[0] - 1.0).abs() < 1e-9);
        assert!((s.deltas[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_steps() {
        let ctx = KmContext::new(3, 2).unwrap();
        let a = HermitianMatrix::<f64>::zeros(6);
        let s = replay(&a, &ctx, 1.5).unwrap();
        for (d, lam) in s.deltas.iter().zip(&s.lambdas) {
            assert!(lam.abs() < 1e-9);
            assert!(*d > 0.0);
        }
        assert!(s.b.iter().all(|&c| c >= -1e-9));
    }

    #[test]
    fn certificate_on_scaled_identity() {
        // k=2, m=2, A = I/4: diagonal mass 1/2 = (k-1)²/k, bound 1.
        let ctx = KmContext::new(2, 2).unwrap();
        let a = scalar_matrix(&ctx, 0.25);
        let cert = certify_maxroot_bound(&a, &ctx).unwrap();
        assert_eq!(cert.bound, 1.0);
        assert!((cert.maxroot - 0.25).abs() < 1e-12);
    }

    #[test]
    fn out_of_hypothesis() {
        let ctx = KmContext::new(2, 2).unwrap();
        let a = scalar_matrix(&ctx, 0.5);
        assert!(matches!(certify_maxroot_bound(&a, &ctx), Err(Error::HypothesisOutOfRange(_))));
        assert!(matches!(initial_phi_bound(&a, &ctx, 1.0, 1.0), Err(Error::HypothesisOutOfRange(_))));
    }
}
