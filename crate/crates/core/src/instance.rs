//! Seeded instance generators.
//!
//! Float instances are complex Gaussian vector systems, alternately rescaled
//! toward prescribed traces and whitened by `T^{-1/2}` until the pieces sum
//! to the identity with the requested maximal trace. Exact instances are
//! small-integer vectors scaled by `1/N` so that `ΣX ⪯ I` holds exactly.

use nalgebra::DMatrix;
use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, VectorSystem};
use crate::mixed::DecompositionInstance;
use crate::scalar::{creal, Scalar, C, C64};

/// Name of the generator, recorded in every report.
pub const RNG_NAME: &str = "ChaCha20";

/// Convergence target for trace balancing.
pub const BALANCE_TOL: f64 = 1e-13;
const BALANCE_ITERS: usize = 5000;
const WHITEN_FLOOR: f64 = 1e-10;
const REDRAWS: usize = 16;

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A standard complex Gaussian entry (`E|z|² = 1`).
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, d: usize) -> Vec<C64> {
    (0..d).map(|_| complex_gaussian(rng)).collect()
}

/// A Haar-random unitary via QR of a Gaussian matrix (phases fixed by `R`).
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Feasibility of `ΣX = I_d` with `m` pieces of rank `≤ k` and trace `≤ eps`.
pub fn check_feasible(d: usize, m: usize, k: usize, eps: f64) -> Result<()> {
    if d == 0 || m == 0 || k == 0 {
        return Err(Error::Infeasible("d, m and k must be positive".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Infeasible(format!("eps must be positive, got {eps}")));
    }
    if (m as f64) * eps < d as f64 * (1.0 - 1e-12) {
        return Err(Error::Infeasible(format!(
            "m*eps = {} < d = {d}: traces cannot add up to the identity",
            m as f64 * eps
        )));
    }
    if m * k < d {
        return Err(Error::Infeasible(format!("m*k = {} < d = {d}: the pieces cannot span", m * k)));
    }
    if eps > k.min(d) as f64 + 1e-12 {
        return Err(Error::Infeasible(format!("a rank-{k} contraction has trace at most {}", k.min(d))));
    }
    Ok(())
}

/// Target traces: one piece at `eps`, the rest random in `(0, eps]`, all
/// adding up to `d`.
fn target_traces<R: Rng>(rng: &mut R, d: usize, m: usize, eps: f64) -> Vec<f64> {
    let mut tau = vec![eps];
    let rest = d as f64 - eps;
    if m == 1 {
        return tau;
    }
    let mut w: Vec<f64> = (1..m).map(|_| rng.random_range(0.5..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x *= rest / total);
    // Water-fill: clip at eps and hand the excess to the unclipped entries.
    for _ in 0..m {
        let excess: f64 = w.iter().map(|&x| (x - eps).max(0.0)).sum();
        if excess <= 0.0 {
            break;
        }
        let free: f64 = w.iter().filter(|&&x| x < eps).sum();
        for x in w.iter_mut() {
            *x = if *x >= eps { eps } else { *x * (1.0 + excess / free) };
        }
    }
    tau.extend(w);
    tau
}

fn whiten(groups: &mut [Vec<Vec<C64>>], d: usize) -> Result<()> {
    let mut t = DMatrix::<C64>::zeros(d, d);
    for g in groups.iter() {
        for u in g {
            for i in 0..d {
                for j in 0..d {
                    t[(i, j)] += u[i] * u[j].conj();
                }
            }
        }
    }
    let eig = t.symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if min <= WHITEN_FLOOR * max.max(1.0) {
        return Err(Error::WhiteningSingular(min));
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(1.0 / l.sqrt(), 0.0)));
    let w = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    for g in groups.iter_mut() {
        for u in g.iter_mut() {
            let v = &w * DMatrix::from_column_slice(d, 1, u);
            u.copy_from_slice(v.as_slice());
        }
    }
    Ok(())
}

fn group_trace(g: &[Vec<C64>]) -> f64 {
    g.iter().flat_map(|u| u.iter()).map(|z| z.norm_sqr()).sum()
}

/// Harmonic frame: `N = m·k` rows of the `N`-point DFT restricted to `d`
/// random frequencies, rotated by a random unitary. Every vector has squared
/// norm `d/N` and the frame is tight, so every piece has trace exactly `d/m`.
fn harmonic_instance<R: Rng>(rng: &mut R, d: usize, m: usize, k: usize) -> Vec<Vec<Vec<C64>>> {
    let n = m * k;
    let mut freqs: Vec<usize> = (0..n).collect();
    for i in 0..d {
        let j = rng.random_range(i..n);
        freqs.swap(i, j);
    }
    let u = random_unitary(rng, d);
    let scale = 1.0 / (n as f64).sqrt();
    (0..m)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let row = i * k + j;
                    let raw: Vec<C64> = freqs[..d]
                        .iter()
                        .map(|&f| {
                            let theta = 2.0 * std::f64::consts::PI * ((row * f) % n) as f64 / n as f64;
                            C64::from_polar(scale, theta)
                        })
                        .collect();
                    (0..d).map(|a| (0..d).map(|b| u[(a, b)] * raw[b]).sum()).collect()
                })
                .collect()
        })
        .collect()
}

fn balanced_instance<R: Rng>(rng: &mut R, d: usize, m: usize, k: usize, eps: f64) -> Result<Vec<Vec<Vec<C64>>>> {
    let tau = target_traces(rng, d, m, eps);
    let live = k.min(d);
    let mut groups: Vec<Vec<Vec<C64>>> = (0..m)
        .map(|_| {
            (0..k)
                .map(|j| if j < live { gaussian_vector(rng, d) } else { vec![C64::new(0.0, 0.0); d] })
                .collect()
        })
        .collect();
    whiten(&mut groups, d)?;
    for _ in 0..BALANCE_ITERS {
        let traces: Vec<f64> = groups.iter().map(|g| group_trace(g)).collect();
        let worst = traces
            .iter()
            .zip(&tau)
            .fold(0.0f64, |a, (t, s)| a.max((t - s).abs()));
        if worst <= BALANCE_TOL {
            break;
        }
        for (g, (t, s)) in groups.iter_mut().zip(traces.iter().zip(&tau)) {
            let c = (s / t).sqrt();
            g.iter_mut().flat_map(|u| u.iter_mut()).for_each(|z| *z *= c);
        }
        whiten(&mut groups, d)?;
    }
    let worst = groups
        .iter()
        .zip(&tau)
        .fold(0.0f64, |a, (g, s)| a.max((group_trace(g) - s).abs()));
    if worst > 1e-9 {
        return Err(Error::Infeasible(format!("trace balancing stalled at {worst:e}")));
    }
    Ok(groups)
}

/// A seeded instance with `ΣX_i = I_d`, `rank X_i ≤ k` and `max tr X_i ≈ eps`.
///
/// When `m·eps = d` every trace is forced to equal `eps`; that boundary case
/// is served by a randomly rotated harmonic frame.
pub fn generate_instance(seed: u64, d: usize, m: usize, k: usize, eps: f64, r: usize) -> Result<DecompositionInstance<f64>> {
    check_feasible(d, m, k, eps)?;
    let mut rng = rng_from_seed(seed);
    let boundary = ((m as f64) * eps - d as f64).abs() <= 1e-12 * d as f64;
    let mut last = Error::Infeasible("no draw succeeded".into());
    for _ in 0..REDRAWS {
        let groups = if boundary {
            Ok(harmonic_instance(&mut rng, d, m, k))
        } else {
            balanced_instance(&mut rng, d, m, k, eps)
        };
        match groups.and_then(|g| VectorSystem::new(d, k, g)) {
            Ok(system) => {
                let sum = system.sum_matrix();
                let dev = sum.minus(&HermitianMatrix::identity(d)).operator_norm();
                if dev > 1e-9 {
                    last = Error::Infeasible(format!("whitening left ‖ΣX - I‖ = {dev:e}"));
                    continue;
                }
                return DecompositionInstance::new(system, r);
            }
            Err(e @ Error::WhiteningSingular(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Exact instance: integer vectors in `[-3, 3]` (complex when `complex`),
/// scaled by `1/N` with `N² ≥ tr ΣX`, so `ΣX ⪯ I` holds exactly.
pub fn generate_exact_instance(seed: u64, d: usize, m: usize, k: usize, complex: bool) -> Result<DecompositionInstance<BigRational>> {
    if d == 0 || m == 0 || k == 0 {
        return Err(Error::Infeasible("d, m and k must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let draw = |rng: &mut ChaCha20Rng| -> C<BigRational> {
        let re = BigRational::int(rng.random_range(-3..=3));
        let im = if complex { BigRational::int(rng.random_range(-3..=3)) } else { BigRational::int(0) };
        C::new(re, im)
    };
    let groups: Vec<Vec<Vec<C<BigRational>>>> = (0..m)
        .map(|_| (0..k).map(|_| (0..d).map(|_| draw(&mut rng)).collect()).collect())
        .collect();
    let system = VectorSystem::new(d, k, groups)?;
    let trace = system.sum_matrix().trace().to_f64_lossy();
    let n = trace.sqrt().ceil().max(1.0) as i64;
    DecompositionInstance::new(system.scale_vectors(&BigRational::ratio(1, n)), 1)
}

/// A random Hermitian matrix with small rational entries `p/q`.
pub fn random_rational_hermitian<R: Rng>(rng: &mut R, n: usize, complex: bool) -> HermitianMatrix<BigRational> {
    let mut e = vec![C::new(BigRational::int(0), BigRational::int(0)); n * n];
    for i in 0..n {
        for j in i..n {
            let re = BigRational::ratio(rng.random_range(-6..=6), rng.random_range(1..=4));
            let im = if complex && i != j {
                BigRational::ratio(rng.random_range(-6..=6), rng.random_range(1..=4))
            } else {
                BigRational::int(0)
            };
            e[i * n + j] = C::new(re.clone(), im.clone());
            e[j * n + i] = C::new(re, -im);
        }
    }
    HermitianMatrix::new(n, e).expect("Hermitian by construction")
}

/// A random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> HermitianMatrix<f64> {
    let g: Vec<C64> = (0..n * n).map(|_| complex_gaussian(rng)).collect();
    HermitianMatrix::from_fn(n, |i, j| {
        if i == j {
            creal(g[i * n + i].re)
        } else {
            (g[i * n + j] + g[j * n + i].conj()) * 0.5
        }
    })
}

/// `Σ_{l<rank} g_l g_l*` for Gaussian `g_l`, rescaled to operator norm `norm`.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, rank: usize, norm: f64) -> HermitianMatrix<f64> {
    let mut a = HermitianMatrix::zeros(n);
    for _ in 0..rank {
        a = a.plus(&HermitianMatrix::rank_one(&gaussian_vector(rng, n)));
    }
    let cur = a.operator_norm();
    if cur > 0.0 {
        a.scale(&(norm / cur))
    } else {
        a
    }
}

/// A Gram matrix of `m` random vectors in `ℂ^d` scaled so every diagonal
/// entry is at most `alpha` and the norm is at most one.
pub fn random_gram_contraction<R: Rng>(rng: &mut R, m: usize, d: usize, alpha: f64) -> HermitianMatrix<f64> {
    let vs: Vec<Vec<C64>> = (0..m).map(|_| gaussian_vector(rng, d)).collect();
    let g = HermitianMatrix::from_fn(m, |i, j| vs[i].iter().zip(&vs[j]).map(|(a, b)| a.conj() * b).sum());
    let diag = (0..m).map(|i| g.diag(i)).fold(0.0, f64::max);
    let s = (alpha / diag).min(1.0 / g.operator_norm());
    g.scale(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_frame_of_quarter_vectors() {
        // Four quarter-trace pieces carry total mass 1 and cannot cover I_2.
        assert!(matches!(generate_instance(3, 2, 4, 1, 0.25, 2), Err(Error::Infeasible(_))));
        let inst = generate_instance(3, 2, 8, 1, 0.25, 2).unwrap();
        let dev = inst.system().sum_matrix().minus(&HermitianMatrix::identity(2)).operator_norm();
        assert!(dev < 1e-12);
        for t in inst.system().traces() {
            assert!((t - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_traces_hit_the_target() {
        let inst = generate_instance(11, 3, 7, 2, 0.6, 2).unwrap();
        assert!((inst.epsilon() - 0.6).abs() < 1e-10, "{}", inst.epsilon());
        let dev = inst.system().sum_matrix().minus(&HermitianMatrix::identity(3)).operator_norm();
        assert!(dev < 1e-10);
        for x in inst.matrices() {
            assert!(x.rank() <= 2);
        }
    }

    #[test]
    fn scalar_pieces() {
        let inst = generate_instance(5, 1, 5, 1, 0.3, 2).unwrap();
        let total: f64 = inst.system().traces().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_requests() {
        assert!(matches!(generate_instance(0, 2, 4, 1, 0.25 - 1e-3, 2), Err(Error::Infeasible(_))));
        assert!(matches!(generate_instance(0, 3, 1, 2, 3.0, 2), Err(Error::Infeasible(_))));
    }

    #[test]
    fn full_rank_pieces() {
        let inst = generate_instance(9, 2, 5, 2, 0.5, 2).unwrap();
        assert!(inst.matrices().iter().all(|x| x.is_psd() && x.rank() == 2));
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = generate_instance(42, 2, 5, 1, 0.5, 2).unwrap();
        let b = generate_instance(42, 2, 5, 1, 0.5, 2).unwrap();
        assert_eq!(a, b);
        let q = generate_exact_instance(1, 2, 3, 2, true).unwrap();
        assert!(q.system().sum_matrix().is_contraction());
    }
}
