//! Paving by interlacing families.
//!
//! The r-lift turns "choose a part `j_i` for every piece" into "choose one
//! outcome of a random matrix `W_i`": `W_{i,j}` holds `r·X_i` in diagonal
//! block `j` of `ℂ^{rd}`, each with probability `1/r`. Fixing `j_1,…,j_t` and
//! averaging over the rest gives the conditional polynomial
//! `μ[W_{1,j_1},…,W_{t,j_t}, 𝔼W_{t+1},…,𝔼W_m]`; the greedy descent always
//! moves to the child with the smallest largest root.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds;
use crate::error::{Error, Result};
use crate::hermitian::{decompose_rank_k, HermitianMatrix, VectorSystem};
use crate::mixed::{agrees_with_oracle, derivative_oracle, mu_of_system, DecompositionInstance, CHECK_SLACK};
#[cfg(test)]
use crate::mixed::mu_via_derivative_definition;
use crate::poly::{common_interlacing, RealPoly, ROOT_NOISE};
use crate::reduce::chunked_tree_sum;
use crate::scalar::{creal, Scalar, C, C64};

/// Relative window inside which two child maxroots count as tied.
pub const TIE_TOL: f64 = 1e-12;
/// Gate on `r^m` for the exhaustive search.
pub const EXHAUSTIVE_GATE: u64 = 1 << 16;
/// One greedy child in this many is re-derived by the derivative oracle
/// (when the lifted sizes permit).
pub const ORACLE_STRIDE: usize = 20;

type Group<T> = Vec<Vec<C<T>>>;

/// The lifted random matrices of a decomposition.
#[derive(Clone, Debug)]
pub struct LiftedFamily<T: Scalar> {
    base: DecompositionInstance<T>,
    /// `fixed[i][j]`: `kr` vectors in `ℂ^{rd}` with Gram sum `W_{i,j}`.
    fixed: Vec<Vec<Group<T>>>,
    /// `expected[i]`: `kr` vectors with Gram sum `𝔼W_i = diag(X_i,…,X_i)`.
    expected: Vec<Group<T>>,
    identity_sum: bool,
}

fn embed<T: Scalar>(u: &[C<T>], block: usize, r: usize) -> Vec<C<T>> {
    let d = u.len();
    let mut v = vec![C::new(T::zero(), T::zero()); r * d];
    v[block * d..(block + 1) * d].clone_from_slice(u);
    v
}

/// Builds `W_{i,j}` and `𝔼W_i` and verifies the lift's invariants.
///
/// `W_{i,j}` is represented by `r` copies of each `u_{i,l}` in block `j`
/// (so its vectors stay rational in exact mode) and `𝔼W_i` by one copy of
/// each `u_{i,l}` in every block; both are `kr` vectors.
pub fn build_lift<T: Scalar>(inst: &DecompositionInstance<T>) -> Result<LiftedFamily<T>> {
    let (r, m, d) = (inst.r(), inst.m(), inst.d());
    let sys = inst.system();
    let fixed: Vec<Vec<Group<T>>> = (0..m)
        .map(|i| {
            (0..r)
                .map(|j| {
                    sys.vectors()[i]
                        .iter()
                        .flat_map(|u| std::iter::repeat_n(embed(u, j, r), r))
                        .collect()
                })
                .collect()
        })
        .collect();
    let expected: Vec<Group<T>> = (0..m)
        .map(|i| {
            (0..r)
                .flat_map(|b| sys.vectors()[i].iter().map(move |u| embed(u, b, r)))
                .collect()
        })
        .collect();
    let family = LiftedFamily {
        base: inst.clone(),
        fixed,
        expected,
        identity_sum: sys.sum_matrix().minus(&HermitianMatrix::identity(d)).operator_norm() <= 1e-9,
    };
    let rf = T::int(r as i64);
    for i in 0..m {
        let xi = sys.matrix(i);
        let ew = family.expected_matrix(i);
        let want = HermitianMatrix::block_diag(&vec![xi.clone(); r]);
        let mean = (0..r)
            .fold(HermitianMatrix::zeros(r * d), |acc, j| acc.plus(&family.fixed_matrix(i, j)))
            .scale(&(T::one() / rf.clone()));
        let off = ew.minus(&want).operator_norm().max(mean.minus(&ew).operator_norm());
        if off > 1e-12 * (1.0 + want.operator_norm()) {
            return Err(Error::InstanceInvalid(format!("lift of piece {i} is off by {off:e}")));
        }
    }
    Ok(family)
}

impl<T: Scalar> LiftedFamily<T> {
    pub fn base(&self) -> &DecompositionInstance<T> {
        &self.base
    }

    pub fn r(&self) -> usize {
        self.base.r()
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    /// Whether `Σ𝔼W_i = I` (otherwise only `⪯ I`).
    pub fn identity_sum(&self) -> bool {
        self.identity_sum
    }

    fn gram(group: &Group<T>, dim: usize) -> HermitianMatrix<T> {
        group
            .iter()
            .fold(HermitianMatrix::zeros(dim), |acc, v| acc.plus(&HermitianMatrix::rank_one(v)))
    }

    pub fn fixed_matrix(&self, i: usize, j: usize) -> HermitianMatrix<T> {
        Self::gram(&self.fixed[i][j], self.r() * self.base.d())
    }

    pub fn expected_matrix(&self, i: usize) -> HermitianMatrix<T> {
        Self::gram(&self.expected[i], self.r() * self.base.d())
    }

    /// The vector system at the node `partial = (j_1,…,j_t)`.
    pub fn node_system(&self, partial: &[usize]) -> Result<VectorSystem<T>> {
        if partial.len() > self.m() || partial.iter().any(|&j| j >= self.r()) {
            return Err(Error::InvalidInput(format!("bad partial assignment {partial:?}")));
        }
        let groups = (0..self.m())
            .map(|i| match partial.get(i) {
                Some(&j) => self.fixed[i][j].clone(),
                None => self.expected[i].clone(),
            })
            .collect();
        VectorSystem::new(self.r() * self.base.d(), self.r() * self.base.k(), groups)
    }

    /// The matrices `W_{1,j_1},…,W_{t,j_t}, 𝔼W_{t+1},…,𝔼W_m`.
    pub fn node_matrices(&self, partial: &[usize]) -> Result<Vec<HermitianMatrix<T>>> {
        Ok(self.node_system(partial)?.matrices())
    }
}

/// `μ[W_{1,j_1},…,W_{t,j_t}, 𝔼W_{t+1},…,𝔼W_m]` through the Gram route.
pub fn conditional_poly<T: Scalar>(family: &LiftedFamily<T>, partial: &[usize]) -> Result<RealPoly<T>> {
    mu_of_system(&family.node_system(partial)?, false)
}

/// What the descent saw at one node.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GreedyNode {
    pub depth: usize,
    pub child_maxroots: Vec<f64>,
    pub chosen: usize,
    pub interlacing_ok: bool,
    /// Largest coefficient gap between the parent and the average of its children.
    pub average_gap: f64,
    pub oracle_checked: usize,
}

/// A (partial) greedy path `(j_1,…,j_t)` and the polynomials along it.
#[derive(Clone, Debug)]
pub struct AssignmentPath<T: Scalar> {
    pub m: usize,
    pub chosen: Vec<usize>,
    pub poly: RealPoly<T>,
    /// `maxroot f_∅` followed by the maxroot after each choice.
    pub maxroot_trace: Vec<f64>,
    pub nodes: Vec<GreedyNode>,
}

impl<T: Scalar> AssignmentPath<T> {
    pub fn is_complete(&self) -> bool {
        self.chosen.len() == self.m
    }

    pub fn root_maxroot(&self) -> f64 {
        self.maxroot_trace[0]
    }

    pub fn leaf_maxroot(&self) -> f64 {
        *self.maxroot_trace.last().expect("trace starts with f_∅")
    }
}

fn argmin_with_ties(values: &[f64]) -> usize {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    values
        .iter()
        .position(|&v| v <= min + TIE_TOL * (1.0 + min.abs()))
        .expect("nonempty")
}

/// Greedy descent through the interlacing family.
///
/// At every node the `r` children are computed, checked for a common
/// interlacing and for averaging back to the parent, and the child with the
/// smallest maxroot (smallest index on ties) is taken.
pub fn greedy_select<T: Scalar>(family: &LiftedFamily<T>) -> Result<AssignmentPath<T>> {
    let (m, r) = (family.m(), family.r());
    let lifted_d = r * family.base.d();
    let oracle_ok = lifted_d <= 8 && m <= 8;
    let mut poly = conditional_poly(family, &[])?;
    let mut trace = vec![poly.maxroot()?];
    let mut chosen = Vec::with_capacity(m);
    let mut nodes = Vec::with_capacity(m);
    let slack = CHECK_SLACK * (1.0 + trace[0].abs());
    for depth in 0..m {
        let children: Vec<RealPoly<T>> = (0..r)
            .into_par_iter()
            .map(|j| {
                let mut partial = chosen.clone();
                partial.push(j);
                conditional_poly(family, &partial)
            })
            .collect::<Result<_>>()?;
        let mut oracle_checked = 0;
        if oracle_ok {
            for (j, child) in children.iter().enumerate() {
                if (depth * r + j) % ORACLE_STRIDE == 0 {
                    let mut partial = chosen.clone();
                    partial.push(j);
                    let (oracle, scale) = derivative_oracle(&family.node_matrices(&partial)?, lifted_d)?;
                    if !agrees_with_oracle(child, &oracle, &scale) {
                        return Err(Error::AffineLinearityViolation(oracle.coeff_gap(child)));
                    }
                    oracle_checked += 1;
                }
            }
        }
        let interlacing_ok = common_interlacing(&children)?;
        if !interlacing_ok {
            return Err(Error::InterlacingCheckFailed { depth });
        }
        let inv_r = T::one() / T::int(r as i64);
        let average = children
            .iter()
            .fold(RealPoly::zero(), |acc, c| &acc + c)
            .scale(&inv_r);
        let average_gap = average.coeff_gap(&poly);
        if !average.approx_eq(&poly) {
            return Err(Error::AffineLinearityViolation(average_gap));
        }
        let roots: Vec<f64> = children.iter().map(|c| c.maxroot()).collect::<Result<_>>()?;
        let j = argmin_with_ties(&roots);
        let wobble = poly
            .root_sensitivity(trace[depth], ROOT_NOISE)
            .max(children[j].root_sensitivity(roots[j], ROOT_NOISE));
        if roots[j] > trace[depth] + slack + wobble {
            return Err(Error::BoundViolated(format!(
                "child maxroot {} above parent {} at depth {depth}",
                roots[j], trace[depth]
            )));
        }
        nodes.push(GreedyNode {
            depth,
            child_maxroots: roots.clone(),
            chosen: j,
            interlacing_ok,
            average_gap,
            oracle_checked,
        });
        chosen.push(j);
        trace.push(roots[j]);
        poly = children.into_iter().nth(j).expect("child exists");
    }
    Ok(AssignmentPath { m, chosen, poly, maxroot_trace: trace, nodes })
}

/// `S_j = {i : j_i = j}`.
pub fn extract_partition<T: Scalar>(path: &AssignmentPath<T>, r: usize) -> Result<Vec<Vec<usize>>> {
    if !path.is_complete() {
        return Err(Error::IncompletePath { got: path.chosen.len(), expected: path.m });
    }
    Ok(assignment_to_partition(&path.chosen, r))
}

pub fn assignment_to_partition(assignment: &[usize], r: usize) -> Vec<Vec<usize>> {
    (0..r)
        .map(|j| (0..assignment.len()).filter(|&i| assignment[i] == j).collect())
        .collect()
}

fn check_partition(partition: &[Vec<usize>], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    for &i in partition.iter().flatten() {
        if i >= m || seen[i] {
            return Err(Error::InvalidPartition(format!("index {i} repeated or out of range")));
        }
        seen[i] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition(format!("index {i} not covered")));
    }
    Ok(())
}

/// `‖Σ_{i∈S} X_i‖` for each part (zero for an empty part).
pub fn part_norms(xs: &[HermitianMatrix<f64>], partition: &[Vec<usize>]) -> Vec<f64> {
    let d = xs.first().map(|x| x.dim()).unwrap_or(0);
    partition
        .iter()
        .map(|part| {
            part.iter()
                .fold(HermitianMatrix::zeros(d), |acc, &i| acc.plus(&xs[i]))
                .operator_norm()
        })
        .collect()
}

/// Values of the four paving bounds at `(k, r, ε)`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BoundSet {
    pub this_paper: Option<f64>,
    pub mss: f64,
    pub branden: Option<f64>,
    pub rl: Option<f64>,
}

impl BoundSet {
    pub fn at(k: usize, r: usize, eps: f64) -> Self {
        BoundSet {
            this_paper: bounds::this_paper(k, r, eps),
            mss: bounds::mss(r, eps),
            branden: bounds::branden(k, r, eps),
            rl: if k == 1 { bounds::ravichandran_leake(r, eps) } else { None },
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PavingReport {
    pub k: usize,
    pub r: usize,
    pub m: usize,
    pub eps: f64,
    pub partition: Vec<Vec<usize>>,
    pub part_norms: Vec<f64>,
    pub max_norm: f64,
    pub bounds: BoundSet,
    pub hypothesis_ok: bool,
    /// `None` when the hypothesis fails.
    pub bound_ok: Option<bool>,
    pub greedy_trace: Vec<f64>,
    pub exhaustive_norm: Option<f64>,
}

impl PavingReport {
    pub fn ensure(&self) -> Result<()> {
        if self.bound_ok == Some(false) {
            return Err(Error::BoundViolated(format!(
                "part norm {} exceeds {}",
                self.max_norm,
                self.bounds.this_paper.unwrap_or(f64::NAN)
            )));
        }
        Ok(())
    }
}

/// Part norms against the paving bound and the earlier bounds.
pub fn verify_paving<T: Scalar>(inst: &DecompositionInstance<T>, partition: &[Vec<usize>]) -> Result<PavingReport> {
    check_partition(partition, inst.m())?;
    let xs: Vec<HermitianMatrix<f64>> = inst.matrices().iter().map(|x| x.to_f64()).collect();
    let norms = part_norms(&xs, partition);
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    let (k, r) = (inst.k(), inst.r());
    let eps = inst.epsilon().to_f64_lossy();
    let b = BoundSet::at(k, r, eps);
    let hypothesis_ok = b.this_paper.is_some();
    let bound_ok = b.this_paper.map(|bound| max_norm <= bound + CHECK_SLACK * (1.0 + bound));
    Ok(PavingReport {
        k,
        r,
        m: inst.m(),
        eps,
        partition: partition.to_vec(),
        part_norms: norms,
        max_norm,
        bounds: b,
        hypothesis_ok,
        bound_ok,
        greedy_trace: Vec::new(),
        exhaustive_norm: None,
    })
}

/// Lift, greedy descent, extraction and verification in one call.
pub fn pave<T: Scalar>(inst: &DecompositionInstance<T>) -> Result<(PavingReport, AssignmentPath<T>)> {
    let family = build_lift(inst)?;
    let path = greedy_select(&family)?;
    let partition = extract_partition(&path, inst.r())?;
    let mut report = verify_paving(inst, &partition)?;
    report.greedy_trace = path.maxroot_trace.clone();
    // The leaf maxroot bounds the lifted norm, which is r times the largest part norm.
    let leaf = path.leaf_maxroot();
    if inst.r() as f64 * report.max_norm > leaf + CHECK_SLACK * (1.0 + leaf) {
        return Err(Error::BoundViolated(format!(
            "r·max part norm {} exceeds leaf maxroot {leaf}",
            inst.r() as f64 * report.max_norm
        )));
    }
    Ok((report, path))
}

/// The assignment minimizing the largest part norm over all `r^m` choices
/// (first in lexicographic word order on ties).
pub fn exhaustive_pave<T: Scalar>(inst: &DecompositionInstance<T>) -> Result<(Vec<Vec<usize>>, f64)> {
    let (m, r) = (inst.m(), inst.r());
    let total = (r as u64)
        .checked_pow(m as u32)
        .filter(|&n| n <= EXHAUSTIVE_GATE)
        .ok_or_else(|| Error::SizeLimitExceeded(format!("r^m = {r}^{m} exceeds 2^16")))?;
    let xs: Vec<HermitianMatrix<f64>> = inst.matrices().iter().map(|x| x.to_f64()).collect();
    let best = chunked_tree_sum(
        total,
        |start, end| {
            let mut assignment = vec![0; m];
            let mut best = (start, f64::INFINITY);
            for w in start..end {
                crate::hermitian::word_to_assignment(w, r, &mut assignment);
                let norm = part_norms(&xs, &assignment_to_partition(&assignment, r))
                    .into_iter()
                    .fold(0.0, f64::max);
                if norm < best.1 {
                    best = (w, norm);
                }
            }
            best
        },
        |a, b| if b.1 < a.1 { b } else { a },
    )
    .expect("at least one assignment");
    let mut assignment = vec![0; m];
    crate::hermitian::word_to_assignment(best.0, r, &mut assignment);
    Ok((assignment_to_partition(&assignment, r), best.1))
}

/// An instance completed to `ΣX = I` and the map back to the original pieces.
#[derive(Clone, Debug)]
pub struct Completion {
    pub instance: DecompositionInstance<f64>,
    pub original_m: usize,
    pub appended: usize,
}

impl Completion {
    /// Drops the appended pieces from every part.
    pub fn restrict(&self, partition: &[Vec<usize>]) -> Vec<Vec<usize>> {
        partition
            .iter()
            .map(|p| p.iter().copied().filter(|&i| i < self.original_m).collect())
            .collect()
    }
}

/// Appends rank-one pieces of trace at most `eps` from the spectral
/// decomposition of `I - ΣX` so that the pieces sum to the identity.
pub fn complete_to_identity(xs: &[HermitianMatrix<f64>], k: usize, eps: f64, r: usize) -> Result<Completion> {
    let d = xs.first().map(|x| x.dim()).ok_or_else(|| Error::InvalidInput("no pieces".into()))?;
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    let sum = xs.iter().fold(HermitianMatrix::zeros(d), |acc, x| acc.plus(x));
    if !sum.is_contraction() {
        return Err(Error::NotContraction(sum.operator_norm()));
    }
    let mut groups: Vec<Vec<Vec<C64>>> = xs.iter().map(|x| decompose_rank_k(x, k)).collect::<Result<_>>()?;
    let original_m = groups.len();
    let (eig, vecs) = HermitianMatrix::identity(d).minus(&sum).eigh();
    for (lam, v) in eig.iter().zip(&vecs) {
        if *lam <= 1e-12 {
            continue;
        }
        let pieces = ((lam / eps) - 1e-9).ceil().max(1.0) as usize;
        let s = (lam / pieces as f64).sqrt();
        for _ in 0..pieces {
            let mut g = vec![v.iter().map(|z| z * s).collect::<Vec<C64>>()];
            g.resize(k, vec![C64::new(0.0, 0.0); d]);
            groups.push(g);
        }
    }
    let appended = groups.len() - original_m;
    let instance = DecompositionInstance::new(VectorSystem::new(d, k, groups)?, r)?;
    Ok(Completion { instance, original_m, appended })
}

/// One partition paving every matrix in the list at once.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SimultaneousReport {
    pub k: usize,
    pub r: usize,
    pub m: usize,
    pub alpha: f64,
    pub partition: Vec<Vec<usize>>,
    /// `norms[i][j] = ‖A_i(S_j)‖`.
    pub norms: Vec<Vec<f64>>,
    pub bound: f64,
    pub ok: bool,
    pub greedy_trace: Vec<f64>,
}

/// Paves `k` PSD contractions with one partition.
///
/// With `A_i^{1/2} = [u_{i,1},…,u_{i,m}]`, the piece `X_l` is the block
/// diagonal of `u_{1,l}u_{1,l}*,…,u_{k,l}u_{k,l}*`: rank at most `k`, trace
/// at most `kα`, and `‖Σ_{l∈S}X_l‖ = max_i ‖A_i(S)‖`.
pub fn pave_simultaneous(list: &[HermitianMatrix<f64>], r: usize) -> Result<SimultaneousReport> {
    let k = list.len();
    let m = list.first().map(|a| a.dim()).ok_or_else(|| Error::InvalidInput("no matrices".into()))?;
    if list.iter().any(|a| a.dim() != m) {
        return Err(Error::DimensionMismatch("matrices of different sizes".into()));
    }
    for a in list {
        if !a.is_psd() || !a.is_contraction() {
            return Err(Error::NotContraction(a.operator_norm()));
        }
    }
    let alpha = list
        .iter()
        .flat_map(|a| (0..m).map(|l| a.diag(l)))
        .fold(0.0, f64::max);
    let bound = bounds::simultaneous(k, r, alpha).ok_or_else(|| {
        Error::HypothesisOutOfRange(format!(
            "alpha = {alpha} exceeds (kr-1)^2/(kr)^2 = {}",
            bounds::simultaneous_hypothesis_limit(k, r)
        ))
    })?;
    let roots: Vec<Vec<Vec<C64>>> = list.iter().map(psd_sqrt_columns).collect();
    let d = k * m;
    let groups: Vec<Vec<Vec<C64>>> = (0..m)
        .map(|l| {
            (0..k)
                .map(|i| {
                    let mut v = vec![C64::new(0.0, 0.0); d];
                    v[i * m..(i + 1) * m].copy_from_slice(&roots[i][l]);
                    v
                })
                .collect()
        })
        .collect();
    let inst = DecompositionInstance::new(VectorSystem::new(d, k, groups)?, r)?;
    let (report, _) = pave(&inst)?;
    let norms: Vec<Vec<f64>> = list
        .iter()
        .map(|a| report.partition.iter().map(|s| a.submatrix(s).operator_norm()).collect())
        .collect();
    let worst = norms.iter().flatten().cloned().fold(0.0, f64::max);
    Ok(SimultaneousReport {
        k,
        r,
        m,
        alpha,
        partition: report.partition,
        norms,
        bound,
        ok: worst <= bound + CHECK_SLACK * (1.0 + bound),
        greedy_trace: report.greedy_trace,
    })
}

/// Columns of the PSD square root `A^{1/2}`.
fn psd_sqrt_columns(a: &HermitianMatrix<f64>) -> Vec<Vec<C64>> {
    let n = a.dim();
    let (eig, vecs) = a.eigh();
    let root = HermitianMatrix::from_fn(n, |i, j| {
        eig.iter()
            .zip(&vecs)
            .map(|(l, v)| v[i] * v[j].conj() * l.max(0.0).sqrt())
            .sum()
    });
    (0..n).map(|l| (0..n).map(|i| *root.get(i, l)).collect()).collect()
}

/// `X_i = [c]` scalars as a one-dimensional instance (for examples and tests).
pub fn scalar_instance<T: Scalar>(values: &[T], r: usize) -> Result<DecompositionInstance<T>>
where
    T: Clone,
{
    // u_i = [√c_i] is only rational for squares; callers pass square roots.
    let groups = values.iter().map(|v| vec![vec![creal(v.clone())]]).collect();
    DecompositionInstance::new(VectorSystem::new(1, 1, groups)?, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    type Q = BigRational;

    /// X_i = [1/4] for four pieces (u_i = 1/2).
    fn quarters(m: usize) -> DecompositionInstance<Q> {
        scalar_instance(&vec![Q::ratio(1, 2); m], 2).unwrap()
    }

    #[test]
    fn lift_of_two_halves() {
        let inst = scalar_instance(&vec![Q::ratio(1, 1) / Q::int(1); 1], 2).unwrap();
        let fam = build_lift(&inst).unwrap();
        assert_eq!(fam.fixed_matrix(0, 0), HermitianMatrix::diagonal(&[Q::int(2), Q::int(0)]));
        // X = [1/2] with u = √(1/2) is irrational; use the float mode.
        let inst = scalar_instance(&[0.5f64.sqrt(); 2], 2).unwrap();
        let fam = build_lift(&inst).unwrap();
        let w = fam.fixed_matrix(0, 0);
        assert!((w.diag(0) - 1.0).abs() < 1e-15 && w.diag(1).abs() < 1e-15);
        let total = fam.expected_matrix(0).plus(&fam.expected_matrix(1));
        assert!(total.minus(&HermitianMatrix::identity(2)).operator_norm() < 1e-15);
        assert!(fam.identity_sum());
    }

    #[test]
    fn greedy_splits_quarters_evenly() {
        let inst = quarters(4);
        let (report, path) = pave(&inst).unwrap();
        assert_eq!(report.max_norm, 0.5);
        assert_eq!(path.chosen[0], 0);
        assert_eq!(report.bounds.this_paper, Some(1.0));
        assert!(path.maxroot_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        let (best, norm) = exhaustive_pave(&inst).unwrap();
        assert_eq!(norm, 0.5);
        assert_eq!(best, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn conditional_matches_the_oracle() {
        let inst = scalar_instance(&[0.5f64.sqrt(); 2], 2).unwrap();
        let fam = build_lift(&inst).unwrap();
        let child = conditional_poly(&fam, &[0]).unwrap();
        let oracle = mu_via_derivative_definition(&fam.node_matrices(&[0]).unwrap(), 2).unwrap();
        assert!(child.approx_eq(&oracle));
    }

    #[test]
    fn incomplete_path() {
        let inst = quarters(2);
        let fam = build_lift(&inst).unwrap();
        let path = AssignmentPath {
            m: 2,
            chosen: vec![0],
            poly: conditional_poly(&fam, &[0]).unwrap(),
            maxroot_trace: vec![1.0],
            nodes: Vec::new(),
        };
        assert!(matches!(extract_partition(&path, 2), Err(Error::IncompletePath { .. })));
        assert_eq!(assignment_to_partition(&[0, 1, 0, 1], 2), vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn completion_splits_the_deficit() {
        let xs = vec![HermitianMatrix::<f64>::diagonal(&[1.0, 0.5])];
        let c = complete_to_identity(&xs, 2, 0.25, 2).unwrap();
        assert_eq!(c.appended, 2);
        let total = c.instance.system().sum_matrix();
        assert!(total.minus(&HermitianMatrix::identity(2)).operator_norm() < 1e-12);
        assert_eq!(c.restrict(&[vec![0, 1], vec![2]]), vec![vec![0], vec![]]);
    }

    #[test]
    fn unit_trace_piece_is_out_of_hypothesis() {
        let inst = scalar_instance(&[1.0f64], 2).unwrap();
        let report = verify_paving(&inst, &[vec![0], vec![]]).unwrap();
        assert!(!report.hypothesis_ok);
        assert_eq!(report.bound_ok, None);
        assert_eq!(report.part_norms, vec![1.0, 0.0]);
    }
}
