//! Closed-form bounds: this crate's targets and the earlier paving bounds
//! they are compared against.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Relative slack allowed when testing an ε-hypothesis computed in float.
pub const HYPOTHESIS_SLACK: f64 = 1e-12;

fn within(eps: f64, limit: f64) -> bool {
    eps <= limit * (1.0 + HYPOTHESIS_SLACK)
}

/// `(√a + √b)²` expanded as `a + b + 2√(ab)`, which is exact on the
/// boundary cases where `a = b` is a power of two.
fn sq_sum(a: f64, b: f64) -> f64 {
    let (a, b) = (a.max(0.0), b.max(0.0));
    a + b + 2.0 * (a * b).sqrt()
}

/// Largest admissible ε for the maxroot bound on μ: `(k-1)²/k`.
pub fn mu_hypothesis_limit(k: usize) -> f64 {
    let k = k as f64;
    (k - 1.0) * (k - 1.0) / k
}

/// `(√(1-ε/(k-1)) + √ε)²` when `k ≥ 2` and `ε ≤ (k-1)²/k`.
pub fn mu_maxroot_bound(k: usize, eps: f64) -> Option<f64> {
    if k < 2 || eps < 0.0 || !within(eps, mu_hypothesis_limit(k)) {
        return None;
    }
    let e = eps.min(mu_hypothesis_limit(k));
    Some(sq_sum(1.0 - e / (k as f64 - 1.0), e))
}

/// `(1/k)(√(1-ε/(k-1)) + √ε)²`, the bound on `maxroot ψ_{k,m}[A]`.
pub fn psi_maxroot_bound(k: usize, eps: f64) -> Option<f64> {
    mu_maxroot_bound(k, eps).map(|b| b / k as f64)
}

/// The optimal barrier height `a₀ = √((1-ε/(k-1))ε) + 1 - ε/(k-1)`.
pub fn barrier_a0(k: usize, eps: f64) -> f64 {
    let c = 1.0 - eps / (k as f64 - 1.0);
    (c * eps).max(0.0).sqrt() + c
}

/// Upper bound on the initial barrier value: `ε/(a-1) + (k-ε)/a`.
pub fn initial_phi_bound_value(k: usize, eps: f64, a: f64) -> f64 {
    eps / (a - 1.0) + (k as f64 - eps) / a
}

/// The height reached after a worst-case step from height `a`:
/// `a - ((k-1)²/k) / (ε/(a-1) + (k-ε)/a - 1/a)`. Minimized at `a₀`.
pub fn barrier_objective(k: usize, eps: f64, a: f64) -> f64 {
    let kk = k as f64;
    a - (kk - 1.0) * (kk - 1.0) / kk / (initial_phi_bound_value(k, eps, a) - 1.0 / a)
}

/// Hypothesis of the paving bound: `ε ≤ (kr-1)²/(kr²)`.
pub fn paving_hypothesis_limit(k: usize, r: usize) -> f64 {
    let kr = (k * r) as f64;
    (kr - 1.0) * (kr - 1.0) / (k as f64 * (r * r) as f64)
}

pub fn paving_hypothesis(k: usize, r: usize, eps: f64) -> bool {
    eps >= 0.0 && k * r >= 2 && within(eps, paving_hypothesis_limit(k, r))
}

/// `(1/r)(√(1 - rε/(kr-1)) + √(rε))²` (no hypothesis check).
pub fn this_paper_formula(k: usize, r: usize, eps: f64) -> f64 {
    let (rf, kr) = (r as f64, (k * r) as f64);
    sq_sum(1.0 - rf * eps / (kr - 1.0), rf * eps) / rf
}

/// The paving bound, when its hypothesis holds.
pub fn this_paper(k: usize, r: usize, eps: f64) -> Option<f64> {
    paving_hypothesis(k, r, eps).then(|| this_paper_formula(k, r, eps))
}

/// The baseline paving bound `(1/r)(1 + √(rε))²` (column `mss`).
pub fn mss(r: usize, eps: f64) -> f64 {
    let rf = r as f64;
    sq_sum(1.0, rf * eps) / rf
}

/// The sharper rank-one bound (column `rl`): `(1/r)(√(1 - rε/(r-1)) + √(rε))²` for
/// `ε ≤ (r-1)²/r²`.
pub fn ravichandran_leake(r: usize, eps: f64) -> Option<f64> {
    if r < 2 {
        return None;
    }
    let rf = r as f64;
    let limit = (rf - 1.0) * (rf - 1.0) / (rf * rf);
    within(eps, limit).then(|| this_paper_formula(1, r, eps.min(limit)))
}

/// The comparison quantity `δ_{ε,k}` for `k > 2`: `(√(1-ε/k) + √ε)²` up to `ε = k/(k+1)`,
/// linear above it.
pub fn branden_delta(eps: f64, k: usize) -> Option<f64> {
    if k <= 2 {
        return None;
    }
    let kf = k as f64;
    if eps <= kf / (kf + 1.0) {
        Some(sq_sum(1.0 - eps / kf, eps))
    } else {
        Some(2.0 + 2.0 * eps * (1.0 - 1.0 / kf))
    }
}

/// The comparison paving bound `(1/r)·δ_{rε,kr}` (defined for `kr > 2`).
pub fn branden(k: usize, r: usize, eps: f64) -> Option<f64> {
    branden_delta(r as f64 * eps, k * r).map(|d| d / r as f64)
}

/// Which branch of `δ_{rε,kr}` applies: 1 below `k'/(k'+1)`, 2 above.
pub fn branden_branch(k: usize, r: usize, eps: f64) -> Option<u8> {
    let kp = (k * r) as f64;
    (k * r > 2).then(|| if r as f64 * eps <= kp / (kp + 1.0) { 1 } else { 2 })
}

/// Simultaneous paving hypothesis `α ≤ (kr-1)²/(k²r²)`.
pub fn simultaneous_hypothesis_limit(k: usize, r: usize) -> f64 {
    let kr = (k * r) as f64;
    (kr - 1.0) * (kr - 1.0) / (kr * kr)
}

/// `(√(1/r - kα/(kr-1)) + √(kα))²`, when the hypothesis holds.
pub fn simultaneous(k: usize, r: usize, alpha: f64) -> Option<f64> {
    if k * r < 2 || alpha < 0.0 || !within(alpha, simultaneous_hypothesis_limit(k, r)) {
        return None;
    }
    let (kf, rf) = (k as f64, r as f64);
    Some(sq_sum(1.0 / rf - kf * alpha / (kf * rf - 1.0), kf * alpha))
}

/// One `(k, r, ε)` row of the comparison table.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BoundRow {
    pub k: usize,
    pub r: usize,
    pub eps: f64,
    pub hypothesis_ok: bool,
    pub this_paper: Option<f64>,
    pub mss: f64,
    pub rl: Option<f64>,
    pub branden: Option<f64>,
    pub branden_branch: Option<u8>,
    pub branden_branch1_formula: f64,
}

impl BoundRow {
    pub fn new(k: usize, r: usize, eps: f64) -> Self {
        let (kf, rf) = (k as f64, r as f64);
        let b1 = sq_sum(1.0 - eps / kf, rf * eps);
        BoundRow {
            k,
            r,
            eps,
            hypothesis_ok: paving_hypothesis(k, r, eps),
            this_paper: this_paper(k, r, eps),
            mss: mss(r, eps),
            rl: if k == 1 { ravichandran_leake(r, eps) } else { None },
            branden: branden(k, r, eps),
            branden_branch: branden_branch(k, r, eps),
            branden_branch1_formula: b1 / rf,
        }
    }
}

/// The KS₂ threshold row: at `k = 1`, `r = 2`, `ε = 1/η`, does the bound drop
/// below 1?
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EtaRow {
    pub eta: f64,
    pub this_paper: Option<f64>,
    pub mss: f64,
    pub this_paper_below_one: bool,
    pub mss_below_one: bool,
}

impl EtaRow {
    pub fn new(eta: f64) -> Self {
        let eps = 1.0 / eta;
        let ours = this_paper(1, 2, eps);
        let m = mss(2, eps);
        EtaRow {
            eta,
            this_paper: ours,
            mss: m,
            this_paper_below_one: ours.is_some_and(|b| b < 1.0),
            mss_below_one: m < 1.0,
        }
    }
}

/// The `η` above which the baseline bound gives a bound below one: `(2+√2)²`.
pub fn mss_eta_threshold() -> f64 {
    sq_sum(4.0, 2.0)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BoundTable {
    pub rows: Vec<BoundRow>,
    pub eta_rows: Vec<EtaRow>,
}

/// CSV schema version, written in the header comment line.
pub const BOUND_CSV_VERSION: &str = "ksr-bounds/1";

pub fn bound_table(grid: &[(usize, usize, f64)], etas: &[f64]) -> BoundTable {
    BoundTable {
        rows: grid.iter().map(|&(k, r, e)| BoundRow::new(k, r, e)).collect(),
        eta_rows: etas.iter().map(|&e| EtaRow::new(e)).collect(),
    }
}

/// The default grid: `k ∈ {1,2,3}`, `r ∈ {2,3,4}`, a sweep of ε including
/// each hypothesis boundary.
pub fn default_grid() -> Vec<(usize, usize, f64)> {
    let mut grid = Vec::new();
    for k in 1..=3 {
        for r in 2..=4 {
            let mut eps: Vec<f64> = [0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5]
                .into_iter()
                .collect();
            eps.push(paving_hypothesis_limit(k, r));
            for e in eps {
                grid.push((k, r, e));
            }
        }
    }
    grid
}

pub fn default_etas() -> Vec<f64> {
    vec![2.0, 3.0, 3.99, 4.0, 4.01, 5.0, 8.0, 11.0, mss_eta_threshold(), 12.0, 16.0, 32.0]
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

impl BoundTable {
    /// Main table as CSV, preceded by a versioned schema comment.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# {BOUND_CSV_VERSION} columns: k,r,eps,hypothesis_ok,this_paper,mss,rl,branden,branden_branch"
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "r", "eps", "hypothesis_ok", "this_paper", "mss", "rl", "branden", "branden_branch"])?;
        for row in &self.rows {
            w.write_record([
                row.k.to_string(),
                row.r.to_string(),
                format!("{:.17e}", row.eps),
                row.hypothesis_ok.to_string(),
                opt(row.this_paper),
                format!("{:.17e}", row.mss),
                opt(row.rl),
                opt(row.branden),
                row.branden_branch.map(|b| b.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_eta_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# {BOUND_CSV_VERSION}-eta columns: eta,this_paper,mss,this_paper_below_one,mss_below_one"
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eta", "this_paper", "mss", "this_paper_below_one", "mss_below_one"])?;
        for row in &self.eta_rows {
            w.write_record([
                format!("{:.17e}", row.eta),
                opt(row.this_paper),
                format!("{:.17e}", row.mss),
                row.this_paper_below_one.to_string(),
                row.mss_below_one.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(this_paper(1, 2, 0.25), Some(1.0));
        assert_eq!(ravichandran_leake(2, 0.25), Some(1.0));
        let ours = this_paper(1, 2, 0.2).unwrap();
        assert!((ours - (1.0 + 2.0 * 0.24f64.sqrt()) / 2.0).abs() < 1e-15, "{ours}");
        assert!((ours - 0.990).abs() < 5e-4);
        assert!((mss(2, 0.2) - 1.33245553203).abs() < 1e-10);
        assert_eq!(mu_maxroot_bound(2, 0.5), Some(2.0));
        let b = psi_maxroot_bound(3, 1.0).unwrap();
        assert!((b - (0.5f64.sqrt() + 1.0).powi(2) / 3.0).abs() < 1e-15);
        assert!((b - 0.9714045208).abs() < 1e-9);
    }

    #[test]
    fn hypothesis_gates() {
        assert!(mu_maxroot_bound(1, 0.0).is_none());
        assert!(mu_maxroot_bound(2, 0.51).is_none());
        assert!(this_paper(1, 2, 1.0).is_none());
        assert!(branden(1, 2, 0.1).is_none());
        assert!(branden(1, 3, 0.1).is_some());
    }

    #[test]
    fn barrier_objective_minimum_is_the_bound() {
        for (k, eps) in [(2, 0.1), (2, 0.5), (3, 0.3), (3, 4.0 / 3.0), (4, 1.0)] {
            let a0 = barrier_a0(k, eps);
            let want = psi_maxroot_bound(k, eps).unwrap();
            assert!((barrier_objective(k, eps, a0) - want).abs() < 1e-12);
            // a0 is a minimum
            assert!(barrier_objective(k, eps, a0 + 1e-3) >= want - 1e-12);
        }
    }
}
