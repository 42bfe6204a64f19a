//! The acceptance suite: twelve property checks with pinned tolerances.
//!
//! Every case draws from its own ChaCha20 stream keyed by
//! `(seed, criterion, index)`, cases run in parallel but are collected in
//! index order, and no timing enters a report, so a report is a pure
//! function of the configuration.

use std::io::Write;
use std::path::Path;

use num::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::barrier::certify_maxroot_bound;
use crate::bounds::{self, bound_table, default_etas, default_grid};
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, VectorSystem};
use crate::instance::{
    gaussian_vector, generate_exact_instance, generate_instance, random_gram_contraction, random_hermitian,
    random_rational_hermitian, rng_from_seed, RNG_NAME,
};
use crate::km::{choose_route, km_char_poly, km_char_poly_differential_oracle, km_char_poly_route, KmContext};
use crate::mixed::{
    maxroot_report, mu_of_system, mu_via_derivative_definition, mu_via_expectation, DecompositionInstance, Support,
};
use crate::paving::{exhaustive_pave, pave, pave_simultaneous};
use crate::poly::RealPoly;
use crate::scalar::Scalar;

pub const REPORT_VERSION: &str = "ksr-suite/1";

/// Pinned tolerances, one per check.
pub mod tol {
    /// Criterion 1, float mode: relative coefficient gap.
    pub const MU_ROUTES: f64 = 1e-9;
    /// Criterion 3: `|Σλ - tr A/k| ≤ tol·(1 + Σ|λ|)`.
    pub const ROOT_SUM: f64 = 1e-9;
    /// Criterion 4: imaginary residual of the companion eigenvalues.
    pub const IMAG_RESIDUAL: f64 = 1e-8;
    /// Criterion 5: `|maxroot μ - k·maxroot ψ| ≤ tol·(1 + maxroot μ)`.
    pub const MU_PSI_SCALE: f64 = 1e-10;
    /// Criterion 5: `‖ΣX‖ ≤ maxroot μ + tol`.
    pub const NORM_BELOW_MAXROOT: f64 = 1e-9;
    /// Criteria 6, 7, 8 and 11: additive slack on every bound.
    pub const BOUND: f64 = 1e-9;
    /// Criterion 7: smallest admissible `λ^{(t)}`.
    pub const MINROOT: f64 = -1e-9;
    /// Criterion 8: allowed increase along the greedy maxroot trace.
    pub const TRACE: f64 = 1e-9;
    /// Criterion 9: parent versus average of children.
    pub const AVERAGE: f64 = 1e-9;
    /// Criterion 10: spot values.
    pub const SPOT: f64 = 1e-12;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Exact,
}

/// Case counts per criterion.
#[derive(Clone, Debug, Serialize)]
pub struct Counts {
    pub mu_routes: usize,
    pub psi_oracle: usize,
    pub psi_random: usize,
    pub maxroot_per_cell: usize,
    pub barrier: usize,
    pub paving: usize,
    pub simultaneous: usize,
}

impl Counts {
    pub fn full() -> Self {
        Counts {
            mu_routes: 200,
            psi_oracle: 200,
            psi_random: 1000,
            maxroot_per_cell: 100,
            barrier: 60,
            paving: 100,
            simultaneous: 20,
        }
    }

    /// A tenth of every count (at least four), for smoke runs.
    pub fn quick() -> Self {
        let f = Self::full();
        let s = |n: usize| (n / 10).max(4);
        Counts {
            mu_routes: s(f.mu_routes),
            psi_oracle: s(f.psi_oracle),
            psi_random: s(f.psi_random),
            maxroot_per_cell: s(f.maxroot_per_cell),
            barrier: s(f.barrier),
            paving: s(f.paving),
            simultaneous: s(f.simultaneous),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub mode: Mode,
    pub counts: Counts,
    /// Replaces the ε grid of criteria 6, 7 and 8; points outside the
    /// hypothesis are recorded as not applicable.
    pub eps_override: Option<f64>,
    /// Fault injection: perturbs the Gram route of criterion 1.
    pub tamper_mu: bool,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig { seed, mode: Mode::Float, counts: Counts::full(), eps_override: None, tamper_mu: false }
    }

    pub fn quick(seed: u64) -> Self {
        SuiteConfig { counts: Counts::quick(), ..Self::new(seed) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub status: Status,
    pub cases: usize,
    pub failures: usize,
    pub not_applicable: usize,
    /// What `worst` measures.
    pub metric: String,
    pub worst: f64,
    pub tolerance: f64,
    /// The first few failure messages.
    pub notes: Vec<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotApplicable => "N/A ",
        };
        format!(
            "[{tag}] criterion {:>2} {:<38} cases={:<5} fail={:<3} n/a={:<4} {}={:.3e} (tol {:.0e})",
            self.id, self.name, self.cases, self.failures, self.not_applicable, self.metric, self.worst, self.tolerance
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub version: String,
    pub rng: String,
    pub config: SuiteConfig,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        if self.criteria.iter().any(|c| c.status == Status::Fail) {
            1
        } else if self.criteria.iter().any(|c| c.status == Status::NotApplicable) {
            2
        } else {
            0
        }
    }

    pub fn criterion(&self, id: u8) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# {REPORT_VERSION}: id,name,status,cases,failures,not_applicable,metric,worst,tolerance")?;
        let mut w = csv::Writer::from_writer(out);
        for c in &self.criteria {
            w.write_record([
                c.id.to_string(),
                c.name.clone(),
                format!("{:?}", c.status),
                c.cases.to_string(),
                c.failures.to_string(),
                c.not_applicable.to_string(),
                c.metric.clone(),
                format!("{:.17e}", c.worst),
                format!("{:e}", c.tolerance),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `suite.json`, `suite.csv`, `bounds.csv` and `bounds_eta.csv`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("suite.json"), self.to_json()?)?;
        self.write_csv(std::fs::File::create(dir.join("suite.csv"))?)?;
        let table = bound_table(&default_grid(), &default_etas());
        table.write_csv(std::fs::File::create(dir.join("bounds.csv"))?)?;
        table.write_eta_csv(std::fs::File::create(dir.join("bounds_eta.csv"))?)?;
        Ok(())
    }
}

/// Outcome of one case.
#[derive(Clone, Debug, Default)]
struct Case {
    value: f64,
    failure: Option<String>,
    not_applicable: bool,
}

impl Case {
    fn value(value: f64, ok: bool, what: impl FnOnce() -> String) -> Self {
        Case { value, failure: (!ok).then(what), not_applicable: false }
    }

    fn na() -> Self {
        Case { not_applicable: true, ..Case::default() }
    }

    fn error(e: Error) -> Self {
        Case { value: f64::NAN, failure: Some(e.to_string()), not_applicable: false }
    }
}

fn tally(id: u8, name: &str, metric: &str, tolerance: f64, cases: Vec<Case>) -> CriterionResult {
    let failures = cases.iter().filter(|c| c.failure.is_some()).count();
    let not_applicable = cases.iter().filter(|c| c.not_applicable).count();
    let worst = cases
        .iter()
        .filter(|c| !c.not_applicable && !c.value.is_nan())
        .map(|c| c.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let status = if failures > 0 {
        Status::Fail
    } else if not_applicable == cases.len() {
        Status::NotApplicable
    } else {
        Status::Pass
    };
    CriterionResult {
        id,
        name: name.to_string(),
        status,
        cases: cases.len() - not_applicable,
        failures,
        not_applicable,
        metric: metric.to_string(),
        worst: if worst.is_finite() { worst } else { 0.0 },
        tolerance,
        notes: cases.iter().filter_map(|c| c.failure.clone()).take(5).collect(),
    }
}

/// Seed of case `index` of criterion `id`.
pub fn case_seed(seed: u64, id: u8, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((id as u64) << 40) ^ index as u64
}

fn run_cases(n: usize, f: impl Fn(usize) -> Case + Sync + Send) -> Vec<Case> {
    (0..n).into_par_iter().map(f).collect()
}

fn catch<T>(r: Result<T>, f: impl FnOnce(T) -> Case) -> Case {
    match r {
        Ok(v) => f(v),
        Err(e) => Case::error(e),
    }
}

/// Criterion 1 on one system: Gram route against the derivative definition
/// and the deterministic expectation route.
fn mu_routes_case<T: Scalar>(system: &VectorSystem<T>, tamper: bool) -> Result<Case> {
    let d = system.d();
    let xs = system.matrices();
    let mut gram = mu_of_system(system, false)?;
    if tamper {
        let bump = RealPoly::constant(T::from_f64_value(1e-6));
        gram = &gram + &bump;
    }
    let derivative = mu_via_derivative_definition(&xs, d)?;
    let supports: Vec<Support<T>> = xs.iter().cloned().map(Support::deterministic).collect();
    let expectation = mu_via_expectation(&supports, d)?;
    let gap = gram.coeff_gap(&derivative).max(gram.coeff_gap(&expectation));
    let ok = gram.approx_eq(&derivative) && gram.approx_eq(&expectation);
    Ok(Case::value(gap, ok, || format!("routes disagree by {gap:e} (d={d}, m={}, k={})", system.m(), system.k())))
}

fn criterion_1(cfg: &SuiteConfig) -> CriterionResult {
    let cases = run_cases(cfg.counts.mu_routes, |i| {
        let seed = case_seed(cfg.seed, 1, i);
        let mut rng = rng_from_seed(seed);
        let (d, m, k) = (rng.random_range(1..=4), rng.random_range(1..=4), rng.random_range(1..=2));
        match cfg.mode {
            Mode::Exact => catch(generate_exact_instance(seed, d, m, k, true), |inst| {
                catch(mu_routes_case(inst.system(), cfg.tamper_mu), |c| c)
            }),
            Mode::Float => {
                let scale = 1.0 / ((m * k * d) as f64).sqrt();
                let groups = (0..m)
                    .map(|_| {
                        (0..k)
                            .map(|_| gaussian_vector(&mut rng, d).into_iter().map(|z| z * scale).collect())
                            .collect()
                    })
                    .collect();
                catch(VectorSystem::new(d, k, groups), |sys| catch(mu_routes_case(&sys, cfg.tamper_mu), |c| c))
            }
        }
    });
    let tolerance = if cfg.mode == Mode::Exact { 0.0 } else { tol::MU_ROUTES };
    tally(1, "three-route mu equivalence", "max relative gap", tolerance, cases)
}

fn criterion_2(cfg: &SuiteConfig) -> CriterionResult {
    // (k, m) with k·m ≤ 8.
    let shapes: Vec<(usize, usize)> = (1..=8).flat_map(|k| (1..=8 / k).map(move |m| (k, m))).collect();
    let cases = run_cases(cfg.counts.psi_oracle, |i| {
        let mut rng = rng_from_seed(case_seed(cfg.seed, 2, i));
        let (k, m) = shapes[i % shapes.len()];
        let a = random_rational_hermitian(&mut rng, k * m, i % 2 == 0);
        let run = || -> Result<Case> {
            let ctx = KmContext::new(k, m)?;
            let psi = km_char_poly(&a, &ctx)?;
            let oracle = km_char_poly_differential_oracle(&a, &ctx)?;
            let ok = psi == oracle;
            Ok(Case::value(psi.coeff_gap(&oracle), ok, || format!("psi differs from the oracle at k={k}, m={m}")))
        };
        catch(run(), |c| c)
    });
    tally(2, "psi differential oracle (exact)", "max relative gap", 0.0, cases)
}

/// `(k, m)` grid for criteria 3 and 4.
fn psi_grid(mode: Mode) -> Vec<(usize, usize)> {
    let cap = if mode == Mode::Exact { 8 } else { 12 };
    (1..=3).flat_map(|k| (1..=6).map(move |m| (k, m))).filter(|(k, m)| k * m <= cap).collect()
}

/// Root-sum gap and imaginary residual of `ψ` for one random matrix.
fn psi_case<T: Scalar>(a: &HermitianMatrix<T>, k: usize, m: usize) -> Result<(f64, f64)> {
    let ctx = KmContext::new(k, m)?;
    let psi = km_char_poly_route(a, &ctx, choose_route(&ctx, k * m))?;
    let roots = psi.roots()?;
    let target = a.trace().to_f64_lossy() / k as f64;
    let scale = 1.0 + roots.roots.iter().map(|r| r.abs()).sum::<f64>();
    Ok(((roots.sum() - target).abs() / scale, roots.residual_imag))
}

fn psi_random(cfg: &SuiteConfig) -> Vec<Result<(f64, f64)>> {
    let grid = psi_grid(cfg.mode);
    (0..cfg.counts.psi_random)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(case_seed(cfg.seed, 3, i));
            let (k, m) = grid[i % grid.len()];
            match cfg.mode {
                Mode::Exact => psi_case(&random_rational_hermitian(&mut rng, k * m, true), k, m),
                Mode::Float => psi_case(&random_hermitian(&mut rng, k * m), k, m),
            }
        })
        .collect()
}

fn criterion_3(runs: &[Result<(f64, f64)>]) -> CriterionResult {
    let cases = runs
        .iter()
        .map(|r| match r {
            Ok((gap, _)) => Case::value(*gap, *gap <= tol::ROOT_SUM, || format!("root sum off by {gap:e}")),
            Err(e) => Case::error(Error::InvalidInput(e.to_string())),
        })
        .collect();
    tally(3, "root sum equals tr(A)/k", "max relative gap", tol::ROOT_SUM, cases)
}

fn criterion_4(runs: &[Result<(f64, f64)>], mu_residuals: &[f64]) -> CriterionResult {
    let mut cases: Vec<Case> = runs
        .iter()
        .map(|r| match r {
            Ok((_, res)) => Case::value(*res, *res <= tol::IMAG_RESIDUAL, || format!("psi residual {res:e}")),
            Err(e) => Case::error(Error::InvalidInput(e.to_string())),
        })
        .collect();
    cases.extend(
        mu_residuals
            .iter()
            .map(|&res| Case::value(res, res <= tol::IMAG_RESIDUAL, || format!("mu residual {res:e}"))),
    );
    tally(4, "real-rootedness of psi and mu", "max imaginary residual", tol::IMAG_RESIDUAL, cases)
}

/// One criterion-6 instance: the sandwich (criterion 5) and the bound (criterion 6).
struct MaxrootRun {
    sandwich: Case,
    bound: Case,
    residual: f64,
}

fn maxroot_run(inst: &DecompositionInstance<f64>) -> Result<MaxrootRun> {
    let (k, m) = (inst.k(), inst.m());
    let mu = mu_of_system(inst.system(), false)?;
    let report = maxroot_report(&mu, inst)?;
    // ψ through the partition sum when affordable, so the two sides come from
    // different expansions.
    let ctx = KmContext::new(k, m)?;
    let route = match ctx.partition_count() {
        Some(n) if n <= 1 << 12 => crate::km::PsiRoute::Partitions,
        _ => choose_route(&ctx, inst.d()),
    };
    let psi = km_char_poly_route(&inst.system().gram_matrix(), &ctx, route)?;
    let scaled = k as f64 * psi.maxroot()?;
    let gap = (report.maxroot - scaled).abs() / (1.0 + report.maxroot.abs());
    let below = report.norm_sum - report.maxroot;
    let sandwich_ok = gap <= tol::MU_PSI_SCALE && below <= tol::NORM_BELOW_MAXROOT;
    let sandwich = Case::value(gap, sandwich_ok, || {
        format!("maxroot mu {} vs k*maxroot psi {scaled}, norm {}", report.maxroot, report.norm_sum)
    });
    let bound = match report.upper_bound {
        None => Case::na(),
        Some(b) => {
            let excess = report.maxroot - b;
            Case::value(excess, excess <= tol::BOUND, || format!("maxroot {} above {b} (eps {})", report.maxroot, report.epsilon))
        }
    };
    Ok(MaxrootRun { sandwich, bound, residual: report.residual_imag })
}

/// Cells of criterion 6: `(k, d, ε)`.
fn maxroot_cells(cfg: &SuiteConfig) -> Vec<(usize, usize, f64)> {
    [2usize, 3]
        .iter()
        .flat_map(|&k| {
            let d = k;
            let eps: Vec<f64> = match cfg.eps_override {
                Some(e) => vec![e],
                None => vec![0.1, 0.3, bounds::mu_hypothesis_limit(k)],
            };
            eps.into_iter().map(move |e| (k, d, e))
        })
        .collect()
}

fn criteria_5_6(cfg: &SuiteConfig) -> (CriterionResult, CriterionResult, Vec<f64>) {
    let cells = maxroot_cells(cfg);
    let per = cfg.counts.maxroot_per_cell;
    let runs: Vec<Result<MaxrootRun>> = (0..cells.len() * per)
        .into_par_iter()
        .map(|i| {
            let (k, d, eps) = cells[i / per];
            let seed = case_seed(cfg.seed, 6, i);
            let m = (d as f64 / eps).ceil() as usize + i % 3;
            let inst = generate_instance(seed, d, m.max(1), k, eps, 2)?;
            maxroot_run(&inst)
        })
        .collect();
    let mut sandwich = Vec::new();
    let mut bound = Vec::new();
    let mut residuals = Vec::new();
    for run in runs {
        match run {
            Ok(r) => {
                sandwich.push(r.sandwich);
                bound.push(r.bound);
                residuals.push(r.residual);
            }
            Err(Error::Infeasible(_)) => {
                sandwich.push(Case::na());
                bound.push(Case::na());
            }
            Err(e) => {
                let msg = e.to_string();
                sandwich.push(Case::error(e));
                bound.push(Case::error(Error::InvalidInput(msg)));
            }
        }
    }
    // The boundary value at k = 2, ε = 1/2 must be exactly 2.
    let exact = bounds::mu_maxroot_bound(2, 0.5);
    bound.push(Case::value(f64::NAN, exact == Some(2.0), || format!("bound at k=2, eps=0.5 is {exact:?}")));
    (
        tally(5, "norm <= maxroot mu = k maxroot psi", "max |mu - k psi| gap", tol::MU_PSI_SCALE, sandwich),
        tally(6, "maxroot mu below the closed form", "max excess over bound", tol::BOUND, bound),
        residuals,
    )
}

fn criterion_7(cfg: &SuiteConfig) -> CriterionResult {
    let cases = run_cases(cfg.counts.barrier, |i| {
        let seed = case_seed(cfg.seed, 7, i);
        let mut rng = rng_from_seed(seed);
        let k = 2 + i % 2;
        let d = k;
        let m = if k == 2 { rng.random_range(4..=6) } else { rng.random_range(3..=4) };
        let limit = bounds::mu_hypothesis_limit(k);
        let lo = d as f64 / m as f64;
        let eps = cfg.eps_override.unwrap_or_else(|| lo + (limit - lo).max(0.0) * rng.random::<f64>());
        let inst = match generate_instance(seed, d, m, k, eps, 2) {
            Ok(inst) => inst,
            Err(Error::Infeasible(_)) => return Case::na(),
            Err(e) => return Case::error(e),
        };
        let a = inst.system().gram_matrix();
        let run = || -> Result<Case> {
            let ctx = KmContext::new(k, m)?;
            let cert = match certify_maxroot_bound(&a, &ctx) {
                Err(Error::HypothesisOutOfRange(_)) => return Ok(Case::na()),
                other => other?,
            };
            let min_lambda = cert.lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
            let top = cert.b_final.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let ok = min_lambda >= tol::MINROOT && cert.maxroot <= top + tol::BOUND && cert.maxroot <= cert.bound + tol::BOUND;
            Ok(Case::value(cert.maxroot - top, ok, || {
                format!("certificate failed: maxroot {}, b_m top {top}, min lambda {min_lambda}", cert.maxroot)
            }))
        };
        catch(run(), |c| c)
    });
    tally(7, "barrier certificate dominates", "max (maxroot - max b_m)", tol::BOUND, cases)
}

/// Shapes of criterion 8: `(k, r, d, m, ε range)`.
fn paving_shapes() -> [(usize, usize, usize, usize, f64, f64); 4] {
    [
        (1, 2, 2, 8, 0.25, 0.25),
        (1, 3, 2, 5, 0.4, 4.0 / 9.0),
        (2, 2, 3, 6, 0.5, 9.0 / 8.0),
        (2, 3, 2, 5, 0.4, 25.0 / 18.0),
    ]
}

struct PavingRun {
    bound: Case,
    nodes: Vec<Case>,
    residual: f64,
}

fn paving_run(cfg: &SuiteConfig, i: usize) -> Result<Option<PavingRun>> {
    let shapes = paving_shapes();
    let (k, r, d, m, lo, hi) = shapes[i % shapes.len()];
    let seed = case_seed(cfg.seed, 8, i);
    let mut rng = rng_from_seed(seed);
    let eps = cfg.eps_override.unwrap_or_else(|| lo + (hi - lo) * rng.random::<f64>());
    let inst = match generate_instance(seed, d, m, k, eps, r) {
        Ok(inst) => inst,
        Err(Error::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let (report, path) = pave(&inst)?;
    let Some(bound) = report.bounds.this_paper else {
        return Ok(None);
    };
    let (_, best) = exhaustive_pave(&inst)?;
    let trace_ok = path.maxroot_trace.windows(2).all(|w| w[1] <= w[0] + tol::TRACE)
        && path.leaf_maxroot() <= path.root_maxroot() + tol::TRACE;
    let excess = report.max_norm.max(best) - bound;
    let ok = excess <= tol::BOUND && trace_ok;
    let bound_case = Case::value(excess, ok, || {
        format!("k={k} r={r} eps={eps}: greedy {} exhaustive {best} bound {bound} trace_ok {trace_ok}", report.max_norm)
    });
    let nodes = path
        .nodes
        .iter()
        .map(|n| {
            Case::value(n.average_gap, n.interlacing_ok && n.average_gap <= tol::AVERAGE, || {
                format!("node at depth {}: interlacing {}, gap {:e}", n.depth, n.interlacing_ok, n.average_gap)
            })
        })
        .collect();
    let residual = path.poly.roots()?.residual_imag;
    Ok(Some(PavingRun { bound: bound_case, nodes, residual }))
}

fn criteria_8_9(cfg: &SuiteConfig) -> (CriterionResult, CriterionResult, Vec<f64>) {
    let runs: Vec<Result<Option<PavingRun>>> = (0..cfg.counts.paving).into_par_iter().map(|i| paving_run(cfg, i)).collect();
    let mut bound = Vec::new();
    let mut nodes = Vec::new();
    let mut residuals = Vec::new();
    for run in runs {
        match run {
            Ok(Some(r)) => {
                bound.push(r.bound);
                nodes.extend(r.nodes);
                residuals.push(r.residual);
            }
            Ok(None) => {
                bound.push(Case::na());
                nodes.push(Case::na());
            }
            Err(e) => {
                // Interlacing and averaging failures surface as errors from the descent.
                let msg = e.to_string();
                bound.push(Case::error(e));
                nodes.push(Case::error(Error::InvalidInput(msg)));
            }
        }
    }
    (
        tally(8, "greedy and exhaustive paving bound", "max excess over bound", tol::BOUND, bound),
        tally(9, "interlacing witness at every node", "max parent-average gap", tol::AVERAGE, nodes),
        residuals,
    )
}

fn criterion_10() -> CriterionResult {
    let table = bound_table(&default_grid(), &default_etas());
    let mut cases = Vec::new();
    let spot = bounds::this_paper(1, 2, 0.25);
    let rl = bounds::ravichandran_leake(2, 0.25);
    for (name, v) in [("this_paper", spot), ("rl", rl)] {
        let gap = v.map(|x| (x - 1.0).abs()).unwrap_or(f64::INFINITY);
        cases.push(Case::value(f64::NAN, gap <= tol::SPOT, || format!("{name} at k=1, r=2, eps=1/4 is {v:?}")));
    }
    for row in &table.eta_rows {
        let ok = row.this_paper_below_one == (row.eta > 4.0);
        cases.push(Case::value(f64::NAN, ok, || format!("eta {} gives below_one {}", row.eta, row.this_paper_below_one)));
    }
    for row in table.rows.iter().filter(|r| r.hypothesis_ok) {
        let ours = row.this_paper.unwrap_or(f64::INFINITY);
        cases.push(Case::value(ours - row.mss, ours < row.mss, || {
            format!("mss {} not above this_paper {ours} at k={}, r={}, eps={}", row.mss, row.k, row.r, row.eps)
        }));
    }
    tally(10, "bound table reproduction", "max (this_paper - mss)", tol::SPOT, cases)
}

fn criterion_11(cfg: &SuiteConfig) -> CriterionResult {
    let (k, r) = (2usize, 2usize);
    let limit = bounds::simultaneous_hypothesis_limit(k, r);
    let cases: Vec<Case> = (0..cfg.counts.simultaneous)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(case_seed(cfg.seed, 11, i));
            let m = rng.random_range(3..=6);
            let alpha = limit * (0.3 + 0.7 * rng.random::<f64>());
            let list: Vec<HermitianMatrix<f64>> = (0..k)
                .map(|_| {
                    let rank = rng.random_range(1..=m);
                    random_gram_contraction(&mut rng, m, rank, alpha)
                })
                .collect();
            match pave_simultaneous(&list, r) {
                Ok(rep) => {
                    let worst = rep.norms.iter().flatten().cloned().fold(0.0, f64::max);
                    Case::value(worst - rep.bound, rep.ok, || {
                        format!("m={m}: norm {worst} above {} (alpha {})", rep.bound, rep.alpha)
                    })
                }
                Err(Error::HypothesisOutOfRange(_)) => Case::na(),
                Err(e) => Case::error(e),
            }
        })
        .collect();
    tally(11, "simultaneous paving of two matrices", "max excess over bound", tol::BOUND, cases)
}

/// Criteria 1 to 11 on the current rayon pool.
pub fn run_criteria(cfg: &SuiteConfig) -> SuiteReport {
    let c1 = criterion_1(cfg);
    let c2 = criterion_2(cfg);
    let psi = psi_random(cfg);
    let c3 = criterion_3(&psi);
    let (c5, c6, mut residuals) = criteria_5_6(cfg);
    let c7 = criterion_7(cfg);
    let (c8, c9, paving_residuals) = criteria_8_9(cfg);
    residuals.extend(paving_residuals);
    let c4 = criterion_4(&psi, &residuals);
    let c10 = criterion_10();
    let c11 = criterion_11(cfg);
    SuiteReport {
        version: REPORT_VERSION.to_string(),
        rng: RNG_NAME.to_string(),
        config: cfg.clone(),
        criteria: vec![c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11],
    }
}

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// The full suite: criteria 1 to 11 with `threads` workers, then criterion
/// 12 by re-running them with `alt_threads` workers and comparing the JSON
/// and CSV reports byte for byte.
pub fn run_suite(cfg: &SuiteConfig, threads: usize, alt_threads: usize) -> Result<SuiteReport> {
    let mut report = in_pool(threads, || run_criteria(cfg))?;
    let again = in_pool(alt_threads, || run_criteria(cfg))?;
    let bytes = |r: &SuiteReport| -> Result<Vec<u8>> {
        let mut out = r.to_json()?.into_bytes();
        r.write_csv(&mut out)?;
        Ok(out)
    };
    let (a, b) = (bytes(&report)?, bytes(&again)?);
    let same = a == b;
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    report.criteria.push(tally(
        12,
        &format!("byte-identical at {threads} vs {alt_threads} threads"),
        "differing bytes",
        0.0,
        vec![Case::value(differing as f64, same, || format!("{differing} bytes differ"))],
    ));
    Ok(report)
}

/// Exact-mode check used by the `oracle-check` command: the three μ routes
/// and the ψ oracle on one instance.
pub fn oracle_check_exact(seed: u64, d: usize, m: usize, k: usize) -> Result<(bool, bool)> {
    let inst: DecompositionInstance<BigRational> = generate_exact_instance(seed, d, m, k, true)?;
    let mu_ok = mu_routes_case(inst.system(), false)?.failure.is_none();
    let ctx = KmContext::new(k, m)?;
    let a = inst.system().gram_matrix();
    let psi_ok = km_char_poly(&a, &ctx)? == km_char_poly_differential_oracle(&a, &ctx)?;
    Ok((mu_ok, psi_ok))
}

/// Float counterpart of [`oracle_check_exact`].
pub fn oracle_check_float(inst: &DecompositionInstance<f64>) -> Result<(bool, bool)> {
    let mu_ok = mu_routes_case(inst.system(), false)?.failure.is_none();
    let ctx = KmContext::new(inst.k(), inst.m())?;
    let a = inst.system().gram_matrix();
    let psi_ok = km_char_poly(&a, &ctx)?.approx_eq(&km_char_poly_differential_oracle(&a, &ctx)?);
    Ok((mu_ok, psi_ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(seed: u64) -> SuiteConfig {
        let mut cfg = SuiteConfig::quick(seed);
        cfg.counts = Counts {
            mu_routes: 6,
            psi_oracle: 6,
            psi_random: 12,
            maxroot_per_cell: 2,
            barrier: 4,
            paving: 4,
            simultaneous: 2,
        };
        cfg
    }

    #[test]
    fn tampering_breaks_the_route_check() {
        let mut cfg = tiny(5);
        cfg.tamper_mu = true;
        assert_eq!(criterion_1(&cfg).status, Status::Fail);
        cfg.tamper_mu = false;
        assert_eq!(criterion_1(&cfg).status, Status::Pass);
    }

    #[test]
    fn eps_beyond_hypothesis_is_not_applicable() {
        let mut cfg = tiny(5);
        cfg.eps_override = Some(1.9);
        let (_, c6, _) = criteria_5_6(&cfg);
        assert_eq!(c6.not_applicable, 4);
        assert_eq!(c6.failures, 0);
    }

    #[test]
    fn case_seeds_differ() {
        assert_ne!(case_seed(1, 1, 0), case_seed(1, 2, 0));
        assert_ne!(case_seed(1, 1, 0), case_seed(1, 1, 1));
    }
}
