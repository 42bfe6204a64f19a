//! Root certification in both modes.
//!
//! Float: companion-matrix eigenvalues, accepted when every imaginary part is
//! below `1e-8·(1 + |λ|)`. Clusters of repeated roots make the companion
//! spectrum split into stars of radius `ε^{1/mult}`, so a second path
//! replaces each star by its centroid before giving up; it is only accepted
//! when the centroids rebuild the coefficients and the imaginary parts
//! average out within each star. The extremal roots are
//! then polished by Newton iteration from outside the root set.
//!
//! Exact: squarefree (Yun) decomposition, a Sturm count per factor that must
//! equal its degree, then rational bisection down to float resolution.

use nalgebra::DMatrix;
use num::{BigRational, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::RealPoly;
use crate::scalar::Scalar;

/// Per-eigenvalue imaginary tolerance (scaled by `1 + |λ|`).
pub const REAL_ROOT_TOL: f64 = 1e-8;

/// Sorted real roots of a certified polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct RootBundle {
    pub roots: Vec<f64>,
    pub residual_imag: f64,
}

impl RootBundle {
    /// Largest root; `-inf` for a constant polynomial.
    pub fn maxroot(&self) -> f64 {
        self.roots.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Smallest root; `+inf` for a constant polynomial.
    pub fn minroot(&self) -> f64 {
        self.roots.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn sum(&self) -> f64 {
        self.roots.iter().sum()
    }
}

fn trimmed(coeffs: &[f64]) -> Result<&[f64]> {
    let n = coeffs.iter().rposition(|c| *c != 0.0).ok_or(Error::ZeroPolynomial)?;
    Ok(&coeffs[..=n])
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect()
}

fn cauchy_bound(monic: &[f64]) -> f64 {
    let n = monic.len() - 1;
    1.0 + monic[..n].iter().fold(0.0f64, |a, c| a.max(c.abs()))
}

fn companion_eigenvalues(monic: &[f64]) -> Vec<num::Complex<f64>> {
    let n = monic.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -monic[i];
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Groups eigenvalues that belong to one split multiple root.
///
/// A root of multiplicity `μ` perturbed by `ε` spreads into a star of radius
/// about `ε^{1/μ}`; the star's centroid stays `O(ε)`-accurate. Eigenvalues
/// are linked when their distance is within four times the larger of their
/// imaginary parts (or the base tolerance), and each connected group is
/// replaced by its centroid. Returns `(centroid, multiplicity, mean imag)`.
fn cluster_centroids(eig: &[num::Complex<f64>]) -> Vec<(f64, usize, f64)> {
    let n = eig.len();
    let reach: Vec<f64> = eig
        .iter()
        .map(|z| 4.0 * z.im.abs().max(REAL_ROOT_TOL * (1.0 + z.re.abs())))
        .collect();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(g: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while g[r] != r {
            r = g[r];
        }
        g[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eig[i] - eig[j]).norm() <= reach[i].max(reach[j]) {
                let (a, b) = (find(&mut group, i), find(&mut group, j));
                group[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<(usize, f64, usize, f64)> = Vec::new();
    for i in 0..n {
        let r = find(&mut group, i);
        match out.iter_mut().find(|o| o.0 == r) {
            Some(o) => {
                o.1 += eig[i].re;
                o.2 += 1;
                o.3 += eig[i].im;
            }
            None => out.push((r, eig[i].re, 1, eig[i].im)),
        }
    }
    out.into_iter()
        .map(|(_, re, cnt, im)| (re / cnt as f64, cnt, im / cnt as f64))
        .collect()
}

/// Newton from above on a monic real-rooted polynomial: monotone decrease to
/// the largest root.
fn newton_maxroot(monic: &[f64], start: f64) -> f64 {
    let d = deriv(monic);
    let mut x = start;
    for _ in 0..20_000 {
        let px = horner(monic, x);
        if px <= 0.0 {
            break;
        }
        let dx = horner(&d, x);
        if dx <= 0.0 {
            break;
        }
        let next = x - px / dx;
        if next >= x {
            break;
        }
        let pn = horner(monic, next);
        if pn < 0.0 {
            // Overshoot by rounding only: the step itself is accurate.
            if -pn <= horner_noise(monic, next) {
                x = next;
            }
            break;
        }
        x = next;
    }
    x
}

/// A start point provably to the right of every root: all derivatives of a
/// monic polynomial are positive there (Budan–Fourier).
fn start_above(monic: &[f64], guess: f64) -> f64 {
    let bound = cauchy_bound(monic);
    let mut x = guess + 1e-3 * (1.0 + guess.abs());
    for _ in 0..4 {
        let mut c = monic.to_vec();
        let mut ok = true;
        while c.len() > 1 {
            if horner(&c, x) <= 0.0 {
                ok = false;
                break;
            }
            c = deriv(&c);
        }
        if ok && x < bound {
            return x;
        }
        x += 0.25 * (1.0 + x.abs());
    }
    bound
}

fn reflect(monic: &[f64]) -> Vec<f64> {
    let n = monic.len() - 1;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    monic
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { c * sign } else { -c * sign })
        .collect()
}

pub fn certify_float(coeffs: &[f64]) -> Result<RootBundle> {
    let c = trimmed(coeffs)?;
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotRealRooted { residual_imag: f64::NAN });
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(RootBundle { roots: Vec::new(), residual_imag: 0.0 });
    }
    // Exact zero roots come for free (x^{d-m} prefactors produce them).
    let zeros = c.iter().position(|v| *v != 0.0).unwrap_or(0);
    let lead = c[n];
    let monic: Vec<f64> = c[zeros..].iter().map(|v| v / lead).collect();
    let mut roots = vec![0.0; zeros];
    let mut residual = 0.0f64;
    if monic.len() > 1 {
        let eig = companion_eigenvalues(&monic);
        let clean = eig
            .iter()
            .all(|z| z.im.abs() <= REAL_ROOT_TOL * (1.0 + z.re.abs()));
        let mut core: Vec<f64> = if clean {
            residual = eig.iter().fold(0.0, |a, z| a.max(z.im.abs()));
            eig.iter().map(|z| z.re).collect()
        } else {
            let clusters = cluster_centroids(&eig);
            residual = clusters.iter().fold(0.0, |a, c| a.max(c.2.abs()));
            let scale = clusters.iter().fold(0.0f64, |a, c| a.max(c.0.abs()));
            let cand: Vec<f64> = clusters
                .iter()
                .flat_map(|&(r, mult, _)| std::iter::repeat_n(r, mult))
                .collect();
            if residual > REAL_ROOT_TOL * (1.0 + scale) || !rebuilds(&monic, &cand) {
                return Err(Error::NotRealRooted { residual_imag: residual });
            }
            cand
        };
        core.sort_by(f64::total_cmp);
        refine_top(&monic, &mut core);
        let refl = reflect(&monic);
        let mut mirrored: Vec<f64> = core.iter().rev().map(|r| -r).collect();
        refine_top(&refl, &mut mirrored);
        core = mirrored.iter().rev().map(|r| -r).collect();
        roots.extend(core);
    }
    roots.sort_by(f64::total_cmp);
    Ok(RootBundle { roots, residual_imag: residual })
}

/// Running error bound of Horner's rule at `x` (Higham, §5.1).
fn horner_noise(c: &[f64], x: f64) -> f64 {
    let n = c.len() as f64;
    4.0 * n * f64::EPSILON * c.iter().rev().fold(0.0, |acc, a| acc * x.abs() + a.abs())
}

/// Refines the largest root (the last entry of the ascending `core`).
///
/// A root of multiplicity `μ` is only `ε^{1/μ}`-determined by Newton on `p`
/// itself, but it is a simple root of `p^{(μ-1)}`. The top cluster size is
/// tried from large to small; a candidate is accepted when `p, …, p^{(μ-2)}`
/// all vanish there to within their evaluation error, and then replaces the
/// whole cluster.
fn refine_top(monic: &[f64], core: &mut [f64]) {
    let n = core.len();
    let top = core[n - 1];
    let window = 1e-3 * (1.0 + top.abs());
    let cluster = core.iter().rev().take_while(|r| top - **r <= window).count();
    let mut derivs = vec![monic.to_vec()];
    for _ in 1..cluster {
        let next = deriv(derivs.last().expect("nonempty"));
        derivs.push(next);
    }
    for mu in (2..=cluster).rev() {
        let d = &derivs[mu - 1];
        let lead = d[d.len() - 1];
        let dm: Vec<f64> = d.iter().map(|c| c / lead).collect();
        let r = newton_maxroot(&dm, start_above(&dm, top));
        if (r - top).abs() > window {
            continue;
        }
        if derivs[..mu - 1].iter().all(|p| horner(p, r).abs() <= horner_noise(p, r)) {
            core[n - mu..].iter_mut().for_each(|v| *v = r);
            return;
        }
    }
    // Newton stalls early on a high-multiplicity extreme root (the
    // polynomial is pure rounding noise there); keep the estimate then.
    let refined = newton_maxroot(monic, start_above(monic, top));
    if (refined - top).abs() <= 1e-6 * (1.0 + top.abs()) {
        core[n - 1] = refined;
    }
}

fn rebuilds(monic: &[f64], roots: &[f64]) -> bool {
    let rebuilt = RealPoly::from_roots(roots);
    let scale: f64 = monic.iter().map(|c| c.abs()).sum();
    monic
        .iter()
        .enumerate()
        .all(|(i, c)| (rebuilt.coeff(i) - c).abs() <= 1e-7 * scale)
}

type Q = BigRational;

fn gcd(a: &RealPoly<Q>, b: &RealPoly<Q>) -> RealPoly<Q> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

/// Yun's squarefree decomposition: `(factor, multiplicity)` pairs.
fn squarefree(f: &RealPoly<Q>) -> Vec<(RealPoly<Q>, usize)> {
    let f = f.monic();
    let df = f.derivative();
    let a0 = gcd(&f, &df);
    let mut b = f.div_rem(&a0).0;
    let c = df.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree() > 0 {
        let a = gcd(&b, &d);
        let nb = b.div_rem(&a).0;
        let nc = d.div_rem(&a).0;
        d = &nc - &nb.derivative();
        if a.degree() > 0 {
            out.push((a, i));
        }
        b = nb;
        i += 1;
    }
    out
}

struct Sturm {
    chain: Vec<RealPoly<Q>>,
}

impl Sturm {
    fn new(f: &RealPoly<Q>) -> Self {
        let mut chain = vec![f.clone(), f.derivative()];
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-&r);
        }
        Sturm { chain }
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|s| *s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn at(&self, x: &Q) -> usize {
        Self::variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    fn at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let s = sign(&p.leading());
            if positive || p.degree() % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }
}

fn sign(q: &Q) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

pub fn certify_exact(coeffs: &[Q]) -> Result<RootBundle> {
    let p = RealPoly::new(coeffs.to_vec());
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut roots = Vec::with_capacity(p.degree());
    for (f, mult) in squarefree(&p) {
        let sturm = Sturm::new(&f);
        let real = sturm.at_infinity(false) - sturm.at_infinity(true);
        if real != f.degree() {
            return Err(Error::NotRealRooted { residual_imag: f64::INFINITY });
        }
        let monic = f.monic();
        let bound = monic.coeffs()[..f.degree()]
            .iter()
            .fold(Q::zero(), |a, c| if c.abs() > a { c.abs() } else { a })
            + Q::int(1);
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((lo, hi)) = stack.pop() {
            let count = sturm.at(&lo) - sturm.at(&hi);
            if count == 0 {
                continue;
            }
            if count == 1 {
                let r = refine(&sturm, lo, hi);
                roots.extend(std::iter::repeat_n(r, mult));
                continue;
            }
            let mid = (lo.clone() + hi.clone()) / Q::int(2);
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(RootBundle { roots, residual_imag: 0.0 })
}

/// Shrinks `(lo, hi]` holding exactly one root to float resolution.
fn refine(sturm: &Sturm, mut lo: Q, mut hi: Q) -> f64 {
    let base = sturm.at(&hi);
    for _ in 0..200 {
        let (l, h) = (lo.to_f64_lossy(), hi.to_f64_lossy());
        if h - l <= 1e-17 * (1.0 + h.abs().max(l.abs())) {
            break;
        }
        let mid = (lo.clone() + hi.clone()) / Q::int(2);
        if sturm.at(&mid) > base {
            // root in (mid, hi]
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.to_f64_lossy()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_quadratic() {
        let b = certify_float(&[3.0, -4.0, 1.0]).unwrap();
        assert_eq!(b.roots, vec![1.0, 3.0]);
    }

    #[test]
    fn no_real_roots_rejected_in_both_modes() {
        assert!(matches!(
            certify_float(&[1.0, 0.0, 1.0]),
            Err(Error::NotRealRooted { .. })
        ));
        let q = [Q::int(1), Q::int(0), Q::int(1)];
        assert!(matches!(certify_exact(&q), Err(Error::NotRealRooted { .. })));
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(certify_float(&[0.0, 0.0]), Err(Error::ZeroPolynomial)));
        assert!(matches!(certify_exact(&[Q::zero()]), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn repeated_roots_survive_the_fallback() {
        // (x-1)^6 (x-2)^2: the companion spectrum splits the sextuple root.
        let roots = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0];
        let p = RealPoly::from_roots(&roots);
        let b = certify_float(p.coeffs()).unwrap();
        for (got, want) in b.roots.iter().zip(roots) {
            assert!((got - want).abs() < 1e-2, "{got} vs {want}");
        }
        assert!((b.maxroot() - 2.0).abs() < 1e-6);
        let exact = RealPoly::<Q>::from_roots(&roots.map(|r| Q::int(r as i64)));
        let be = certify_exact(exact.coeffs()).unwrap();
        assert_eq!(be.roots, roots.to_vec());
    }

    #[test]
    fn exact_isolation_matches_float() {
        let roots = [-1.5, 0.25, 0.3, 4.0];
        let pf = RealPoly::from_roots(&roots);
        let pq = RealPoly::<Q>::from_roots(&roots.map(Q::from_f64_value));
        let bf = certify_float(pf.coeffs()).unwrap();
        let bq = certify_exact(pq.coeffs()).unwrap();
        for ((a, b), r) in bf.roots.iter().zip(&bq.roots).zip(roots) {
            assert!((a - b).abs() < 1e-8);
            assert!((b - r).abs() < 1e-14);
        }
    }

    #[test]
    fn newton_polishes_extremes() {
        let p = RealPoly::from_roots(&[0.1, 0.2, 0.9999999, 1.0]);
        let b = certify_float(p.coeffs()).unwrap();
        assert!((b.maxroot() - 1.0).abs() < 1e-7);
        assert!((b.minroot() - 0.1).abs() < 1e-12);
    }
}
