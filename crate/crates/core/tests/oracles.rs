//! Library results against oracles written from the definitions, in exact
//! rational arithmetic, plus closed-form bound values.

use ksr_paving::bounds::{branden, mss, mss_eta_threshold, mu_maxroot_bound, ravichandran_leake, this_paper};
use ksr_paving::instance::{generate_exact_instance, random_rational_hermitian, rng_from_seed};
use ksr_paving::km::{km_char_poly, km_char_poly_minors, KmContext};
use ksr_paving::mixed::{mu_of_system, mu_rank_one_expectation, mu_via_derivative_definition};
use ksr_paving::HermitianMatrix;
use num::{BigRational, One, Zero};

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn real_rows(a: &HermitianMatrix<Q>) -> Vec<Vec<Q>> {
    let n = a.dim();
    (0..n).map(|i| (0..n).map(|j| a.get(i, j).re.clone()).collect()).collect()
}

/// Gaussian elimination with exact pivots.
fn det(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut acc = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            acc = -acc;
        }
        acc *= a[c][c].clone();
        for r in c + 1..n {
            let f = a[r][c].clone() / a[c][c].clone();
            for j in c..n {
                let t = f.clone() * a[c][j].clone();
                a[r][j] -= t;
            }
        }
    }
    acc
}

/// Weights `c_a` with `(1 - d/dz) g |_{z=0} = Σ_a c_a g(a)` for deg g ≤ n, nodes 0..=n.
fn one_minus_derivative_weights(n: usize) -> Vec<Q> {
    (0..=n as i64)
        .map(|a| {
            let denom: Q = (0..=n as i64).filter(|&b| b != a).map(|b| q(a - b)).product();
            let numer: Q = (0..=n as i64)
                .filter(|&c| c != a)
                .map(|c| (0..=n as i64).filter(|&b| b != a && b != c).map(|b| q(-b)).product::<Q>())
                .sum();
            let delta = if a == 0 { Q::one() } else { Q::zero() };
            delta - numer / denom
        })
        .collect()
}

/// `Π(1-∂_{z_i}) det(xI + Σ z_i X_i)` at `z = 0`, evaluated at one `x`.
fn mu_at(xs: &[HermitianMatrix<Q>], deg: usize, x: &Q) -> Q {
    let d = xs[0].dim();
    let w = one_minus_derivative_weights(deg);
    let rows: Vec<_> = xs.iter().map(real_rows).collect();
    let mut total = Q::zero();
    let mut word = vec![0usize; xs.len()];
    loop {
        let weight: Q = word.iter().map(|&a| w[a].clone()).product();
        if !weight.is_zero() {
            let mut m: Vec<Vec<Q>> = (0..d)
                .map(|i| (0..d).map(|j| if i == j { x.clone() } else { Q::zero() }).collect())
                .collect();
            for (x_i, &a) in rows.iter().zip(&word) {
                for i in 0..d {
                    for j in 0..d {
                        m[i][j] += q(a as i64) * x_i[i][j].clone();
                    }
                }
            }
            total += weight * det(m);
        }
        let Some(pos) = word.iter().position(|&a| a < deg) else { break };
        word[pos] += 1;
        word[..pos].iter_mut().for_each(|a| *a = 0);
    }
    total
}

/// `k^{-m} Σ_S det(xI_m - A(S))` by direct enumeration of k-partitions.
fn psi_at(a: &HermitianMatrix<Q>, k: usize, m: usize, x: &Q) -> Q {
    let rows = real_rows(a);
    let mut total = Q::zero();
    for word in 0..k.pow(m as u32) {
        let mut w = word;
        let mut part = vec![0; m];
        for p in part.iter_mut() {
            *p = w % k;
            w /= k;
        }
        let part = &part;
        let idx: Vec<usize> = (0..k)
            .flat_map(|j| (0..m).filter(move |&i| part[i] == j).map(move |i| i + j * m))
            .collect();
        let sub = (0..m)
            .map(|r| (0..m).map(|c| if r == c { x.clone() } else { Q::zero() } - rows[idx[r]][idx[c]].clone()).collect())
            .collect();
        total += det(sub);
    }
    total / q(k.pow(m as u32) as i64)
}

#[test]
fn mu_routes_match_the_definition() {
    for seed in 0..6 {
        let (d, m, k) = (2 + seed as usize % 2, 3, 2);
        let inst = generate_exact_instance(seed, d, m, k, false).unwrap();
        let xs = inst.matrices();
        let routes = [
            mu_of_system(inst.system(), false).unwrap(),
            mu_via_derivative_definition(&xs, d).unwrap(),
            mu_rank_one_expectation(&xs, d).unwrap(),
        ];
        for x in -1..=d as i64 + 1 {
            let want = mu_at(&xs, k, &q(x));
            for p in &routes {
                assert_eq!(p.eval(&q(x)), want, "seed {seed} at x = {x}");
            }
        }
    }
}

#[test]
fn psi_routes_match_the_partition_definition() {
    let mut rng = rng_from_seed(3);
    for (k, m) in [(1, 3), (2, 2), (2, 3), (3, 2), (2, 4)] {
        let ctx = KmContext::new(k, m).unwrap();
        let a = random_rational_hermitian(&mut rng, k * m, false);
        let part = km_char_poly(&a, &ctx).unwrap();
        let minors = km_char_poly_minors(&a, &ctx, k * m).unwrap();
        for x in -2..=m as i64 + 1 {
            let want = psi_at(&a, k, m, &q(x));
            assert_eq!(part.eval(&q(x)), want, "k={k} m={m} x={x}");
            assert_eq!(minors.eval(&q(x)), want, "k={k} m={m} x={x}");
        }
    }
}

#[test]
fn mu_is_scaled_psi_of_the_gram_matrix() {
    let (d, m, k) = (3, 3, 2);
    let inst = generate_exact_instance(5, d, m, k, false).unwrap();
    let gram = inst.system().gram_matrix();
    let xs = inst.matrices();
    for x in 1..=6i64 {
        let lhs = mu_at(&xs, k, &q(x));
        let kk = q(k as i64);
        let rhs = num::pow(q(x), d - m) * num::pow(kk.clone(), m) * psi_at(&gram, k, m, &(q(x) / kk));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn bound_spot_values() {
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    assert!(close(this_paper(1, 2, 0.25).unwrap(), 1.0));
    assert!(close(ravichandran_leake(2, 0.25).unwrap(), 1.0));
    assert_eq!(mu_maxroot_bound(2, 0.5), Some(2.0));
    // Both values are quoted to three digits; (1/√2 + √0.2)² = 1.33245...
    assert!((this_paper(1, 2, 0.2).unwrap() - 0.990).abs() < 1e-3);
    assert!((mss(2, 0.2) - 1.333).abs() < 1e-3);
    assert!(close(mss_eta_threshold(), 6.0 + 4.0 * 2f64.sqrt()));
    // First branch of the comparison bound, ε ≤ k/(kr+1).
    for (k, r, eps) in [(2, 2, 0.3), (1, 3, 0.2), (3, 2, 0.4)] {
        let (kf, rf) = (k as f64, r as f64);
        let want = ((1.0 - eps / kf).sqrt() + (rf * eps).sqrt()).powi(2) / rf;
        assert!(close(branden(k, r, eps).unwrap(), want), "k={k} r={r} eps={eps}");
    }
}
