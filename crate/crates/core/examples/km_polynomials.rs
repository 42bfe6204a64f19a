//! The (k,m)-characteristic polynomial: partition sum, principal minors and
//! the differential oracle, plus the root-sum identity.

use ksr_paving::instance::{random_hermitian, random_rational_hermitian, rng_from_seed};
use ksr_paving::km::{km_char_poly, km_char_poly_differential_oracle, km_char_poly_minors, rl_char_poly, KmContext};
use ksr_paving::HermitianMatrix;

fn main() -> ksr_paving::Result<()> {
    let (k, m) = (2, 3);
    let ctx = KmContext::new(k, m)?;
    let mut rng = rng_from_seed(7);

    let a = random_rational_hermitian(&mut rng, k * m, true);
    let psi = km_char_poly(&a, &ctx)?;
    let oracle = km_char_poly_differential_oracle(&a, &ctx)?;
    println!("exact psi = oracle: {}", psi == oracle);
    println!("psi coefficients: {:?}", psi.to_json());

    let a = random_hermitian(&mut rng, k * m);
    let psi = km_char_poly(&a, &ctx)?;
    let minors = km_char_poly_minors(&a, &ctx, k * m)?;
    let roots = psi.roots()?;
    println!("partition vs minors gap: {:e}", psi.coeff_gap(&minors));
    println!("sum of roots {:.12} vs tr(A)/k {:.12}", roots.sum(), a.trace() / k as f64);

    // k copies of B on the diagonal give the rank-one characteristic polynomial.
    let b = HermitianMatrix::diagonal(&[0.5, 0.25]);
    println!("chi_2[diag(1/2, 1/4)] roots: {:?}", rl_char_poly(&b, 2)?.roots()?.roots);
    Ok(())
}
