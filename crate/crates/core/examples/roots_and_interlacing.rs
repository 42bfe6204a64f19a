//! Certified roots, multiple roots and common interlacings.

use ksr_paving::poly::{common_interlacing, convex_combination, interlaces};
use ksr_paving::RealPoly;
use num::BigRational;

fn main() -> ksr_paving::Result<()> {
    let f = RealPoly::from_roots(&[0.0, 1.0, 3.0]);
    let g = RealPoly::from_roots(&[0.5, 2.0]);
    println!("roots of f: {:?}", f.roots()?.roots);
    println!("g interlaces f: {}", interlaces(&g, &f)?);

    // A float double root comes back as one refined value, twice.
    let sq = RealPoly::from_roots(&[1.0, 1.0, 4.0]);
    println!("roots of (x-1)^2(x-4): {:?}", sq.roots()?.roots);

    let a = RealPoly::from_roots(&[0.0, 2.0]);
    let b = RealPoly::from_roots(&[1.0, 3.0]);
    let c = RealPoly::from_roots(&[2.5, 3.0]);
    println!("a, b share an interlacing: {}", common_interlacing(&[a.clone(), b.clone()])?);
    println!("a, c share an interlacing: {}", common_interlacing(&[a.clone(), c])?);
    let mid = convex_combination(&a, &b, &0.5)?;
    println!("(a+b)/2 roots: {:?}", mid.roots()?.roots);

    // Exact mode isolates with Sturm chains over the rationals.
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let exact = RealPoly::from_roots(&[q(1, 3), q(1, 3), q(5, 2)]);
    println!("exact roots: {:?}", exact.roots()?.roots);
    Ok(())
}
