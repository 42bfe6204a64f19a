//! One partition that paves two PSD contractions at once.

use ksr_paving::instance::{random_gram_contraction, rng_from_seed};
use ksr_paving::paving::pave_simultaneous;

fn main() -> ksr_paving::Result<()> {
    let mut rng = rng_from_seed(9);
    let m = 6;
    let list = vec![
        random_gram_contraction(&mut rng, m, 3, 0.4),
        random_gram_contraction(&mut rng, m, 4, 0.4),
    ];
    let rep = pave_simultaneous(&list, 2)?;
    println!("alpha = {:.4}, bound = {:.4}", rep.alpha, rep.bound);
    println!("partition {:?}", rep.partition);
    for (i, norms) in rep.norms.iter().enumerate() {
        println!("  ||A_{i}(S_j)|| = {norms:.4?}");
    }
    println!("within bound: {}", rep.ok);
    Ok(())
}
