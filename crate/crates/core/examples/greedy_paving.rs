//! Greedy descent through the interlacing family of the r-lift.

use ksr_paving::instance::generate_instance;
use ksr_paving::paving::{exhaustive_pave, pave};

fn main() -> ksr_paving::Result<()> {
    let (d, m, k, eps, r) = (3, 6, 2, 0.6, 2);
    let inst = generate_instance(21, d, m, k, eps, r)?;
    let (report, path) = pave(&inst)?;
    for node in &path.nodes {
        println!("depth {}: child maxroots {:?} -> take {}", node.depth, node.child_maxroots, node.chosen);
    }
    println!("partition {:?}", report.partition);
    println!("part norms {:?}", report.part_norms);
    println!("bounds: this_paper {:?}, mss {:.4}, branden {:?}", report.bounds.this_paper, report.bounds.mss, report.bounds.branden);
    let (best, norm) = exhaustive_pave(&inst)?;
    println!("exhaustive optimum {norm:.4} at {best:?}");
    report.ensure()
}
