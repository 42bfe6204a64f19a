//! Completing a sub-identity decomposition so the pieces sum to I, then
//! paving and restricting back to the original pieces.

use ksr_paving::paving::{complete_to_identity, pave};
use ksr_paving::HermitianMatrix;

fn main() -> ksr_paving::Result<()> {
    let xs = vec![
        HermitianMatrix::diagonal(&[0.25, 0.0]),
        HermitianMatrix::diagonal(&[0.0, 0.25]),
        HermitianMatrix::diagonal(&[0.2, 0.1]),
    ];
    let done = complete_to_identity(&xs, 2, 0.25, 2)?;
    println!("appended {} pieces to reach the identity", done.appended);
    let (report, _) = pave(&done.instance)?;
    println!("completed partition {:?}", report.partition);
    println!("restricted to the originals {:?}", done.restrict(&report.partition));
    Ok(())
}
