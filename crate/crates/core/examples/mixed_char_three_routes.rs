//! The mixed characteristic polynomial three ways, and its maxroot sandwich.

use ksr_paving::instance::{generate_exact_instance, generate_instance};
use ksr_paving::mixed::{maxroot_mu, mu_of_system, mu_rank_one_expectation, mu_via_derivative_definition};

fn main() -> ksr_paving::Result<()> {
    let inst = generate_exact_instance(3, 3, 3, 2, true)?;
    let xs = inst.matrices();
    let gram = mu_of_system(inst.system(), false)?;
    let derivative = mu_via_derivative_definition(&xs, inst.d())?;
    let expectation = mu_rank_one_expectation(&xs, inst.d())?;
    println!("exact: gram = derivative: {}", gram == derivative);
    println!("exact: gram = expectation: {}", gram == expectation);

    // A whitened float instance: pieces of rank 2 and trace 1/2 summing to I_2.
    let inst = generate_instance(11, 2, 4, 2, 0.5, 2)?;
    let report = maxroot_mu(&inst)?;
    println!(
        "eps {:.3}: ||sum X|| = {:.6} <= maxroot mu = {:.6} <= {:?}",
        report.epsilon, report.norm_sum, report.maxroot, report.upper_bound
    );
    report.ensure()
}
