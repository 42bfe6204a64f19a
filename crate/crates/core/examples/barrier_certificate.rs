//! Replays the barrier argument that bounds maxroot ψ_{k,m}[A].

use ksr_paving::barrier::certify_maxroot_bound;
use ksr_paving::instance::generate_instance;
use ksr_paving::km::KmContext;

fn main() -> ksr_paving::Result<()> {
    let (d, m, k, eps) = (2, 5, 2, 0.45);
    let inst = generate_instance(4, d, m, k, eps, 2)?;
    let a = inst.system().gram_matrix();
    let cert = certify_maxroot_bound(&a, &KmContext::new(k, m)?)?;
    println!("eps = {:.4}, start height a0 = {:.6}", cert.eps, cert.a0);
    for (t, (delta, lambda)) in cert.deltas.iter().zip(&cert.lambdas).enumerate() {
        println!("step {t}: lambda = {lambda:.6}, delta = {delta:.6}, phi = {:.6}", cert.phi_trace[t][t]);
    }
    println!("maxroot psi = {:.6} <= max b_m = {:.6} <= bound {:.6}",
        cert.maxroot,
        cert.b_final.iter().cloned().fold(f64::MIN, f64::max),
        cert.bound);
    Ok(())
}
