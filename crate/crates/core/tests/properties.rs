use ksr_paving::bounds::this_paper;
use ksr_paving::instance::{generate_instance, random_hermitian, rng_from_seed};
use ksr_paving::km::{km_char_poly, KmContext};
use ksr_paving::mixed::maxroot_mu;
use ksr_paving::paving::pave;
use ksr_paving::poly::interlaces;
use ksr_paving::RealPoly;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derivative_interlaces(mut roots in prop::collection::vec(-5.0f64..5.0, 2..7)) {
        roots.sort_by(f64::total_cmp);
        let f = RealPoly::from_roots(&roots);
        prop_assert!(interlaces(&f.derivative(), &f).unwrap());
    }

    #[test]
    fn psi_roots_sum_to_scaled_trace(seed in any::<u64>(), k in 1usize..4, m in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let a = random_hermitian(&mut rng, k * m);
        let psi = km_char_poly(&a, &KmContext::new(k, m).unwrap()).unwrap();
        let sum = psi.roots().unwrap().sum();
        let want = a.trace() / k as f64;
        prop_assert!((sum - want).abs() <= 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn norm_is_below_maxroot_mu(seed in any::<u64>(), m in 4usize..7) {
        let inst = generate_instance(seed, 2, m, 2, 2.0 / m as f64, 2).unwrap();
        let rep = maxroot_mu(&inst).unwrap();
        prop_assert!(rep.norm_sum <= rep.maxroot + 1e-10);
        prop_assert!(rep.maxroot <= rep.upper_bound.unwrap() + 1e-9);
    }

    #[test]
    fn greedy_paving_covers_and_meets_the_bound(seed in any::<u64>(), m in 8usize..10) {
        let (k, r) = (1, 2);
        let eps = 2.0 / m as f64;
        let inst = generate_instance(seed, 2, m, k, eps, r).unwrap();
        let (report, path) = pave(&inst).unwrap();
        let mut seen: Vec<usize> = report.partition.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..m).collect::<Vec<_>>());
        if let Some(bound) = this_paper(k, r, inst.epsilon().clone()) {
            prop_assert!(report.max_norm <= bound + 1e-9);
        }
        for w in path.maxroot_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
    }
}
