use odbif::constants::{
    dirichlet_constants, mode_table, slab_constants, slab_mode_table, ProblemDims,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn delta_is_minus_beta_root_lambda(dim in 1usize..=6, n in 1usize..=12) {
        let c = dirichlet_constants(ProblemDims::new(dim, 1, n).unwrap()).unwrap();
        let expect = -c.beta_n * c.lambda_n.sqrt();
        prop_assert!((c.delta_n - expect).abs() <= 1e-12 * expect.abs());
        prop_assert!(c.lambda_n > 0.0);
    }

    #[test]
    fn mu_decreases_to_one(dim in 1usize..=6, n in 1usize..=30) {
        let a = dirichlet_constants(ProblemDims::new(dim, 1, n).unwrap()).unwrap().mu_n;
        let b = dirichlet_constants(ProblemDims::new(dim, 1, n + 1).unwrap()).unwrap().mu_n;
        prop_assert!(a > b && b > 1.0);
    }

    #[test]
    fn slab_b_squared_gamma_is_one(n in 1usize..=60) {
        let c = slab_constants(n).unwrap();
        prop_assert!((c.b_n * c.b_n * c.gamma_n - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kernel_is_a_single_mode(dim in 1usize..=4, n in 1usize..=3, shift in 1e-4f64..1.0) {
        let d = ProblemDims::new(dim, 1, n).unwrap();
        let lambda = dirichlet_constants(d).unwrap().lambda_n;
        prop_assert_eq!(mode_table(d, lambda, 200, 200, 1e-8).unwrap().kernel_hits, vec![(1, 1)]);
        prop_assert!(mode_table(d, lambda + shift, 200, 200, 1e-8).unwrap().kernel_hits.is_empty());
    }
}

#[test]
fn slab_kernel_is_a_single_mode() {
    for n in 1..=3 {
        let gamma = slab_constants(n).unwrap().gamma_n;
        assert_eq!(
            slab_mode_table(n, gamma, 200, 200, 1e-8)
                .unwrap()
                .kernel_hits,
            vec![(1, 0)]
        );
    }
}
