use odbif::constants::ProblemDims;
use odbif::profiles::{
    cylinder_first_order_field, cylinder_profile, slab_first_order_field, RadialShape,
};
use odbif::pullback::{
    assemble_cylinder_operator, solve_eigenpair_near, GridField, Reduction, TensorGrid,
    DEFAULT_EIGEN_TOL,
};
use odbif::spectra::BesselProfile;
use odbif::verify::{
    linearization_check, residual_sups, transversality_pairing, NeumannMetric, SampleGrid,
};
use proptest::prelude::*;

const SMALL: SampleGrid = SampleGrid { n_r: 41, n_x: 32 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn profiles_are_even_and_permutation_invariant(
        m in 2usize..=3,
        s in -0.2f64..0.2,
        x in proptest::collection::vec(-10.0f64..10.0, 3),
    ) {
        let p = cylinder_profile(ProblemDims::new(2, m, 1).unwrap(), s).unwrap();
        let x = &x[..m];
        let h = p.eval(x);
        let flipped: Vec<f64> = x.iter().map(|v| -v).collect();
        let mut rotated = x.to_vec();
        rotated.rotate_left(1);
        prop_assert!((p.eval(&flipped) - h).abs() < 1e-13);
        prop_assert!((p.eval(&rotated) - h).abs() < 1e-13);
    }

    #[test]
    fn slab_boundary_fluxes_have_opposite_sign(n in 1usize..=3, s in 0.0f64..0.1, x in 0.0f64..6.3) {
        let f = slab_first_order_field(n, 1, s).unwrap();
        let top = f.d_r(1.0, &[x]);
        let bottom = -f.d_r(-1.0, &[x]);
        prop_assert!((top + bottom).abs() <= 1e-13 * top.abs().max(1.0));
    }

    #[test]
    fn trivial_solution_has_zero_residual(dim in 1usize..=4, n in 1usize..=3) {
        let f = cylinder_first_order_field(ProblemDims::new(dim, 1, n).unwrap(), 0.0).unwrap();
        let (interior, boundary) = residual_sups(&f, SMALL, NeumannMetric::Constant).unwrap();
        prop_assert!(interior < 1e-10 && boundary < 1e-12, "{interior} {boundary}");
    }

    #[test]
    fn linearization_error_is_first_order(dim in 1usize..=3, k in 0.5f64..4.0) {
        let f = cylinder_first_order_field(ProblemDims::new(dim, 1, 1).unwrap(), 0.0).unwrap();
        let probe = f.with_probe(RadialShape::Bessel(BesselProfile::new(f.dims.beta(), k)), 1);
        let rep = linearization_check(&probe, &[1e-2, 1e-3, 1e-4], SMALL).unwrap();
        prop_assert!(rep.interior_rate > 0.9, "{rep:?}");
    }

    #[test]
    fn pairing_is_negative(dim in 1usize..=4, n in 1usize..=2) {
        let v = transversality_pairing(ProblemDims::new(dim, 1, n).unwrap()).unwrap().value;
        prop_assert!(v < 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn eigensolver_meets_requested_tolerance(dim in 1usize..=3, s in 0.0f64..0.03) {
        let f = cylinder_first_order_field(ProblemDims::new(dim, 1, 1).unwrap(), s).unwrap();
        let grid = TensorGrid::cylinder(32, 16).unwrap();
        let profile = f.reference_profile().unwrap();
        let op = assemble_cylinder_operator(&profile, dim, f.lambda, 1, &grid, Reduction::EvenInX).unwrap();
        let seed = GridField::sample(&grid, |r, x| f.value(r, &[x]));
        let ep = solve_eigenpair_near(&op, f.zero_order, &seed, DEFAULT_EIGEN_TOL).unwrap();
        prop_assert!(ep.residual <= DEFAULT_EIGEN_TOL, "{}", ep.residual);
    }
}
