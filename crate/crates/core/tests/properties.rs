use proptest::prelude::*;

use wigner_ball::localization::{ball_integral_diagonal, diagonal_form, theorem1_value, BallSpec};
use wigner_ball::oracle::{mc_ball_integral, QuadratureSpec};
use wigner_ball::rotation::{
    apply_rotation, hermite_to_poly, maximizer_chain, poly_to_hermite, rotation_coefficients,
    verify_rotation_invariance, PlaneRotation,
};
use wigner_ball::special::regularized_upper_gamma;
use wigner_ball::MultiIndex;

fn index(n: usize, max_degree: u32) -> impl Strategy<Value = MultiIndex> {
    (0..=max_degree).prop_flat_map(move |lambda| {
        let class = MultiIndex::with_degree(n, lambda);
        (0..class.len()).prop_map(move |i| class[i].clone())
    })
}

fn class_pair(n: usize, max_degree: u32) -> impl Strategy<Value = (MultiIndex, MultiIndex)> {
    (0..=max_degree).prop_flat_map(move |lambda| {
        let class = MultiIndex::with_degree(n, lambda);
        let len = class.len();
        (0..len, 0..len).prop_map(move |(i, j)| (class[i].clone(), class[j].clone()))
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonal_integral_below_volume_bound(
        (n, mu) in (1..=3usize).prop_flat_map(|n| (Just(n), index(n, 6))),
        r in 0.01..1.0f64,
    ) {
        let v = ball_integral_diagonal(&mu, &BallSpec::new(n, r).unwrap()).unwrap().value;
        prop_assert!(v <= r.powi(2 * n as i32) / factorial(n) + 1e-12);
    }

    #[test]
    fn diagonal_curves_tend_to_one(
        (_n, mu) in (1..=3usize).prop_flat_map(|n| (Just(n), index(n, 8))),
    ) {
        let form = diagonal_form(&mu);
        prop_assert_eq!(form.constant.clone(), num_rational::BigRational::from_integer(1.into()));
        prop_assert!((form.eval(900.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theorem1_value_monotone(n in 1..=5usize, r in 0.05..4.0f64, dr in 0.01..0.5f64) {
        let here = theorem1_value(&BallSpec::new(n, r).unwrap());
        prop_assert!(theorem1_value(&BallSpec::new(n, r + dr).unwrap()) > here);
        prop_assert!(theorem1_value(&BallSpec::new(n + 1, r).unwrap()) < here);
    }

    #[test]
    fn eigenspace_classes_share_forms(
        (a, b) in (1..=3usize).prop_flat_map(|n| class_pair(n, 6)),
    ) {
        prop_assert_eq!(diagonal_form(&a), diagonal_form(&b));
    }

    #[test]
    fn float_rotations_are_unitary_and_preserve_eigenspaces(
        (n, mu) in (2..=3usize).prop_flat_map(|n| (Just(n), index(n, 6))),
        theta in -3.2..3.2f64,
        axes in 0..3usize,
    ) {
        let (a, b) = [(0, 1), (0, 2), (1, 2)][axes % if n == 2 { 1 } else { 3 }];
        let rot = PlaneRotation::new(a, b, theta).unwrap();
        let rotated = apply_rotation(&hermite_to_poly::<f64>(&mu).unwrap(), &rot).unwrap();
        let e = poly_to_hermite(&rotated).unwrap();
        prop_assert_eq!(e.lambda, mu.degree());
        prop_assert!((e.weight_sum() - 1.0).abs() < 1e-12);
        let ball = BallSpec::new(n, 1.3).unwrap();
        prop_assert!(verify_rotation_invariance(&mu, &rot, &ball).unwrap().passed());
    }

    #[test]
    fn chains_link_equal_integrals(
        (start, target) in (2..=3usize).prop_flat_map(|n| class_pair(n, 6)),
        r in 0.1..3.0f64,
    ) {
        let steps = maximizer_chain(&start, &target).unwrap();
        let ball = BallSpec::new(start.dim(), r).unwrap();
        let mut current = start.clone();
        for s in &steps {
            prop_assert_eq!(&s.from, &current);
            prop_assert!(s.coefficient != 0.0);
            let c = rotation_coefficients::<wigner_ball::rotation::QSqrt2>(&s.from, &s.rotation).unwrap();
            prop_assert!(c.term(&s.to).unwrap().is_nonzero());
            prop_assert!(verify_rotation_invariance(&s.from, &s.rotation, &ball).unwrap().passed());
            current = s.to.clone();
        }
        prop_assert_eq!(&current, &target);
        let i_start = ball_integral_diagonal(&start, &ball).unwrap();
        let i_target = ball_integral_diagonal(&target, &ball).unwrap();
        prop_assert_eq!(i_start.form, i_target.form);
    }

    #[test]
    fn gamma_decreasing(n in 1..=12u32, x in 0.0..40.0f64, dx in 1e-3..2.0f64) {
        let a = regularized_upper_gamma(n, x).unwrap();
        let b = regularized_upper_gamma(n, x + dx).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0);
        // Strict unless both values are within rounding of 1.
        prop_assert!(b < a || (b == a && 1.0 - a <= 4.0 * f64::EPSILON));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monte_carlo_reproducible(
        (n, mu) in (1..=2usize).prop_flat_map(|n| (Just(n), index(n, 3))),
        seed in any::<u64>(),
        r in 0.2..2.0f64,
    ) {
        let spec = QuadratureSpec::default().with_samples(20_000).with_seed(seed);
        let ball = BallSpec::new(n, r).unwrap();
        let a = mc_ball_integral(&mu, &mu, &ball, &spec).unwrap();
        let b = mc_ball_integral(&mu, &mu, &ball, &spec).unwrap();
        prop_assert_eq!(a.0.to_bits(), b.0.to_bits());
        prop_assert_eq!(a.1.to_bits(), b.1.to_bits());
    }
}
