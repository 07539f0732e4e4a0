//! Randomized property checks over the transform and metric layers.

use nalgebra::DMatrix;
use proptest::prelude::*;

use tsdr_core::metrics::{tcc, vcc, SubspaceBasis};
use tsdr_core::transforms::{yeo_johnson_apply, EmpiricalCdf};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rescaled_ecdf_stays_in_range(
        mut values in prop::collection::vec(-1e6_f64..1e6, 1..40),
        t in -2e6_f64..2e6,
    ) {
        let cdf = EmpiricalCdf::new(&values).unwrap();
        let n = values.len() as f64;
        let p = cdf.eval(t);
        prop_assert!((0.0..=n / (n + 1.0)).contains(&p));
        values.sort_by(f64::total_cmp);
        if t >= values[values.len() - 1] {
            prop_assert_eq!(p, n / (n + 1.0));
        }
        if t < values[0] {
            prop_assert_eq!(p, 0.0);
        }
    }

    #[test]
    fn rescaled_ecdf_is_monotone(
        values in prop::collection::vec(-100.0_f64..100.0, 1..30),
        a in -150.0_f64..150.0,
        b in -150.0_f64..150.0,
    ) {
        let cdf = EmpiricalCdf::new(&values).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(cdf.eval(lo) <= cdf.eval(hi));
    }

    #[test]
    fn yeo_johnson_order_preserving(
        a in -50.0_f64..50.0,
        b in -50.0_f64..50.0,
        lambda in -2.0_f64..2.0,
    ) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(yeo_johnson_apply(lo, lambda) < yeo_johnson_apply(hi, lambda));
    }

    #[test]
    fn subspace_coefficients_bounded_and_ordered(
        seed_a in prop::collection::vec(-1.0_f64..1.0, 8),
        seed_b in prop::collection::vec(-1.0_f64..1.0, 8),
    ) {
        let a = DMatrix::from_fn(4, 2, |i, j| seed_a[i * 2 + j] + if i == j { 2.0 } else { 0.0 });
        let b = DMatrix::from_fn(4, 2, |i, j| seed_b[i * 2 + j] + if i == j + 1 { 2.0 } else { 0.0 });
        let a = SubspaceBasis::new(a).unwrap();
        let b = SubspaceBasis::new(b).unwrap();
        let v = vcc(&a, &b).unwrap();
        let t = tcc(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
        prop_assert!(t >= v - 1e-12);
        prop_assert!((vcc(&b, &a).unwrap() - v).abs() <= 1e-10);
    }
}
