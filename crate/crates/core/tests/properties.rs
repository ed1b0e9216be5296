use hyperflat::geometry::{g, g_r};
use hyperflat::limitlaw::{cf_std, q, InversionSpec};
use hyperflat::rates::beta;
use hyperflat::simulate::ks_distance;
use hyperflat::special::{hyp_moment, log_cosh};
use hyperflat::ModelParams;
use proptest::prelude::*;

proptest! {
    #[test]
    fn q_bounds(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        let v = q(x);
        prop_assert!(v.re <= 0.0);
        prop_assert!(v.norm() <= 0.5 * x * x * (1.0 + 1e-12));
        prop_assert!((q(y) - v).norm() <= 2.0 * (y - x).abs() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn kernel_domination(s in 0.0f64..15.0, r in 0.01f64..15.0, k in 2u32..10) {
        let v = g_r(s, r, k);
        prop_assert!(v >= 0.0);
        prop_assert!(v <= g(s, k) * (1.0 + 1e-12));
        if s >= r {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn cf_is_bounded_and_hermitian(t in -10.0f64..10.0, idx in 0usize..5) {
        let (d, k) = [(4, 3), (5, 4), (6, 5), (7, 5), (9, 7)][idx];
        let p = ModelParams::limit(d, k).unwrap();
        let s = InversionSpec::default();
        let a = cf_std(t, &p, &s).unwrap();
        let b = cf_std(-t, &p, &s).unwrap();
        prop_assert!(a.norm() <= 1.0 + 1e-9);
        prop_assert!((a - b.conj()).norm() <= 1e-12);
    }

    #[test]
    fn hyp_moment_recurrence(a in -12.0f64..-2.5, b in -0.5f64..1.0) {
        prop_assume!(-a > b + 2.0);
        // Beta function shift in the second argument
        let lhs = hyp_moment(a, b + 2.0).unwrap();
        let rhs = hyp_moment(a, b).unwrap() * (b + 1.0) / (-a - b - 2.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn log_cosh_is_even_and_finite(s in -1e4f64..1e4) {
        prop_assert!(log_cosh(s).is_finite());
        prop_assert_eq!(log_cosh(s), log_cosh(-s));
    }

    #[test]
    fn ks_is_a_probability(v in proptest::collection::vec(-5.0f64..5.0, 1..50)) {
        let d = ks_distance(&v, |x| 1.0 / (1.0 + (-x).exp())).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn beta_in_unit_interval(d in 4u32..60, k in 2u32..60) {
        prop_assume!(k < d && 2 * k > d + 1);
        let b = beta(d, k).unwrap();
        prop_assert!(b > 0.0 && b < 1.0);
    }
}
