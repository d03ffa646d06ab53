use heat_entropy::bounds::{ricci_bound_rhs, within_slack};
use heat_entropy::format::format_number;
use heat_entropy::h3::H3Params;
use heat_entropy::specfun::{log_sinh_ratio, sinh_ratio_bounds};
use heat_entropy::spectral::phi;
use heat_entropy::spectral::trig::TrigPoly;
use heat_entropy::ExpScaled;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn curvature_bound_non_increasing_in_k(
        n in 1usize..5, q0 in 0.01f64..50.0, t in 0.001f64..20.0,
        k1 in -3.0f64..3.0, dk in 0.0f64..3.0,
    ) {
        let a = ricci_bound_rhs(n, k1, q0, t).unwrap();
        let b = ricci_bound_rhs(n, k1 + dk, q0, t).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
        prop_assert!(a > 0.0 && b > 0.0);
    }

    #[test]
    fn curvature_bound_continuous_at_zero(n in 1usize..5, q0 in 0.01f64..50.0, t in 0.001f64..20.0) {
        let flat = ricci_bound_rhs(n, 0.0, q0, t).unwrap();
        for k in [1e-9, -1e-9] {
            let near = ricci_bound_rhs(n, k, q0, t).unwrap();
            prop_assert!((near - flat).abs() <= 1e-6 * flat);
        }
    }

    #[test]
    fn curvature_bound_starts_at_half_q0(n in 1usize..5, q0 in 0.01f64..50.0, k in -3.0f64..3.0) {
        let v = ricci_bound_rhs(n, k, q0, 1e-12).unwrap();
        prop_assert!((v - q0 / 2.0).abs() <= 1e-9 * q0);
    }

    #[test]
    fn sinh_ratio_ordering(log_r in -6.0f64..3.0) {
        let r = 10f64.powf(log_r);
        let (lo, mid, hi) = sinh_ratio_bounds(r);
        prop_assert!(lo < mid && mid < hi);
    }

    #[test]
    fn log_sinh_sandwich(log_x in -6.0f64..3.3) {
        let x = 10f64.powf(log_x);
        let v = log_sinh_ratio(x);
        prop_assert!(x - (2.0 * x).ln_1p() < v && v < x - x.ln_1p());
    }

    #[test]
    fn log_sinh_matches_naive_where_safe(x in 0.05f64..30.0) {
        let naive = (x.sinh() / x).ln();
        prop_assert!((log_sinh_ratio(x) - naive).abs() <= 1e-13 * naive.abs().max(1.0));
    }

    #[test]
    fn phi_is_non_negative(d in -0.999f64..10.0) {
        prop_assert!(phi(d) >= 0.0);
    }

    #[test]
    fn exp_scaled_arithmetic(a in -1e3f64..1e3, b in -1e3f64..1e3, la in -50.0f64..50.0, lb in -50.0f64..50.0) {
        let x = ExpScaled::new(a, la);
        let y = ExpScaled::new(b, lb);
        let (xv, yv) = (a * la.exp(), b * lb.exp());
        let close = |u: f64, v: f64| (u - v).abs() <= 1e-12 * (xv.abs() + yv.abs()).max(v.abs()) + 1e-300;
        prop_assert!(close((x + y).value(), xv + yv));
        prop_assert!(close((x - y).value(), xv - yv));
        prop_assert!(((x * y).value() - xv * yv).abs() <= 1e-12 * (xv * yv).abs());
        if b != 0.0 {
            prop_assert!(((x / y).value() - xv / yv).abs() <= 1e-12 * (xv / yv).abs());
        }
    }

    #[test]
    fn exp_scaled_ordering_beyond_f64(a in 0.1f64..10.0, la in 800.0f64..5000.0, d in 0.01f64..5.0) {
        let small = ExpScaled::new(a, la);
        let big = ExpScaled::new(a, la + d);
        prop_assert!(small.lt(big));
        prop_assert!(!big.lt(small));
        prop_assert!(((big / small).value() - d.exp()).abs() <= 1e-12 * d.exp());
    }

    #[test]
    fn numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn random_positive_polynomials_are_positive(seed in any::<u64>(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = TrigPoly::random_positive(&mut rng, 1.0, 1.0, 3, 0.3, 0.1);
        prop_assert!(p.value(x, y) >= 0.1 - 1e-12);
    }

    #[test]
    fn slack_accepts_equality(v in -1e6f64..1e6) {
        prop_assert!(within_slack(v, v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hyperbolic_envelopes_contain_quadrature(kappa in 0.5f64..2.0, log_t in -1.0f64..2.0) {
        let p = H3Params::with_kappa(kappa).unwrap();
        let t = 10f64.powf(log_t);
        prop_assert!(p.eta_envelope(t).strictly_contains(p.eta(t).unwrap()));
        prop_assert!(p.eta_prime_envelope(t).strictly_contains(p.eta_prime(t).unwrap()));
        let (lo, hi) = p.xi_eta_rate_bracket(t);
        let d = p.entropy_rate(t).unwrap() - 1.5 / t - kappa * kappa;
        prop_assert!(lo <= d && d <= hi);
    }

    #[test]
    fn hyperbolic_rate_is_positive_and_decreasing(kappa in 0.3f64..2.0, log_t in -1.0f64..1.5) {
        let p = H3Params::with_kappa(kappa).unwrap();
        let t = 10f64.powf(log_t);
        let a = p.entropy_rate(t).unwrap();
        let b = p.entropy_rate(1.1 * t).unwrap();
        prop_assert!(a > 0.0 && b < a);
    }
}
