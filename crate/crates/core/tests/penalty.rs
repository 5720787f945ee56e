use islr::penalty::{prox_scalar, s_part, PenaltyKind, PenaltyParams};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = PenaltyKind> {
    prop::sample::select(PenaltyKind::ALL.to_vec())
}

/// `(λ, a)` with `a·λ < 1`.
fn lambda_a() -> impl Strategy<Value = (f64, f64)> {
    (1e-3f64..3.0, 0.0f64..0.999).prop_map(|(lambda, t)| (lambda, t / lambda))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn below_threshold_is_exactly_zero(kind in kind(), (lambda, a) in lambda_a(), t in -1.0f64..=1.0) {
        let p = PenaltyParams::new(kind, a).unwrap();
        prop_assert_eq!(prox_scalar(t * lambda, lambda, p).unwrap(), 0.0);
    }

    #[test]
    fn shrinks_toward_zero_without_sign_change(kind in kind(), (lambda, a) in lambda_a(), y in -50.0f64..50.0) {
        let x = prox_scalar(y, lambda, PenaltyParams::new(kind, a).unwrap()).unwrap();
        prop_assert!(y.signum() * x >= 0.0);
        prop_assert!(x.abs() <= y.abs());
    }

    #[test]
    fn odd_and_monotone(kind in kind(), (lambda, a) in lambda_a(), y in 0.0f64..20.0, dy in 0.0f64..5.0) {
        let p = PenaltyParams::new(kind, a).unwrap();
        let x = prox_scalar(y, lambda, p).unwrap();
        prop_assert_eq!(prox_scalar(-y, lambda, p).unwrap(), -x);
        prop_assert!(prox_scalar(y + dy, lambda, p).unwrap() >= x);
    }

    #[test]
    fn stationary_above_threshold(kind in kind(), (lambda, a) in lambda_a(), excess in 1e-3f64..20.0) {
        let p = PenaltyParams::new(kind, a).unwrap();
        let y = lambda + excess;
        let x = prox_scalar(y, lambda, p).unwrap();
        prop_assert!(x > 0.0);
        let residual = x - y + lambda * p.derivative(x);
        prop_assert!(residual.abs() < 1e-9 * y.max(1.0), "residual {}", residual);
    }

    #[test]
    fn zero_a_is_soft_threshold(kind in kind(), lambda in 0.0f64..3.0, y in -20.0f64..20.0) {
        let x = prox_scalar(y, lambda, PenaltyParams::l1(kind)).unwrap();
        let soft = y.signum() * (y.abs() - lambda).max(0.0);
        prop_assert_eq!(x, if soft == 0.0 { 0.0 } else { soft });
        prop_assert_eq!(PenaltyParams::l1(kind).value(y), y.abs());
    }

    #[test]
    fn concave_part_curvature_is_bounded(kind in kind(), a in 0.0f64..10.0, x in 1e-2f64..50.0) {
        let p = PenaltyParams::new(kind, a).unwrap();
        let h = 1e-4 * x.max(1.0);
        let fd = (s_part(x + h, p) - 2.0 * s_part(x, p) + s_part(x - h, p)) / (h * h);
        prop_assert!(fd >= -a - 1e-3 && fd <= 1e-3, "s'' = {}", fd);
    }
}

#[test]
fn large_inputs_pass_nearly_unchanged() {
    for kind in PenaltyKind::ALL {
        let x = prox_scalar(1e6, 1.0, PenaltyParams::new(kind, 0.5).unwrap()).unwrap();
        assert!(x > 1e6 - 10.0 && x <= 1e6, "{kind}: {x}");
    }
}

#[test]
fn out_of_domain_parameters_are_rejected() {
    for kind in PenaltyKind::ALL {
        assert!(prox_scalar(3.0, 1.0, PenaltyParams::new(kind, 1.0).unwrap()).is_err());
        assert!(PenaltyParams::new(kind, -0.1).is_err());
        assert!(PenaltyParams::new(kind, f64::NAN).is_err());
    }
}
