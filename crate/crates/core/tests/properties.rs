//! Scaling and algebraic identities under random inputs.

use plap_core::{exponents, gauge, gauge_regularized, Point, SpaceParams};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = SpaceParams> {
    (1usize..=2, 0.5f64..3.0, prop_oneof![-3.0f64..-0.2, 0.2f64..3.0])
        .prop_map(|(n, k, c)| SpaceParams::at_origin(n, k, c).unwrap())
}

fn point_for(params: &SpaceParams, raw: &[f64]) -> Point {
    Point::new(raw[..params.dim()].to_vec())
}

proptest! {
    #[test]
    fn gauge_is_homogeneous_under_dilation(
        params in params_strategy(),
        raw in prop::collection::vec(-2.0f64..2.0, 5),
        lambda in 0.1f64..5.0,
    ) {
        let pt = point_for(&params, &raw);
        let g = gauge(&params, &pt).unwrap();
        prop_assume!(g.psi > 1e-3);
        let m = params.horizontal_dim();
        let mut x = pt.coords().to_vec();
        for v in &mut x[..m] {
            *v *= lambda;
        }
        x[m] *= lambda.powf(2.0 * params.k());
        let scaled = gauge(&params, &Point::new(x)).unwrap();
        prop_assert!((scaled.psi - lambda * g.psi).abs() <= 1e-12 * lambda * g.psi);
    }

    #[test]
    fn exponent_identity(params in params_strategy(), p in 1.01f64..12.0) {
        let ex = exponents(&params, p).unwrap();
        if let Some(alpha) = ex.alpha {
            let q = params.homogeneous_dim();
            prop_assert!((alpha * (1.0 - p) - (q - p)).abs() <= 1e-12 * q.max(p));
            prop_assert!((ex.w.unwrap() * 4.0 * params.k() - alpha).abs() <= 1e-12 * alpha.abs().max(1.0));
        }
    }

    #[test]
    fn regularized_gauge_is_monotone_in_eps(
        params in params_strategy(),
        raw in prop::collection::vec(-2.0f64..2.0, 5),
        e1 in 1e-4f64..1.0,
        grow in 1.0f64..4.0,
    ) {
        let pt = point_for(&params, &raw);
        let h = gauge(&params, &pt).unwrap().h;
        let a = gauge_regularized(&params, &pt, e1).unwrap();
        let b = gauge_regularized(&params, &pt, e1 * grow).unwrap();
        prop_assert!(h <= a && a <= b);
    }
}
