//! Property tests for the structural invariants.

use permspec::funcs::FunctionSpec;
use permspec::trapezoid::{build_series, rj_direct, rj_indicator_closed_form, rj_poisson, Method};
use proptest::prelude::*;

fn arb_trig() -> impl Strategy<Value = FunctionSpec> {
    (
        -2.0f64..2.0,
        prop::collection::vec(-1.0f64..1.0, 0..6),
        prop::collection::vec(-1.0f64..1.0, 0..6),
    )
        .prop_map(|(a0, cos, sin)| FunctionSpec::trig_poly(a0, cos, sin).unwrap())
}

fn arb_indicator() -> impl Strategy<Value = FunctionSpec> {
    (0.0f64..0.9, 0.01f64..1.0).prop_filter_map("a < b", |(a, w)| {
        let b = (a + w).min(1.0);
        (b > a).then(|| FunctionSpec::indicator(a, b).unwrap())
    })
}

proptest! {
    #[test]
    fn periodicity_exact_for_indicator_and_trig(
        f in prop_oneof![arb_trig(), arb_indicator()],
        x in -2.0f64..3.0,
    ) {
        let t = x - x.floor();
        prop_assert_eq!(f.evaluate(x).to_bits(), f.evaluate(t).to_bits());
    }

    #[test]
    fn periodicity_plateau(x in -2.0f64..3.0) {
        let f = FunctionSpec::smooth_plateau(0.2, 0.4, 0.1).unwrap();
        let t = x - x.floor();
        prop_assert!((f.evaluate(x) - f.evaluate(t)).abs() <= 1e-12);
    }

    #[test]
    fn odd_trig_antisymmetry(
        sin in prop::collection::vec(-1.0f64..1.0, 1..6),
        x in 0.0f64..1.0,
    ) {
        let f = FunctionSpec::trig_poly(0.0, vec![], sin).unwrap();
        prop_assert!((f.evaluate(x) + f.evaluate(1.0 - x)).abs() <= 1e-12);
    }

    #[test]
    fn series_u_and_partial_sum_invariants(f in arb_trig(), jmax in 1usize..64) {
        let s = build_series(&f, jmax, None).unwrap();
        for j in 1..=jmax {
            prop_assert_eq!(s.u(j).to_bits(), (j as f64 * s.r(j)).to_bits());
        }
        for j in 2..=jmax {
            prop_assert!(s.partial_sum_jrj2_at(j) >= s.partial_sum_jrj2_at(j - 1));
        }
    }

    // direct vs Poisson-summation agreement for trig polynomials (degree ≤ 16)
    #[test]
    fn trig_method_agreement(
        cos in prop::collection::vec(-1.0f64..1.0, 1..17),
        j in 1usize..=64,
    ) {
        let f = FunctionSpec::trig_poly(0.0, cos, vec![]).unwrap();
        let direct = rj_direct(&f, j);
        let (pois, tail) = rj_poisson(&f, j, 32);
        prop_assert!(tail.bound == 0.0);
        prop_assert!((direct - pois).abs() <= 1e-12, "j={}: {} vs {}", j, direct, pois);
    }

    // closed form vs direct sums for random (a, b, j) — resonant points have
    // probability zero under the continuous draw
    #[test]
    fn indicator_closed_form_agreement(
        a in 0.001f64..0.9,
        w in 0.01f64..0.09,
        j in 1usize..=300,
    ) {
        let b = a + w;
        let f = FunctionSpec::indicator(a, b).unwrap();
        let direct = rj_direct(&f, j);
        let closed = rj_indicator_closed_form(a, b, j);
        prop_assert!((direct - closed).abs() <= 1e-12, "{} vs {}", direct, closed);
    }

    // bounded variation: |u_j| ≤ TV(f) = 2 for every indicator
    #[test]
    fn indicator_u_bounded_by_total_variation(
        a in 0.0f64..0.9,
        w in 0.01f64..0.5,
        jmax in 1usize..200,
    ) {
        let b = (a + w).min(1.0);
        let f = FunctionSpec::indicator(a, b).unwrap();
        let s = build_series(&f, jmax, None).unwrap();
        prop_assert!(s.max_abs_u(jmax) <= 2.0);
    }

    #[test]
    fn parser_never_panics(input in "\\PC*") {
        let _ = FunctionSpec::parse(&input);
    }

    #[test]
    fn parser_never_panics_on_bytes(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        if let Ok(s) = std::str::from_utf8(&bytes) {
            let _ = FunctionSpec::parse(s);
        }
    }

    #[test]
    fn display_parse_round_trip(f in prop_oneof![arb_trig(), arb_indicator()]) {
        let text = f.to_string();
        let again = FunctionSpec::parse(&text).unwrap();
        prop_assert_eq!(f, again);
    }

    // direct series method on trig matches the divisor route within 1e-12
    #[test]
    fn build_series_methods_agree_on_trig(
        cos in prop::collection::vec(-1.0f64..1.0, 1..8),
        jmax in 1usize..32,
    ) {
        let f = FunctionSpec::trig_poly(0.5, cos, vec![0.3]).unwrap();
        let a = build_series(&f, jmax, Some(Method::Direct)).unwrap();
        let b = build_series(&f, jmax, Some(Method::PoissonSummation)).unwrap();
        for j in 1..=jmax {
            prop_assert!((a.r(j) - b.r(j)).abs() <= 1e-12);
        }
    }

    // cf modulus bounded by 1 on the grid
    #[test]
    fn cf_modulus_bounded(cos in prop::collection::vec(-1.0f64..1.0, 1..5), t in -20.0f64..20.0) {
        let f = FunctionSpec::trig_poly(0.0, cos, vec![]).unwrap();
        let s = build_series(&f, 16, None).unwrap();
        if let Ok(law) = permspec::limitlaw::build_levy(&s, 1.3, 16) {
            let v = permspec::limitlaw::cf_mu(&law, t);
            prop_assert!(v.complex().norm() <= 1.0 + 1e-12);
        }
    }
}
