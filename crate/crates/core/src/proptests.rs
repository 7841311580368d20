//! Randomised invariants of the spec algebra, Gamma function, evaluators and checkers.

use crate::eval::{evaluate, HFunction};
use crate::foxwright::eval_fw;
use crate::gamma::{gamma, gamma_real, sin_pi};
use crate::harness::{check_complete_monotonicity, GridSpec};
use crate::spec::{self, from_fox_wright, parse_spec, spec_to_json, Convention, FoxWrightSpec, HFunctionSpec, SpecInput};
use num_complex::Complex64;
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (f64, f64)> {
    (-2.0..3.0f64, 0.1..2.5f64)
}

fn any_spec() -> impl Strategy<Value = HFunctionSpec> {
    (prop::collection::vec(pair(), 0..4), prop::collection::vec(pair(), 0..4))
        .prop_filter("m + n ≥ 1", |(u, l)| !u.is_empty() || !l.is_empty())
        .prop_flat_map(|(upper, lower)| {
            let (p, q) = (upper.len(), lower.len());
            (0..=q, 0..=p, Just(upper), Just(lower))
        })
        .prop_filter("m + n ≥ 1", |(m, n, _, _)| m + n >= 1)
        .prop_map(|(m, n, upper, lower)| HFunctionSpec::new(m, n, upper, lower).unwrap())
}

/// Entire Fox–Wright series with `1 ≤ Δ ≤ 1.6`, so the image keeps `D ≥ 0.4`
/// and its contour integrand decays quickly.
fn entire_fox_wright() -> impl Strategy<Value = FoxWrightSpec> {
    (prop::collection::vec((0.3..3.0f64, 0.25..1.5f64), 1..3), (0.3..3.0f64), 0.0..0.6f64).prop_map(|(upper, b, extra)| {
        let total: f64 = upper.iter().map(|u| u.1).sum::<f64>() + extra;
        FoxWrightSpec::new(upper, vec![(b, total)]).unwrap()
    })
}

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn inversion_is_an_involution(s in any_spec()) {
        let twice = spec::invert_argument(&spec::invert_argument(&s));
        prop_assert_eq!(twice.m, s.m);
        prop_assert_eq!(twice.n, s.n);
        for (x, y) in twice.upper.iter().chain(&twice.lower).zip(s.upper.iter().chain(&s.lower)) {
            prop_assert!((x.0 - y.0).abs() < 1e-14 && x.1 == y.1);
        }
    }

    #[test]
    fn scaling_composes(s in any_spec(), k1 in 0.2..4.0f64, k2 in 0.2..4.0f64) {
        let (a, ka) = spec::scale_argument(&s, k1).unwrap();
        let (b, kb) = spec::scale_argument(&a, k2).unwrap();
        let (c, kc) = spec::scale_argument(&s, k1 * k2).unwrap();
        prop_assert!(close(ka * kb, kc, 1e-14));
        for (x, y) in b.upper.iter().chain(&b.lower).zip(c.upper.iter().chain(&c.lower)) {
            prop_assert!(x.0 == y.0 && close(x.1, y.1, 1e-14));
        }
    }

    #[test]
    fn power_shifts_add(s in any_spec(), a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let twice = spec::shift_power(&spec::shift_power(&s, a), b);
        let once = spec::shift_power(&s, a + b);
        for (x, y) in twice.upper.iter().chain(&twice.lower).zip(once.upper.iter().chain(&once.lower)) {
            prop_assert!((x.0 - y.0).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trips_in_both_conventions(s in any_spec()) {
        for c in [Convention::Paper, Convention::Standard] {
            let SpecInput::H(back) = parse_spec(&spec_to_json(&s, c)).unwrap() else { panic!("kind changed") };
            prop_assert_eq!(&back, &s);
        }
    }

    #[test]
    fn gamma_reflection(x in 0.01..0.99f64) {
        let lhs = gamma_real(x).unwrap() * gamma_real(1.0 - x).unwrap();
        prop_assert!(close(lhs, std::f64::consts::PI / sin_pi(x), 1e-13));
    }

    #[test]
    fn gamma_recurrence(re in -4.5..6.0f64, im in 0.1..8.0f64) {
        let z = Complex64::new(re, im);
        let g = gamma(z).unwrap();
        let g1 = gamma(z + 1.0).unwrap();
        prop_assert!((g1 - z * g).norm() <= 1e-12 * g1.norm());
    }

    #[test]
    fn exponential_mixtures_are_completely_monotone(
        terms in prop::collection::vec((0.05..2.0f64, 0.05..3.0f64), 1..5),
    ) {
        let f = |x: f64| terms.iter().map(|&(w, r)| w * (-r * x).exp()).sum::<f64>();
        let r = check_complete_monotonicity(&f, &GridSpec::linear(0.05, 10.0, 60), 6, 1e-6).unwrap();
        prop_assert!(r.passed, "{:?}", r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fox_wright_series_matches_its_h_image(fw in entire_fox_wright(), z in 0.1..5.0f64) {
        let h = from_fox_wright(&fw).unwrap();
        let contour = HFunction::new(&h, 1e-12).unwrap().value(z).unwrap();
        let series = eval_fw(&fw, -z, 1e-15).unwrap().value;
        prop_assert!(close(contour, series, 1e-8), "{} vs {}", contour, series);
    }

    #[test]
    fn inverted_spec_evaluates_at_reciprocal(fw in entire_fox_wright(), z in 0.2..4.0f64) {
        let h = from_fox_wright(&fw).unwrap();
        let inv = spec::invert_argument(&h);
        let a = evaluate(&h, z, 1e-11).unwrap().value;
        let b = evaluate(&inv, 1.0 / z, 1e-11).unwrap().value;
        prop_assert!(close(a, b, 1e-8), "{} vs {}", a, b);
    }
}
