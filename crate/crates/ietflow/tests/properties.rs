//! Invariants checked on generated inputs.

use proptest::prelude::*;

use ietflow::iet_core::{cf_expand, interval_to_circle, reducibility_witness};
use ietflow::partitions::partition_global;
use ietflow::rauzy::induce;
use ietflow::rigidity_probe::StripProbe;
use ietflow::roof::{birkhoff, make_roof, GSpec, Quantity, RoofFunction};
use ietflow::special_flow::{circle_norm, flow_map, return_time, FlowPoint, IntervalUnion};
use ietflow::{Iet, Scalar};

fn unit_golden() -> RoofFunction {
    let one = Scalar::one();
    make_roof(
        Iet::golden(),
        vec![one.clone(); 2],
        vec![one; 2],
        GSpec::zero(),
    )
    .unwrap()
}

/// Irreducible exchanges with integer-over-prime lengths.
fn iet_strategy() -> impl Strategy<Value = Iet> {
    (3usize..=5)
        .prop_flat_map(|r| {
            (
                Just(r),
                Just((0..r).collect::<Vec<usize>>()).prop_shuffle(),
                prop::collection::vec(1i64..50_000, r),
            )
        })
        .prop_filter("irreducible", |(r, pi1, _)| {
            reducibility_witness(&(0..*r).collect::<Vec<_>>(), pi1).is_none()
        })
        .prop_map(|(r, pi1, lens)| {
            let lambda = lens.into_iter().map(|n| Scalar::ratio(n, 49_999)).collect();
            Iet::new((0..r).collect(), pi1, lambda).unwrap()
        })
}

fn ratio_strategy() -> impl Strategy<Value = Scalar> {
    (-1000i64..1000, 1i64..500).prop_map(|(p, q)| Scalar::ratio(p, q))
}

fn quad_strategy() -> impl Strategy<Value = Scalar> {
    (
        -50i64..50,
        -50i64..50,
        prop::sample::select(vec![2u32, 3, 5, 7]),
        1i64..20,
    )
        .prop_map(|(a, b, d, c)| Scalar::quadratic_int(a, b, d, c))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn scalar_text_round_trip(x in prop_oneof![ratio_strategy(), quad_strategy()]) {
        let back: Scalar = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn scalar_field_identities(
        (a, b) in prop::sample::select(vec![2u32, 3, 5, 7]).prop_flat_map(|d| {
            let one = (-50i64..50, -50i64..50, 1i64..20).prop_map(move |(x, y, c)| Scalar::quadratic_int(x, y, d, c));
            (one.clone(), one)
        })
    ) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) / &b, a.clone());
        }
        let order = a.cmp(&b);
        if (a.to_f64() - b.to_f64()).abs() > 1e-9 {
            prop_assert_eq!(order, a.to_f64().partial_cmp(&b.to_f64()).unwrap());
        }
    }

    #[test]
    fn exchange_is_a_bijection(t in iet_strategy(), k in 0i64..1000) {
        let x = t.total() * &Scalar::ratio(k, 1000);
        let y = t.evaluate(&x).unwrap();
        prop_assert!(!y.is_negative() && &y < t.total());
        prop_assert_eq!(t.inverse().evaluate(&y).unwrap(), x.clone());
        prop_assert_eq!(t.iterate(&t.iterate(&x, 7).unwrap(), -7).unwrap(), x);
    }

    #[test]
    fn circle_form_agrees(t in iet_strategy(), k in 0i64..1000) {
        let x = t.total() * &Scalar::ratio(k, 1000);
        prop_assert_eq!(interval_to_circle(&t).evaluate(&x), t.evaluate(&x).unwrap());
    }

    #[test]
    fn induction_heights_are_return_times(t in iet_strategy()) {
        if let Ok(trace) = induce(&t, 6) {
            prop_assert!(trace.verify_identities().ok());
            for k in 0..=trace.len() {
                prop_assert_eq!(trace.direct_return_times(k).unwrap(), trace.heights[k].clone());
            }
        }
    }

    #[test]
    fn partition_gaps_fill_the_interval(t in iet_strategy(), j in 1usize..40) {
        let rep = partition_global(&t, j).unwrap();
        prop_assert!(rep.points.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(rep.coincident || rep.points.len() == (t.r() - 1) * j + 1);
        let n = rep.points.len() as i64;
        prop_assert!(&rep.min * &Scalar::int(n) <= *t.total());
        prop_assert!(&rep.max * &Scalar::int(n) >= *t.total());
    }

    #[test]
    fn convergent_denominators(a in 1i64..40, b in 2u32..30) {
        // (sqrt(b) - floor) style quadratic irrational in (0, 1)
        let root = (b as f64).sqrt();
        prop_assume!(root.fract() != 0.0);
        let alpha = &Scalar::sqrt_int(b) - &Scalar::int(root.floor() as i64);
        let cf = cf_expand(&alpha, 12).unwrap();
        prop_assert!(cf.bounded());
        for n in 1..11 {
            let (q0, q1, q2) = (cf.q_int(n - 1), cf.q_int(n), cf.q_int(n + 1));
            prop_assert_eq!(q2, q1.clone() * cf.quotients[n] + q0);
            let q = q1.to_u64().unwrap();
            let p = Scalar::rational(rug::Rational::from((cf.p_int(n), q1.clone())));
            // |alpha - p/q| < 1/q^2 and ||q alpha|| = |q alpha - p|
            let err = (&alpha - &p).abs();
            let qq = Scalar::rational(rug::Rational::from(q1.clone() * &q1));
            prop_assert!(&err * &qq < Scalar::one());
            prop_assert_eq!(circle_norm(&alpha, q), &err * &Scalar::int(q as i64));
        }
        let _ = a;
    }

    #[test]
    fn birkhoff_cocycle(k in 1i64..9999, m in 0i64..30, n in 0i64..30) {
        let roof = unit_golden();
        let x = Scalar::ratio(k, 10_000);
        let s = |y: &Scalar, j: i64| birkhoff(&roof, y, j, Quantity::FPlusG, 128).unwrap().value;
        let y = roof.base().iterate(&x, m).unwrap();
        let lhs = s(&x, m + n);
        let rhs = &s(&x, m) + &s(&y, n);
        prop_assert!((&lhs - &rhs).abs().to_f64() < 1e-25);
        prop_assert!((&s(&x, -n) + &s(&roof.base().iterate(&x, -n).unwrap(), n)).abs().to_f64() < 1e-25);
    }

    #[test]
    fn roof_evaluations_agree(k in 1i64..9999) {
        let roof = unit_golden();
        let x = Scalar::ratio(k, 10_000);
        let exact = roof.eval(&x, Quantity::FPlusG, 128).unwrap().to_f64();
        let fast = roof.eval_f64(x.to_f64(), Quantity::FPlusG);
        prop_assert!((exact - fast).abs() < 1e-9 * exact.abs().max(1.0));
        prop_assert!(exact >= roof.min_value());
    }

    #[test]
    fn flow_group_law(k in 1i64..9999, h in 0i64..100, a in -40.0f64..40.0, b in -40.0f64..40.0) {
        let roof = unit_golden();
        let x = Scalar::ratio(k, 10_000);
        let top = roof.eval(&x, Quantity::FPlusG, 128).unwrap();
        let p = FlowPoint::new(&roof, x, &top * &Scalar::ratio(h, 100), 128).unwrap();
        let (a, b) = (Scalar::float_f64(a, 128), Scalar::float_f64(b, 128));
        let two = flow_map(&roof, &flow_map(&roof, &p, &a, 128).unwrap(), &b, 128).unwrap();
        let one = flow_map(&roof, &p, &(&a + &b), 128).unwrap();
        prop_assert_eq!(&two.x, &one.x);
        prop_assert!((&two.s - &one.s).abs().to_f64() < 1e-25);
    }

    #[test]
    fn return_time_is_the_ergodic_sum(k in 1i64..9999, n in 0i64..40) {
        let roof = unit_golden();
        let x = Scalar::ratio(k, 10_000);
        let r = return_time(&roof, &x, n, 128).unwrap();
        prop_assert_eq!(&r, &birkhoff(&roof, &x, n, Quantity::FPlusG, 128).unwrap().value);
        let p = flow_map(&roof, &FlowPoint { x: x.clone(), s: Scalar::zero() }, &r, 128).unwrap();
        prop_assert_eq!(p.x, roof.base().iterate(&x, n).unwrap());
        prop_assert!(p.s.is_zero());
    }

    #[test]
    fn interval_algebra(
        a in prop::collection::vec((0i64..1000, 0i64..200), 1..6),
        b in prop::collection::vec((0i64..1000, 0i64..200), 1..6),
    ) {
        let mk = |v: &[(i64, i64)]| IntervalUnion::new(
            v.iter().map(|&(s, l)| (Scalar::ratio(s, 1200), Scalar::ratio(s + l, 1200))).collect(),
        ).unwrap();
        let (u, w) = (mk(&a), mk(&b));
        let both: Vec<(Scalar, Scalar)> = u.parts().iter().chain(w.parts()).cloned().collect();
        let union = IntervalUnion::new(both).unwrap();
        prop_assert_eq!(&u.measure() + &w.measure(), &union.measure() + &u.intersection_measure(&w));
        let t = Iet::golden();
        prop_assert_eq!(u.preimage(&t).measure(), u.measure());
    }

    #[test]
    fn strips_grow_with_width(t in 10.0f64..80.0, j in 2usize..15) {
        let roof = unit_golden();
        let probe = StripProbe::new(&roof, 15).unwrap();
        let narrow = probe.strip(t, 0.1, j).measure;
        let wide = probe.strip(t, 0.5, j).measure;
        prop_assert!(narrow <= wide + 1e-9);
        prop_assert!(wide <= 1.0);
    }
}
