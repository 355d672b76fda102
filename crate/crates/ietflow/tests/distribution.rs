use ietflow::roof::{make_roof, GSpec, RoofFunction};
use ietflow::special_flow::{
    birkhoff_distribution, check_rigidity_spec, rotation_rigidity_sets, tightness_report, BinSpec,
    DistributionReport,
};
use ietflow::{Iet, Scalar};

fn circle_roof(left: i64, right: i64) -> RoofFunction {
    let zero = Scalar::zero();
    make_roof(
        Iet::golden(),
        vec![Scalar::int(left), zero.clone()],
        vec![zero, Scalar::int(right)],
        GSpec::zero(),
    )
    .unwrap()
}

fn reports(roof: &RoofFunction, n: std::ops::RangeInclusive<usize>) -> Vec<DistributionReport> {
    let bins = BinSpec {
        lo: -30.0,
        hi: 30.0,
        count: 120,
    };
    rotation_rigidity_sets(&Scalar::golden(), n, Some(roof), 128)
        .unwrap()
        .iter()
        .map(|s| birkhoff_distribution(roof, s, bins, 50.0).unwrap())
        .collect()
}

#[test]
fn symmetric_roof_stays_bounded_where_asymmetric_grows() {
    let sym = tightness_report(&reports(&circle_roof(1, 1), 2..=14), &[5.0, 50.0]).unwrap();
    let asym = tightness_report(&reports(&circle_roof(2, 1), 2..=14), &[5.0, 50.0]).unwrap();
    assert!(sym.l2_ratio() < 1.5, "{}", sym.l2_ratio());
    assert!(asym.l2_ratio() > 2.0, "{}", asym.l2_ratio());
    assert!(sym.l2_max < asym.l2_max);
}

#[test]
fn whole_interval_conditions_for_the_golden_rotation() {
    let t = Iet::golden();
    let alpha = Scalar::golden();
    let mut last = Scalar::one();
    for spec in rotation_rigidity_sets(&alpha, 1..=20, None, 128).unwrap() {
        let rep = check_rigidity_spec(&t, &spec).unwrap();
        assert_eq!(rep.measure, Scalar::one());
        assert!(rep.symmetric_difference.is_zero());
        // ||q_n alpha|| = alpha^(n+1) shrinks geometrically
        assert!(rep.sup_displacement < last);
        assert_eq!(rep.sup_displacement, alpha.pow_u(spec.n as u32 + 1));
        last = rep.sup_displacement;
    }
}
