use rug::Float;
use serde::Serialize;

use super::engine::{Branch, Pos, RoofEngine, Side};
use super::function::{GSpec, RoofFunction, ZeroPattern};
use crate::{Error, Iet, Result, Scalar};

/// One failed sample check.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityViolation {
    pub interval: usize,
    pub left: f64,
    /// `"d1"` or `"d3"` for a non-increasing step, `"d1_end"`/`"d3_end"` for
    /// a wrong sign next to a singular end.
    pub check: &'static str,
    pub sample: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub j: usize,
    pub precision: u32,
    pub samples_per_interval: usize,
    pub intervals: usize,
    pub violations: Vec<MonotonicityViolation>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `f'^{(j)}` and `f'''^{(j)}` on every continuity interval and
/// checks that both increase, with the expected signs next to singular ends.
pub fn monotonicity_probe(
    roof: &RoofFunction,
    j: usize,
    samples_per_interval: usize,
    precision: u32,
) -> Result<MonotonicityReport> {
    if j < 2 {
        return Err(Error::Invalid("monotonicity probe needs j >= 2".into()));
    }
    if samples_per_interval < 2 {
        return Err(Error::Invalid(
            "need at least two samples per interval".into(),
        ));
    }
    let eng = RoofEngine::<Float>::new(roof, precision, j)?;
    let branches = eng.level(j);
    let mut violations = Vec::new();
    for (idx, b) in branches.iter().enumerate() {
        let n = samples_per_interval;
        let mut prev: Option<(Float, Float)> = None;
        for i in 1..=n {
            let s = Float::with_val(precision, &b.width * (i as f64 / (n + 1) as f64));
            let p = b.pos_at(&s);
            let cur = (b.df(&p, 1), b.df(&p, 3));
            if let Some((d1, d3)) = &prev {
                for (name, old, new) in [("d1", d1, &cur.0), ("d3", d3, &cur.1)] {
                    if new <= old {
                        violations.push(MonotonicityViolation {
                            interval: idx,
                            left: b.left.to_f64(),
                            check: name,
                            sample: i,
                        });
                    }
                }
            }
            prev = Some(cur);
        }
        // close to a singular end the dominant term fixes the sign
        let near = Float::with_val(precision, &b.width * 1e-9);
        for (side, singular, want_positive) in [
            (Side::Left, b.singular_left, false),
            (Side::Right, b.singular_right, true),
        ] {
            if !singular {
                continue;
            }
            let p = Pos {
                side,
                u: near.clone(),
            };
            for (name, order) in [("d1_end", 1), ("d3_end", 3)] {
                let v = b.df(&p, order);
                if v.is_sign_positive() != want_positive || v.is_zero() {
                    violations.push(MonotonicityViolation {
                        interval: idx,
                        left: b.left.to_f64(),
                        check: name,
                        sample: 0,
                    });
                }
            }
        }
    }
    Ok(MonotonicityReport {
        j,
        precision,
        samples_per_interval,
        intervals: branches.len(),
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeBoundRow {
    pub j: usize,
    /// `j >= ceil(6 c^2)`.
    pub in_hypothesis: bool,
    pub intervals: usize,
    pub violations: usize,
    /// Largest `m({|f'^{(j)}| <= delta j} on the interval) / length`.
    pub max_fraction: f64,
    /// Total sublevel measure over `[0, 1)`.
    pub sublevel_measure: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeBoundReport {
    pub eta: f64,
    pub c_balance: f64,
    pub m_constant: f64,
    pub delta: f64,
    pub j_threshold: usize,
    /// Some constants vanish, so the sum in `delta` runs over fewer terms.
    pub zero_pattern_flag: bool,
    pub rows: Vec<DerivativeBoundRow>,
}

impl DerivativeBoundReport {
    pub fn passed(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| r.in_hypothesis)
            .all(|r| r.violations == 0)
    }
}

/// Measure of `{s : |f'(s)| <= level}` on a branch where `f'` increases.
fn sublevel_measure(b: &Branch<f64>, level: f64) -> f64 {
    let w = b.width;
    let d1 = |s: f64| b.df(&b.pos_at(&s), 1);
    // first s with f'(s) >= target, by bisection between the ends
    let first_above = |target: f64| -> f64 {
        let lo_v = if b.singular_left {
            f64::NEG_INFINITY
        } else {
            d1(0.0)
        };
        let hi_v = if b.singular_right {
            f64::INFINITY
        } else {
            d1(w)
        };
        if target <= lo_v {
            return 0.0;
        }
        if target > hi_v {
            return w;
        }
        let (mut lo, mut hi) = (0.0, w);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if d1(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    (first_above(level) - first_above(-level)).max(0.0)
}

/// For each `j`, the share of every continuity interval on which
/// `|f'^{(j)}| <= delta j`, against the bound `1 - eta`.
pub fn derivative_bound_probe(
    roof: &RoofFunction,
    eta: f64,
    j_range: std::ops::RangeInclusive<usize>,
    c_balance: &Scalar,
) -> Result<DerivativeBoundReport> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Invalid(format!("eta = {eta} must lie in (0, 1)")));
    }
    let c = c_balance.to_f64();
    if !(c >= 1.0) {
        return Err(Error::Invalid(format!(
            "balance constant {c} must be at least 1"
        )));
    }
    let m = (2.0 / (1.0 - eta)).max(c * c) + 1.0;
    let sum = roof.constant_sum().to_f64();
    let delta = sum / (4.0 * m * c * c * c);
    let j_threshold = (6.0 * c * c).ceil() as usize;
    let j_hi = *j_range.end();
    let eng = RoofEngine::<f64>::new(roof, 53, j_hi.max(1))?;
    let mut rows = Vec::new();
    for j in j_range {
        if j == 0 {
            continue;
        }
        let mut violations = 0;
        let mut max_fraction = 0.0f64;
        let mut total = 0.0;
        let branches = eng.level(j);
        for b in &branches {
            let meas = sublevel_measure(b, delta * j as f64);
            let frac = meas / b.width;
            total += meas;
            max_fraction = max_fraction.max(frac);
            if frac >= 1.0 - eta {
                violations += 1;
            }
        }
        rows.push(DerivativeBoundRow {
            j,
            in_hypothesis: j >= j_threshold,
            intervals: branches.len(),
            violations,
            max_fraction,
            sublevel_measure: total,
        });
    }
    Ok(DerivativeBoundReport {
        eta,
        c_balance: c,
        m_constant: m,
        delta,
        j_threshold,
        zero_pattern_flag: roof.pattern() != ZeroPattern::None,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillationRow {
    pub n: usize,
    pub oscillation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GOscillationReport {
    pub eps: f64,
    /// Every sampled `n > n0` has oscillation below `eps`.
    pub n0: usize,
    /// The last sampled `n` is already below `eps`.
    pub settled: bool,
    pub rows: Vec<OscillationRow>,
}

/// Largest oscillation of the smooth and piecewise constant parts of
/// `g^{(n)}` over the continuity intervals of level `n`. The linear part is
/// left out: its sum has constant derivative `n * slope`.
pub fn g_oscillation_probe(
    t: &Iet,
    g: &GSpec,
    n_range: std::ops::RangeInclusive<usize>,
    eps: f64,
) -> Result<GOscillationReport> {
    if !g.mean_derivative().is_zero() {
        return Err(Error::NonzeroMeanDerivative(format!(
            "g1(1) - g1(0) = {}",
            g.mean_derivative()
        )));
    }
    let smooth = GSpec {
        slope: Scalar::zero(),
        ..g.clone()
    };
    let roof = RoofFunction::g_only(t.clone(), smooth)?;
    let n_hi = *n_range.end();
    let eng = RoofEngine::<f64>::new(&roof, 53, n_hi.max(1))?;
    let mut rows = Vec::new();
    for n in n_range {
        if n == 0 {
            continue;
        }
        let mut osc = 0.0f64;
        for b in eng.level(n) {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..=8 {
                let s = b.width * i as f64 / 8.0;
                let v = b.g(&s).0;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            osc = osc.max(hi - lo);
        }
        rows.push(OscillationRow {
            n,
            oscillation: osc,
        });
    }
    let n0 = rows
        .iter()
        .rev()
        .find(|r| r.oscillation >= eps)
        .map_or(0, |r| r.n);
    let settled = rows.last().map_or(true, |r| r.oscillation < eps);
    Ok(GOscillationReport {
        eps,
        n0,
        settled,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::balance_scan;
    use crate::roof::{make_roof, TrigTerm};

    fn unit_golden() -> RoofFunction {
        let one = Scalar::one();
        make_roof(
            Iet::golden(),
            vec![one.clone(); 2],
            vec![one.clone(); 2],
            GSpec::zero(),
        )
        .unwrap()
    }

    #[test]
    fn golden_monotone_small_j() {
        let rep = monotonicity_probe(&unit_golden(), 2, 64, 128).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
        assert_eq!(rep.intervals, 3);
    }

    #[test]
    fn monotone_with_slope() {
        let one = Scalar::one();
        let g = GSpec {
            slope: Scalar::ratio(1, 2),
            ..GSpec::zero()
        };
        let roof = make_roof(Iet::golden(), vec![one.clone(); 2], vec![one.clone(); 2], g).unwrap();
        assert!(monotonicity_probe(&roof, 7, 32, 128).unwrap().passed());
    }

    #[test]
    fn derivative_bound_golden() {
        let t = Iet::golden();
        let c = balance_scan(&t, 400, None).unwrap().c;
        let c = Scalar::float_f64(c, 53);
        let j0 = (6.0 * c.to_f64() * c.to_f64()).ceil() as usize;
        let rep = derivative_bound_probe(&unit_golden(), 0.5, j0..=j0 + 1, &c).unwrap();
        assert!(rep.passed(), "{:?}", rep.rows);
        let strict = derivative_bound_probe(&unit_golden(), 0.99, j0..=j0, &c).unwrap();
        assert!(strict.delta < rep.delta);
        assert!(strict.passed());
    }

    #[test]
    fn oscillation_of_zero_and_cosine() {
        let t = Iet::golden();
        let rep = g_oscillation_probe(&t, &GSpec::zero(), 1..=20, 0.1).unwrap();
        assert_eq!(rep.n0, 0);
        assert!(rep.rows.iter().all(|r| r.oscillation == 0.0));
        let g = GSpec {
            trig: vec![TrigTerm {
                k: 1,
                cos: Scalar::ratio(1, 10),
                sin: Scalar::zero(),
            }],
            ..GSpec::zero()
        };
        let rep = g_oscillation_probe(&t, &g, 1..=200, 0.5).unwrap();
        assert!(rep.settled);
        assert!(rep.rows.iter().all(|r| r.oscillation < 2.0));
        let linear = GSpec {
            poly: vec![Scalar::zero(), Scalar::one()],
            ..GSpec::zero()
        };
        assert!(matches!(
            g_oscillation_probe(&t, &linear, 1..=3, 0.1),
            Err(Error::NonzeroMeanDerivative(_))
        ));
    }
}
