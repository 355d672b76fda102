//! The flow under a roof, its return times, and the conditions on sets
//! along which the flow could be rigid.

mod distribution;
mod intervals;

use serde::Serialize;

use crate::iet_core::cf_expand;
use crate::partitions::{global_points, OrbitTable};
use crate::roof::{birkhoff, Quantity, RoofEngine, RoofFunction};
use crate::{Error, Iet, Result, Scalar};

pub use distribution::{
    birkhoff_distribution, tightness_report, BinSpec, DistributionReport, TightnessReport,
};
pub use intervals::IntervalUnion;

/// A point `(x, s)` of the suspension: base point and height under the roof.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowPoint {
    pub x: Scalar,
    pub s: Scalar,
}

impl FlowPoint {
    /// Checks `0 <= s < roof(x)`.
    pub fn new(roof: &RoofFunction, x: Scalar, s: Scalar, prec: u32) -> Result<Self> {
        let h = roof.eval(&x, Quantity::FPlusG, prec)?;
        if s.is_negative() || s >= h {
            return Err(Error::Invalid(format!("height {s} outside [0, {h})")));
        }
        Ok(FlowPoint { x, s })
    }
}

/// Moves `p` by time `t` along the vertical flow, jumping from `(x, roof(x))`
/// to `(Tx, 0)`.
///
/// The roof is evaluated once per visited base point and the remaining time
/// is compared with the room left above the current height. A remaining time
/// equal to that room lands exactly on the next floor; with float times,
/// "equal" means within a few units in the last place of `|t|`, so that a
/// return time computed by a different summation order still lands.
pub fn flow_map(roof: &RoofFunction, p: &FlowPoint, t: &Scalar, prec: u32) -> Result<FlowPoint> {
    let base = roof.base();
    let mut x = p.x.clone();
    let mut s = p.s.clone();
    let tol = landing_tolerance(t, &p.s, prec);
    if !t.is_negative() {
        let mut left = t.clone();
        let mut steps = 0i64;
        loop {
            let h = roof
                .eval(&x, Quantity::FPlusG, prec)
                .map_err(|e| at_step(e, steps))?;
            let room = &h - &s;
            if left < &room - &tol {
                return Ok(FlowPoint { s: &s + &left, x });
            }
            left = &left - &room;
            x = base.evaluate(&x)?;
            s = Scalar::zero();
            steps += 1;
            if left <= tol {
                return Ok(FlowPoint { x, s });
            }
        }
    }
    let inv = base.inverse();
    let mut left = -t;
    let mut steps = 0i64;
    loop {
        if left <= &s - &tol {
            return Ok(FlowPoint { s: &s - &left, x });
        }
        if left <= &s + &tol {
            return Ok(FlowPoint {
                s: Scalar::zero(),
                x,
            });
        }
        left = &left - &s;
        x = inv.evaluate(&x)?;
        steps -= 1;
        s = roof
            .eval(&x, Quantity::FPlusG, prec)
            .map_err(|e| at_step(e, steps))?;
    }
}

/// Zero when `t` and the starting height are exact.
fn landing_tolerance(t: &Scalar, s: &Scalar, prec: u32) -> Scalar {
    if t.is_exact() && s.is_exact() {
        return Scalar::zero();
    }
    let scale = (t.abs().to_f64() + s.abs().to_f64()).max(1.0);
    Scalar::float_f64(scale * (2.0f64).powi(8 - prec.min(1000) as i32), prec)
}

fn at_step(e: Error, k: i64) -> Error {
    match e {
        Error::AtSingularity { index, .. } => Error::AtSingularity { index, iterate: k },
        other => other,
    }
}

/// Time for `(x, 0)` to come back to the base for the `k`-th time: the
/// ergodic sum of the roof, computed by [`birkhoff`].
pub fn return_time(roof: &RoofFunction, x: &Scalar, k: i64, prec: u32) -> Result<Scalar> {
    Ok(birkhoff(roof, x, k, Quantity::FPlusG, prec)?.value)
}

/// Candidate rigidity sets with their times and centring constants.
#[derive(Clone, Debug, Serialize)]
pub struct RigiditySetSpec {
    pub n: usize,
    pub q: u64,
    /// Centring constant; `None` until a roof is supplied.
    pub a: Option<Scalar>,
    pub set: IntervalUnion,
}

/// Sets `D_n = [0, 1)` with times the continued fraction denominators of
/// `alpha`. Given a roof over the rotation by `alpha`, the centring constant
/// is the ergodic sum at the midpoint of the longest continuity interval.
pub fn rotation_rigidity_sets(
    alpha: &Scalar,
    n_range: std::ops::RangeInclusive<usize>,
    roof: Option<&RoofFunction>,
    prec: u32,
) -> Result<Vec<RigiditySetSpec>> {
    if !alpha.is_exact() {
        return Err(Error::UnboundedQuotientsUnverifiable);
    }
    if !(alpha.is_positive() && alpha < &Scalar::one()) {
        return Err(Error::Invalid(format!(
            "rotation number {alpha} must lie in (0, 1)"
        )));
    }
    let n_hi = *n_range.end();
    let cf = cf_expand(alpha, n_hi + 1)?;
    if cf.finite {
        return Err(Error::HypothesisViolated(format!(
            "rotation number {alpha} is rational"
        )));
    }
    if !cf.bounded() {
        return Err(Error::HypothesisViolated(
            "no repeating tail found, partial quotients not known to be bounded".into(),
        ));
    }
    if let Some(roof) = roof {
        let t = roof.base();
        let t0 = t.evaluate(&Scalar::zero())?;
        if t.r() != 2 || &t0 != alpha {
            return Err(Error::Invalid(
                "roof is not defined over the rotation by alpha".into(),
            ));
        }
    }
    let mut out = Vec::new();
    for n in n_range {
        let q = cf
            .q_int(n)
            .to_u64()
            .ok_or_else(|| Error::Invalid(format!("q_{n} does not fit in 64 bits")))?;
        let a = match roof {
            Some(roof) if q > 0 => Some(centring_constant(roof, q as usize, prec)?),
            _ => None,
        };
        out.push(RigiditySetSpec {
            n,
            q,
            a,
            set: IntervalUnion::full(&Scalar::one()),
        });
    }
    Ok(out)
}

/// Ergodic sum of length `q` at the midpoint of the longest interval on
/// which it is continuous.
pub fn centring_constant(roof: &RoofFunction, q: usize, prec: u32) -> Result<Scalar> {
    let eng = RoofEngine::<f64>::new(roof, 53, q)?;
    let pts = eng.points(q);
    let total = roof.base().total();
    let mut best: Option<(Scalar, Scalar)> = None;
    let mut start = pts[0].0.clone();
    for k in 1..=pts.len() {
        let cut = k == pts.len() || eng.discontinuous_at(pts[k].1, q);
        if !cut {
            continue;
        }
        let end = if k == pts.len() {
            total.clone()
        } else {
            pts[k].0.clone()
        };
        let len = &end - &start;
        if best.as_ref().map_or(true, |(l, _)| &len > l) {
            best = Some((len, &(&start + &end) / &Scalar::int(2)));
        }
        start = end;
    }
    let (_, mid) = best.expect("at least one interval");
    return_time(roof, &mid, q as i64, prec)
}

/// Measures and displacement bound of a candidate rigidity set.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub n: usize,
    pub q: u64,
    pub measure: Scalar,
    /// `m(D symmetric-difference T^-1 D)`
    pub symmetric_difference: Scalar,
    /// `sup over x in D` of the distance from `x` to `T^q x` on the circle.
    pub sup_displacement: Scalar,
}

/// Exact interval algebra for the set conditions.
pub fn check_rigidity_spec(t: &Iet, spec: &RigiditySetSpec) -> Result<ConditionReport> {
    let total = t.total();
    spec.set.check_inside(total)?;
    let pre = spec.set.preimage(t);
    let measure = spec.set.measure();
    let symmetric_difference =
        &(&measure + &pre.measure()) - &(&spec.set.intersection_measure(&pre) * &Scalar::int(2));
    let sup_displacement = sup_displacement(t, &spec.set, spec.q as usize)?;
    Ok(ConditionReport {
        n: spec.n,
        q: spec.q,
        measure,
        symmetric_difference,
        sup_displacement,
    })
}

/// `T^q` translates each interval of the level-`q` partition rigidly, so the
/// displacement is read off at left endpoints.
fn sup_displacement(t: &Iet, set: &IntervalUnion, q: usize) -> Result<Scalar> {
    if q == 0 {
        return Ok(Scalar::zero());
    }
    let total = t.total();
    let table = OrbitTable::new(t, -(q as i64), q as i64 + 1)?;
    let pts = global_points(t, &table, q);
    let mut sup = Scalar::zero();
    for (k, (x, id)) in pts.iter().enumerate() {
        let end = pts.get(k + 1).map_or(total, |p| &p.0);
        if !set.meets(x, end) {
            continue;
        }
        let d = (table.point(table.forward(*id, q as i64)) - x).abs();
        let d = d.clone().min(total - &d);
        if d > sup {
            sup = d;
        }
    }
    Ok(sup)
}

/// `||q alpha||`, the distance from `q alpha` to the nearest integer.
pub fn circle_norm(alpha: &Scalar, q: u64) -> Scalar {
    let v = (alpha * &Scalar::int(q as i64)).fract();
    v.clone().min(&Scalar::one() - &v)
}

/// Flags for a sequence of condition reports.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionSummary {
    pub min_measure: Scalar,
    /// The last measure is at most half the smallest measure of the first
    /// half.
    pub measure_collapses: bool,
    pub max_symmetric_difference: Scalar,
    pub last_displacement: Scalar,
}

pub fn summarize_conditions(reports: &[ConditionReport]) -> Result<ConditionSummary> {
    if reports.is_empty() {
        return Err(Error::Invalid("no reports".into()));
    }
    let half = reports.len().div_ceil(2);
    let first_min = reports[..half]
        .iter()
        .map(|r| r.measure.clone())
        .min()
        .expect("nonempty");
    Ok(ConditionSummary {
        min_measure: reports
            .iter()
            .map(|r| r.measure.clone())
            .min()
            .expect("nonempty"),
        measure_collapses: reports.len() > 1
            && &reports[reports.len() - 1].measure * &Scalar::int(2) <= first_min,
        max_symmetric_difference: reports
            .iter()
            .map(|r| r.symmetric_difference.clone())
            .max()
            .expect("nonempty"),
        last_displacement: reports.last().expect("nonempty").sup_displacement.clone(),
    })
}
