//! Partitions by backward orbits of the discontinuities and the balanced
//! partition lengths condition.

mod orbit;
mod scan;

use std::collections::BTreeMap;

use serde::Serialize;

pub use orbit::{OrbitTable, PointId};
pub use scan::{
    balance_scan, balance_scan_with, property_p_probe, rows_to_csv, BalanceScanReport,
    PartitionRow, PropertyPReport, ScanOptions, SingleScan,
};

use crate::iet_core::CircleExchange;
use crate::{Error, Iet, Result, Scalar};

/// Which family of points generated the partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    /// `{T^-k beta_i : 1 <= i <= r-1, 0 <= k < j}`.
    Global,
    /// `{T^(l-k) beta_i : 0 <= l < j}`.
    Single { i: usize, k: usize },
    /// Backward orbits of the breakpoints of a circle exchange.
    Circle,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::Global => "global",
            Condition::Single { .. } => "single",
            Condition::Circle => "circle",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub j: usize,
    pub condition: Condition,
    /// Sorted distinct points, starting with 0.
    pub points: Vec<Scalar>,
    pub min: Scalar,
    pub max: Scalar,
    pub j_min: Scalar,
    pub j_max: Scalar,
    /// Some generating points coincided, so `min` is 0.
    pub coincident: bool,
}

impl PartitionReport {
    fn build(j: usize, condition: Condition, raw: Vec<Scalar>, total: &Scalar) -> Self {
        let mut counts: BTreeMap<Scalar, usize> = BTreeMap::new();
        counts.insert(Scalar::zero(), 0);
        let mut coincident = false;
        for p in raw {
            let c = counts.entry(p).or_insert(0);
            *c += 1;
            coincident |= *c > 1;
        }
        let points: Vec<Scalar> = counts.into_keys().collect();
        let gaps = gap_lengths(&points, total);
        let max = gaps.iter().max().expect("at least one gap").clone();
        let min = if coincident {
            Scalar::zero()
        } else {
            gaps.iter().min().expect("at least one gap").clone()
        };
        let js = Scalar::int(j as i64);
        PartitionReport {
            j,
            condition,
            j_min: &js * &min,
            j_max: &js * &max,
            points,
            min,
            max,
            coincident,
        }
    }

    /// Lengths of the partition intervals, left to right.
    pub fn lengths(&self, total: &Scalar) -> Vec<Scalar> {
        gap_lengths(&self.points, total)
    }

    pub fn row(&self) -> PartitionRow {
        let (i, k) = match self.condition {
            Condition::Single { i, k } => (Some(i), Some(k)),
            _ => (None, None),
        };
        PartitionRow {
            j: self.j,
            min: self.min.to_f64(),
            max: self.max.to_f64(),
            j_min_product: self.j_min.to_f64(),
            j_max_product: self.j_max.to_f64(),
            condition: self.condition.name(),
            i,
            k,
        }
    }
}

fn gap_lengths(points: &[Scalar], total: &Scalar) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = points.windows(2).map(|w| &w[1] - &w[0]).collect();
    out.push(total - points.last().expect("0 is a point"));
    out
}

/// Partition points of the global condition with their names, sorted.
/// The origin is included under the name `T beta_{i0}`.
pub fn global_points(t: &Iet, table: &OrbitTable, j: usize) -> Vec<(Scalar, PointId)> {
    let mut pts = vec![(Scalar::zero(), table.origin())];
    for l in 1..t.r() {
        for k in 0..j as i64 {
            let id = PointId { l, n: -k };
            pts.push((table.point(id).clone(), id));
        }
    }
    pts.sort_by(|a, b| a.0.cmp(&b.0));
    pts
}

/// Partition by the first `j` backward iterates of the inner discontinuities.
pub fn partition_global(t: &Iet, j: usize) -> Result<PartitionReport> {
    if j == 0 {
        return Err(Error::Invalid("j must be at least 1".into()));
    }
    let inv = t.inverse();
    let mut raw = Vec::with_capacity((t.r() - 1) * j);
    for b in &t.discontinuities()[1..t.r()] {
        let mut x = b.clone();
        raw.push(x.clone());
        for _ in 1..j {
            x = inv.evaluate(&x)?;
            raw.push(x.clone());
        }
    }
    Ok(PartitionReport::build(j, Condition::Global, raw, t.total()))
}

/// Partition by `j` consecutive iterates of one discontinuity, starting `k`
/// steps in the past.
pub fn partition_single(t: &Iet, i: usize, k: usize, j: usize) -> Result<PartitionReport> {
    if i >= t.r() {
        return Err(Error::IndexOutOfRange(format!(
            "discontinuity {i} of 0..{}",
            t.r() - 1
        )));
    }
    if j == 0 || k >= j {
        return Err(Error::IndexOutOfRange(format!(
            "offset k = {k} needs 0 <= k < j = {j}"
        )));
    }
    let start = t.iterate(&t.discontinuities()[i], -(k as i64))?;
    let raw = t.orbit(&start, j as i64)?;
    Ok(PartitionReport::build(
        j,
        Condition::Single { i, k },
        raw,
        t.total(),
    ))
}

/// Partition of the circle by `{C^-k b : b a breakpoint, 0 <= k < j}`.
pub fn partition_circle(c: &CircleExchange, j: usize) -> Result<PartitionReport> {
    if j == 0 {
        return Err(Error::Invalid("j must be at least 1".into()));
    }
    let mut raw = Vec::new();
    for b in c.breakpoints() {
        let mut x = b;
        for k in 0..j {
            if k > 0 {
                x = c.preimage(&x);
            }
            raw.push(x.clone());
        }
    }
    Ok(PartitionReport::build(
        j,
        Condition::Circle,
        raw,
        &c.total(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_first_partition() {
        let t = Iet::golden();
        let rep = partition_global(&t, 1).unwrap();
        let a = Scalar::golden();
        assert_eq!(rep.points, vec![Scalar::zero(), &a * &a]);
        assert_eq!(rep.min, &a * &a);
        assert_eq!(rep.max, a);
        assert!(!rep.coincident);
    }

    #[test]
    fn three_gaps() {
        let t = Iet::golden();
        let rep = partition_global(&t, 5).unwrap();
        let mut gaps = rep.lengths(t.total());
        gaps.sort();
        gaps.dedup();
        assert!(gaps.len() <= 3);
        let total: Scalar = rep.lengths(t.total()).iter().sum();
        assert_eq!(&total, t.total());
    }

    #[test]
    fn single_partition_bounds() {
        let t = Iet::golden();
        let one = partition_single(&t, 1, 0, 1).unwrap();
        assert_eq!(one.points.len(), 2);
        let rep = partition_single(&t, 1, 0, 8).unwrap();
        assert!(rep.j_min >= Scalar::ratio(1, 4));
        assert!(rep.j_max <= Scalar::int(4));
        assert!(matches!(
            partition_single(&t, 1, 8, 8),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            partition_single(&t, 2, 0, 8),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn rational_lengths_coincide() {
        let t = Iet::rotation(Scalar::ratio(2, 5), Scalar::ratio(3, 5)).unwrap();
        let rep = partition_global(&t, 7).unwrap();
        assert!(rep.coincident);
        assert!(rep.min.is_zero());
    }

    #[test]
    fn circle_matches_cut_open() {
        let t = Iet::golden();
        let c = CircleExchange::rotation(Scalar::one(), Scalar::golden()).unwrap();
        for j in 1..30 {
            let open = partition_global(&t, j).unwrap();
            let closed = partition_circle(&c, j + 1).unwrap();
            // the open exchange sees the circle partition one step later
            assert_eq!(open.points, closed.points);
        }
    }
}
