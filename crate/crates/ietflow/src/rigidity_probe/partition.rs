use std::collections::HashMap;

use serde::Serialize;

use super::{branch_window, check_eps, ratio_cap, LevelStrip, StripProbe, BRACKET_WIDTH};
use crate::partitions::PointId;
use crate::roof::{g_oscillation_probe, RoofFunction};
use crate::{Error, Result, Scalar};

/// Outcome of the three removal steps on a row of cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedPartition {
    /// Cell boundaries `b` (between cells `b - 1` and `b`) that survive.
    pub kept: Vec<usize>,
    /// Removed boundaries with the step that removed them.
    pub removed: Vec<(usize, u8)>,
    /// Final intervals as `(first cell, last cell, level)`; `None` stands
    /// for an interval no level reaches.
    pub intervals: Vec<(usize, usize, Option<usize>)>,
}

fn group(n: usize, cut: &[bool], cell_j: &[Option<usize>]) -> Vec<(usize, usize, Option<usize>)> {
    let mut out = Vec::new();
    let mut start = 0;
    for b in 1..=n {
        if b == n || cut[b] {
            let j = cell_j[start..b].iter().copied().max().flatten();
            out.push((start, b - 1, j));
            start = b;
        }
    }
    out
}

/// Removes partition points by the three steps. `continuous(b, j)` says
/// whether the level-`j` sum is continuous at boundary `b`; level 0 is the
/// zero function and counts as continuous everywhere.
///
/// Boundary `b` is the common end of cells `b - 1` and `b`, so the test
/// for the pair of neighbouring cells is made at the point they share.
pub fn reduce_partition(
    cell_j: &[Option<usize>],
    continuous: impl Fn(usize, usize) -> bool,
) -> ReducedPartition {
    let n = cell_j.len();
    let cont = |b: usize, j: usize| j == 0 || continuous(b, j);
    let mut cut = vec![true; n + 1];
    let mut step = vec![0u8; n + 1];
    for b in 1..n {
        let (a, c) = (cell_j[b - 1], cell_j[b]);
        let s = match (a, c) {
            (None, None) => 1,
            (Some(x), Some(y)) if x == y && cont(b, x) => 1,
            (Some(x), Some(y)) if x != y && (cont(b, x) || cont(b, y)) => 2,
            _ => 0,
        };
        if s > 0 {
            cut[b] = false;
            step[b] = s;
        }
    }
    let mid = group(n, &cut, cell_j);
    let mut drop3 = Vec::new();
    for (i, &(first, last, j)) in mid.iter().enumerate() {
        if j.is_some() {
            continue;
        }
        let left_j = if i == 0 { 0 } else { mid[i - 1].2.unwrap_or(0) };
        let right_j = if i + 1 == mid.len() {
            0
        } else {
            mid[i + 1].2.unwrap_or(0)
        };
        let left_cont = i == 0 || cont(first, left_j);
        let right_cont = i + 1 == mid.len() || cont(last + 1, right_j);
        if left_cont || right_cont {
            if i > 0 {
                drop3.push(first);
            }
            if i + 1 < mid.len() {
                drop3.push(last + 1);
            }
        }
    }
    for b in drop3 {
        if cut[b] {
            cut[b] = false;
            step[b] = 3;
        }
    }
    let kept = (1..n).filter(|&b| cut[b]).collect();
    let removed = (1..n).filter(|&b| !cut[b]).map(|b| (b, step[b])).collect();
    ReducedPartition {
        kept,
        removed,
        intervals: group(n, &cut, cell_j),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionInterval {
    pub start: Scalar,
    pub end: Scalar,
    pub length: Scalar,
    /// Largest level whose sum meets the strip on this interval.
    pub j: Option<usize>,
    /// Range of level-`j0` cells it is made of.
    pub cells: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct RemovedPoint {
    pub x: Scalar,
    pub id: PointId,
    pub step: u8,
}

/// How many level-`j` continuity intervals meet the strip inside each
/// partition interval, for `n0 < j <= j_i`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Property2Report {
    pub checked: usize,
    pub unique: usize,
    /// No continuity interval meets the strip; allowed by "at most one".
    pub empty: usize,
    /// Several do; this breaks the property.
    pub multiple: Vec<(usize, usize, usize)>,
}

impl Property2Report {
    pub fn holds(&self) -> bool {
        self.multiple.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityPartition {
    pub t: f64,
    pub eps: f64,
    /// Largest level with a nonempty strip; 0 if there is none.
    pub j0: usize,
    /// Threshold from the oscillation probe of `g`.
    pub n0: usize,
    pub cell_levels: Vec<Option<usize>>,
    pub intervals: Vec<PartitionInterval>,
    pub removed: Vec<RemovedPoint>,
    /// Interior endpoints of every interval with a finite level are
    /// discontinuities of the sum of that level.
    pub property1: bool,
    pub property2: Property2Report,
    /// `q(i, j)` for the checked pairs with exactly one meeting interval.
    pub unique_q: Vec<((usize, usize), usize)>,
    #[serde(skip)]
    pub(crate) strips: Vec<LevelStrip>,
}

/// Clip of `[a, b]` to `[lo, hi]`, if it has positive length beyond the
/// bracket slack.
fn clip(a: f64, b: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (x, y) = (a.max(lo), b.min(hi));
    (y - x > BRACKET_WIDTH).then_some((x, y))
}

/// Builds the partition adapted to the strip around `t` and checks both of
/// its defining properties.
pub fn rigidity_partition(roof: &RoofFunction, t: f64, eps: f64) -> Result<RigidityPartition> {
    check_eps(roof, eps)?;
    if eps >= roof.min_value() / 3.0 {
        return Err(Error::HypothesisViolated(format!(
            "eps = {eps} is not below min(f+g)/3 = {}",
            roof.min_value() / 3.0
        )));
    }
    let probe = StripProbe::new(roof, ratio_cap(roof, t, eps))?;
    partition_with(&probe, t, eps)
}

pub(crate) fn partition_with(probe: &StripProbe, t: f64, eps: f64) -> Result<RigidityPartition> {
    let roof = probe.roof();
    let j_top = probe.j_ceiling(t, eps)?;
    let strips: Vec<LevelStrip> = (1..=j_top).map(|j| probe.strip(t, eps, j)).collect();
    let j0 = strips
        .iter()
        .rev()
        .find(|s| !s.intervals.is_empty())
        .map_or(0, |s| s.j);
    let n0 = if j0 == 0 {
        0
    } else {
        g_oscillation_probe(roof.base(), roof.g(), 1..=j0, eps)?.n0
    };
    if j0 == 0 {
        let one = roof.base().total().clone();
        return Ok(RigidityPartition {
            t,
            eps,
            j0,
            n0,
            cell_levels: vec![None],
            intervals: vec![PartitionInterval {
                start: Scalar::zero(),
                end: one.clone(),
                length: one,
                j: None,
                cells: (0, 0),
            }],
            removed: Vec::new(),
            property1: true,
            property2: Property2Report::default(),
            unique_q: Vec::new(),
            strips,
        });
    }
    let eng = probe.engine();
    let points = eng.points(j0);
    let starts: Vec<f64> = points.iter().map(|p| p.0.to_f64()).collect();
    let total = roof.base().total().to_f64();
    let cell_end = |s: usize| {
        if s + 1 < starts.len() {
            starts[s + 1]
        } else {
            total
        }
    };
    let mut cell_levels: Vec<Option<usize>> = vec![None; points.len()];
    for strip in &strips {
        for iv in &strip.intervals {
            let (a, b) = (iv.start.mid(), iv.end.mid());
            // first cell whose end lies beyond a
            let mut s = starts.partition_point(|&x| x <= a).saturating_sub(1);
            while s < starts.len() && starts[s] < b {
                if clip(a, b, starts[s], cell_end(s)).is_some() {
                    cell_levels[s] = cell_levels[s].max(Some(strip.j));
                }
                s += 1;
            }
        }
    }
    let reduced = reduce_partition(&cell_levels, |b, j| !eng.discontinuous_at(points[b].1, j));
    let intervals: Vec<PartitionInterval> = reduced
        .intervals
        .iter()
        .map(|&(a, b, j)| {
            let start = points[a].0.clone();
            let end = points
                .get(b + 1)
                .map_or_else(|| roof.base().total().clone(), |p| p.0.clone());
            PartitionInterval {
                length: &end - &start,
                start,
                end,
                j,
                cells: (a, b),
            }
        })
        .collect();
    let removed = reduced
        .removed
        .iter()
        .map(|&(b, step)| RemovedPoint {
            x: points[b].0.clone(),
            id: points[b].1,
            step,
        })
        .collect();
    let mut property1 = true;
    for iv in &intervals {
        let Some(j) = iv.j else { continue };
        if iv.cells.0 > 0 && !eng.discontinuous_at(points[iv.cells.0].1, j) {
            property1 = false;
        }
        if iv.cells.1 + 1 < points.len() && !eng.discontinuous_at(points[iv.cells.1 + 1].1, j) {
            property1 = false;
        }
    }
    let mut property2 = Property2Report::default();
    let mut unique_q = Vec::new();
    for (i, iv) in intervals.iter().enumerate() {
        let Some(ji) = iv.j else { continue };
        let (lo, hi) = (starts[iv.cells.0], cell_end(iv.cells.1));
        for j in (n0 + 1)..=ji {
            let mut qs: Vec<usize> = strips[j - 1]
                .intervals
                .iter()
                .filter(|s| clip(s.start.mid(), s.end.mid(), lo, hi).is_some())
                .map(|s| s.branch)
                .collect();
            qs.dedup();
            property2.checked += 1;
            match qs.len() {
                0 => property2.empty += 1,
                1 => {
                    property2.unique += 1;
                    unique_q.push(((i, j), qs[0]));
                }
                k => property2.multiple.push((i, j, k)),
            }
        }
    }
    Ok(RigidityPartition {
        t,
        eps,
        j0,
        n0,
        cell_levels,
        intervals,
        removed,
        property1,
        property2,
        unique_q,
        strips,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderingViolation {
    pub interval: usize,
    pub j: usize,
    pub j_prime: usize,
    /// Which of the three inequalities failed, left to right.
    pub link: u8,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderingReport {
    pub n0: usize,
    /// `eps >= min(f+g)/6`; failures are then expected, not bugs.
    pub hypothesis_violated: bool,
    pub pairs_checked: usize,
    pub violations: Vec<OrderingViolation>,
    /// Strip pieces not contained in the widened sets.
    pub containment_failures: usize,
}

impl OrderingReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.containment_failures == 0
    }
}

type Hull = Option<(f64, f64)>;

fn hull(a: Hull, b: (f64, f64)) -> Hull {
    Some(match a {
        None => b,
        Some((x, y)) => (x.min(b.0), y.max(b.1)),
    })
}

/// `A <= B` for interval hulls, vacuous when either is empty.
fn before(a: Hull, b: Hull, slack: f64) -> bool {
    match (a, b) {
        (Some((_, sa)), Some((ib, _))) => sa <= ib + slack,
        _ => true,
    }
}

/// Checks the nesting of the widened decreasing and increasing parts of the
/// strips across levels inside every partition interval.
pub fn ordering_check(
    partition: &RigidityPartition,
    roof: &RoofFunction,
    n0: usize,
) -> Result<OrderingReport> {
    let (t, eps) = (partition.t, partition.eps);
    let probe = StripProbe::new(roof, ratio_cap(roof, t, eps).max(partition.j0))?;
    let hypothesis_violated = eps >= roof.min_value() / 6.0;
    let qmap: HashMap<(usize, usize), usize> = partition.unique_q.iter().copied().collect();
    let slack = 4.0 * BRACKET_WIDTH;
    let mut pairs_checked = 0;
    let mut violations = Vec::new();
    let mut containment_failures = 0;
    let total = roof.base().total().to_f64();
    for (i, iv) in partition.intervals.iter().enumerate() {
        let Some(ji) = iv.j else { continue };
        let (lo, hi) = (iv.start.to_f64(), iv.end.to_f64().min(total));
        // (j, minus hull, plus hull)
        let mut sets: Vec<(usize, Hull, Hull)> = Vec::new();
        for j in (n0 + 1)..=ji {
            let Some(&q) = qmap.get(&(i, j)) else {
                continue;
            };
            let b = &probe.branches(j)[q];
            let left = b.left.to_f64();
            let pieces: Vec<(f64, f64)> = partition.strips[j - 1]
                .intervals
                .iter()
                .filter(|s| s.branch == q)
                .filter_map(|s| clip(s.start.mid(), s.end.mid(), lo, hi))
                .collect();
            let Some(&(a0, b0)) = pieces.first() else {
                continue;
            };
            let g_ij = b.g(&(0.5 * (a0 + b0) - left)).0;
            let bf = b.f_only();
            let sh = bf.shape();
            let split = match sh.critical.first() {
                Some(c) => c.0,
                None if bf.slope(&bf.pos_at(&(0.5 * bf.width))) < 0.0 => bf.width,
                None => 0.0,
            };
            let (mut minus, mut plus): (Hull, Hull) = (None, None);
            for (s, e) in branch_window(
                &bf,
                &sh,
                t - g_ij - 2.0 * eps,
                t - g_ij + 2.0 * eps,
                BRACKET_WIDTH,
            ) {
                let (s, e) = (s.mid(), e.mid());
                if let Some(m) = clip(s.min(split) + left, e.min(split) + left, lo, hi) {
                    minus = hull(minus, m);
                }
                if let Some(p) = clip(s.max(split) + left, e.max(split) + left, lo, hi) {
                    plus = hull(plus, p);
                }
            }
            for &(a, c) in &pieces {
                let inside = |h: Hull| h.is_some_and(|(x, y)| x - slack <= a && c <= y + slack);
                let joined = match (minus, plus) {
                    (Some(m), Some(p)) if m.1 + slack >= p.0 => Some((m.0, p.1)),
                    _ => None,
                };
                if !(inside(minus) || inside(plus) || inside(joined)) {
                    containment_failures += 1;
                }
            }
            sets.push((j, minus, plus));
        }
        for (k, &(j, mj, pj)) in sets.iter().enumerate() {
            for &(jp, mjp, pjp) in &sets[k + 1..] {
                pairs_checked += 1;
                for (link, ok) in [
                    (1, before(mj, mjp, slack)),
                    (2, before(mjp, pjp, slack)),
                    (3, before(pjp, pj, slack)),
                ] {
                    if !ok {
                        violations.push(OrderingViolation {
                            interval: i,
                            j,
                            j_prime: jp,
                            link,
                        });
                    }
                }
            }
        }
    }
    Ok(OrderingReport {
        n0,
        hypothesis_violated,
        pairs_checked,
        violations,
        containment_failures,
    })
}
