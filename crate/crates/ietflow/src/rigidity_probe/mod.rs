//! Strip sets `{x : |F_j(x) - t| < eps}` of the ergodic sums of a roof, the
//! partition adapted to them, and sweeps of their total measure in `t`.
//!
//! Measures are upper bounds on any partial rigidity constant along times
//! near the sampled `t`: the flow can only return close to where it started
//! from points whose return time lies in the strip.

mod partition;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::roof::{Branch, RoofEngine, RoofFunction, Shape, Side};
use crate::{Error, Result};

pub use partition::{
    ordering_check, reduce_partition, rigidity_partition, OrderingReport, OrderingViolation,
    PartitionInterval, Property2Report, ReducedPartition, RemovedPoint, RigidityPartition,
};

/// Default bracketing width for level crossings.
pub const BRACKET_WIDTH: f64 = 9.094947017729282e-13; // 2^-40

/// Enclosure `[lo, hi]` of an endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn exact(x: f64) -> Self {
        Bracket { lo: x, hi: x }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn shift(&self, by: f64) -> Self {
        Bracket {
            lo: self.lo + by,
            hi: self.hi + by,
        }
    }

    fn mirror(&self, w: f64) -> Self {
        Bracket {
            lo: w - self.hi,
            hi: w - self.lo,
        }
    }
}

/// One interval of a strip set, in absolute coordinates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StripInterval {
    pub j: usize,
    /// Index of the level-`j` continuity interval containing it.
    pub branch: usize,
    pub start: Bracket,
    pub end: Bracket,
}

impl StripInterval {
    pub fn measure(&self) -> f64 {
        (self.end.mid() - self.start.mid()).max(0.0)
    }

    pub fn error(&self) -> f64 {
        0.5 * (self.start.width() + self.end.width())
    }
}

/// Strip set of one level.
#[derive(Clone, Debug, Serialize)]
pub struct LevelStrip {
    pub j: usize,
    pub intervals: Vec<StripInterval>,
    pub measure: f64,
    pub error_bar: f64,
}

impl LevelStrip {
    fn new(j: usize, intervals: Vec<StripInterval>) -> Self {
        let measure = intervals.iter().map(StripInterval::measure).sum();
        let error_bar = intervals.iter().map(StripInterval::error).sum();
        LevelStrip {
            j,
            intervals,
            measure,
            error_bar,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StripReport {
    pub t: f64,
    pub eps: f64,
    pub j_max: usize,
    pub levels: Vec<LevelStrip>,
    /// Measure of the union over all levels.
    pub measure: f64,
    pub error_bar: f64,
    /// No two levels overlap beyond their brackets.
    pub disjoint: bool,
    /// `eps < min f / 4`, where the levels must be disjoint.
    pub disjointness_expected: bool,
}

impl StripReport {
    pub fn level_sum(&self) -> f64 {
        self.levels.iter().map(|l| l.measure).sum()
    }
}

struct Level {
    branches: Vec<Branch<f64>>,
    shapes: Vec<Shape<f64>>,
    min_lb: f64,
}

/// Caches branches and their critical structure level by level; shared by
/// all `t` of a sweep.
pub struct StripProbe {
    engine: RoofEngine<f64>,
    levels: Vec<OnceLock<Level>>,
    min_fg: f64,
    min_f: f64,
    tol: f64,
}

/// Parameter range of a monotone piece where the values lie strictly
/// between `lo` and `hi`, as brackets in distance from the left end.
fn piece_window(
    b: &Branch<f64>,
    p: &crate::roof::Piece<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Option<(Bracket, Bracket)> {
    let (vmin, vmax) = if p.fa < p.fb {
        (p.fa, p.fb)
    } else {
        (p.fb, p.fa)
    };
    if hi <= vmin || lo >= vmax {
        return None;
    }
    let (u_min, u_max) = if p.fa < p.fb {
        (p.ua, p.ub)
    } else {
        (p.ub, p.ua)
    };
    let cut = |level: f64| -> Bracket {
        if level <= vmin {
            Bracket::exact(u_min)
        } else if level >= vmax {
            Bracket::exact(u_max)
        } else {
            let (a, c) = p.crossing(b, &level, tol).expect("level inside the range");
            Bracket { lo: a, hi: c }
        }
    };
    let (x, y) = (cut(lo), cut(hi));
    let (x, y) = if x.mid() <= y.mid() { (x, y) } else { (y, x) };
    Some(match p.side {
        Side::Left => (x, y),
        Side::Right => (y.mirror(b.width), x.mirror(b.width)),
    })
}

/// `{s : lo < F(s) < hi}` on one branch, merged across critical points.
pub(crate) fn branch_window(
    b: &Branch<f64>,
    sh: &Shape<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Vec<(Bracket, Bracket)> {
    let mut out: Vec<(Bracket, Bracket)> = Vec::new();
    for p in &sh.pieces {
        if let Some(w) = piece_window(b, p, lo, hi, tol) {
            match out.last_mut() {
                Some(last) if last.1.hi + 4.0 * f64::EPSILON * b.width >= w.0.lo => last.1 = w.1,
                _ => out.push(w),
            }
        }
    }
    out
}

impl StripProbe {
    pub fn new(roof: &RoofFunction, j_cap: usize) -> Result<Self> {
        let engine = RoofEngine::<f64>::new(roof, 53, j_cap.max(1))?;
        let mut min_f = f64::INFINITY;
        for b in engine.level(1) {
            let fb = b.f_only();
            min_f = min_f.min(fb.shape().min_lower_bound(&fb).0);
        }
        Ok(StripProbe {
            levels: (0..j_cap.max(1)).map(|_| OnceLock::new()).collect(),
            min_fg: roof.min_value(),
            min_f,
            engine,
            tol: BRACKET_WIDTH,
        })
    }

    pub fn roof(&self) -> &RoofFunction {
        self.engine.roof()
    }

    pub fn engine(&self) -> &RoofEngine<f64> {
        &self.engine
    }

    pub fn j_cap(&self) -> usize {
        self.levels.len()
    }

    /// Certified lower bound for `min (f + g)`.
    pub fn min_fg(&self) -> f64 {
        self.min_fg
    }

    /// Lower bound for `min f`.
    pub fn min_f(&self) -> f64 {
        self.min_f
    }

    fn level(&self, j: usize) -> &Level {
        self.levels[j - 1].get_or_init(|| {
            let branches = self.engine.level(j);
            let shapes: Vec<Shape<f64>> = branches.par_iter().map(|b| b.shape()).collect();
            let min_lb = branches
                .iter()
                .zip(&shapes)
                .map(|(b, s)| s.min_lower_bound(b).0)
                .fold(f64::INFINITY, f64::min);
            Level {
                branches,
                shapes,
                min_lb,
            }
        })
    }

    pub fn branches(&self, j: usize) -> &[Branch<f64>] {
        &self.level(j).branches
    }

    pub fn shapes(&self, j: usize) -> &[Shape<f64>] {
        &self.level(j).shapes
    }

    /// Lower bound for `min F_j` over `[0, 1)`.
    pub fn level_min(&self, j: usize) -> f64 {
        self.level(j).min_lb
    }

    /// Largest `j` with `min F_j < t + eps`, from the ratio bound tightened
    /// by the level minima (which increase with `j`).
    pub fn j_ceiling(&self, t: f64, eps: f64) -> Result<usize> {
        let top = t + eps;
        if top <= self.min_fg {
            return Ok(0);
        }
        let j0 = (top / self.min_fg).floor() as usize;
        if j0 > self.j_cap() {
            return Err(Error::Invalid(format!(
                "level {j0} needed, probe built up to {}",
                self.j_cap()
            )));
        }
        let (mut lo, mut hi) = (0usize, j0);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.level_min(mid) < top {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Ok(lo)
    }

    /// Strip set of level `j`.
    pub fn strip(&self, t: f64, eps: f64, j: usize) -> LevelStrip {
        let lvl = self.level(j);
        let (lo, hi) = (t - eps, t + eps);
        let intervals: Vec<StripInterval> = lvl
            .branches
            .par_iter()
            .zip(&lvl.shapes)
            .enumerate()
            .flat_map_iter(|(q, (b, sh))| {
                let left = b.left.to_f64();
                let win = if sh.min >= hi {
                    Vec::new()
                } else {
                    branch_window(b, sh, lo, hi, self.tol)
                };
                win.into_iter().map(move |(s, e)| StripInterval {
                    j,
                    branch: q,
                    start: s.shift(left),
                    end: e.shift(left),
                })
            })
            .collect();
        LevelStrip::new(j, intervals)
    }

    /// Union of the strip sets over all levels that can reach `t + eps`.
    pub fn measure(&self, t: f64, eps: f64) -> Result<StripReport> {
        let j_max = self.j_ceiling(t, eps)?;
        let levels: Vec<LevelStrip> = (1..=j_max)
            .into_par_iter()
            .map(|j| self.strip(t, eps, j))
            .filter(|l| !l.intervals.is_empty())
            .collect();
        let mut all: Vec<&StripInterval> = levels.iter().flat_map(|l| &l.intervals).collect();
        all.sort_by(|a, b| a.start.mid().total_cmp(&b.start.mid()));
        let mut disjoint = true;
        let mut measure = 0.0;
        let mut error_bar: f64 = levels.iter().map(|l| l.error_bar).sum();
        // sweep the sorted intervals, merging overlaps
        struct Run {
            start: f64,
            end: f64,
            end_lo: f64,
            j: usize,
        }
        let mut cur: Option<Run> = None;
        for iv in all {
            let (s, e) = (iv.start.mid(), iv.end.mid());
            match cur.as_mut() {
                Some(c) if s < c.end => {
                    if c.j != iv.j {
                        // definite only if the inner brackets overlap
                        if iv.start.hi < c.end_lo {
                            disjoint = false;
                        } else {
                            error_bar += c.end.min(e) - s;
                        }
                    }
                    if e > c.end {
                        c.end = e;
                        c.end_lo = iv.end.lo;
                        c.j = iv.j;
                    }
                }
                _ => {
                    if let Some(c) = cur.take() {
                        measure += c.end - c.start;
                    }
                    cur = Some(Run {
                        start: s,
                        end: e,
                        end_lo: iv.end.lo,
                        j: iv.j,
                    });
                }
            }
        }
        if let Some(c) = cur {
            measure += c.end - c.start;
        }
        let disjointness_expected = eps < 0.25 * self.min_f;
        if disjointness_expected && !disjoint {
            return Err(Error::PrecisionExhausted(format!(
                "strips of different levels overlap at t = {t}, eps = {eps}"
            )));
        }
        Ok(StripReport {
            t,
            eps,
            j_max,
            levels,
            measure,
            error_bar,
            disjoint,
            disjointness_expected,
        })
    }
}

fn check_eps(roof: &RoofFunction, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < roof.min_value()) {
        return Err(Error::Invalid(format!(
            "eps = {eps} must lie in (0, min(f+g) = {})",
            roof.min_value()
        )));
    }
    Ok(())
}

fn ratio_cap(roof: &RoofFunction, t: f64, eps: f64) -> usize {
    ((t + eps) / roof.min_value()).floor().max(1.0) as usize
}

/// Largest level whose ergodic sum can come within `eps` of `t`.
pub fn j_ceiling(roof: &RoofFunction, t: f64, eps: f64) -> Result<usize> {
    check_eps(roof, eps)?;
    StripProbe::new(roof, ratio_cap(roof, t, eps))?.j_ceiling(t, eps)
}

/// `{x : |F_j(x) - t| < eps}`.
pub fn strip_set(roof: &RoofFunction, t: f64, eps: f64, j: usize) -> Result<LevelStrip> {
    check_eps(roof, eps)?;
    if j == 0 {
        return Err(Error::Invalid("levels start at 1".into()));
    }
    Ok(StripProbe::new(roof, j)?.strip(t, eps, j))
}

pub fn strip_measure(roof: &RoofFunction, t: f64, eps: f64) -> Result<StripReport> {
    check_eps(roof, eps)?;
    StripProbe::new(roof, ratio_cap(roof, t, eps))?.measure(t, eps)
}

/// `max_q min F_N - eps` over the level `N = ceil(6 c^2)` intervals, the
/// time from which the measure estimate applies.
pub fn default_t0(roof: &RoofFunction, c_balance: f64, eps: f64) -> Result<f64> {
    let n = (6.0 * c_balance * c_balance).ceil() as usize;
    let probe = StripProbe::new(roof, n)?;
    Ok(probe
        .shapes(n)
        .iter()
        .map(|s| s.min)
        .fold(f64::NEG_INFINITY, f64::max)
        - eps)
}

/// One row of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub eps: f64,
    pub j_max: usize,
    pub measure: f64,
    pub error_bar: f64,
    pub disjoint: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Any partial rigidity constant along these times is at most this.
    pub bound: f64,
    pub first_half_sup: f64,
    pub last_half_sup: f64,
    /// Every `t` lies below `min(f+g) - eps`.
    pub degenerate: bool,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,eps,j_max,measure,error_bar,disjoint_flag\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.t, r.eps, r.j_max, r.measure, r.error_bar, r.disjoint
            ));
        }
        out
    }
}

/// Strip measures along an increasing grid of times.
pub fn rigidity_sweep(roof: &RoofFunction, t_grid: &[f64], eps: f64) -> Result<SweepReport> {
    check_eps(roof, eps)?;
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("time grid must increase".into()));
    }
    let t_max = t_grid.last().copied().unwrap_or(0.0);
    let probe = StripProbe::new(roof, ratio_cap(roof, t_max, eps))?;
    let reports: Vec<StripReport> = t_grid
        .par_iter()
        .map(|&t| probe.measure(t, eps))
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = reports
        .iter()
        .map(|r| SweepRow {
            t: r.t,
            eps,
            j_max: r.j_max,
            measure: r.measure,
            error_bar: r.error_bar,
            disjoint: r.disjoint,
        })
        .collect();
    let sup = |rs: &[SweepRow]| rs.iter().map(|r| r.measure).fold(0.0, f64::max);
    let half = rows.len() / 2;
    Ok(SweepReport {
        bound: sup(&rows),
        first_half_sup: sup(&rows[..half]),
        last_half_sup: sup(&rows[half..]),
        degenerate: t_grid.iter().all(|&t| t < roof.min_value() - eps),
        rows,
    })
}
