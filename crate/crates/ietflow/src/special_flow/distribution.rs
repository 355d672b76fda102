use rayon::prelude::*;
use serde::Serialize;

use super::{centring_constant, check_rigidity_spec, ConditionReport, RigiditySetSpec};
use crate::roof::{Branch, RoofEngine, RoofFunction};
use crate::{Error, Result, Scalar};

/// Cells per unit length before refinement.
const BASE_CELLS: f64 = 16384.0;
/// Refinement stops once a cell is this many halvings below its start.
const MAX_DEPTH: u32 = 14;

/// Equal-width histogram bins on `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BinSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl BinSpec {
    fn check(&self) -> Result<()> {
        if self.count == 0 || !(self.lo < self.hi) {
            return Err(Error::Invalid(format!(
                "bad bins [{}, {}) x {}",
                self.lo, self.hi, self.count
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.count as f64
    }
}

/// Distribution of the centred return time `F_q - a` over a set.
#[derive(Clone, Debug, Serialize)]
pub struct DistributionReport {
    pub n: usize,
    pub q: u64,
    pub a: Scalar,
    pub bins: BinSpec,
    /// Mass of each bin.
    pub histogram: Vec<f64>,
    pub underflow: f64,
    pub overflow: f64,
    /// Integral of `|F_q - a|^2` over the set.
    pub l2: f64,
    pub r: f64,
    /// Mass of `{|F_q - a| > r}`.
    pub tail_mass: f64,
    /// Sum of all masses minus the measure of the set.
    pub mass_error: f64,
    pub cells: usize,
    pub conditions: ConditionReport,
    #[serde(skip)]
    samples: Vec<(f64, f64)>,
}

impl DistributionReport {
    pub fn tail(&self, r: f64) -> f64 {
        self.samples
            .iter()
            .filter(|(_, v)| v.abs() > r)
            .map(|(m, _)| m)
            .sum()
    }

    /// `(bin_lo, bin_hi, mass)` rows.
    pub fn to_csv(&self) -> String {
        let w = self.bins.width();
        let mut s = String::from("bin_lo,bin_hi,mass\n");
        for (k, m) in self.histogram.iter().enumerate() {
            let lo = self.bins.lo + w * k as f64;
            s.push_str(&format!("{lo},{},{m}\n", lo + w));
        }
        s
    }
}

/// Histogram, second moment and tails of `F_q - a` over the set of `spec`.
///
/// Each continuity interval of level `q` is cut into equal cells, about
/// `2^14` per unit length, and a cell is halved while the slope times its
/// length exceeds half a bin. The values are taken at cell midpoints, which
/// never meet a singularity.
pub fn birkhoff_distribution(
    roof: &RoofFunction,
    spec: &RigiditySetSpec,
    bins: BinSpec,
    r: f64,
) -> Result<DistributionReport> {
    bins.check()?;
    if !(r > 0.0) {
        return Err(Error::Invalid(format!("tail radius {r} must be positive")));
    }
    let q = usize::try_from(spec.q).map_err(|_| Error::Invalid("q too large".into()))?;
    if q == 0 {
        return Err(Error::Invalid("q must be positive".into()));
    }
    let conditions = check_rigidity_spec(roof.base(), spec)?;
    let a = match &spec.a {
        Some(a) => a.clone(),
        None => centring_constant(roof, q, 128)?,
    };
    let a_f = a.to_f64();
    let eng = RoofEngine::<f64>::new(roof, 53, q)?;
    let pts = eng.points(q);
    let total = roof.base().total().clone();
    let tau = 0.5 * bins.width();
    let set = &spec.set;
    let samples: Vec<(f64, f64)> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|k| {
            let right = pts.get(k + 1);
            let end = right.map_or(&total, |p| &p.0);
            let mut out = Vec::new();
            if !set.meets(&pts[k].0, end) {
                return out;
            }
            let b = eng.branch(q, &pts[k], right);
            for (lo, hi) in set.parts() {
                if !(lo < end && &pts[k].0 < hi) {
                    continue;
                }
                let s0 = (lo.clone().max(pts[k].0.clone()) - &pts[k].0).to_f64();
                let s1 = (hi.clone().min(end.clone()) - &pts[k].0).to_f64();
                let n = ((s1 - s0) * BASE_CELLS).ceil().max(1.0) as usize;
                let h = (s1 - s0) / n as f64;
                for i in 0..n {
                    let a = s0 + h * i as f64;
                    let b_end = if i + 1 == n { s1 } else { a + h };
                    refine(&b, a, b_end, 0, tau, &mut out);
                }
            }
            for v in out.iter_mut() {
                v.1 -= a_f;
            }
            out
        })
        .collect();
    let mut histogram = vec![0.0; bins.count];
    let (mut underflow, mut overflow, mut l2, mut tail, mut sum) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let w = bins.width();
    for &(m, v) in &samples {
        if !v.is_finite() {
            return Err(Error::PrecisionExhausted(format!(
                "non-finite value at level {q}"
            )));
        }
        sum += m;
        l2 += m * v * v;
        if v.abs() > r {
            tail += m;
        }
        if v < bins.lo {
            underflow += m;
        } else if v >= bins.hi {
            overflow += m;
        } else {
            let k = (((v - bins.lo) / w) as usize).min(bins.count - 1);
            histogram[k] += m;
        }
    }
    Ok(DistributionReport {
        n: spec.n,
        q: spec.q,
        a,
        bins,
        histogram,
        underflow,
        overflow,
        l2,
        r,
        tail_mass: tail,
        mass_error: sum - conditions.measure.to_f64(),
        cells: samples.len(),
        conditions,
        samples,
    })
}

fn refine(b: &Branch<f64>, lo: f64, hi: f64, depth: u32, tau: f64, out: &mut Vec<(f64, f64)>) {
    let mid = 0.5 * (lo + hi);
    let p = b.pos_at(&mid);
    let slope = b.slope(&p);
    if depth < MAX_DEPTH && slope.abs() * (hi - lo) > tau {
        refine(b, lo, mid, depth + 1, tau, out);
        refine(b, mid, hi, depth + 1, tau, out);
    } else {
        out.push((hi - lo, b.value(&p)));
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TightnessRow {
    pub r: f64,
    /// Largest tail mass beyond `r` over the reports.
    pub sup_tail: f64,
    pub worst_n: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TightnessReport {
    pub rows: Vec<TightnessRow>,
    /// Sup tails do not increase along the grid.
    pub nonincreasing: bool,
    pub l2_first: f64,
    pub l2_last: f64,
    pub l2_max: f64,
}

impl TightnessReport {
    pub fn l2_ratio(&self) -> f64 {
        self.l2_last / self.l2_first
    }

    pub fn sup_tail_at(&self, r: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|row| row.r == r)
            .map(|row| row.sup_tail)
    }
}

/// Uniform tail bounds over a family of distributions.
pub fn tightness_report(reports: &[DistributionReport], r_grid: &[f64]) -> Result<TightnessReport> {
    if reports.len() < 2 {
        return Err(Error::Invalid(
            "tightness needs at least two reports".into(),
        ));
    }
    let mut grid = r_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let rows: Vec<TightnessRow> = grid
        .iter()
        .map(|&r| {
            let (sup_tail, worst_n) = reports.iter().map(|rep| (rep.tail(r), rep.n)).fold(
                (0.0, reports[0].n),
                |acc, x| if x.0 > acc.0 { x } else { acc },
            );
            TightnessRow {
                r,
                sup_tail,
                worst_n,
            }
        })
        .collect();
    let nonincreasing = rows.windows(2).all(|w| w[1].sup_tail <= w[0].sup_tail);
    Ok(TightnessReport {
        rows,
        nonincreasing,
        l2_first: reports[0].l2,
        l2_last: reports[reports.len() - 1].l2,
        l2_max: reports.iter().map(|r| r.l2).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roof::{make_roof, GSpec};
    use crate::special_flow::{rotation_rigidity_sets, IntervalUnion};
    use crate::Iet;

    fn circle_log() -> RoofFunction {
        let (one, zero) = (Scalar::one(), Scalar::zero());
        make_roof(
            Iet::golden(),
            vec![one.clone(), zero.clone()],
            vec![zero, one],
            GSpec::zero(),
        )
        .unwrap()
    }

    const BINS: BinSpec = BinSpec {
        lo: -20.0,
        hi: 20.0,
        count: 80,
    };

    #[test]
    fn constant_roof_is_a_point_mass() {
        let roof = RoofFunction::test_double_constant(Iet::golden(), Scalar::ratio(3, 2)).unwrap();
        let spec = RigiditySetSpec {
            n: 4,
            q: 5,
            a: None,
            set: IntervalUnion::full(&Scalar::one()),
        };
        let rep = birkhoff_distribution(&roof, &spec, BINS, 1.0).unwrap();
        assert_eq!(rep.a, Scalar::ratio(15, 2));
        assert_eq!(rep.l2, 0.0);
        assert!(rep.mass_error.abs() < 1e-12);
        assert!((rep.histogram[40] - 1.0).abs() < 1e-12);
        let shifted = RigiditySetSpec {
            a: Some(Scalar::int(7)),
            ..spec
        };
        let rep = birkhoff_distribution(&roof, &shifted, BINS, 1.0).unwrap();
        assert!((rep.histogram[41] - 1.0).abs() < 1e-12);
        assert!((rep.l2 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn log_roof_masses_and_shift() {
        let roof = circle_log();
        let specs = rotation_rigidity_sets(&Scalar::golden(), 3..=7, Some(&roof), 128).unwrap();
        let mut reps = Vec::new();
        for s in &specs {
            let rep = birkhoff_distribution(&roof, s, BINS, 50.0).unwrap();
            assert!(rep.mass_error.abs() < 1e-4, "{}", rep.mass_error);
            let mass: f64 = rep.histogram.iter().sum::<f64>() + rep.underflow + rep.overflow;
            assert!((mass - 1.0).abs() < 1e-4);
            assert!(rep.l2 > 0.0 && rep.l2 < 50.0, "{}", rep.l2);
            reps.push(rep);
        }
        let t = tightness_report(&reps, &[1.0, 5.0, 50.0]).unwrap();
        assert!(t.nonincreasing);
        assert!(t.sup_tail_at(50.0).unwrap() < 0.05);
        let far = RigiditySetSpec {
            a: Some(&reps[2].a + &Scalar::int(1000)),
            ..specs[2].clone()
        };
        let moved = birkhoff_distribution(&roof, &far, BINS, 50.0).unwrap();
        assert!(moved.tail_mass > 0.99);
        assert!(moved.underflow > 0.99);
        assert!(tightness_report(&reps[..1], &[1.0]).is_err());
    }

    #[test]
    fn partial_set() {
        let roof = circle_log();
        let set = IntervalUnion::new(vec![(Scalar::ratio(1, 10), Scalar::ratio(3, 5))]).unwrap();
        let spec = RigiditySetSpec {
            n: 5,
            q: 8,
            a: None,
            set,
        };
        let rep = birkhoff_distribution(&roof, &spec, BINS, 50.0).unwrap();
        assert!((rep.mass_error).abs() < 1e-12);
        assert_eq!(rep.conditions.measure, Scalar::ratio(1, 2));
    }
}
