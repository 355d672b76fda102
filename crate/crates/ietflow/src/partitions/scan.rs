use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{partition_single, PartitionReport};
use crate::{Iet, Result, Scalar};

/// One CSV row of a balance scan.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionRow {
    pub j: usize,
    pub min: f64,
    pub max: f64,
    pub j_min_product: f64,
    pub j_max_product: f64,
    pub condition: &'static str,
    pub i: Option<usize>,
    pub k: Option<usize>,
}

pub fn rows_to_csv(rows: &[PartitionRow]) -> String {
    let mut s = String::from("j,min,max,j_min_product,j_max_product,condition,i,k\n");
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:e},{:e},{},{},{},{},{}",
            r.j,
            r.min,
            r.max,
            r.j_min_product,
            r.j_max_product,
            r.condition,
            opt(r.i),
            opt(r.k)
        );
    }
    s
}

/// Which offsets `k` of the single-discontinuity condition are scanned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SingleScan {
    Skip,
    /// `k in {0, j/2, j-1}`.
    Spot,
    /// Every `0 <= k < j`.
    Full,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub j_max: usize,
    /// `None`: every `j <= 64` plus powers of two, plus `j_max`.
    pub stride: Option<usize>,
    pub single: SingleScan,
}

impl ScanOptions {
    pub fn samples(&self) -> Vec<usize> {
        let mut js: Vec<usize> = match self.stride {
            Some(s) => (1..=self.j_max)
                .filter(|j| j % s.max(1) == 0 || *j == 1)
                .collect(),
            None => {
                let mut v: Vec<usize> = (1..=self.j_max.min(64)).collect();
                let mut p = 128;
                while p < self.j_max {
                    v.push(p);
                    p *= 2;
                }
                v
            }
        };
        js.push(self.j_max);
        js.sort_unstable();
        js.dedup();
        js
    }
}

/// Suprema of `j max P_j` and `1 / (j min P_j)`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BandStats {
    pub sup_j_max: f64,
    pub sup_inv_j_min: f64,
}

impl BandStats {
    fn absorb(&mut self, j_max: f64, j_min: f64) {
        self.sup_j_max = self.sup_j_max.max(j_max);
        let inv = if j_min > 0.0 {
            1.0 / j_min
        } else {
            f64::INFINITY
        };
        self.sup_inv_j_min = self.sup_inv_j_min.max(inv);
    }

    pub fn c(&self) -> f64 {
        self.sup_j_max.max(self.sup_inv_j_min)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceScanReport {
    pub j_max: usize,
    /// Rows at the sampled `j`.
    pub rows: Vec<PartitionRow>,
    /// Over all `j <= j_max` (global condition) and sampled `j` (single).
    pub global: BandStats,
    /// Restricted to `j > j_max / 10`.
    pub tail: BandStats,
    /// Restricted to `j <= j_max / 10`.
    pub head: BandStats,
    /// `c = max(sup j max P_j, sup 1/(j min P_j))`.
    pub c: f64,
    pub c_tail: f64,
    /// First `j` at which two generating points coincided.
    pub first_coincidence: Option<usize>,
}

impl BalanceScanReport {
    /// Tail suprema exceed the earlier suprema by at most the factor `ratio`.
    pub fn stabilized(&self, ratio: f64) -> bool {
        self.tail.sup_j_max <= ratio * self.head.sup_j_max
            && self.tail.sup_inv_j_min <= ratio * self.head.sup_inv_j_min
    }
}

/// Incrementally refined global partition: point multiset and gap multiset.
pub(crate) struct GlobalRefiner {
    inverse: Iet,
    total: Scalar,
    heads: Vec<Scalar>,
    points: BTreeMap<Scalar, usize>,
    gaps: BTreeMap<Scalar, usize>,
    duplicates: usize,
    pub j: usize,
}

impl GlobalRefiner {
    pub fn new(t: &Iet) -> Self {
        let mut points = BTreeMap::new();
        points.insert(Scalar::zero(), 1);
        let mut gaps = BTreeMap::new();
        gaps.insert(t.total().clone(), 1);
        GlobalRefiner {
            inverse: t.inverse(),
            total: t.total().clone(),
            heads: t.discontinuities()[1..t.r()].to_vec(),
            points,
            gaps,
            duplicates: 0,
            j: 0,
        }
    }

    fn insert(&mut self, p: Scalar) {
        if let Some(c) = self.points.get_mut(&p) {
            *c += 1;
            self.duplicates += 1;
            return;
        }
        let below = self
            .points
            .range(..&p)
            .next_back()
            .expect("0 is present")
            .0
            .clone();
        let above = self
            .points
            .range(&p..)
            .next()
            .map(|(k, _)| k.clone())
            .unwrap_or_else(|| self.total.clone());
        let old = &above - &below;
        match self.gaps.get_mut(&old) {
            Some(c) if *c > 1 => *c -= 1,
            _ => {
                self.gaps.remove(&old);
            }
        }
        *self.gaps.entry(&p - &below).or_insert(0) += 1;
        *self.gaps.entry(&above - &p).or_insert(0) += 1;
        self.points.insert(p, 1);
    }

    /// Passes from `P_j` to `P_{j+1}`.
    pub fn advance(&mut self) -> Result<()> {
        if self.j > 0 {
            for h in self.heads.iter_mut() {
                *h = self.inverse.evaluate(h)?;
            }
        }
        for h in self.heads.clone() {
            self.insert(h);
        }
        self.j += 1;
        Ok(())
    }

    pub fn min(&self) -> Scalar {
        if self.duplicates > 0 {
            Scalar::zero()
        } else {
            self.gaps.keys().next().expect("nonempty").clone()
        }
    }

    pub fn max(&self) -> Scalar {
        self.gaps.keys().next_back().expect("nonempty").clone()
    }

    pub fn coincident(&self) -> bool {
        self.duplicates > 0
    }

    fn row(&self) -> PartitionRow {
        let js = Scalar::int(self.j as i64);
        let (min, max) = (self.min(), self.max());
        PartitionRow {
            j: self.j,
            min: min.to_f64(),
            max: max.to_f64(),
            j_min_product: (&js * &min).to_f64(),
            j_max_product: (&js * &max).to_f64(),
            condition: "global",
            i: None,
            k: None,
        }
    }
}

pub fn balance_scan(t: &Iet, j_max: usize, stride: Option<usize>) -> Result<BalanceScanReport> {
    balance_scan_with(
        t,
        &ScanOptions {
            j_max,
            stride,
            single: SingleScan::Spot,
        },
    )
}

/// Running suprema of `j max P_j` and `1/(j min P_j)` over both conditions.
pub fn balance_scan_with(t: &Iet, opts: &ScanOptions) -> Result<BalanceScanReport> {
    let j_max = opts.j_max.max(1);
    let split = j_max / 10;
    let samples = opts.samples();
    let mut rows = Vec::new();
    let (mut global, mut tail, mut head) = (
        BandStats::default(),
        BandStats::default(),
        BandStats::default(),
    );
    let mut first_coincidence = None;
    let mut refiner = GlobalRefiner::new(t);
    let mut next_sample = samples.iter().peekable();
    for j in 1..=j_max {
        refiner.advance()?;
        let row = refiner.row();
        if refiner.coincident() && first_coincidence.is_none() {
            first_coincidence = Some(j);
        }
        global.absorb(row.j_max_product, row.j_min_product);
        if j > split {
            tail.absorb(row.j_max_product, row.j_min_product);
        } else {
            head.absorb(row.j_max_product, row.j_min_product);
        }
        if next_sample.peek() == Some(&&j) {
            next_sample.next();
            rows.push(row);
        }
    }
    if opts.single != SingleScan::Skip {
        let r = t.r();
        let jobs: Vec<(usize, usize, usize)> = samples
            .iter()
            .flat_map(|&j| {
                let ks: Vec<usize> = match opts.single {
                    SingleScan::Full => (0..j).collect(),
                    _ => {
                        let mut v = vec![0, j / 2, j - 1];
                        v.dedup();
                        v
                    }
                };
                (0..r).flat_map(move |i| ks.clone().into_iter().map(move |k| (j, i, k)))
            })
            .collect();
        let reports: Vec<PartitionReport> = jobs
            .par_iter()
            .map(|&(j, i, k)| partition_single(t, i, k, j))
            .collect::<Result<Vec<_>>>()?;
        for rep in reports {
            let row = rep.row();
            global.absorb(row.j_max_product, row.j_min_product);
            if rep.j > split {
                tail.absorb(row.j_max_product, row.j_min_product);
            } else {
                head.absorb(row.j_max_product, row.j_min_product);
            }
            rows.push(row);
        }
    }
    Ok(BalanceScanReport {
        j_max,
        rows,
        c: global.c(),
        c_tail: tail.c(),
        global,
        tail,
        head,
        first_coincidence,
    })
}

/// The set `{n <= N : min P_n >= eps / n}`, stored as maximal runs.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyPReport {
    pub eps: Scalar,
    pub n_max: usize,
    pub runs: Vec<(usize, usize)>,
    pub count: usize,
    pub density: f64,
    pub first_failure: Option<usize>,
}

impl PropertyPReport {
    pub fn contains(&self, n: usize) -> bool {
        self.runs.iter().any(|&(a, b)| a <= n && n <= b)
    }
}

pub fn property_p_probe(t: &Iet, eps: &Scalar, n_max: usize) -> Result<PropertyPReport> {
    let mut refiner = GlobalRefiner::new(t);
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut count = 0;
    let mut first_failure = None;
    for n in 1..=n_max {
        refiner.advance()?;
        let ok = &refiner.min() * &Scalar::int(n as i64) >= *eps;
        if ok {
            count += 1;
            match runs.last_mut() {
                Some(last) if last.1 + 1 == n => last.1 = n,
                _ => runs.push((n, n)),
            }
        } else if first_failure.is_none() {
            first_failure = Some(n);
        }
    }
    Ok(PropertyPReport {
        eps: eps.clone(),
        n_max,
        runs,
        count,
        density: count as f64 / n_max.max(1) as f64,
        first_failure,
    })
}
