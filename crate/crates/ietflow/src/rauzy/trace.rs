use std::collections::BTreeSet;

use rug::{Integer, Rational};
use serde::Serialize;

use super::matrix::ints_json;
use super::step::rauzy_step_at;
use super::{IntMatrix, StepType};
use crate::{Error, Iet, Result, Scalar};

/// One recorded induction step.
#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub step_type: StepType,
    /// `(row, col)` of `I + E_{row,col}`, 1-based labels.
    pub elementary: (usize, usize),
    pub pi0: Vec<usize>,
    pub pi1: Vec<usize>,
}

/// History of `n` Rauzy-Veech steps.
///
/// Index `k` of every per-step vector refers to the state after `k` steps,
/// so index 0 is the original exchange.
#[derive(Clone, Debug)]
pub struct RauzyTrace {
    pub base: Iet,
    pub steps: Vec<TraceStep>,
    /// Induced exchanges `R^k T`.
    pub induced: Vec<Iet>,
    /// `A^{(k)} = A(R^{k-1}T) ... A(T)`.
    pub accumulated: Vec<IntMatrix>,
    /// Elementary factors `A(R^k T)`.
    pub factors: Vec<IntMatrix>,
    /// Tower heights `h^{(k)} = A^{(k)} (1, ..., 1)`.
    pub heights: Vec<Vec<Integer>>,
}

impl RauzyTrace {
    pub fn start(base: Iet) -> Self {
        let r = base.r();
        RauzyTrace {
            induced: vec![base.clone()],
            base,
            steps: Vec::new(),
            accumulated: vec![IntMatrix::identity(r)],
            factors: Vec::new(),
            heights: vec![vec![Integer::from(1); r]],
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &Iet {
        self.induced.last().expect("trace holds the base")
    }

    /// New trace with `more` additional steps.
    pub fn extended(&self, more: usize) -> Result<RauzyTrace> {
        let mut t = self.clone();
        t.extend_in_place(more)?;
        Ok(t)
    }

    pub(crate) fn extend_in_place(&mut self, more: usize) -> Result<()> {
        for _ in 0..more {
            let n = self.steps.len();
            let s = rauzy_step_at(self.last(), n)?;
            let acc = s.matrix.mul(self.accumulated.last().expect("nonempty"));
            self.heights.push(acc.row_sums());
            self.accumulated.push(acc);
            self.factors.push(s.matrix.clone());
            self.steps.push(TraceStep {
                step_type: s.step_type,
                elementary: (s.elementary.0 + 1, s.elementary.1 + 1),
                pi0: s.induced.pi0_one_line(),
                pi1: s.induced.pi1_one_line(),
            });
            self.induced.push(s.induced);
        }
        Ok(())
    }

    /// Lengths after `k` steps.
    pub fn lengths(&self, k: usize) -> &[Scalar] {
        self.induced[k].lambda()
    }

    /// Right end of the induced interval `I^{(k)}`.
    pub fn interval_end(&self, k: usize) -> &Scalar {
        self.induced[k].total()
    }

    /// `h^{(k)} = A^{(k)} 1` and `lambda^{(0)} = (A^{(k)})^T lambda^{(k)}` for
    /// every recorded `k`, plus `((A^{(k)})^T)^{-1} lambda^{(0)} = lambda^{(k)}`
    /// through an explicit rational inverse when all lengths are exact.
    pub fn verify_identities(&self) -> IdentityReport {
        let mut report = IdentityReport::default();
        let lambda0 = self.base.lambda();
        for k in 0..self.induced.len() {
            let a = &self.accumulated[k];
            if a.row_sums() != self.heights[k] {
                report.height_failures.push(k);
            }
            let back = a.transpose().mul_scalars(self.lengths(k));
            if back.as_slice() != lambda0 {
                report.length_failures.push(k);
            }
            let det = a.det();
            if det != 1 && det != -1 {
                report.det_failures.push(k);
            }
            if lambda0.iter().all(Scalar::is_exact) {
                let inv = a.transpose().inverse_rational().expect("unimodular");
                let forward: Vec<Scalar> = inv
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(lambda0)
                            .map(|(c, l)| &Scalar::rational(c.clone()) * l)
                            .sum()
                    })
                    .collect();
                if forward.as_slice() != self.lengths(k) {
                    report.inverse_failures.push(k);
                }
            }
        }
        report
    }

    /// Direct return times of the left end of each induced interval to
    /// `I^{(k)}` under the original map.
    pub fn direct_return_times(&self, k: usize) -> Result<Vec<Integer>> {
        let ind = &self.induced[k];
        let end = ind.total();
        let beta = ind.discontinuities();
        let mut out = vec![Integer::new(); ind.r()];
        for (pos, &a) in ind.top().iter().enumerate() {
            let mut x = self.base.evaluate(&beta[pos])?;
            let mut n = 1u64;
            while &x >= end {
                x = self.base.evaluate(&x)?;
                n += 1;
            }
            out[a] = Integer::from(n);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let states: Vec<serde_json::Value> = (0..self.induced.len())
            .map(|k| {
                serde_json::json!({
                    "n": k,
                    "pi0": self.induced[k].pi0_one_line(),
                    "pi1": self.induced[k].pi1_one_line(),
                    "lengths": self.lengths(k),
                    "heights": ints_json(&self.heights[k]),
                    "interval_end": self.interval_end(k),
                    "accumulated": self.accumulated[k],
                })
            })
            .collect();
        serde_json::json!({
            "base": self.base,
            "steps": self.steps,
            "factors": self.factors,
            "states": states,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub height_failures: Vec<usize>,
    pub length_failures: Vec<usize>,
    pub inverse_failures: Vec<usize>,
    pub det_failures: Vec<usize>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.height_failures.is_empty()
            && self.length_failures.is_empty()
            && self.inverse_failures.is_empty()
            && self.det_failures.is_empty()
    }
}

/// `n` induction steps with both cocycle identities checked.
pub fn induce(t: &Iet, n: usize) -> Result<RauzyTrace> {
    let mut trace = RauzyTrace::start(t.clone());
    trace.extend_in_place(n)?;
    let rep = trace.verify_identities();
    if !rep.ok() {
        return Err(Error::Invalid(format!("cocycle identities fail: {rep:?}")));
    }
    Ok(trace)
}

/// A tower over one induced interval.
#[derive(Clone, Debug, Serialize)]
pub struct Tower {
    pub label: usize,
    pub base_start: Scalar,
    pub width: Scalar,
    #[serde(serialize_with = "ser_int")]
    pub height: Integer,
    /// Left ends of `T^k I_label` for `0 <= k < height`.
    pub floors: Vec<Scalar>,
}

fn ser_int<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

/// Tower decomposition of `[0, total)` after `n` steps, with its partition
/// points (floor ends plus any cuts).
#[derive(Clone, Debug, Serialize)]
pub struct TowerSet {
    pub n: usize,
    pub induced_end: Scalar,
    pub total: Scalar,
    pub towers: Vec<Tower>,
    pub points: BTreeSet<Scalar>,
    #[serde(skip)]
    base: Iet,
}

pub fn towers(t: &Iet, n: usize) -> Result<TowerSet> {
    let trace = induce(t, n)?;
    towers_from_trace(&trace, n)
}

pub fn towers_from_trace(trace: &RauzyTrace, n: usize) -> Result<TowerSet> {
    let ind = &trace.induced[n];
    let beta = ind.discontinuities();
    let mut out = Vec::with_capacity(ind.r());
    for (pos, &a) in ind.top().iter().enumerate() {
        let h = trace.heights[n][a].clone();
        let steps = h
            .to_usize()
            .ok_or_else(|| Error::Invalid("tower too tall".into()))?;
        let floors = trace.base.orbit(&beta[pos], steps as i64)?;
        out.push(Tower {
            label: a + 1,
            base_start: beta[pos].clone(),
            width: ind.lambda()[a].clone(),
            height: h,
            floors,
        });
    }
    let mut points = BTreeSet::new();
    for tw in &out {
        for f in &tw.floors {
            points.insert(f.clone());
            points.insert(f + &tw.width);
        }
    }
    Ok(TowerSet {
        n,
        induced_end: ind.total().clone(),
        total: trace.base.total().clone(),
        towers: out,
        points,
        base: trace.base.clone(),
    })
}

impl TowerSet {
    /// All floors as `(start, end)`, sorted.
    pub fn floors(&self) -> Vec<(Scalar, Scalar)> {
        let mut v: Vec<(Scalar, Scalar)> = self
            .towers
            .iter()
            .flat_map(|tw| tw.floors.iter().map(move |f| (f.clone(), f + &tw.width)))
            .collect();
        v.sort();
        v
    }

    /// Floors are pairwise disjoint and tile `[0, total)` exactly.
    pub fn tiles(&self) -> bool {
        let floors = self.floors();
        let mut at = Scalar::zero();
        for (s, e) in &floors {
            if s != &at {
                return false;
            }
            at = e.clone();
        }
        at == self.total
    }

    /// Refines the floor partition by the first `h` iterates of `x`, where `h`
    /// is the height of the tower whose base contains `x`.
    pub fn cut(&self, x: &Scalar) -> Result<TowerSet> {
        if x.is_negative() || x >= &self.induced_end {
            return Err(Error::OutOfInducedInterval(x.to_string()));
        }
        let tw = self
            .towers
            .iter()
            .find(|tw| &tw.base_start <= x && x < &(&tw.base_start + &tw.width))
            .expect("bases cover the induced interval");
        let h = tw.height.to_usize().expect("checked when built");
        let mut out = self.clone();
        for p in self.base.orbit(x, h as i64)? {
            out.points.insert(p);
        }
        Ok(out)
    }

    pub fn total_floor_length(&self) -> Scalar {
        self.towers
            .iter()
            .map(|tw| &tw.width * &Scalar::rational(Rational::from(&tw.height)))
            .sum()
    }
}

/// Cuts a tower set; see [`TowerSet::cut`].
pub fn cut_tower(ts: &TowerSet, x: &Scalar) -> Result<TowerSet> {
    ts.cut(x)
}
