use serde::Serialize;

use crate::{Iet, Result, Scalar};

/// A point of the form `T^n beta_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PointId {
    pub l: usize,
    pub n: i64,
}

/// Orbits `T^n beta_l` for all discontinuities `l` and `lo <= n <= hi`.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    lo: i64,
    hi: i64,
    points: Vec<Vec<Scalar>>,
    positions: Vec<Vec<usize>>,
    /// Index of the discontinuity sent to 0.
    to_zero: usize,
}

impl OrbitTable {
    pub fn new(t: &Iet, lo: i64, hi: i64) -> Result<Self> {
        assert!(lo <= 0 && hi >= 0, "range must contain 0");
        let inv = t.inverse();
        let r = t.r();
        let mut points = Vec::with_capacity(r);
        let mut positions = Vec::with_capacity(r);
        for b in &t.discontinuities()[..r] {
            let mut back = vec![b.clone()];
            for _ in 0..(-lo) {
                let next = inv.evaluate(back.last().expect("nonempty"))?;
                back.push(next);
            }
            back.reverse();
            let mut row = back;
            for _ in 0..hi {
                let next = t.evaluate(row.last().expect("nonempty"))?;
                row.push(next);
            }
            let pos = row
                .iter()
                .map(|x| t.locate(x))
                .collect::<Result<Vec<_>>>()?;
            points.push(row);
            positions.push(pos);
        }
        let to_zero = t.pi0()[t.bottom()[0]];
        Ok(OrbitTable {
            lo,
            hi,
            points,
            positions,
            to_zero,
        })
    }

    pub fn range(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, id: PointId) -> bool {
        id.l < self.points.len() && id.n >= self.lo && id.n <= self.hi
    }

    pub fn point(&self, id: PointId) -> &Scalar {
        &self.points[id.l][(id.n - self.lo) as usize]
    }

    /// Position of the base interval containing the point.
    pub fn position(&self, id: PointId) -> usize {
        self.positions[id.l][(id.n - self.lo) as usize]
    }

    /// `0 = T beta_{i0}`, so the origin has the name `(i0, 1)`.
    pub fn origin(&self) -> PointId {
        PointId {
            l: self.to_zero,
            n: 1,
        }
    }

    /// The discontinuity mapped to 0.
    pub fn to_zero(&self) -> usize {
        self.to_zero
    }

    /// `T^k` of the named point.
    pub fn forward(&self, id: PointId, k: i64) -> PointId {
        PointId {
            l: id.l,
            n: id.n + k,
        }
    }
}
