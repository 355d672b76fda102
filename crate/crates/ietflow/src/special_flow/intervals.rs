use serde::Serialize;

use crate::{Error, Iet, Result, Scalar};

/// A finite union of half-open intervals `[a, b)`, kept sorted and merged.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalUnion {
    parts: Vec<(Scalar, Scalar)>,
}

impl IntervalUnion {
    pub fn new(mut parts: Vec<(Scalar, Scalar)>) -> Result<Self> {
        for (a, b) in &parts {
            if a > b {
                return Err(Error::Invalid(format!("interval [{a}, {b}) is reversed")));
            }
        }
        parts.retain(|(a, b)| a < b);
        parts.sort_by(|x, y| x.0.cmp(&y.0));
        let mut merged: Vec<(Scalar, Scalar)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalUnion { parts: merged })
    }

    pub fn full(total: &Scalar) -> Self {
        IntervalUnion {
            parts: vec![(Scalar::zero(), total.clone())],
        }
    }

    pub fn parts(&self) -> &[(Scalar, Scalar)] {
        &self.parts
    }

    pub fn measure(&self) -> Scalar {
        self.parts.iter().map(|(a, b)| b - a).sum()
    }

    pub(crate) fn check_inside(&self, total: &Scalar) -> Result<()> {
        match (self.parts.first(), self.parts.last()) {
            (Some((a, _)), Some((_, b))) if a.is_negative() || b > total => {
                Err(Error::OutOfDomain(format!("[{a}, {b})")))
            }
            _ => Ok(()),
        }
    }

    /// Whether `[a, b)` meets the union in positive length.
    pub fn meets(&self, a: &Scalar, b: &Scalar) -> bool {
        self.parts.iter().any(|(c, d)| c < b && a < d)
    }

    pub fn intersection_measure(&self, other: &IntervalUnion) -> Scalar {
        let mut sum = Scalar::zero();
        let (mut i, mut k) = (0, 0);
        while i < self.parts.len() && k < other.parts.len() {
            let (a, b) = &self.parts[i];
            let (c, d) = &other.parts[k];
            let lo = a.clone().max(c.clone());
            let hi = b.clone().min(d.clone());
            if lo < hi {
                sum = &sum + &(&hi - &lo);
            }
            if b < d {
                i += 1;
            } else {
                k += 1;
            }
        }
        sum
    }

    /// `T^{-1}` of the union: each image interval is pulled back by its
    /// translation.
    pub fn preimage(&self, t: &Iet) -> IntervalUnion {
        let beta = t.discontinuities();
        let mut out = Vec::new();
        for pos in 0..t.r() {
            let s = t.shift(pos);
            let lo = &beta[pos] + s;
            let hi = &beta[pos + 1] + s;
            for (a, b) in &self.parts {
                let c = a.clone().max(lo.clone());
                let d = b.clone().min(hi.clone());
                if c < d {
                    out.push((&c - s, &d - s));
                }
            }
        }
        IntervalUnion::new(out).expect("pieces are ordered")
    }
}
