use serde::{Deserialize, Serialize};

use super::{Iet, Scalar};
use crate::{Error, Result};

/// Exchange of arcs on the circle `R / total Z`.
///
/// The domain arcs start at 0 in label order `0..m`. Their images are laid
/// out in the order `image_order`, starting at `offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleExchange {
    pub lengths: Vec<Scalar>,
    pub image_order: Vec<usize>,
    pub offset: Scalar,
}

impl CircleExchange {
    pub fn new(lengths: Vec<Scalar>, image_order: Vec<usize>, offset: Scalar) -> Result<Self> {
        let m = lengths.len();
        if m == 0 || image_order.len() != m {
            return Err(Error::InvalidPermutation(
                "arc data of mismatched size".into(),
            ));
        }
        let mut seen = vec![false; m];
        for &a in &image_order {
            if a >= m || seen[a] {
                return Err(Error::InvalidPermutation(
                    "image order is not a permutation".into(),
                ));
            }
            seen[a] = true;
        }
        if let Some(i) = lengths.iter().position(|l| !l.is_positive()) {
            return Err(Error::NonpositiveLength(i + 1));
        }
        let c = CircleExchange {
            lengths,
            image_order,
            offset,
        };
        let offset = c.offset.rem_euclid(&c.total());
        Ok(CircleExchange { offset, ..c })
    }

    /// Rotation by `alpha` of the circle of length `total`, one arc.
    pub fn rotation(total: Scalar, alpha: Scalar) -> Result<Self> {
        Self::new(vec![total], vec![0], alpha)
    }

    pub fn total(&self) -> Scalar {
        self.lengths.iter().sum()
    }

    /// Left endpoints of the domain arcs.
    pub fn breakpoints(&self) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.lengths.len());
        let mut acc = Scalar::zero();
        for l in &self.lengths {
            out.push(acc.clone());
            acc = &acc + l;
        }
        out
    }

    fn image_starts(&self) -> Vec<Scalar> {
        let total = self.total();
        let mut starts = vec![Scalar::zero(); self.lengths.len()];
        let mut acc = self.offset.clone();
        for &a in &self.image_order {
            starts[a] = acc.rem_euclid(&total);
            acc = &acc + &self.lengths[a];
        }
        starts
    }

    pub fn evaluate(&self, x: &Scalar) -> Scalar {
        let total = self.total();
        let x = x.rem_euclid(&total);
        let bp = self.breakpoints();
        let a = bp.iter().rposition(|b| b <= &x).expect("0 is a breakpoint");
        let img = self.image_starts();
        (&img[a] + &(&x - &bp[a])).rem_euclid(&total)
    }

    pub fn preimage(&self, y: &Scalar) -> Scalar {
        let total = self.total();
        let y = y.rem_euclid(&total);
        let bp = self.breakpoints();
        let img = self.image_starts();
        for (a, start) in img.iter().enumerate() {
            let off = (&y - start).rem_euclid(&total);
            if off < self.lengths[a] {
                return &bp[a] + &off;
            }
        }
        unreachable!("image arcs cover the circle")
    }
}

/// Identifies the endpoints of `[0, total)`.
pub fn interval_to_circle(t: &Iet) -> CircleExchange {
    let lengths = t.top().iter().map(|&a| t.lambda()[a].clone()).collect();
    // arc k of the circle is the interval at position k
    let image_order = t.bottom().iter().map(|&a| t.pi0()[a]).collect();
    CircleExchange {
        lengths,
        image_order,
        offset: Scalar::zero(),
    }
}

/// Opens the circle at the left endpoint of arc `cut`.
///
/// The resulting exchange on `[0, total)` has the breakpoints of the circle
/// map (shifted) plus the preimage of the cut point; pieces on which the map
/// is a single translation are merged.
pub fn circle_to_interval(c: &CircleExchange, cut: usize) -> Result<Iet> {
    let bp = c.breakpoints();
    if cut >= bp.len() {
        return Err(Error::CutNotADiscontinuity(cut));
    }
    let total = c.total();
    let origin = bp[cut].clone();
    let mut points: Vec<Scalar> = bp
        .iter()
        .map(|b| (b - &origin).rem_euclid(&total))
        .collect();
    points.push((&c.preimage(&origin) - &origin).rem_euclid(&total));
    points.sort();
    points.dedup();
    let image = |y: &Scalar| (&c.evaluate(&(y + &origin)) - &origin).rem_euclid(&total);
    // (start, length, translation) of each maximal translation piece
    let mut pieces: Vec<(Scalar, Scalar, Scalar)> = Vec::new();
    for (k, start) in points.iter().enumerate() {
        let end = points.get(k + 1).cloned().unwrap_or_else(|| total.clone());
        let tr = &image(start) - start;
        match pieces.last_mut() {
            Some(last) if last.2 == tr => last.1 = &last.1 + &(&end - start),
            _ => pieces.push((start.clone(), &end - start, tr)),
        }
    }
    let r = pieces.len();
    let mut by_image: Vec<usize> = (0..r).collect();
    by_image.sort_by(|&a, &b| (&pieces[a].0 + &pieces[a].2).cmp(&(&pieces[b].0 + &pieces[b].2)));
    let mut pi1 = vec![0; r];
    for (pos, &a) in by_image.iter().enumerate() {
        pi1[a] = pos;
    }
    let lambda = pieces.into_iter().map(|p| p.1).collect();
    Iet::new((0..r).collect(), pi1, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    #[test]
    fn one_arc_rotation() {
        let c = CircleExchange::rotation(Scalar::one(), Scalar::golden()).unwrap();
        let t = circle_to_interval(&c, 0).unwrap();
        assert_eq!(t, Iet::golden());
    }

    #[test]
    fn three_arcs_give_four_intervals() {
        let c =
            CircleExchange::new(vec![q(1, 5), q(3, 10), q(1, 2)], vec![1, 0, 2], q(1, 7)).unwrap();
        let t = circle_to_interval(&c, 0).unwrap();
        assert_eq!(t.r(), 4);
        let pre = c.preimage(&Scalar::zero());
        assert!(t.discontinuities().contains(&pre));
        for k in 0..40 {
            let x = q(k, 40);
            assert_eq!(t.evaluate(&x).unwrap(), c.evaluate(&x));
        }
    }

    #[test]
    fn round_trip_pointwise() {
        let t =
            Iet::from_one_line(&[1, 2, 3], &[3, 2, 1], vec![q(1, 3), q(1, 5), q(7, 15)]).unwrap();
        let back = circle_to_interval(&interval_to_circle(&t), 0).unwrap();
        for k in 0..60 {
            let x = q(k, 60);
            assert_eq!(t.evaluate(&x).unwrap(), back.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn bad_cut() {
        let c = CircleExchange::rotation(Scalar::one(), q(1, 3)).unwrap();
        assert_eq!(
            circle_to_interval(&c, 1).unwrap_err(),
            Error::CutNotADiscontinuity(1)
        );
    }
}
