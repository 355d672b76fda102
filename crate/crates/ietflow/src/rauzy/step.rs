use serde::{Deserialize, Serialize};

use super::IntMatrix;
use crate::{Error, Iet, Result, Scalar};

/// Which of the two rightmost intervals is longer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepType {
    /// The last interval before the exchange is the longer one (type 0).
    Top,
    /// The last interval after the exchange is the longer one (type 1).
    Bottom,
}

impl StepType {
    pub fn code(self) -> u8 {
        match self {
            StepType::Top => 0,
            StepType::Bottom => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(StepType::Top),
            1 => Some(StepType::Bottom),
            _ => None,
        }
    }
}

/// One piece of a first-return map: `[start, start + len)` is translated by
/// `shift` after visiting the original intervals listed in `itinerary`.
#[derive(Clone, Debug)]
pub struct ReturnPiece {
    pub start: Scalar,
    pub len: Scalar,
    pub shift: Scalar,
    pub itinerary: Vec<usize>,
}

/// First-return map of `t` to `[0, end)`, computed by pushing intervals
/// forward until every piece has come back.
pub fn first_return_pieces(t: &Iet, end: &Scalar) -> Vec<ReturnPiece> {
    let beta = t.discontinuities();
    let r = t.r();
    // (domain start, domain end, current image start, itinerary)
    let mut work: Vec<(Scalar, Scalar, Scalar, Vec<usize>)> = Vec::new();
    for pos in 0..r {
        if &beta[pos] >= end {
            break;
        }
        let hi = if &beta[pos + 1] < end {
            beta[pos + 1].clone()
        } else {
            end.clone()
        };
        work.push((beta[pos].clone(), hi, beta[pos].clone(), Vec::new()));
    }
    let mut done = Vec::new();
    while let Some((a, b, u, path)) = work.pop() {
        let len = &b - &a;
        let v = &u + &len;
        // split the current image at the discontinuities of t
        let mut cuts = vec![u.clone()];
        cuts.extend(beta[1..r].iter().filter(|p| *p > &u && *p < &v).cloned());
        cuts.push(v.clone());
        for w in cuts.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let pos = t.locate(lo).expect("inside the domain");
            let label = t.top()[pos];
            let da = &a + &(lo - &u);
            let db = &a + &(hi - &u);
            let img_lo = lo + t.shift(pos);
            let img_hi = hi + t.shift(pos);
            let mut path = path.clone();
            path.push(label);
            if &img_hi <= end {
                done.push(ReturnPiece {
                    shift: &img_lo - &da,
                    len: &db - &da,
                    start: da,
                    itinerary: path,
                });
            } else if &img_lo >= end {
                work.push((da, db, img_lo, path));
            } else {
                // the image straddles the end of the target interval
                let split = &da + &(end - &img_lo);
                done.push(ReturnPiece {
                    shift: &img_lo - &da,
                    len: &split - &da,
                    start: da,
                    itinerary: path.clone(),
                });
                work.push((split, db, end.clone(), path));
            }
        }
    }
    done.sort_by(|x, y| x.start.cmp(&y.start));
    // merge neighbours that move together along the same path
    let mut merged: Vec<ReturnPiece> = Vec::new();
    for p in done {
        match merged.last_mut() {
            Some(last) if last.shift == p.shift && last.itinerary == p.itinerary => {
                last.len = &last.len + &p.len;
            }
            _ => merged.push(p),
        }
    }
    merged
}

/// Labels induced pieces so that every piece keeps a label it visits.
fn assign_labels(pieces: &[ReturnPiece], r: usize) -> Option<Vec<usize>> {
    fn search(k: usize, pieces: &[ReturnPiece], used: &mut [bool], out: &mut Vec<usize>) -> bool {
        if k == pieces.len() {
            return true;
        }
        let mut cands: Vec<usize> = pieces[k].itinerary.clone();
        cands.sort_unstable();
        cands.dedup();
        for c in cands {
            if !used[c] {
                used[c] = true;
                out.push(c);
                if search(k + 1, pieces, used, out) {
                    return true;
                }
                out.pop();
                used[c] = false;
            }
        }
        false
    }
    if pieces.len() != r {
        return None;
    }
    // single-visit pieces first so they claim their own label
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by_key(|&k| pieces[k].itinerary.len());
    let sorted: Vec<ReturnPiece> = order.iter().map(|&k| pieces[k].clone()).collect();
    let mut used = vec![false; r];
    let mut labels = Vec::new();
    if !search(0, &sorted, &mut used, &mut labels) {
        return None;
    }
    let mut out = vec![0; r];
    for (slot, &k) in order.iter().enumerate() {
        out[k] = labels[slot];
    }
    Some(out)
}

/// Outcome of one induction step.
#[derive(Clone, Debug)]
pub struct StepResult {
    pub induced: Iet,
    pub matrix: IntMatrix,
    pub step_type: StepType,
    /// `(row, col)` of the off-diagonal 1 in `I + E_{row,col}`, 0-based labels.
    pub elementary: (usize, usize),
    /// Return time of each induced label to the induced interval.
    pub return_times: Vec<usize>,
}

/// One Rauzy-Veech step, with the induced map obtained from the first-return
/// map. The visit-count matrix of the return is compared against the
/// elementary matrix of the step.
pub fn rauzy_step(t: &Iet) -> Result<StepResult> {
    rauzy_step_at(t, 0)
}

pub(crate) fn rauzy_step_at(t: &Iet, step_index: usize) -> Result<StepResult> {
    let r = t.r();
    let j0 = t.top()[r - 1];
    let j1 = t.bottom()[r - 1];
    let (l0, l1) = (&t.lambda()[j0], &t.lambda()[j1]);
    let (step_type, elementary, cut) = match l0.cmp(l1) {
        std::cmp::Ordering::Equal => return Err(Error::EqualCriticalLengths { step: step_index }),
        std::cmp::Ordering::Less => (StepType::Bottom, (j0, j1), l0),
        std::cmp::Ordering::Greater => (StepType::Top, (j1, j0), l1),
    };
    let end = t.total() - cut;
    let pieces = first_return_pieces(t, &end);
    let labels = assign_labels(&pieces, r).ok_or_else(|| {
        Error::Invalid(format!(
            "first-return map has {} pieces, expected {r}",
            pieces.len()
        ))
    })?;
    let mut matrix = IntMatrix::zeros(r);
    let mut lambda = vec![Scalar::zero(); r];
    let mut return_times = vec![0; r];
    let mut pi0 = vec![0; r];
    for (k, p) in pieces.iter().enumerate() {
        let a = labels[k];
        pi0[a] = k;
        lambda[a] = p.len.clone();
        return_times[a] = p.itinerary.len();
        for &b in &p.itinerary {
            let v = matrix.get(a, b).clone() + 1;
            matrix.set(a, b, v);
        }
    }
    let expected = IntMatrix::elementary(r, elementary.0, elementary.1);
    if matrix != expected {
        return Err(Error::Invalid(format!(
            "visit matrix {matrix} differs from the elementary matrix {expected}"
        )));
    }
    let mut by_image: Vec<usize> = (0..r).collect();
    by_image.sort_by(|&x, &y| {
        let ix = &pieces[x].start + &pieces[x].shift;
        let iy = &pieces[y].start + &pieces[y].shift;
        ix.cmp(&iy)
    });
    let mut pi1 = vec![0; r];
    for (pos, &k) in by_image.iter().enumerate() {
        pi1[labels[k]] = pos;
    }
    let induced = Iet::new(pi0, pi1, lambda)?;
    Ok(StepResult {
        induced,
        matrix,
        step_type,
        elementary,
        return_times,
    })
}

/// Lengths used to push a pair through a step of a prescribed type.
///
/// Entries `1 + 2^-(a+1)` admit no vanishing combination with coefficients in
/// {-1, 0, 1}, so the first-return computation sees no accidental coincidence.
pub fn generic_lengths(pi0: &[usize], pi1: &[usize], step: StepType) -> Vec<Scalar> {
    let r = pi0.len();
    let mut lambda: Vec<Scalar> = (0..r)
        .map(|a| &Scalar::one() + &Scalar::ratio(1, 1i64 << (a + 1)))
        .collect();
    let j0 = pi0.iter().position(|&p| p == r - 1).expect("permutation");
    let j1 = pi1.iter().position(|&p| p == r - 1).expect("permutation");
    let boost = Scalar::int(4 * r as i64);
    match step {
        StepType::Top => lambda[j0] = &lambda[j0] + &boost,
        StepType::Bottom => lambda[j1] = &lambda[j1] + &boost,
    }
    lambda
}

/// Successor pair and elementary matrix for a forced step type.
pub fn combinatorial_step(
    pi0: &[usize],
    pi1: &[usize],
    step: StepType,
) -> Result<(Vec<usize>, Vec<usize>, IntMatrix)> {
    let t = Iet::new(pi0.to_vec(), pi1.to_vec(), generic_lengths(pi0, pi1, step))?;
    let s = rauzy_step(&t)?;
    debug_assert_eq!(s.step_type, step);
    Ok((s.induced.pi0().to_vec(), s.induced.pi1().to_vec(), s.matrix))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_step() {
        let t = Iet::golden();
        let s = rauzy_step(&t).unwrap();
        let a = Scalar::golden();
        assert_eq!(s.induced.lambda(), &[&a * &a, a.pow_u(3)]);
        assert_eq!(s.induced.total(), &a);
        assert_eq!(s.matrix, IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]));
        assert_eq!(s.step_type, StepType::Top);
        assert_eq!(s.return_times, vec![2, 1]);
    }

    #[test]
    fn equal_lengths_rejected() {
        let t = Iet::rotation(Scalar::ratio(1, 2), Scalar::ratio(1, 2)).unwrap();
        assert_eq!(
            rauzy_step(&t).unwrap_err(),
            Error::EqualCriticalLengths { step: 0 }
        );
    }

    #[test]
    fn bottom_step_on_three_intervals() {
        let t = Iet::from_one_line(
            &[1, 2, 3],
            &[3, 2, 1],
            vec![
                Scalar::ratio(1, 2),
                Scalar::ratio(3, 10),
                Scalar::ratio(1, 5),
            ],
        )
        .unwrap();
        // j0 = label 3 (1/5), j1 = label 1 (1/2): bottom wins
        let s = rauzy_step(&t).unwrap();
        assert_eq!(s.step_type, StepType::Bottom);
        assert_eq!(s.elementary, (2, 0));
        assert_eq!(s.induced.total(), &Scalar::ratio(4, 5));
    }

    #[test]
    fn swap_pair_is_fixed_by_both_moves() {
        for st in [StepType::Top, StepType::Bottom] {
            let (p0, p1, _) = combinatorial_step(&[0, 1], &[1, 0], st).unwrap();
            assert_eq!((p0, p1), (vec![0, 1], vec![1, 0]));
        }
    }
}
