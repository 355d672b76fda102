use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ietflow::iet_core::reducibility_witness;
use ietflow::partitions::partition_global;
use ietflow::rauzy::{induce, rauzy_class, rauzy_step};
use ietflow::{Error, Iet, Scalar};

fn random_rational_iet(rng: &mut ChaCha8Rng, r: usize) -> Iet {
    loop {
        let pi0: Vec<usize> = (0..r).collect();
        let mut pi1 = pi0.clone();
        for i in (1..r).rev() {
            pi1.swap(i, rng.gen_range(0..=i));
        }
        if reducibility_witness(&pi0, &pi1).is_some() {
            continue;
        }
        let lambda = (0..r)
            .map(|_| Scalar::ratio(rng.gen_range(1..100_000), 99_991))
            .collect();
        return Iet::new(pi0, pi1, lambda).unwrap();
    }
}

/// First return to `[0, end)` by iterating single points.
fn return_point(t: &Iet, x: &Scalar, end: &Scalar) -> Scalar {
    let mut y = t.evaluate(x).unwrap();
    while &y >= end {
        y = t.evaluate(&y).unwrap();
    }
    y
}

#[test]
fn induced_maps_match_pointwise_returns() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for r in [3, 4, 5] {
        for _ in 0..10 {
            let t = random_rational_iet(&mut rng, r);
            let trace = match induce(&t, 5) {
                Ok(tr) => tr,
                Err(Error::EqualCriticalLengths { step }) if step > 0 => induce(&t, step).unwrap(),
                Err(e) => panic!("{e}"),
            };
            for k in 1..=trace.len() {
                let s = &trace.induced[k];
                for _ in 0..20 {
                    let x = s.total() * &Scalar::ratio(rng.gen_range(0..10_000), 10_000);
                    assert_eq!(s.evaluate(&x).unwrap(), return_point(&t, &x, s.total()));
                }
                // left ends of the induced intervals, where pieces switch
                for b in &s.discontinuities()[..s.r()] {
                    assert_eq!(s.evaluate(b).unwrap(), return_point(&t, b, s.total()));
                }
            }
        }
    }
}

#[test]
fn step_matrix_is_elementary_and_lengths_shrink() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..30 {
        let r = rng.gen_range(3..=5);
        let t = random_rational_iet(&mut rng, r);
        let Ok(s) = rauzy_step(&t) else { continue };
        assert_eq!(s.matrix.det(), 1);
        assert!(s.induced.total() < t.total());
        let back = s.matrix.transpose().mul_scalars(s.induced.lambda());
        assert_eq!(back.as_slice(), t.lambda());
    }
}

#[test]
fn identities_hold_along_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let t = random_rational_iet(&mut rng, 4);
        if let Ok(trace) = induce(&t, 8) {
            assert!(trace.verify_identities().ok());
        }
    }
    let golden = induce(&Iet::golden(), 30).unwrap();
    assert!(golden.verify_identities().ok());
}

/// Breadth-first closure under both moves, recomputed from the pairs alone.
fn class_by_bfs(pi0: &[usize], pi1: &[usize]) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    let r = pi0.len();
    let mut seen = BTreeSet::new();
    let mut queue = vec![(pi0.to_vec(), pi1.to_vec())];
    while let Some((p0, p1)) = queue.pop() {
        if !seen.insert((p0.clone(), p1.clone())) {
            continue;
        }
        // labels by position
        let top: Vec<usize> = (0..r)
            .map(|k| p0.iter().position(|&x| x == k).unwrap())
            .collect();
        let bot: Vec<usize> = (0..r)
            .map(|k| p1.iter().position(|&x| x == k).unwrap())
            .collect();
        let (win0, win1) = (top[r - 1], bot[r - 1]);
        // type 0: the last bottom label moves right after win0 in the bottom row
        let mut q1 = p1.clone();
        let at = p1[win0];
        for (a, v) in q1.iter_mut().enumerate() {
            if *v > at && *v < r - 1 {
                *v += 1;
            } else if a == win1 {
                *v = at + 1;
            }
        }
        queue.push((p0.clone(), q1));
        let mut q0 = p0.clone();
        let at = p0[win1];
        for (a, v) in q0.iter_mut().enumerate() {
            if *v > at && *v < r - 1 {
                *v += 1;
            } else if a == win0 {
                *v = at + 1;
            }
        }
        queue.push((q0, p1.clone()));
    }
    seen
}

#[test]
fn class_sizes() {
    // the symmetric pair on d letters has a class of 2^(d-1) - 1 pairs
    for (d, size) in [(2, 1), (3, 3), (4, 7), (5, 15), (6, 31)] {
        let pi0: Vec<usize> = (0..d).collect();
        let pi1: Vec<usize> = (0..d).rev().collect();
        let class = rauzy_class(&pi0, &pi1).unwrap();
        assert_eq!(class.len(), size, "d = {d}");
        let bfs = class_by_bfs(&pi0, &pi1);
        assert_eq!(bfs.len(), size);
        assert!(class.pairs.iter().all(|p| bfs.contains(p)));
    }
    let other = rauzy_class(&[0, 1, 2, 3], &[2, 3, 0, 1]).unwrap();
    let bfs = class_by_bfs(&[0, 1, 2, 3], &[2, 3, 0, 1]);
    assert_eq!(other.len(), bfs.len());
    assert!(other.pairs.iter().all(|p| bfs.contains(p)));
    let err = rauzy_class(&[0, 1, 2, 3], &[1, 0, 3, 2]).unwrap_err();
    assert_eq!(err, Error::ReduciblePair(2));
}

#[test]
fn three_gap_structure_of_the_golden_rotation() {
    for j in 1..300 {
        let rep = partition_global(&Iet::golden(), j).unwrap();
        let mut gaps: Vec<Scalar> = rep.points.windows(2).map(|w| &w[1] - &w[0]).collect();
        gaps.push(&Scalar::one() - rep.points.last().unwrap());
        let distinct: BTreeSet<Scalar> = gaps.into_iter().collect();
        assert!(
            distinct.len() <= 3,
            "j = {j}: {} gap lengths",
            distinct.len()
        );
        if distinct.len() == 3 {
            let v: Vec<&Scalar> = distinct.iter().collect();
            assert_eq!(&(v[0] + v[1]), v[2]);
        }
    }
}
