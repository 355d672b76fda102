use std::cmp::Ordering;

use rug::{Float, Integer, Rational};
use serde::Serialize;

use super::class::Pair;
use super::step::combinatorial_step;
use super::trace::RauzyTrace;
use super::{IntMatrix, StepType};
use crate::{Error, Iet, Result, Scalar};

/// `max_{i,j,l} B_ij / B_lj`, exactly.
pub fn nu_bar(b: &IntMatrix) -> Result<Scalar> {
    let n = b.size();
    for i in 0..n {
        for j in 0..n {
            if b.get(i, j).cmp0() != Ordering::Greater {
                return Err(Error::NonpositiveEntry(i + 1, j + 1));
            }
        }
    }
    let mut best = Rational::from(1);
    for j in 0..n {
        let col: Vec<&Integer> = (0..n).map(|i| b.get(i, j)).collect();
        let hi = col.iter().max().expect("n >= 1");
        let lo = col.iter().min().expect("n >= 1");
        let ratio = Rational::from(((*hi).clone(), (*lo).clone()));
        if ratio > best {
            best = ratio;
        }
    }
    Ok(Scalar::rational(best))
}

/// Result of checking `1/nu <= h_i/h_j <= nu` on a list of height vectors.
#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub nu_bar: Scalar,
    pub checked_steps: Vec<usize>,
    /// `(step, i, j)` with `h_i > nu * h_j`, 1-based labels.
    pub violations: Vec<(usize, usize, usize)>,
    /// Largest observed `h_i / h_j`.
    pub max_ratio: Scalar,
}

impl BalanceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact balance check on arbitrary `(step, heights)` samples.
pub fn balance_check_heights(nu: &Scalar, samples: &[(usize, Vec<Integer>)]) -> BalanceReport {
    let mut violations = Vec::new();
    let mut max_ratio = Rational::from(1);
    let nu_q = nu.as_rational().cloned().expect("nu_bar is rational");
    for (step, h) in samples {
        for (i, hi) in h.iter().enumerate() {
            for (j, hj) in h.iter().enumerate() {
                let ratio = Rational::from((hi.clone(), hj.clone()));
                if ratio > nu_q {
                    violations.push((*step, i + 1, j + 1));
                }
                if ratio > max_ratio {
                    max_ratio = ratio;
                }
            }
        }
    }
    BalanceReport {
        nu_bar: nu.clone(),
        checked_steps: samples.iter().map(|s| s.0).collect(),
        violations,
        max_ratio: Scalar::rational(max_ratio),
    }
}

/// Checks the balance inequality after every full period recorded in `trace`.
pub fn balance_check(trace: &RauzyTrace, b: &IntMatrix, period: usize) -> Result<BalanceReport> {
    if period == 0 || trace.len() < period {
        return Err(Error::Invalid("trace shorter than one period".into()));
    }
    let nu = nu_bar(b)?;
    let samples: Vec<(usize, Vec<Integer>)> = (1..=trace.len() / period)
        .map(|k| (k * period, trace.heights[k * period].clone()))
        .collect();
    Ok(balance_check_heights(&nu, &samples))
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicTypeReport {
    /// Smallest `p` at which the pair returns with parallel lengths.
    pub combinatorial_period: usize,
    /// Smallest multiple of `combinatorial_period` with a positive matrix.
    pub period: usize,
    pub matrix: IntMatrix,
    pub nu_bar: Scalar,
    /// `theta` with `lambda^{(0)} = theta lambda^{(period)}`.
    pub perron_eigenvalue: Scalar,
    /// `lambda^{(0)}` normalised to total 1.
    pub eigenvector: Vec<Scalar>,
    /// `|lambda^{(period)}| / |lambda^{(0)}| = 1/theta`.
    pub contraction: Scalar,
    pub step_types: Vec<u8>,
}

fn parallel(a: &[Scalar], b: &[Scalar], tol: &Scalar) -> bool {
    if a.iter().chain(b).all(Scalar::is_exact) {
        return (1..a.len()).all(|i| &a[i] * &b[0] == &a[0] * &b[i]);
    }
    let sa: Scalar = a.iter().sum();
    let sb: Scalar = b.iter().sum();
    a.iter()
        .zip(b)
        .all(|(x, y)| (&(x / &sa) - &(y / &sb)).abs() <= *tol)
}

/// Smallest period of the induction sequence of `t` within `p_max` steps.
pub fn detect_periodic(t: &Iet, p_max: usize, tol: &Scalar) -> Result<PeriodicTypeReport> {
    let mut trace = RauzyTrace::start(t.clone());
    let lambda0 = t.lambda().to_vec();
    for p in 1..=p_max {
        match trace.extend_in_place(1) {
            Ok(()) => {}
            Err(Error::EqualCriticalLengths { .. }) => return Err(Error::NotDetected(p_max)),
            Err(e) => return Err(e),
        }
        if !trace.induced[p].same_pair(t) || !parallel(trace.lengths(p), &lambda0, tol) {
            continue;
        }
        let Some(k) = trace.accumulated[p].primitivity_exponent() else {
            continue;
        };
        let period = k as usize * p;
        if trace.len() < period {
            trace.extend_in_place(period - trace.len())?;
        }
        return Ok(report_for(&trace, p, period));
    }
    Err(Error::NotDetected(p_max))
}

fn report_for(trace: &RauzyTrace, comb: usize, period: usize) -> PeriodicTypeReport {
    let b = trace.accumulated[period].clone();
    let lambda0 = trace.base.lambda();
    let total0 = trace.base.total();
    let lp = trace.lengths(period);
    let theta = &lambda0[0] / &lp[0];
    PeriodicTypeReport {
        combinatorial_period: comb,
        period,
        nu_bar: nu_bar(&b).expect("positive"),
        matrix: b,
        contraction: trace.induced[period].total() / total0,
        perron_eigenvalue: theta,
        eigenvector: lambda0.iter().map(|l| l / total0).collect(),
        step_types: trace.steps[..period]
            .iter()
            .map(|s| s.step_type.code())
            .collect(),
    }
}

/// Characteristic polynomial `det(x I - m)`, ascending coefficients.
pub fn characteristic_polynomial(m: &IntMatrix) -> Vec<Integer> {
    let n = m.size();
    let a: Vec<Vec<Rational>> = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(Rational::from).collect())
        .collect();
    let mut coeffs = vec![Rational::new(); n + 1];
    coeffs[n] = Rational::from(1);
    let mut mk = vec![vec![Rational::new(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Rational::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::new();
                for l in 0..n {
                    s += Rational::from(&a[i][l] * &mk[l][j]);
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = Rational::new();
        for i in 0..n {
            for l in 0..n {
                tr += Rational::from(&a[i][l] * &mk[l][i]);
            }
        }
        coeffs[n - k] = -tr / k as u32;
    }
    coeffs
        .into_iter()
        .map(|c| {
            let (num, den) = c.into_numer_denom();
            debug_assert_eq!(den, 1);
            num
        })
        .collect()
}

fn poly_eval(p: &[Integer], x: i64) -> Integer {
    let mut acc = Integer::new();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Divides by `(x - root)`; the remainder must vanish.
fn deflate(p: &[Integer], root: i64) -> Vec<Integer> {
    let n = p.len() - 1;
    let mut out = vec![Integer::new(); n];
    let mut carry = Integer::new();
    for k in (0..n).rev() {
        carry = carry * root + &p[k + 1];
        out[k] = carry.clone();
    }
    out
}

/// Exact Perron root `theta > 1` when the characteristic polynomial is a
/// product of `(x - 1)`, `(x + 1)` factors and one quadratic.
fn quadratic_perron_root(b: &IntMatrix) -> Option<Scalar> {
    let mut p = characteristic_polynomial(b);
    loop {
        if p.len() > 1 && poly_eval(&p, 1) == 0 {
            p = deflate(&p, 1);
        } else if p.len() > 1 && poly_eval(&p, -1) == 0 {
            p = deflate(&p, -1);
        } else {
            break;
        }
    }
    if p.len() != 3 {
        return None;
    }
    // x^2 + bx + c with p = [c, b, 1]
    let disc = Integer::from(&p[1] * &p[1]) - Integer::from(&p[0] * 4);
    let d = disc.to_u32()?;
    let root = Scalar::quadratic(
        Rational::from((-p[1].clone(), 2)),
        Rational::from((1, 2)),
        d,
    );
    root.radicand()?;
    Some(root)
}

/// Null vector of `m - theta I` over the field of `theta`, by elimination.
fn eigenvector_exact(m: &IntMatrix, theta: &Scalar) -> Option<Vec<Scalar>> {
    let n = m.size();
    let mut a: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = Scalar::rational(Rational::from(m.get(i, j)));
                    if i == j {
                        &v - theta
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pv = a[row][col].clone();
        for v in a[row].iter_mut() {
            *v = &*v / &pv;
        }
        for i in 0..n {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..n {
                    let delta = &f * &a[row][j];
                    a[i][j] = &a[i][j] - &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() != n - 1 {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut v = vec![Scalar::zero(); n];
    v[free] = Scalar::one();
    for (r, &c) in pivots.iter().enumerate() {
        v[c] = -&a[r][free];
    }
    Some(v)
}

fn eigenvector_power(m: &IntMatrix, prec: u32) -> (Vec<Scalar>, Scalar) {
    let n = m.size();
    let work = prec + 32;
    let entries: Vec<Vec<Float>> = (0..n)
        .map(|i| (0..n).map(|j| Float::with_val(work, m.get(i, j))).collect())
        .collect();
    let mut v: Vec<Float> = vec![Float::with_val(work, 1) / n as u32; n];
    let tol = Float::with_val(work, Float::i_exp(1, -(prec as i32) - 8));
    let mut theta = Float::with_val(work, 1);
    for _ in 0..200_000 {
        let mut w: Vec<Float> = (0..n)
            .map(|i| {
                let mut s = Float::with_val(work, 0);
                for j in 0..n {
                    s += Float::with_val(work, &entries[i][j] * &v[j]);
                }
                s
            })
            .collect();
        let total = w.iter().fold(Float::with_val(work, 0), |acc, x| acc + x);
        theta = total.clone();
        for x in w.iter_mut() {
            *x /= &total;
        }
        let diff = w
            .iter()
            .zip(&v)
            .map(|(a, b)| Float::with_val(work, a - b).abs())
            .fold(
                Float::with_val(work, 0),
                |acc, x| if x > acc { x } else { acc },
            );
        v = w;
        if diff < tol {
            break;
        }
    }
    (
        v.into_iter()
            .map(|x| Scalar::float(Float::with_val(prec, x)))
            .collect(),
        Scalar::float(Float::with_val(prec, theta)),
    )
}

/// Step types applied to a pair; returns the final pair and `A_p ... A_1`.
pub fn follow_loop(start: &Pair, steps: &[StepType]) -> Result<(Pair, IntMatrix)> {
    let mut pair = start.clone();
    let mut acc = IntMatrix::identity(start.0.len());
    for &st in steps {
        let (q0, q1, m) = combinatorial_step(&pair.0, &pair.1, st)?;
        acc = m.mul(&acc);
        pair = (q0, q1);
    }
    Ok((pair, acc))
}

/// Periodic-type exchange whose induction repeats `steps` forever.
///
/// Lengths are the Perron eigenvector of `B^T`, exact in a quadratic field
/// when the characteristic polynomial allows it and otherwise computed by
/// power iteration at `precision` bits.
pub fn build_periodic_iet(
    steps: &[StepType],
    start: &Pair,
    precision: u32,
) -> Result<(Iet, PeriodicTypeReport)> {
    if steps.is_empty() {
        return Err(Error::LoopNotClosed);
    }
    let (end, b) = follow_loop(start, steps)?;
    if &end != start {
        return Err(Error::LoopNotClosed);
    }
    if b.primitivity_exponent().is_none() {
        return Err(Error::MatrixNotPrimitive);
    }
    let bt = b.transpose();
    let (raw, theta) = match quadratic_perron_root(&b)
        .and_then(|th| eigenvector_exact(&bt, &th).map(|v| (v, th)))
    {
        Some(found) => found,
        None => {
            let (v, th) = eigenvector_power(&bt, precision);
            (v, th)
        }
    };
    let total: Scalar = raw.iter().sum();
    let lambda: Vec<Scalar> = raw.iter().map(|x| x / &total).collect();
    if !lambda.iter().all(Scalar::is_positive) {
        return Err(Error::Invalid("Perron vector is not positive".into()));
    }
    let resid = bt
        .mul_scalars(&lambda)
        .iter()
        .zip(&lambda)
        .map(|(bl, l)| (bl - &(&theta * l)).abs())
        .max()
        .expect("r >= 2");
    let bound = Scalar::float(Float::with_val(
        precision,
        Float::i_exp(1, -(precision as i32 - 16)),
    ));
    if resid > bound {
        return Err(Error::PrecisionExhausted(format!("eigen-residual {resid}")));
    }
    let t = Iet::new(start.0.clone(), start.1.clone(), lambda)?;
    let mut trace = RauzyTrace::start(t.clone());
    trace.extend_in_place(steps.len())?;
    let realised: Vec<StepType> = trace.steps.iter().map(|s| s.step_type).collect();
    let tol = Scalar::float(Float::with_val(
        precision,
        Float::i_exp(1, -(precision as i32) / 2),
    ));
    if realised != steps
        || !trace.last().same_pair(&t)
        || !parallel(trace.last().lambda(), t.lambda(), &tol)
    {
        return Err(Error::Invalid(
            "induction does not reproduce the loop".into(),
        ));
    }
    let k = b.primitivity_exponent().expect("checked") as usize;
    let period = k * steps.len();
    trace.extend_in_place(period - steps.len())?;
    let report = report_for(&trace, steps.len(), period);
    Ok((t, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_bar_examples() {
        let b = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(nu_bar(&b).unwrap(), Scalar::int(2));
        let ones = IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(nu_bar(&ones).unwrap(), Scalar::one());
        let id = IntMatrix::identity(2);
        assert_eq!(nu_bar(&id).unwrap_err(), Error::NonpositiveEntry(1, 2));
    }

    #[test]
    fn golden_is_periodic() {
        let rep = detect_periodic(&Iet::golden(), 10, &Scalar::ratio(1, 1000)).unwrap();
        assert_eq!(rep.period, 2);
        assert_eq!(rep.combinatorial_period, 2);
        assert!(rep.matrix.is_positive());
        assert_eq!(rep.nu_bar, Scalar::int(2));
        let a = Scalar::golden();
        assert_eq!(rep.perron_eigenvalue, (&Scalar::one() + &a).pow_u(2));
    }

    #[test]
    fn rational_not_detected() {
        let t = Iet::rotation(Scalar::ratio(3, 8), Scalar::ratio(5, 8)).unwrap();
        assert_eq!(
            detect_periodic(&t, 50, &Scalar::ratio(1, 1000)).unwrap_err(),
            Error::NotDetected(50)
        );
    }

    #[test]
    fn sqrt2_rotation_periodic() {
        let a = &Scalar::sqrt_int(2) - &Scalar::one();
        let t = Iet::rotation(&Scalar::one() - &a, a).unwrap();
        let rep = detect_periodic(&t, 20, &Scalar::ratio(1, 1000)).unwrap();
        assert!(rep.matrix.is_positive());
        // quotients [1; 2, 2, ...]: one loop is two runs of length 2, read cyclically
        assert_eq!(rep.combinatorial_period, 4);
        assert_eq!(rep.step_types, vec![1, 0, 0, 1]);
    }

    #[test]
    fn golden_loop_builds_golden() {
        let start = (vec![0, 1], vec![1, 0]);
        let (t, rep) = build_periodic_iet(&[StepType::Top, StepType::Bottom], &start, 128).unwrap();
        assert_eq!(t, Iet::golden());
        assert_eq!(rep.period, 2);
    }

    #[test]
    fn three_interval_loop_is_exact_and_detected() {
        use StepType::*;
        let start = (vec![0, 1, 2], vec![2, 1, 0]);
        let steps = [Bottom, Bottom, Top, Bottom, Bottom, Top];
        let (t, rep) = build_periodic_iet(&steps, &start, 128).unwrap();
        assert!(t.lambda().iter().all(|l| l.radicand() == Some(21)));
        assert_eq!(t.total(), &Scalar::one());
        assert_eq!(rep.period, 12);
        assert!(t.idoc_probe(500).passed());
        let again = detect_periodic(&t, 40, &Scalar::ratio(1, 1000)).unwrap();
        assert_eq!(again.combinatorial_period, 6);
        assert_eq!(again.matrix, rep.matrix);
    }

    #[test]
    fn open_loop_rejected() {
        let start = (vec![0, 1, 2], vec![2, 1, 0]);
        let err = build_periodic_iet(&[StepType::Top], &start, 128).unwrap_err();
        assert_eq!(err, Error::LoopNotClosed);
    }

    #[test]
    fn non_primitive_loop() {
        let start = (vec![0, 1], vec![1, 0]);
        let err = build_periodic_iet(&[StepType::Top], &start, 128).unwrap_err();
        assert_eq!(err, Error::MatrixNotPrimitive);
    }

    #[test]
    fn char_poly() {
        let b = IntMatrix::from_rows(&[vec![1, 1], vec![1, 2]]);
        let p = characteristic_polynomial(&b);
        assert_eq!(
            p,
            vec![Integer::from(1), Integer::from(-3), Integer::from(1)]
        );
    }
}
