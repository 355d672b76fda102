use std::collections::BTreeMap;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::Scalar;
use crate::{Error, Result};

/// Continued fraction `a0 + 1/(a1 + 1/(a2 + ...))` with convergents.
///
/// `p[n]/q[n]` is the n-th convergent with `p[0] = a0`, `q[0] = 1`, so for
/// `0 < alpha < 1` one has `q[1] = a1` and `q[n+1] = a[n+1] q[n] + q[n-1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfExpansion {
    pub a0: String,
    /// Partial quotients `a1, a2, ...`.
    pub quotients: Vec<u64>,
    pub p: Vec<String>,
    pub q: Vec<String>,
    /// The expansion terminated (rational input).
    pub finite: bool,
    /// `(start, period)`: `quotients[start..]` repeats with this period.
    pub periodic_tail: Option<(usize, usize)>,
}

impl CfExpansion {
    /// Bounded partial quotients are established: finite or eventually periodic.
    pub fn bounded(&self) -> bool {
        self.finite || self.periodic_tail.is_some()
    }

    pub fn q_int(&self, n: usize) -> Integer {
        self.q[n].parse().expect("stored as integer")
    }

    pub fn p_int(&self, n: usize) -> Integer {
        self.p[n].parse().expect("stored as integer")
    }
}

fn convergents(a0: &Integer, quotients: &[u64]) -> (Vec<String>, Vec<String>) {
    let (mut p_prev, mut q_prev) = (Integer::from(1), Integer::from(0));
    let (mut p_cur, mut q_cur) = (a0.clone(), Integer::from(1));
    let mut p = vec![p_cur.to_string()];
    let mut q = vec![q_cur.to_string()];
    for &a in quotients {
        let p_next = Integer::from(&p_cur * a) + &p_prev;
        let q_next = Integer::from(&q_cur * a) + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        p.push(p_cur.to_string());
        q.push(q_cur.to_string());
    }
    (p, q)
}

fn quotient_u64(n: &Integer) -> Result<u64> {
    n.to_u64()
        .ok_or_else(|| Error::Invalid(format!("partial quotient {n} does not fit in 64 bits")))
}

/// First `count` partial quotients of `alpha`.
///
/// Rational and quadratic inputs are expanded exactly; quadratic inputs are
/// checked for a repeating complete quotient, which certifies bounded partial
/// quotients. Float inputs are expanded with interval bounds and fail with
/// `PrecisionExhausted` once the two bounds disagree.
pub fn cf_expand(alpha: &Scalar, count: usize) -> Result<CfExpansion> {
    match alpha {
        Scalar::Float(f) => cf_expand_float(f, count),
        _ => cf_expand_exact(alpha, count),
    }
}

fn cf_expand_exact(alpha: &Scalar, count: usize) -> Result<CfExpansion> {
    let a0 = alpha.floor();
    let mut x = alpha - &Scalar::rational(Rational::from(&a0));
    let mut quotients = Vec::with_capacity(count);
    let mut seen: BTreeMap<Scalar, usize> = BTreeMap::new();
    let mut finite = false;
    let mut periodic_tail = None;
    let mut periodic_quotients: Option<Vec<u64>> = None;
    while quotients.len() < count {
        if x.is_zero() {
            finite = true;
            break;
        }
        if let Some(tail) = &periodic_quotients {
            let (start, period) = periodic_tail.expect("set together");
            let k = quotients.len();
            quotients.push(tail[start + (k - start) % period]);
            continue;
        }
        let inv = x.recip();
        if alpha.radicand().is_some() {
            if let Some(&start) = seen.get(&inv) {
                periodic_tail = Some((start, quotients.len() - start));
                periodic_quotients = Some(quotients.clone());
                continue;
            }
            seen.insert(inv.clone(), quotients.len());
        }
        let a = inv.floor();
        quotients.push(quotient_u64(&a)?);
        x = &inv - &Scalar::rational(Rational::from(a));
    }
    // detect the period even if `count` stopped us before it closed
    if alpha.radicand().is_some() && periodic_tail.is_none() && !finite {
        for _ in 0..64 {
            let inv = x.recip();
            if let Some(&start) = seen.get(&inv) {
                periodic_tail = Some((start, seen.len() - start));
                break;
            }
            seen.insert(inv.clone(), seen.len());
            let a = inv.floor();
            x = &inv - &Scalar::rational(Rational::from(a));
        }
    }
    let (p, q) = convergents(&a0, &quotients);
    Ok(CfExpansion {
        a0: a0.to_string(),
        quotients,
        p,
        q,
        finite,
        periodic_tail,
    })
}

fn cf_expand_float(f: &rug::Float, count: usize) -> Result<CfExpansion> {
    let value = f
        .to_rational()
        .ok_or_else(|| Error::Invalid("non-finite rotation number".into()))?;
    let ulp = Rational::from(value.clone().abs() + 1) >> (f.prec() as i32 - 2);
    let mut lo = Rational::from(&value - &ulp);
    let mut hi = Rational::from(&value + &ulp);
    let a0 = lo.clone().floor().into_numer_denom().0;
    if hi.clone().floor().into_numer_denom().0 != a0 {
        return Err(Error::PrecisionExhausted(
            "integer part undetermined".into(),
        ));
    }
    lo -= &a0;
    hi -= &a0;
    let mut quotients = Vec::with_capacity(count);
    while quotients.len() < count {
        if lo.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::PrecisionExhausted(format!(
                "only {} partial quotients are determined at {} bits",
                quotients.len(),
                f.prec()
            )));
        }
        // inversion swaps the bounds
        let new_lo = Rational::from(hi.recip_ref());
        let new_hi = Rational::from(lo.recip_ref());
        let a = new_lo.clone().floor().into_numer_denom().0;
        if new_hi.clone().floor().into_numer_denom().0 != a {
            return Err(Error::PrecisionExhausted(format!(
                "only {} partial quotients are determined at {} bits",
                quotients.len(),
                f.prec()
            )));
        }
        quotients.push(quotient_u64(&a)?);
        lo = new_lo - &a;
        hi = new_hi - &a;
    }
    let (p, q) = convergents(&a0, &quotients);
    Ok(CfExpansion {
        a0: a0.to_string(),
        quotients,
        p,
        q,
        finite: false,
        periodic_tail: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_all_ones() {
        let cf = cf_expand(&Scalar::golden(), 12).unwrap();
        assert_eq!(cf.quotients, vec![1; 12]);
        let q: Vec<u64> = cf.q.iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(q, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233]);
        assert_eq!(cf.periodic_tail, Some((0, 1)));
        assert!(cf.bounded());
    }

    #[test]
    fn two_fifths_finite() {
        let cf = cf_expand(&Scalar::ratio(2, 5), 10).unwrap();
        assert_eq!(cf.a0, "0");
        assert_eq!(cf.quotients, vec![2, 2]);
        assert!(cf.finite);
        assert_eq!(cf.p.last().unwrap(), "2");
        assert_eq!(cf.q.last().unwrap(), "5");
    }

    #[test]
    fn sqrt2_minus_one_all_twos() {
        let a = &Scalar::sqrt_int(2) - &Scalar::one();
        let cf = cf_expand(&a, 8).unwrap();
        assert_eq!(cf.quotients, vec![2; 8]);
        assert_eq!(cf.periodic_tail, Some((0, 1)));
    }

    #[test]
    fn float_runs_out() {
        let f = Scalar::golden().to_float(64);
        let ok = cf_expand(&Scalar::Float(f.clone()), 20).unwrap();
        assert_eq!(ok.quotients, vec![1; 20]);
        let err = cf_expand(&Scalar::Float(f), 200).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted(_)));
    }

    #[test]
    fn period_found_past_count() {
        let a = &Scalar::sqrt_int(7) - &Scalar::int(2);
        let cf = cf_expand(&a, 1).unwrap();
        assert!(cf.periodic_tail.is_some());
    }
}
