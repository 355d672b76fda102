use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Scalar;
use crate::{Error, Result};

/// Interval exchange on `[0, total)`.
///
/// Intervals carry labels `0..r`. `pi0[a]` is the position (0-based) of
/// interval `a` before the exchange and `pi1[a]` its position afterwards.
/// The public one-line syntax is 1-based, see [`Iet::from_one_line`].
#[derive(Clone, Debug)]
pub struct Iet {
    pi0: Vec<usize>,
    pi1: Vec<usize>,
    lambda: Vec<Scalar>,
    total: Scalar,
    top: Vec<usize>,
    bottom: Vec<usize>,
    beta: Vec<Scalar>,
    shift: Vec<Scalar>,
}

impl PartialEq for Iet {
    fn eq(&self, other: &Self) -> bool {
        self.pi0 == other.pi0 && self.pi1 == other.pi1 && self.lambda == other.lambda
    }
}

fn check_perm(p: &[usize], r: usize, name: &str) -> Result<()> {
    let mut seen = vec![false; r];
    for &v in p {
        if v >= r || seen[v] {
            return Err(Error::InvalidPermutation(format!(
                "{name} is not a permutation of 1..{r}"
            )));
        }
        seen[v] = true;
    }
    Ok(())
}

fn inverse_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (a, &pos) in p.iter().enumerate() {
        inv[pos] = a;
    }
    inv
}

/// Smallest `k` in `1..r` with `pi0^{-1}{0..k} = pi1^{-1}{0..k}`.
pub fn reducibility_witness(pi0: &[usize], pi1: &[usize]) -> Option<usize> {
    let r = pi0.len();
    let (mut below0, mut below1) = (0u128, 0u128);
    let top = inverse_perm(pi0);
    let bottom = inverse_perm(pi1);
    if r <= 128 {
        for k in 1..r {
            below0 |= 1 << top[k - 1];
            below1 |= 1 << bottom[k - 1];
            if below0 == below1 {
                return Some(k);
            }
        }
        return None;
    }
    let mut a = vec![false; r];
    let mut b = vec![false; r];
    for k in 1..r {
        a[top[k - 1]] = true;
        b[bottom[k - 1]] = true;
        if a == b {
            return Some(k);
        }
    }
    None
}

impl Iet {
    /// Validated exchange from 0-based position vectors and labelled lengths.
    pub fn new(pi0: Vec<usize>, pi1: Vec<usize>, lambda: Vec<Scalar>) -> Result<Self> {
        let r = pi0.len();
        if r < 2 || pi1.len() != r || lambda.len() != r {
            return Err(Error::InvalidPermutation(format!(
                "need two permutations and lengths of one common size r >= 2 (got {}, {}, {})",
                pi0.len(),
                pi1.len(),
                lambda.len()
            )));
        }
        check_perm(&pi0, r, "pi0")?;
        check_perm(&pi1, r, "pi1")?;
        if let Some(k) = reducibility_witness(&pi0, &pi1) {
            return Err(Error::ReduciblePair(k));
        }
        if let Some(i) = lambda.iter().position(|l| !l.is_positive()) {
            return Err(Error::NonpositiveLength(i + 1));
        }
        Ok(Self::build(pi0, pi1, lambda))
    }

    fn build(pi0: Vec<usize>, pi1: Vec<usize>, lambda: Vec<Scalar>) -> Self {
        let r = pi0.len();
        let top = inverse_perm(&pi0);
        let bottom = inverse_perm(&pi1);
        let mut beta = Vec::with_capacity(r + 1);
        beta.push(Scalar::zero());
        for pos in 0..r {
            let next = &beta[pos] + &lambda[top[pos]];
            beta.push(next);
        }
        let mut image_start = vec![Scalar::zero(); r];
        let mut acc = Scalar::zero();
        for pos in 0..r {
            let a = bottom[pos];
            image_start[a] = acc.clone();
            acc = &acc + &lambda[a];
        }
        let shift = (0..r)
            .map(|pos| &image_start[top[pos]] - &beta[pos])
            .collect();
        let total = beta[r].clone();
        Iet {
            pi0,
            pi1,
            lambda,
            total,
            top,
            bottom,
            beta,
            shift,
        }
    }

    /// Exchange from 1-based one-line arrays, e.g. `[1,2]`, `[2,1]`.
    pub fn from_one_line(pi0: &[usize], pi1: &[usize], lambda: Vec<Scalar>) -> Result<Self> {
        let conv = |p: &[usize], name: &str| -> Result<Vec<usize>> {
            p.iter()
                .map(|&v| {
                    v.checked_sub(1).ok_or_else(|| {
                        Error::InvalidPermutation(format!("{name} entries start at 1"))
                    })
                })
                .collect()
        };
        Self::new(conv(pi0, "pi0")?, conv(pi1, "pi1")?, lambda)
    }

    /// Rotation of `[0, l0 + l1)` by `l1`.
    pub fn rotation(l0: Scalar, l1: Scalar) -> Result<Self> {
        Self::new(vec![0, 1], vec![1, 0], vec![l0, l1])
    }

    /// Rotation by the inverse golden ratio with lengths `(alpha^2, alpha)`.
    pub fn golden() -> Self {
        let a = Scalar::golden();
        Self::rotation(&a * &a, a).expect("valid")
    }

    /// Reverses interval order: `pi1 = (r, ..., 1)`.
    pub fn symmetric(lambda: Vec<Scalar>) -> Result<Self> {
        let r = lambda.len();
        Self::new((0..r).collect(), (0..r).rev().collect(), lambda)
    }

    pub fn r(&self) -> usize {
        self.pi0.len()
    }

    pub fn pi0(&self) -> &[usize] {
        &self.pi0
    }

    pub fn pi1(&self) -> &[usize] {
        &self.pi1
    }

    pub fn pi0_one_line(&self) -> Vec<usize> {
        self.pi0.iter().map(|v| v + 1).collect()
    }

    pub fn pi1_one_line(&self) -> Vec<usize> {
        self.pi1.iter().map(|v| v + 1).collect()
    }

    /// Label occupying each position before the exchange.
    pub fn top(&self) -> &[usize] {
        &self.top
    }

    /// Label occupying each position after the exchange.
    pub fn bottom(&self) -> &[usize] {
        &self.bottom
    }

    pub fn lambda(&self) -> &[Scalar] {
        &self.lambda
    }

    pub fn total(&self) -> &Scalar {
        &self.total
    }

    /// `(beta_0, ..., beta_r)` with `beta_0 = 0` and `beta_r = total`.
    pub fn discontinuities(&self) -> &[Scalar] {
        &self.beta
    }

    /// Translation applied on the interval at position `pos`.
    pub fn shift(&self, pos: usize) -> &Scalar {
        &self.shift[pos]
    }

    pub fn same_pair(&self, other: &Iet) -> bool {
        self.pi0 == other.pi0 && self.pi1 == other.pi1
    }

    /// Same exchange with all lengths multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &Scalar) -> Iet {
        let lambda = self.lambda.iter().map(|l| l * factor).collect();
        Self::build(self.pi0.clone(), self.pi1.clone(), lambda)
    }

    /// Position of the interval `[beta_pos, beta_{pos+1})` containing `x`.
    pub fn locate(&self, x: &Scalar) -> Result<usize> {
        if x.is_negative() || x >= &self.total {
            return Err(Error::OutOfDomain(x.to_string()));
        }
        // first beta strictly greater than x, minus one
        let (mut lo, mut hi) = (0, self.r());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if &self.beta[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    pub fn evaluate(&self, x: &Scalar) -> Result<Scalar> {
        let pos = self.locate(x)?;
        Ok(x + &self.shift[pos])
    }

    pub fn inverse(&self) -> Iet {
        Self::build(self.pi1.clone(), self.pi0.clone(), self.lambda.clone())
    }

    /// `[x, Tx, ..., T^{n-1}x]` for `n > 0`, `[x, T^{-1}x, ..., T^{n+1}x]` for `n < 0`.
    pub fn orbit(&self, x: &Scalar, n: i64) -> Result<Vec<Scalar>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        self.locate(x)?;
        let map = if n > 0 { self.clone() } else { self.inverse() };
        let len = n.unsigned_abs() as usize;
        let mut out = Vec::with_capacity(len);
        out.push(x.clone());
        for _ in 1..len {
            let next = map.evaluate(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }

    /// `T^n x` for any signed `n`.
    pub fn iterate(&self, x: &Scalar, n: i64) -> Result<Scalar> {
        let mut y = x.clone();
        if n >= 0 {
            for _ in 0..n {
                y = self.evaluate(&y)?;
            }
        } else {
            let inv = self.inverse();
            for _ in 0..(-n) {
                y = inv.evaluate(&y)?;
            }
        }
        Ok(y)
    }

    /// Exact check that `{T^n beta_j : 0 <= n <= depth, 1 <= j <= r-1}` has no
    /// repeated point.
    pub fn idoc_probe(&self, depth: usize) -> IdocCertificate {
        let mut seen: BTreeMap<Scalar, (usize, usize)> = BTreeMap::new();
        let mut current: Vec<Scalar> = self.beta[1..self.r()].to_vec();
        for n in 0..=depth {
            for (idx, p) in current.iter().enumerate() {
                let j = idx + 1;
                if let Some(&(j1, n1)) = seen.get(p) {
                    return IdocCertificate {
                        depth,
                        verdict: IdocVerdict::Fail {
                            first: (j1, n1),
                            second: (j, n),
                            point: p.clone(),
                        },
                    };
                }
                seen.insert(p.clone(), (j, n));
            }
            if n < depth {
                for p in current.iter_mut() {
                    *p = self.evaluate(p).expect("orbit stays in the domain");
                }
            }
        }
        IdocCertificate {
            depth,
            verdict: IdocVerdict::PassToDepth,
        }
    }

    /// Position ranks `(pi0, pi1)` in 1-based one-line form, for display.
    pub fn pair_string(&self) -> String {
        fn line(p: &[usize]) -> String {
            p.iter()
                .map(|v| (v + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
        format!("({} / {})", line(&self.pi0), line(&self.pi1))
    }
}

impl fmt::Display for Iet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lens: Vec<String> = self.lambda.iter().map(|l| l.to_string()).collect();
        write!(f, "{} lambda = [{}]", self.pair_string(), lens.join(", "))
    }
}

/// Outcome of [`Iet::idoc_probe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdocCertificate {
    pub depth: usize,
    pub verdict: IdocVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum IdocVerdict {
    /// Distinct up to the stated depth; not a proof of the infinite statement.
    PassToDepth,
    /// `T^{n1} beta_{j1} = T^{n2} beta_{j2}`, pairs given as `(j, n)`.
    Fail {
        first: (usize, usize),
        second: (usize, usize),
        point: Scalar,
    },
}

impl IdocCertificate {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, IdocVerdict::PassToDepth)
    }

    pub fn label(&self) -> String {
        match &self.verdict {
            IdocVerdict::PassToDepth => format!("certificate to depth {}", self.depth),
            IdocVerdict::Fail { first, second, .. } => format!(
                "fail: T^{} beta_{} = T^{} beta_{}",
                first.1, first.0, second.1, second.0
            ),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IetText {
    pi0: Vec<usize>,
    pi1: Vec<usize>,
    lambda: Vec<Scalar>,
}

impl Serialize for Iet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IetText {
            pi0: self.pi0_one_line(),
            pi1: self.pi1_one_line(),
            lambda: self.lambda.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Iet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let t = IetText::deserialize(d)?;
        Iet::from_one_line(&t.pi0, &t.pi1, t.lambda).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    fn rot() -> Iet {
        Iet::rotation(q(3, 5), q(2, 5)).unwrap()
    }

    #[test]
    fn rotation_values() {
        let t = rot();
        assert_eq!(t.evaluate(&q(1, 2)).unwrap(), q(9, 10));
        assert_eq!(t.evaluate(&q(4, 5)).unwrap(), q(1, 5));
        assert_eq!(t.evaluate(&Scalar::zero()).unwrap(), q(2, 5));
        assert_eq!(t.discontinuities(), &[q(0, 1), q(3, 5), q(1, 1)]);
        assert!(matches!(
            t.evaluate(&Scalar::one()),
            Err(Error::OutOfDomain(_))
        ));
    }

    #[test]
    fn orbit_examples() {
        let t = rot();
        let o = t.orbit(&Scalar::zero(), 5).unwrap();
        assert_eq!(o, vec![q(0, 1), q(2, 5), q(4, 5), q(1, 5), q(3, 5)]);
        assert_eq!(t.orbit(&q(1, 3), 1).unwrap(), vec![q(1, 3)]);
        assert!(t.orbit(&q(1, 3), 0).unwrap().is_empty());
        let back = t.orbit(&q(3, 5), -5).unwrap();
        assert_eq!(back, vec![q(3, 5), q(1, 5), q(4, 5), q(2, 5), q(0, 1)]);
    }

    #[test]
    fn inverse_is_rotation_back() {
        let t = rot();
        let inv = t.inverse();
        let back = Iet::rotation(q(2, 5), q(3, 5)).unwrap();
        for k in 0..10 {
            let x = q(k, 10);
            assert_eq!(inv.evaluate(&x).unwrap(), back.evaluate(&x).unwrap());
            assert_eq!(inv.evaluate(&t.evaluate(&x).unwrap()).unwrap(), x);
        }
        assert_eq!(inv.inverse(), t);
    }

    #[test]
    fn reducible_and_symmetric() {
        let id = Iet::from_one_line(&[1, 2], &[1, 2], vec![q(1, 2), q(1, 2)]);
        assert_eq!(id.unwrap_err(), Error::ReduciblePair(1));
        let s = Iet::from_one_line(&[1, 2, 3, 4], &[4, 3, 2, 1], vec![q(1, 4); 4]).unwrap();
        assert_eq!(
            s.discontinuities(),
            &[q(0, 1), q(1, 4), q(1, 2), q(3, 4), q(1, 1)]
        );
        let bad = Iet::rotation(q(1, 2), q(0, 1));
        assert_eq!(bad.unwrap_err(), Error::NonpositiveLength(2));
    }

    #[test]
    fn golden_discontinuities_exact() {
        let t = Iet::golden();
        let a = Scalar::golden();
        assert_eq!(
            t.discontinuities(),
            &[Scalar::zero(), &a * &a, Scalar::one()]
        );
    }

    #[test]
    fn idoc_examples() {
        let half = Iet::rotation(q(1, 2), q(1, 2)).unwrap();
        let c = half.idoc_probe(2);
        assert!(!c.passed());
        match c.verdict {
            IdocVerdict::Fail { first, second, .. } => {
                assert_eq!(first, (1, 0));
                assert_eq!(second, (1, 2));
            }
            _ => unreachable!(),
        }
        assert!(half.idoc_probe(1).passed());
        let sevenths = Iet::rotation(q(2, 7), q(5, 7)).unwrap();
        assert!(!sevenths.idoc_probe(7).passed());
        assert!(Iet::golden().idoc_probe(1000).passed());
        assert!(Iet::golden().idoc_probe(10).label().contains("depth 10"));
    }

    #[test]
    fn serde_round_trip() {
        let t = Iet::golden();
        let s = serde_json::to_string(&t).unwrap();
        let back: Iet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
