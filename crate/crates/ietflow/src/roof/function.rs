use rug::Float;
use serde::{Deserialize, Serialize};

use super::real::Real;
use crate::partitions::{global_points, OrbitTable};
use crate::{Error, Iet, Result, Scalar};

/// `cos` and `sin` coefficients of frequency `k` (in cycles per unit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: u32,
    pub cos: Scalar,
    pub sin: Scalar,
}

/// The regular part `g = g1 + g2 + g3` of a roof.
///
/// `g1` is a polynomial plus a trigonometric sum, `g2(x) = slope * x`, and
/// `g3` takes the value `steps[p]` on the base interval at position `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSpec {
    #[serde(default)]
    pub poly: Vec<Scalar>,
    #[serde(default)]
    pub trig: Vec<TrigTerm>,
    #[serde(default = "Scalar::zero")]
    pub slope: Scalar,
    #[serde(default)]
    pub steps: Vec<Scalar>,
}

impl Default for GSpec {
    fn default() -> Self {
        GSpec::zero()
    }
}

impl GSpec {
    pub fn zero() -> Self {
        GSpec {
            poly: Vec::new(),
            trig: Vec::new(),
            slope: Scalar::zero(),
            steps: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.iter().all(Scalar::is_zero)
            && self.trig.iter().all(|t| t.cos.is_zero() && t.sin.is_zero())
            && self.slope.is_zero()
            && self.steps.iter().all(Scalar::is_zero)
    }

    /// `g1(1) - g1(0) = integral of g1'`.
    pub fn mean_derivative(&self) -> Scalar {
        self.poly.iter().skip(1).sum()
    }

    pub fn step(&self, pos: usize) -> Scalar {
        self.steps.get(pos).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `g1 + g2 + g3` at `x` in base interval `pos`, and its derivative.
    pub(crate) fn eval<R: Real>(&self, x: &R, pos: usize, prec: u32) -> (R, R) {
        let (mut v, mut d) = (R::zero(prec), R::zero(prec));
        for (m, a) in self.poly.iter().enumerate().rev() {
            // Horner for value and derivative together
            d = d.mul(x).add(&v);
            v = v.mul(x).add(&R::from_scalar(a, prec));
            let _ = m;
        }
        let two_pi = R::pi(prec).mul(&R::from_f64(2.0, prec));
        for t in &self.trig {
            let w = two_pi.mul(&R::from_f64(t.k as f64, prec));
            let arg = w.mul(x);
            let (c, s) = (arg.cos(), arg.sin());
            let (a, b) = (R::from_scalar(&t.cos, prec), R::from_scalar(&t.sin, prec));
            v = v.add(&a.mul(&c)).add(&b.mul(&s));
            d = d.add(&w.mul(&b.mul(&c).sub(&a.mul(&s))));
        }
        let slope = R::from_scalar(&self.slope, prec);
        v = v
            .add(&slope.mul(x))
            .add(&R::from_scalar(&self.step(pos), prec));
        d = d.add(&slope);
        (v, d)
    }

    /// Total variation of `g1` on `[0, 1)`, bounded from above termwise.
    pub fn g1_variation_bound(&self) -> f64 {
        let poly: f64 = self
            .poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(_, a)| a.to_f64().abs())
            .sum::<f64>()
            * 1.0;
        let trig: f64 = self
            .trig
            .iter()
            .map(|t| 4.0 * t.k as f64 * (t.cos.to_f64().abs() + t.sin.to_f64().abs()))
            .sum();
        poly.max(0.0) * self.poly.len() as f64 + trig
    }
}

/// Which constants vanish, and by which convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroPattern {
    /// All constants positive.
    None,
    /// Zeros among `c+_{i0}` and `c-_{i0+1}` where `beta_{i0}` is the
    /// discontinuity just after the interval placed last.
    Literal { i0: usize },
    /// Zeros among `c+_{i0}` and `c-_{i0}` where `T beta_{i0} = 0`, so the
    /// roof is continuous at the point sent to 0.
    Circle { i0: usize },
    /// Constant roof; only available as a test double.
    TestConstant,
}

/// Quantity evaluated by [`RoofFunction::eval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    F,
    G,
    FPlusG,
    /// `f'`
    D1,
    /// `f''`
    D2,
    /// `f'''`
    D3,
    /// `(f + g)'`
    D1FPlusG,
}

/// Roof `f + g` over an exchange of `[0, 1)` with logarithmic singularities
/// `-c+_i log{x - beta_i}` and `-c-_{i+1} log{beta_{i+1} - x}`.
#[derive(Clone, Debug, Serialize)]
pub struct RoofFunction {
    #[serde(serialize_with = "ser_iet")]
    base: Iet,
    /// `c+_0 .. c+_{r-1}`
    c_plus: Vec<Scalar>,
    /// `c-_1 .. c-_r`
    c_minus: Vec<Scalar>,
    g: GSpec,
    pattern: ZeroPattern,
    constant: Option<Scalar>,
    /// Certified lower bound for `min (f + g)`.
    min_lower_bound: f64,
    /// Approximate minimiser.
    min_at: f64,
}

fn ser_iet<S: serde::Serializer>(t: &Iet, s: S) -> std::result::Result<S::Ok, S::Error> {
    t.serialize(s)
}

/// Precision used to certify the minimum of a roof.
pub const CERTIFY_PRECISION: u32 = 128;

/// Validates constants and `g`, then certifies `min (f + g) > 0`.
pub fn make_roof(
    base: Iet,
    c_plus: Vec<Scalar>,
    c_minus: Vec<Scalar>,
    g: GSpec,
) -> Result<RoofFunction> {
    let r = base.r();
    if c_plus.len() != r || c_minus.len() != r {
        return Err(Error::Invalid(format!(
            "expected {r} constants on each side"
        )));
    }
    let one = Scalar::one();
    let total_ok = if base.total().is_exact() {
        base.total() == &one
    } else {
        (base.total() - &one).abs().to_f64() < 1e-20
    };
    if !total_ok {
        return Err(Error::Invalid(
            "roofs are defined over exchanges of [0, 1)".into(),
        ));
    }
    for (name, cs, shift) in [("c+", &c_plus, 0), ("c-", &c_minus, 1)] {
        if let Some(i) = cs.iter().position(Scalar::is_negative) {
            return Err(Error::NegativeConstant(format!("{name}_{}", i + shift)));
        }
    }
    if !g.steps.is_empty() && g.steps.len() != r {
        return Err(Error::Invalid(format!("g3 needs {r} values")));
    }
    if !g.mean_derivative().is_zero() {
        return Err(Error::NonzeroMeanDerivative(format!(
            "g1(1) - g1(0) = {}",
            g.mean_derivative()
        )));
    }
    let pattern = zero_pattern(&base, &c_plus, &c_minus)?;
    let mut roof = RoofFunction {
        base,
        c_plus,
        c_minus,
        g,
        pattern,
        constant: None,
        min_lower_bound: 0.0,
        min_at: 0.0,
    };
    let (lb, at) = roof.certify_minimum()?;
    if lb <= 0.0 {
        return Err(Error::NonpositiveRoof {
            witness: format!("{at:.17}"),
        });
    }
    roof.min_lower_bound = lb;
    roof.min_at = at;
    Ok(roof)
}

fn zero_pattern(base: &Iet, c_plus: &[Scalar], c_minus: &[Scalar]) -> Result<ZeroPattern> {
    let r = base.r();
    let zeros: Vec<(bool, usize)> = c_plus
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_zero())
        .map(|(i, _)| (true, i))
        .chain(
            c_minus
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_zero())
                .map(|(i, _)| (false, i + 1)),
        )
        .collect();
    if zeros.is_empty() {
        return Ok(ZeroPattern::None);
    }
    let literal = base.pi0()[base.bottom()[r - 1]] + 1;
    let circle = base.pi0()[base.bottom()[0]];
    if zeros
        .iter()
        .all(|&z| z == (true, literal) || z == (false, literal + 1))
    {
        return Ok(ZeroPattern::Literal { i0: literal });
    }
    if zeros
        .iter()
        .all(|&z| z == (true, circle) || z == (false, circle))
    {
        return Ok(ZeroPattern::Circle { i0: circle });
    }
    let names: Vec<String> = zeros
        .iter()
        .map(|&(p, i)| format!("c{}_{i}", if p { "+" } else { "-" }))
        .collect();
    Err(Error::IllegalZeroPattern(format!(
        "zero constants {} (allowed: c+_{literal}, c-_{} or c+_{circle}, c-_{circle})",
        names.join(", "),
        literal + 1
    )))
}

impl RoofFunction {
    /// A constant roof, for exercising the flow code with exact heights.
    #[doc(hidden)]
    pub fn test_double_constant(base: Iet, height: Scalar) -> Result<Self> {
        if !height.is_positive() {
            return Err(Error::NonpositiveRoof {
                witness: "0".into(),
            });
        }
        let r = base.r();
        Ok(RoofFunction {
            base,
            c_plus: vec![Scalar::zero(); r],
            c_minus: vec![Scalar::zero(); r],
            g: GSpec::zero(),
            pattern: ZeroPattern::TestConstant,
            min_lower_bound: height.to_f64(),
            min_at: 0.0,
            constant: Some(height),
        })
    }

    /// Only the regular part, with every constant zero and no positivity
    /// requirement; used to study `g` on its own.
    pub(crate) fn g_only(base: Iet, g: GSpec) -> Result<Self> {
        let r = base.r();
        if !g.steps.is_empty() && g.steps.len() != r {
            return Err(Error::Invalid(format!("g3 needs {r} values")));
        }
        Ok(RoofFunction {
            base,
            c_plus: vec![Scalar::zero(); r],
            c_minus: vec![Scalar::zero(); r],
            g,
            pattern: ZeroPattern::None,
            constant: None,
            min_lower_bound: f64::NAN,
            min_at: 0.0,
        })
    }

    pub fn base(&self) -> &Iet {
        &self.base
    }

    pub fn c_plus(&self) -> &[Scalar] {
        &self.c_plus
    }

    pub fn c_minus(&self) -> &[Scalar] {
        &self.c_minus
    }

    pub fn g(&self) -> &GSpec {
        &self.g
    }

    pub fn pattern(&self) -> ZeroPattern {
        self.pattern
    }

    pub fn constant(&self) -> Option<&Scalar> {
        self.constant.as_ref()
    }

    /// Certified lower bound for `min (f + g)`.
    pub fn min_value(&self) -> f64 {
        self.min_lower_bound
    }

    pub fn min_location(&self) -> f64 {
        self.min_at
    }

    /// Sum of all constants, `sum c+_i + c-_{i+1}`.
    pub fn constant_sum(&self) -> Scalar {
        self.c_plus.iter().chain(&self.c_minus).sum()
    }

    /// The replacement `f + g -> f + g + h` with a new regular part.
    pub fn with_g(&self, g: GSpec) -> Result<RoofFunction> {
        make_roof(
            self.base.clone(),
            self.c_plus.clone(),
            self.c_minus.clone(),
            g,
        )
    }

    /// The roof jumps or blows up at `beta_l`, `0 < l < r`.
    pub(crate) fn singular_or_jump(&self, l: usize) -> bool {
        if self.constant.is_some() {
            return false;
        }
        !self.c_plus[l].is_zero()
            || !self.c_minus[l - 1].is_zero()
            || self.g.step(l - 1) != self.g.step(l)
    }

    /// The roof is discontinuous across `0 ~ 1` on the circle.
    pub(crate) fn discontinuous_at_origin(&self) -> bool {
        if self.constant.is_some() {
            return false;
        }
        let r = self.base.r();
        !self.c_plus[0].is_zero()
            || !self.c_minus[r - 1].is_zero()
            || !self.g.slope.is_zero()
            || self.g.step(0) != self.g.step(r - 1)
    }

    fn guard(prec: u32) -> Scalar {
        Scalar::float(Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32))))
    }

    /// Index of a singularity at `x`, if any.
    fn singular_index(&self, x: &Scalar, prec: u32) -> Option<usize> {
        let beta = self.base.discontinuities();
        let r = self.base.r();
        let guard = Self::guard(prec);
        for (i, b) in beta[..r].iter().enumerate() {
            let plus = !self.c_plus[i].is_zero();
            let minus = if i == 0 {
                !self.c_minus[r - 1].is_zero()
            } else {
                !self.c_minus[i - 1].is_zero()
            };
            if !(plus || minus) {
                continue;
            }
            let hit = if x.is_exact() {
                x == b
            } else {
                let d = (x - b).abs();
                d < guard || (i == 0 && (&Scalar::one() - &d) < guard)
            };
            if hit {
                return Some(i);
            }
        }
        None
    }

    /// `f`, `g`, `f + g` or a derivative of `f` at `x`.
    pub fn eval(&self, x: &Scalar, which: Quantity, prec: u32) -> Result<Scalar> {
        if let (Some(h), Quantity::F | Quantity::FPlusG) = (&self.constant, which) {
            self.base.locate(x)?;
            return Ok(h.clone());
        }
        Ok(self.eval_real::<Float>(x, which, prec)?.to_scalar())
    }

    pub(crate) fn eval_real<R: Real>(&self, x: &Scalar, which: Quantity, prec: u32) -> Result<R> {
        let pos = self.base.locate(x)?;
        if let Some(h) = &self.constant {
            return Ok(match which {
                Quantity::F | Quantity::FPlusG => R::from_scalar(h, prec),
                _ => R::zero(prec),
            });
        }
        let needs_f = !matches!(which, Quantity::G);
        if needs_f {
            if let Some(i) = self.singular_index(x, prec) {
                return Err(Error::AtSingularity {
                    index: i,
                    iterate: 0,
                });
            }
        }
        let beta = self.base.discontinuities();
        let r = self.base.r();
        let one = Scalar::one();
        let mut acc = R::zero(prec);
        if needs_f {
            for i in 0..r {
                // {x - beta_i} and {beta_{i+1} - x}
                let dp = if i <= pos {
                    x - &beta[i]
                } else {
                    &(x - &beta[i]) + &one
                };
                let dm = if i >= pos {
                    &beta[i + 1] - x
                } else {
                    &(&beta[i + 1] - x) + &one
                };
                for (c, d, plus) in [(&self.c_plus[i], dp, true), (&self.c_minus[i], dm, false)] {
                    if c.is_zero() {
                        continue;
                    }
                    let c = R::from_scalar(c, prec);
                    let d = R::from_scalar(&d, prec);
                    let sigma = if plus { 1.0 } else { -1.0 };
                    let term = match which {
                        Quantity::F | Quantity::FPlusG => c.mul(&d.ln()).neg(),
                        Quantity::D1 | Quantity::D1FPlusG => {
                            c.div(&d).mul(&R::from_f64(-sigma, prec))
                        }
                        Quantity::D2 => c.div(&d.mul(&d)),
                        Quantity::D3 => c
                            .div(&d.mul(&d).mul(&d))
                            .mul(&R::from_f64(-2.0 * sigma, prec)),
                        Quantity::G => unreachable!(),
                    };
                    acc.add_assign(&term);
                }
            }
        }
        if matches!(which, Quantity::G | Quantity::FPlusG | Quantity::D1FPlusG) {
            let xr = R::from_scalar(x, prec);
            let (v, d) = self.g.eval(&xr, pos, prec);
            if which == Quantity::D1FPlusG {
                acc.add_assign(&d);
            } else {
                acc.add_assign(&v);
            }
        }
        Ok(acc)
    }

    /// Plain `f64` evaluation straight from the formula, used as an
    /// independent reference.
    pub fn eval_f64(&self, x: f64, which: Quantity) -> f64 {
        if let Some(h) = &self.constant {
            return match which {
                Quantity::F | Quantity::FPlusG => h.to_f64(),
                _ => 0.0,
            };
        }
        let beta: Vec<f64> = self
            .base
            .discontinuities()
            .iter()
            .map(Scalar::to_f64)
            .collect();
        let r = self.base.r();
        let frac = |v: f64| v - v.floor();
        let mut acc = 0.0;
        if which != Quantity::G {
            for i in 0..r {
                let cp = self.c_plus[i].to_f64();
                let cm = self.c_minus[i].to_f64();
                let dp = frac(x - beta[i]);
                let dm = frac(beta[i + 1] - x);
                acc += match which {
                    Quantity::F | Quantity::FPlusG => -cp * dp.ln() - cm * dm.ln(),
                    Quantity::D1 | Quantity::D1FPlusG => -cp / dp + cm / dm,
                    Quantity::D2 => cp / (dp * dp) + cm / (dm * dm),
                    Quantity::D3 => -2.0 * cp / dp.powi(3) + 2.0 * cm / dm.powi(3),
                    Quantity::G => 0.0,
                };
            }
        }
        if matches!(which, Quantity::G | Quantity::FPlusG | Quantity::D1FPlusG) {
            let pos = beta[1..r].iter().filter(|b| **b <= x).count();
            let (v, d) = self.g.eval(&x, pos, 53);
            acc += if which == Quantity::D1FPlusG { d } else { v };
        }
        acc
    }

    /// Minimum of `f + g` over all base intervals at the certification
    /// precision, minus a rigorous allowance for the bracket width.
    fn certify_minimum(&self) -> Result<(f64, f64)> {
        let engine = super::engine::RoofEngine::<Float>::new(self, CERTIFY_PRECISION, 1)?;
        let mut best: Option<(f64, f64)> = None;
        for b in engine.level(1) {
            let shape = b.shape();
            let (lb, at) = shape.min_lower_bound(&b);
            if best.map_or(true, |(v, _)| lb < v) {
                best = Some((lb, at));
            }
        }
        Ok(best.expect("at least one interval"))
    }

    /// `sum c+_i == sum c-_{i+1}`, exactly.
    pub fn is_symmetric(&self) -> bool {
        let p: Scalar = self.c_plus.iter().sum();
        let m: Scalar = self.c_minus.iter().sum();
        p == m
    }
}

pub fn is_symmetric(roof: &RoofFunction) -> bool {
    roof.is_symmetric()
}

/// `f^{(n)}(x)` with an accumulated rounding bound.
#[derive(Clone, Debug, Serialize)]
pub struct BirkhoffSum {
    pub value: Scalar,
    pub error_bound: f64,
}

/// Ergodic sums `f(x) + ... + f(T^{n-1} x)` for `n > 0`, 0 for `n = 0`, and
/// `-(f(T^n x) + ... + f(T^{-1} x))` for `n < 0`.
pub fn birkhoff(
    roof: &RoofFunction,
    x: &Scalar,
    n: i64,
    which: Quantity,
    prec: u32,
) -> Result<BirkhoffSum> {
    let t = roof.base();
    t.locate(x)?;
    let (mut y, sign, count) = if n >= 0 {
        (x.clone(), 1, n)
    } else {
        (t.iterate(x, n)?, -1, -n)
    };
    let mut acc = Float::with_val(prec, 0);
    let mut mag = 0.0f64;
    let first = if n >= 0 { 0 } else { n };
    for k in 0..count {
        let v: Float = roof.eval_real(&y, which, prec).map_err(|e| match e {
            Error::AtSingularity { index, .. } => Error::AtSingularity {
                index,
                iterate: first + k,
            },
            other => other,
        })?;
        mag += v.to_f64().abs();
        acc += &v;
        if k + 1 < count {
            y = t.evaluate(&y)?;
        }
    }
    if sign < 0 {
        acc = -acc;
    }
    let ulp = 2f64.powi(-(prec as i32) + 4);
    let exact = roof.constant().is_some() && x.is_exact();
    let value = if exact {
        // constant roofs stay in exact arithmetic
        let h = roof.constant().expect("checked").clone();
        match which {
            Quantity::F | Quantity::FPlusG => &h * &Scalar::int(n),
            _ => Scalar::zero(),
        }
    } else {
        Scalar::float(acc)
    };
    Ok(BirkhoffSum {
        value,
        error_bound: if exact {
            0.0
        } else {
            mag * ulp * (count as f64 + 1.0)
        },
    })
}

/// Partition points of `[0, 1)` on which `f^{(j)}` is continuous.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuityPartition {
    pub j: usize,
    pub points: Vec<Scalar>,
    pub lengths: Vec<Scalar>,
}

pub fn continuity_partition(roof: &RoofFunction, j: usize) -> Result<ContinuityPartition> {
    if j == 0 {
        return Err(Error::Invalid("j must be at least 1".into()));
    }
    let t = roof.base();
    let table = OrbitTable::new(t, -(j as i64), 1)?;
    let points: Vec<Scalar> = global_points(t, &table, j)
        .into_iter()
        .map(|p| p.0)
        .collect();
    let mut lengths: Vec<Scalar> = points.windows(2).map(|w| &w[1] - &w[0]).collect();
    lengths.push(t.total() - points.last().expect("nonempty"));
    Ok(ContinuityPartition { j, points, lengths })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::partitions::partition_global;

    fn ones(r: usize) -> Vec<Scalar> {
        vec![Scalar::one(); r]
    }

    fn unit_golden() -> RoofFunction {
        make_roof(Iet::golden(), ones(2), ones(2), GSpec::zero()).unwrap()
    }

    fn half() -> Iet {
        Iet::rotation(Scalar::ratio(1, 2), Scalar::ratio(1, 2)).unwrap()
    }

    #[test]
    fn golden_roof_is_valid() {
        let roof = unit_golden();
        assert!(roof.min_value() > 0.0);
        assert_eq!(roof.pattern(), ZeroPattern::None);
        // interval minima are attained inside, not at the guards
        let direct = roof.eval_f64(roof.min_location(), Quantity::F);
        assert!(direct >= roof.min_value());
        assert!(direct - roof.min_value() < 1e-9);
    }

    #[test]
    fn steep_slope_is_rejected() {
        let g = GSpec {
            slope: Scalar::int(-1_000_000),
            ..GSpec::zero()
        };
        let err = make_roof(Iet::golden(), ones(2), ones(2), g).unwrap_err();
        assert!(matches!(err, Error::NonpositiveRoof { .. }));
    }

    #[test]
    fn constants_are_checked() {
        let neg = vec![Scalar::one(), Scalar::int(-1)];
        assert!(matches!(
            make_roof(Iet::golden(), neg, ones(2), GSpec::zero()),
            Err(Error::NegativeConstant(_))
        ));
        let z = Scalar::zero();
        let bad = make_roof(
            Iet::golden(),
            vec![z.clone(), Scalar::one()],
            ones(2),
            GSpec::zero(),
        );
        assert!(matches!(bad, Err(Error::IllegalZeroPattern(_))));
        let circle = make_roof(
            Iet::golden(),
            vec![Scalar::one(), z.clone()],
            vec![z.clone(), Scalar::one()],
            GSpec::zero(),
        )
        .unwrap();
        assert_eq!(circle.pattern(), ZeroPattern::Circle { i0: 1 });
        let literal = make_roof(
            Iet::golden(),
            vec![Scalar::one(), z.clone()],
            vec![Scalar::one(), z],
            GSpec::zero(),
        )
        .unwrap();
        assert_eq!(literal.pattern(), ZeroPattern::Literal { i0: 1 });
        let drift = GSpec {
            poly: vec![Scalar::zero(), Scalar::one()],
            ..GSpec::zero()
        };
        assert!(matches!(
            make_roof(Iet::golden(), ones(2), ones(2), drift),
            Err(Error::NonzeroMeanDerivative(_))
        ));
    }

    #[test]
    fn symmetry_flag() {
        assert!(unit_golden().is_symmetric());
        let t = Iet::golden();
        let lop = make_roof(
            t.clone(),
            vec![Scalar::int(2), Scalar::one()],
            ones(2),
            GSpec::zero(),
        )
        .unwrap();
        assert!(!is_symmetric(&lop));
        let two = make_roof(
            t,
            vec![Scalar::int(2), Scalar::zero()],
            vec![Scalar::one(), Scalar::one()],
            GSpec::zero(),
        );
        assert!(two.unwrap().is_symmetric());
        // adding g leaves the flag alone
        let g = GSpec {
            slope: Scalar::ratio(1, 3),
            ..GSpec::zero()
        };
        assert!(unit_golden().with_g(g).unwrap().is_symmetric());
    }

    #[test]
    fn quarter_point_value() {
        let roof = make_roof(half(), ones(2), ones(2), GSpec::zero()).unwrap();
        let v = roof
            .eval(&Scalar::ratio(1, 4), Quantity::F, 128)
            .unwrap()
            .to_f64();
        let want = 2.0 * 4f64.ln() + 2.0 * (4.0f64 / 3.0).ln();
        assert!((v - want).abs() < 1e-14);
        assert!((roof.eval_f64(0.25, Quantity::F) - want).abs() < 1e-14);
        assert!(matches!(
            roof.eval(&Scalar::ratio(1, 2), Quantity::F, 128),
            Err(Error::AtSingularity { index: 1, .. })
        ));
        assert!(matches!(
            roof.eval(&Scalar::zero(), Quantity::D1, 128),
            Err(Error::AtSingularity { index: 0, .. })
        ));
        // g alone is defined everywhere
        assert!(roof
            .eval(&Scalar::ratio(1, 2), Quantity::G, 128)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn derivative_antisymmetry() {
        let roof = make_roof(half(), ones(2), ones(2), GSpec::zero()).unwrap();
        for h in [1, 7, 50, 99] {
            let h = Scalar::ratio(h, 400);
            let a = roof
                .eval(&(&Scalar::ratio(1, 4) + &h), Quantity::D1, 128)
                .unwrap();
            let b = roof
                .eval(&(&Scalar::ratio(1, 4) - &h), Quantity::D1, 128)
                .unwrap();
            assert!((&a + &b).abs().to_f64() < 1e-30);
            let d2 = roof
                .eval(&(&Scalar::ratio(1, 4) + &h), Quantity::D2, 128)
                .unwrap();
            assert!(d2.is_positive());
        }
    }

    #[test]
    fn birkhoff_cases_and_cocycle() {
        let roof = unit_golden();
        let x = Scalar::ratio(1, 3);
        assert!(birkhoff(&roof, &x, 0, Quantity::F, 128)
            .unwrap()
            .value
            .is_zero());
        let one = birkhoff(&roof, &x, 1, Quantity::F, 128).unwrap().value;
        assert_eq!(one, roof.eval(&x, Quantity::F, 128).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = Scalar::ratio(rng.gen_range(1..9999), 10_000);
            let m: i64 = rng.gen_range(-20..20);
            let n: i64 = rng.gen_range(-20..20);
            let lhs = birkhoff(&roof, &x, m + n, Quantity::F, 128).unwrap();
            let a = birkhoff(&roof, &x, m, Quantity::F, 128).unwrap();
            let tx = roof.base().iterate(&x, m).unwrap();
            let b = birkhoff(&roof, &tx, n, Quantity::F, 128).unwrap();
            let err = (&lhs.value - &(&a.value + &b.value)).abs().to_f64();
            assert!(
                err <= lhs.error_bound + a.error_bound + b.error_bound + 1e-30,
                "{err}"
            );
        }
    }

    #[test]
    fn birkhoff_reports_iterate() {
        let roof = unit_golden();
        let beta = roof.base().discontinuities()[1].clone();
        let x = roof.base().iterate(&beta, -3).unwrap();
        match birkhoff(&roof, &x, 6, Quantity::F, 128) {
            Err(Error::AtSingularity { iterate, .. }) => assert_eq!(iterate, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partition_matches_global() {
        let roof = unit_golden();
        let one = continuity_partition(&roof, 1).unwrap();
        assert_eq!(one.points, roof.base().discontinuities()[..2].to_vec());
        assert_eq!(continuity_partition(&roof, 3).unwrap().lengths.len(), 4);
        for j in [1, 2, 5, 17, 60, 100] {
            let p = continuity_partition(&roof, j).unwrap();
            let q = partition_global(roof.base(), j).unwrap();
            assert_eq!(p.points, q.points);
        }
    }

    #[test]
    fn sums_grow_by_the_minimum() {
        let roof = unit_golden();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = Scalar::golden().to_f64();
        for _ in 0..200 {
            let x: f64 = rng.gen();
            let mut y = x;
            let mut sum = 0.0;
            for _ in 0..30 {
                let next = sum + roof.eval_f64(y, Quantity::F);
                assert!(next >= sum + roof.min_value() - 1e-9);
                sum = next;
                y = (y + a).fract();
            }
        }
    }
}
