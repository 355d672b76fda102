//! Exact and high-precision real numbers.
//!
//! A [`Scalar`] is a rational, an element `p + q*sqrt(d)` of a real quadratic
//! field, or a binary floating-point number carrying its own precision.
//! Arithmetic promotes along rational -> quadratic -> float; two different
//! quadratic fields meet in a float of [`MIXED_FIELD_PRECISION`] bits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Precision used when two distinct quadratic fields are combined.
pub const MIXED_FIELD_PRECISION: u32 = 256;

/// Element `re + im*sqrt(d)` with `im != 0` and `d > 1` square-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic {
    re: Rational,
    im: Rational,
    d: u32,
}

impl Quadratic {
    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn radicand(&self) -> u32 {
        self.d
    }

    /// Integer form `(a + b*sqrt(d))/c` with `c > 0` and `gcd(a, b, c) = 1`.
    pub fn integer_form(&self) -> (Integer, Integer, Integer) {
        let c = self.re.denom().clone().lcm(self.im.denom());
        let a = Integer::from(self.re.numer() * (Integer::from(&c / self.re.denom())));
        let b = Integer::from(self.im.numer() * (Integer::from(&c / self.im.denom())));
        (a, b, c)
    }

    fn sign(&self) -> Ordering {
        quadratic_sign(&self.re, &self.im, self.d)
    }

    fn to_float(&self, prec: u32) -> Float {
        let work = prec + 16;
        let re_s = self.re.cmp0();
        let im_s = self.im.cmp0();
        if re_s == Ordering::Equal || re_s == im_s {
            let root = Float::with_val(work, self.d).sqrt();
            let v = Float::with_val(work, &self.im * root) + &self.re;
            Float::with_val(prec, v)
        } else {
            // re and im*sqrt(d) cancel; divide the exact norm by the conjugate
            let norm =
                Rational::from(&self.re * &self.re) - Rational::from(&self.im * &self.im) * self.d;
            let root = Float::with_val(work, self.d).sqrt();
            let conj = Float::with_val(work, &self.re) - Float::with_val(work, &self.im * root);
            Float::with_val(prec, Float::with_val(work, &norm) / conj)
        }
    }
}

/// Sign of `re + im*sqrt(d)`, decided by comparing squares.
fn quadratic_sign(re: &Rational, im: &Rational, d: u32) -> Ordering {
    let rs = re.cmp0();
    let is = im.cmp0();
    if is == Ordering::Equal {
        return rs;
    }
    if rs == Ordering::Equal || rs == is {
        return is;
    }
    let re2 = Rational::from(re * re);
    let im2 = Rational::from(im * im) * d;
    match re2.cmp(&im2) {
        Ordering::Greater => rs,
        Ordering::Less => is,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Split `n` as `s^2 * core` with `core` square-free.
fn square_free_split(mut n: u32) -> (u32, u32) {
    let mut s = 1u32;
    let mut core = 1u32;
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= n as u64 {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
        p += 1;
    }
    core *= n;
    (s, core)
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(Rational),
    Quadratic(Quadratic),
    Float(Float),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::new())
    }

    pub fn one() -> Self {
        Scalar::Rational(Rational::from(1))
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(Rational::from(n))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar::Rational(Rational::from((p, q)))
    }

    pub fn rational(r: Rational) -> Self {
        Scalar::Rational(r)
    }

    /// `re + im*sqrt(d)`; square factors of `d` are pulled out and a vanishing
    /// irrational part demotes the result to a rational.
    pub fn quadratic(re: Rational, im: Rational, d: u32) -> Self {
        let (s, core) = square_free_split(d);
        let im = im * s;
        if core == 1 {
            return Scalar::Rational(re + im);
        }
        if im.cmp0() == Ordering::Equal {
            return Scalar::Rational(re);
        }
        Scalar::Quadratic(Quadratic { re, im, d: core })
    }

    /// `(a + b*sqrt(d))/c`.
    pub fn quadratic_int(a: i64, b: i64, d: u32, c: i64) -> Self {
        assert!(c != 0, "zero denominator");
        Self::quadratic(Rational::from((a, c)), Rational::from((b, c)), d)
    }

    /// `sqrt(n)` for a nonnegative integer, exact.
    pub fn sqrt_int(n: u32) -> Self {
        Self::quadratic(Rational::new(), Rational::from(1), n)
    }

    pub fn float(value: Float) -> Self {
        Scalar::Float(value)
    }

    pub fn float_f64(value: f64, prec: u32) -> Self {
        Scalar::Float(Float::with_val(prec, value))
    }

    /// `(sqrt(5) - 1)/2`, the inverse golden ratio.
    pub fn golden() -> Self {
        Self::quadratic_int(-1, 1, 5, 2)
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Float(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn radicand(&self) -> Option<u32> {
        match self {
            Scalar::Quadratic(q) => Some(q.d),
            _ => None,
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match self {
            Scalar::Float(f) => Some(f.prec()),
            _ => None,
        }
    }

    pub fn sign(&self) -> Ordering {
        match self {
            Scalar::Rational(r) => r.cmp0(),
            Scalar::Quadratic(q) => q.sign(),
            Scalar::Float(f) => f.cmp0().unwrap_or(Ordering::Equal),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Scalar {
        &Scalar::one() / self
    }

    /// Correctly rounded to `prec` bits for exact values; floats are rounded.
    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            Scalar::Rational(r) => Float::with_val(prec, r),
            Scalar::Quadratic(q) => q.to_float(prec),
            Scalar::Float(f) => Float::with_val(prec, f),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64(),
            Scalar::Float(f) => f.to_f64(),
            Scalar::Quadratic(q) => q.to_float(64).to_f64(),
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> Integer {
        match self {
            Scalar::Rational(r) => r.clone().floor().into_numer_denom().0,
            Scalar::Float(f) => f
                .clone()
                .floor()
                .to_integer()
                .expect("floor of a non-finite float"),
            Scalar::Quadratic(q) => {
                let mut prec = 128;
                loop {
                    let approx = q.to_float(prec).floor();
                    let n = approx.to_integer().expect("finite");
                    let low = Scalar::Rational(Rational::from(&n));
                    let high = Scalar::Rational(Rational::from(Integer::from(&n + 1)));
                    if &low <= self && self < &high {
                        return n;
                    }
                    prec *= 2;
                }
            }
        }
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> Scalar {
        self - &Scalar::Rational(Rational::from(self.floor()))
    }

    /// Representative of `self` modulo `m` in `[0, m)`.
    pub fn rem_euclid(&self, m: &Scalar) -> Scalar {
        let q = (self / m).floor();
        self - &(m * &Scalar::Rational(Rational::from(q)))
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn pow_u(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

enum Pair<'a> {
    Rat(&'a Rational, &'a Rational),
    Quad(Quadratic, Quadratic),
    Flt(Float, Float),
}

fn rat_as_quad(r: &Rational, d: u32) -> Quadratic {
    Quadratic {
        re: r.clone(),
        im: Rational::new(),
        d,
    }
}

fn float_prec(a: &Scalar, b: &Scalar) -> u32 {
    match (a.precision(), b.precision()) {
        (Some(p), Some(q)) => p.max(q),
        (Some(p), None) | (None, Some(p)) => p,
        (None, None) => MIXED_FIELD_PRECISION,
    }
}

fn promote<'a>(a: &'a Scalar, b: &'a Scalar) -> Pair<'a> {
    use Scalar::*;
    match (a, b) {
        (Rational(x), Rational(y)) => Pair::Rat(x, y),
        (Rational(x), Quadratic(q)) => Pair::Quad(rat_as_quad(x, q.d), q.clone()),
        (Quadratic(q), Rational(y)) => Pair::Quad(q.clone(), rat_as_quad(y, q.d)),
        (Quadratic(p), Quadratic(q)) if p.d == q.d => Pair::Quad(p.clone(), q.clone()),
        _ => {
            let prec = float_prec(a, b);
            Pair::Flt(a.to_float(prec), b.to_float(prec))
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match promote(self, rhs) {
            Pair::Rat(x, y) => Scalar::Rational(Rational::from(x + y)),
            Pair::Quad(p, q) => Scalar::quadratic(p.re + q.re, p.im + q.im, p.d),
            Pair::Flt(x, y) => Scalar::Float(x + y),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match promote(self, rhs) {
            Pair::Rat(x, y) => Scalar::Rational(Rational::from(x - y)),
            Pair::Quad(p, q) => Scalar::quadratic(p.re - q.re, p.im - q.im, p.d),
            Pair::Flt(x, y) => Scalar::Float(x - y),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match promote(self, rhs) {
            Pair::Rat(x, y) => Scalar::Rational(Rational::from(x * y)),
            Pair::Quad(p, q) => {
                let re = Rational::from(&p.re * &q.re) + Rational::from(&p.im * &q.im) * p.d;
                let im = Rational::from(&p.re * &q.im) + Rational::from(&p.im * &q.re);
                Scalar::quadratic(re, im, p.d)
            }
            Pair::Flt(x, y) => Scalar::Float(x * y),
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        match promote(self, rhs) {
            Pair::Rat(x, y) => Scalar::Rational(Rational::from(x / y)),
            Pair::Quad(p, q) => {
                // multiply through by the conjugate of the divisor
                let norm = Rational::from(&q.re * &q.re) - Rational::from(&q.im * &q.im) * q.d;
                let re =
                    (Rational::from(&p.re * &q.re) - Rational::from(&p.im * &q.im) * p.d) / &norm;
                let im = (Rational::from(&p.im * &q.re) - Rational::from(&p.re * &q.im)) / &norm;
                Scalar::quadratic(re, im, p.d)
            }
            Pair::Flt(x, y) => Scalar::Float(x / y),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(Rational::from(-r)),
            Scalar::Quadratic(q) => Scalar::Quadratic(Quadratic {
                re: Rational::from(-&q.re),
                im: Rational::from(-&q.im),
                d: q.d,
            }),
            Scalar::Float(f) => Scalar::Float(Float::with_val(f.prec(), -f)),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rational(r)
    }
}

fn compare(a: &Scalar, b: &Scalar) -> Ordering {
    use Scalar::*;
    match (a, b) {
        (Rational(x), Rational(y)) => x.cmp(y),
        (Float(_), _) | (_, Float(_)) => {
            let prec = float_prec(a, b) + 64;
            a.to_float(prec)
                .partial_cmp(&b.to_float(prec))
                .expect("NaN in comparison")
        }
        (Quadratic(p), Quadratic(q)) if p.d != q.d => {
            // distinct fields never meet, so a fine enough float settles it
            let mut prec = 128;
            loop {
                let x = a.to_float(prec);
                let y = b.to_float(prec);
                let gap = rug::Float::with_val(prec, &x - &y);
                let scale = rug::Float::with_val(prec, x.abs_ref()) + 1;
                let tiny = scale * rug::Float::with_val(prec, 2).pow(-(prec as i32) + 8);
                if gap.clone().abs() > tiny {
                    return gap.cmp0().expect("finite");
                }
                prec *= 2;
            }
        }
        _ => (a - b).sign(),
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        compare(self, other) == Ordering::Equal
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

fn fmt_signed_term(f: &mut fmt::Formatter<'_>, b: &Integer, d: u32) -> fmt::Result {
    if b.cmp0() == Ordering::Less {
        write!(f, "-{}*sqrt({})", Integer::from(-b), d)
    } else {
        write!(f, "+{}*sqrt({})", b, d)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if *r.denom() == 1 {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Quadratic(q) => {
                let (a, b, c) = q.integer_form();
                write!(f, "({}", a)?;
                fmt_signed_term(f, &b, q.d)?;
                write!(f, ")/{}", c)
            }
            Scalar::Float(x) => write!(f, "float:{}@{}", x.to_string_radix(10, None), x.prec()),
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    if let Some((p, q)) = s.split_once('/') {
        let p = Integer::from_str(p.trim()).map_err(|_| bad())?;
        let q = Integer::from_str(q.trim()).map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        Ok(Rational::from((p, q)))
    } else if s.contains(['.', 'e', 'E']) {
        // plain decimals are read exactly
        Rational::from_str_radix(&decimal_to_fraction(s).ok_or_else(bad)?, 10).map_err(|_| bad())
    } else {
        Ok(Rational::from(Integer::from_str(s).map_err(|_| bad())?))
    }
}

fn decimal_to_fraction(s: &str) -> Option<String> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let scale = frac.len() as i32 - exp;
    let sign = if neg { "-" } else { "" };
    let digits = if digits.is_empty() {
        "0".to_string()
    } else {
        digits
    };
    Some(if scale >= 0 {
        format!("{sign}{digits}/1{}", "0".repeat(scale as usize))
    } else {
        format!("{sign}{digits}{}", "0".repeat((-scale) as usize))
    })
}

fn parse_quadratic(s: &str) -> Result<Scalar, Error> {
    let bad = || Error::Parse(format!("bad quadratic '{s}'"));
    let (body, denom) = match s.strip_prefix('(') {
        Some(rest) => {
            let close = rest.rfind(')').ok_or_else(bad)?;
            let after = rest[close + 1..].trim();
            let denom = match after.strip_prefix('/') {
                Some(c) => Integer::from_str(c.trim()).map_err(|_| bad())?,
                None if after.is_empty() => Integer::from(1),
                None => return Err(bad()),
            };
            (&rest[..close], denom)
        }
        None => (s, Integer::from(1)),
    };
    if denom == 0 {
        return Err(bad());
    }
    let sq = body.find("sqrt(").ok_or_else(bad)?;
    let close = body[sq..].find(')').ok_or_else(bad)? + sq;
    let d: u32 = body[sq + 5..close].trim().parse().map_err(|_| bad())?;
    if !body[close + 1..].trim().is_empty() {
        return Err(bad());
    }
    let head = body[..sq].trim_end();
    let head = head.strip_suffix('*').unwrap_or(head).trim_end();
    // split "a+b" or "a-b" at the last sign that is not leading
    let split = head
        .char_indices()
        .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
        .map(|(i, _)| i)
        .last();
    let (a, b) = match split {
        Some(i) => (head[..i].trim(), head[i..].trim()),
        None => ("0", head),
    };
    let b = match b {
        "" | "+" => "1".to_string(),
        "-" => "-1".to_string(),
        other => other.trim_start_matches('+').replace(' ', ""),
    };
    let a = parse_rational(a)?;
    let b = parse_rational(&b)?;
    let c = Rational::from(denom);
    Ok(Scalar::quadratic(a / &c, b / &c, d))
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("float:") {
            let (val, bits) = rest
                .rsplit_once('@')
                .ok_or_else(|| Error::Parse(format!("float literal needs @bits: '{s}'")))?;
            let bits: u32 = bits
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad precision in '{s}'")))?;
            if !(2..=1 << 20).contains(&bits) {
                return Err(Error::Parse(format!("precision out of range in '{s}'")));
            }
            let parsed =
                Float::parse(val.trim()).map_err(|_| Error::Parse(format!("bad float '{s}'")))?;
            return Ok(Scalar::Float(Float::with_val(bits, parsed)));
        }
        if s.contains("sqrt") {
            return parse_quadratic(s);
        }
        parse_rational(s).map(Scalar::Rational)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn golden_identities() {
        let a = Scalar::golden();
        let a2 = &a * &a;
        assert_eq!(&a2 + &a, Scalar::one());
        assert_eq!(a.recip(), &a + &Scalar::one());
        assert!(a.is_positive());
        assert_eq!(a.floor(), 0);
    }

    #[test]
    fn sign_near_cancellation() {
        // 6765*alpha - 4181 is tiny and negative
        let a = Scalar::golden();
        let v = &(&Scalar::int(6765) * &a) - &Scalar::int(4181);
        assert!(v.is_positive() || v.is_negative());
        let f = v.to_f64();
        let expect = 6765.0 * ((5f64).sqrt() - 1.0) / 2.0 - 4181.0;
        assert!((f - expect).abs() < 1e-9);
        assert_eq!(v.sign(), expect.partial_cmp(&0.0).unwrap());
        // relative accuracy despite cancellation
        let hi = v.to_float(200);
        let rel = Float::with_val(200, (Float::with_val(200, f) - &hi) / &hi).abs();
        assert!(rel < 1e-15);
    }

    #[test]
    fn parse_display_round_trip() {
        for text in [
            "3/5",
            "-7",
            "(1+3*sqrt(5))/2",
            "(-1+1*sqrt(5))/2",
            "(2-1*sqrt(3))/7",
        ] {
            let v = s(text);
            assert_eq!(s(&v.to_string()), v, "{text}");
        }
        assert_eq!(s("sqrt(8)"), &Scalar::int(2) * &Scalar::sqrt_int(2));
        assert_eq!(s("sqrt(9)"), Scalar::int(3));
        assert_eq!(s("0.25"), Scalar::ratio(1, 4));
        let f = s("float:0.1@128");
        assert_eq!(f.precision(), Some(128));
        assert_eq!(s(&f.to_string()).to_float(128), f.to_float(128));
    }

    #[test]
    fn mixed_fields_promote() {
        let v = &Scalar::sqrt_int(2) + &Scalar::sqrt_int(3);
        assert_eq!(v.precision(), Some(MIXED_FIELD_PRECISION));
        assert!(Scalar::sqrt_int(2) < Scalar::sqrt_int(3));
        assert!((v.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn rem_and_fract() {
        assert_eq!(s("7/5").fract(), s("2/5"));
        assert_eq!(s("-1/5").fract(), s("4/5"));
        let a = Scalar::golden();
        assert_eq!(
            (&a * &Scalar::int(3)).fract(),
            &(&a * &Scalar::int(3)) - &Scalar::one()
        );
        assert_eq!(s("-3/10").rem_euclid(&s("1/2")), s("1/5"));
    }

    #[test]
    fn bad_inputs() {
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("float:1.0".parse::<Scalar>().is_err());
        assert!("(1+2*sqrt(x))/3".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }
}
