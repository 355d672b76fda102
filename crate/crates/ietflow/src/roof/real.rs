use std::fmt::Debug;

use rug::Float;

use crate::Scalar;

/// Floating arithmetic used by the roof engine: plain `f64` for sweeps and
/// MPFR floats when the precision matters.
pub trait Real: Clone + Debug + Send + Sync + PartialOrd {
    fn from_f64(x: f64, prec: u32) -> Self;
    fn from_scalar(x: &Scalar, prec: u32) -> Self;
    fn prec(&self) -> u32;
    fn to_f64(&self) -> f64;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn ln(&self) -> Self;
    fn cos(&self) -> Self;
    fn sin(&self) -> Self;
    fn add_assign(&mut self, o: &Self);
    fn mul_assign(&mut self, o: &Self);

    /// A running product has drifted far enough from 1 that it should be
    /// folded into a logarithm.
    fn needs_flush(&self) -> bool;
    fn pi(prec: u32) -> Self;
    fn is_finite(&self) -> bool;

    fn zero(prec: u32) -> Self {
        Self::from_f64(0.0, prec)
    }
    fn one(prec: u32) -> Self {
        Self::from_f64(1.0, prec)
    }
    fn to_scalar(&self) -> Scalar;
}

impl Real for f64 {
    fn from_f64(x: f64, _: u32) -> Self {
        x
    }
    fn from_scalar(x: &Scalar, _: u32) -> Self {
        x.to_f64()
    }
    fn prec(&self) -> u32 {
        53
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul_assign(&mut self, o: &Self) {
        *self *= o;
    }
    fn needs_flush(&self) -> bool {
        !(1e-280..=1e280).contains(self)
    }
    fn pi(_: u32) -> Self {
        std::f64::consts::PI
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::float_f64(*self, 53)
    }
}

impl Real for Float {
    fn from_f64(x: f64, prec: u32) -> Self {
        Float::with_val(prec, x)
    }
    fn from_scalar(x: &Scalar, prec: u32) -> Self {
        x.to_float(prec)
    }
    fn prec(&self) -> u32 {
        Float::prec(self)
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
    fn add(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self / o)
    }
    fn neg(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn ln(&self) -> Self {
        self.clone().ln()
    }
    fn cos(&self) -> Self {
        self.clone().cos()
    }
    fn sin(&self) -> Self {
        self.clone().sin()
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul_assign(&mut self, o: &Self) {
        *self *= o;
    }
    fn needs_flush(&self) -> bool {
        // the exponent range of MPFR is far beyond anything reached here
        self.get_exp()
            .is_some_and(|e| !(-1_000_000..=1_000_000).contains(&e))
    }
    fn pi(prec: u32) -> Self {
        Float::with_val(prec, rug::float::Constant::Pi)
    }
    fn is_finite(&self) -> bool {
        Float::is_finite(self)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::float(self.clone())
    }
}

/// `sum c_k log u_k` for a common coefficient, folding the logarithms into
/// running products.
pub(crate) struct LogProduct<R: Real> {
    prod: R,
    acc: R,
}

impl<R: Real> LogProduct<R> {
    pub fn new(prec: u32) -> Self {
        LogProduct {
            prod: R::one(prec),
            acc: R::zero(prec),
        }
    }

    pub fn push(&mut self, u: &R) {
        self.prod.mul_assign(u);
        if self.prod.needs_flush() {
            self.acc.add_assign(&self.prod.ln());
            self.prod = R::one(self.prod.prec());
        }
    }

    pub fn finish(self) -> R {
        self.acc.add(&self.prod.ln())
    }
}
