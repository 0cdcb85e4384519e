//! A small arbitrary-precision complex type over `rug::Float`.
//!
//! Only the operations the rest of the crate needs: field arithmetic,
//! exp/ln/sqrt (principal branches), integer powers, conjugation and
//! absolute values.  Both components always carry the same mantissa
//! precision, inherited from whichever context created them.

use rug::Float;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Complex number with `rug::Float` components.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    /// Real number promoted to complex.
    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Complex {
            re: Float::with_val(prec, 1),
            im: Float::new(prec),
        }
    }

    /// The imaginary unit.
    pub fn i(prec: u32) -> Self {
        Complex {
            re: Float::new(prec),
            im: Float::with_val(prec, 1),
        }
    }

    /// Mantissa precision in bits (components always agree).
    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Complex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|^2.
    pub fn norm_sqr(&self) -> Float {
        let rr = self.re.clone().square();
        let ii = self.im.clone().square();
        rr + ii
    }

    /// |z| = sqrt(re^2 + im^2), computed without overflow via `hypot`.
    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    /// e^z = e^re (cos im + i sin im).
    pub fn exp(&self) -> Self {
        let r = self.re.clone().exp();
        let (sin, cos) = self.im.clone().sin_cos(Float::new(self.prec()));
        Complex {
            re: r.clone() * cos,
            im: r * sin,
        }
    }

    /// Principal logarithm: log|z| + i arg(z).  Caller must keep z != 0.
    pub fn ln(&self) -> Self {
        debug_assert!(!self.is_zero(), "log of zero");
        Complex {
            re: self.abs().ln(),
            im: self.arg(),
        }
    }

    /// Principal square root with branch cut on the negative real axis.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let r = self.abs().sqrt();
        let half_arg = self.arg() / 2u32;
        let (sin, cos) = half_arg.sin_cos(Float::new(self.prec()));
        Complex {
            re: r.clone() * cos,
            im: r * sin,
        }
    }

    /// 1/z.
    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Complex {
            re: self.re.clone() / &n,
            im: -self.im.clone() / n,
        }
    }

    /// z^k for any integer k, by binary powering (k < 0 inverts at the end).
    pub fn powi(&self, k: i64) -> Self {
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        let mut acc = Complex::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        if k < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// z * (real scalar).
    pub fn scale(&self, s: &Float) -> Self {
        Complex {
            re: self.re.clone() * s,
            im: self.im.clone() * s,
        }
    }

    /// z * i, as a rotation rather than a multiplication.
    pub fn mul_i(&self) -> Self {
        Complex {
            re: -self.im.clone(),
            im: self.re.clone(),
        }
    }

    /// |self - other|, the metric used by all approximate assertions.
    pub fn dist(&self, other: &Complex) -> Float {
        (self - other).abs()
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{} - {}i", self.re, self.im.clone().abs())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl Add for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex {
            re: self.re.clone() + &rhs.re,
            im: self.im.clone() + &rhs.im,
        }
    }
}

impl Sub for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex {
            re: self.re.clone() - &rhs.re,
            im: self.im.clone() - &rhs.im,
        }
    }
}

impl Mul for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let re = self.re.clone() * &rhs.re - self.im.clone() * &rhs.im;
        let im = self.re.clone() * &rhs.im + self.im.clone() * &rhs.re;
        Complex { re, im }
    }
}

impl Div for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        self * &rhs.recip()
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}
