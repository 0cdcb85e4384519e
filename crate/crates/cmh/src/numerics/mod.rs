//! High-precision real and complex special functions: Hurwitz zeta by
//! Euler-Maclaurin summation, log-Gamma via the Lerch identity
//! zeta_H'(0,x) = log Gamma(x) - (1/2) log(2 pi), the Dedekind eta function
//! with SL_2(Z) reduction, and the modular discriminant Delta on lattices.
//!
//! Everything downstream (L-values, Chowla-Selberg, Colmez heights) reduces
//! to these kernels, so each carries an explicit error budget: a value
//! returned under a [`PrecisionContext`] differs from the true value by less
//! than `10^-target_digits` (absolutely for additive quantities, relatively
//! for eta and Delta, as documented per operation).

pub mod bernoulli;
pub mod complex;
pub mod eta;
pub mod gamma;
pub mod hurwitz;

pub use complex::Complex;
pub use eta::{dedekind_eta, delta_on_lattice, LatticeBasis};
pub use gamma::log_gamma;
pub use hurwitz::{euler_gamma, hurwitz_zeta, hurwitz_zeta_ds};

use crate::error::{Error, Result};
use rug::ops::Pow;
use rug::Float;

/// log_2(10), used to convert decimal digit counts into bits of mantissa.
const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Bridge from `num` bignums (which serialize as decimal strings) to `rug`.
pub(crate) fn integer_from_decimal(s: &str) -> rug::Integer {
    rug::Integer::from(rug::Integer::parse(s).expect("valid decimal integer"))
}

/// Working precision plus the accuracy target every operation promises.
///
/// `working_digits` is the number of decimal digits carried by all
/// intermediate arithmetic; `target_digits = working_digits - 10` is the
/// number of digits the caller may trust.  The ten guard digits absorb
/// cancellation and accumulated rounding in the longest summation loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    working_digits: u32,
    target_digits: u32,
}

impl PrecisionContext {
    /// Context with the given working precision and the default ten guard
    /// digits.  Rejects anything below 30 working digits: the acceptance
    /// tolerances assume real headroom.
    pub fn new(working_digits: u32) -> Result<Self> {
        if working_digits < 30 {
            return Err(Error::InvalidPrecision(format!(
                "need at least 30 working digits, got {working_digits}"
            )));
        }
        Ok(PrecisionContext {
            working_digits,
            target_digits: working_digits - 10,
        })
    }

    /// Default context: 50 working digits, 40 trustworthy.
    pub fn standard() -> Self {
        PrecisionContext::new(50).expect("50 digits is a valid precision")
    }

    pub fn working_digits(&self) -> u32 {
        self.working_digits
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    /// `10^-target_digits` as a float at working precision.
    pub fn target_tolerance(&self) -> Float {
        let mut t = self.float_from(10);
        t = t.pow(-(self.target_digits as i32));
        t
    }

    /// Mantissa bits used for all `rug::Float` values under this context.
    /// A couple of extra digits plus 16 bits absorb per-operation rounding.
    pub fn prec_bits(&self) -> u32 {
        ((self.working_digits as f64 + 2.0) * LOG2_10).ceil() as u32 + 16
    }

    /// Fresh zero at working precision.
    pub fn new_float(&self) -> Float {
        Float::new(self.prec_bits())
    }

    /// Convert anything `rug` can assign (integers, f64, other floats).
    pub fn float_from<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec_bits(), v)
    }

    /// Exact rational p/q as a float at working precision.
    pub fn float_from_ratio(&self, p: i64, q: u64) -> Float {
        let num = self.float_from(p);
        num / self.float_from(q)
    }

    /// A `num` bignum rational at working precision.
    pub fn float_from_rational(&self, r: &num_rational::BigRational) -> Float {
        let num = Float::with_val(self.prec_bits(), integer_from_decimal(&r.numer().to_string()));
        let den = Float::with_val(self.prec_bits(), integer_from_decimal(&r.denom().to_string()));
        num / den
    }

    /// A `num` bignum unsigned integer at working precision.
    pub fn float_from_biguint(&self, n: &num_bigint::BigUint) -> Float {
        Float::with_val(self.prec_bits(), integer_from_decimal(&n.to_string()))
    }

    /// pi at working precision.
    pub fn pi(&self) -> Float {
        Float::with_val(self.prec_bits(), rug::float::Constant::Pi)
    }

    /// log(2 pi) at working precision.
    pub fn log_2pi(&self) -> Float {
        let two_pi = self.pi() * 2u32;
        two_pi.ln()
    }

    /// e^{2 pi i (num/den)}: an exact root of unity evaluated at working
    /// precision.  `num` is reduced mod `den` first so the argument to
    /// sin/cos stays in [0, 2 pi).
    pub fn root_of_unity(&self, num: i64, den: u64) -> Complex {
        debug_assert!(den > 0);
        let d = den as i64;
        let r = num.rem_euclid(d);
        let theta = self.pi() * 2u32 * self.float_from(r) / self.float_from(den);
        let (sin, cos) = theta.sin_cos(self.new_float());
        Complex::new(cos, sin)
    }
}
