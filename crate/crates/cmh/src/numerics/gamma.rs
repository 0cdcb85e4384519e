//! log Gamma via the Lerch identity zeta_H'(0,x) = log Gamma(x) - (1/2) log(2 pi).
//!
//! The Hurwitz-zeta derivative kernel is the single error-controlled engine
//! of the crate; routing log Gamma through it means the Chowla-Selberg
//! Gamma-products and the L'(0, chi) sums inherit its accuracy budget.

use super::hurwitz::hurwitz_zeta_ds;
use super::{Complex, PrecisionContext};
use crate::error::{Error, Result};
use rug::Float;

/// Arguments are reduced into (0,1] by log Gamma(x+1) = log Gamma(x) + log x;
/// the cap keeps that loop finite for absurd inputs (nothing in this crate
/// evaluates Gamma beyond small rationals and test points).
const MAX_ARGUMENT: f64 = 1e6;

/// Natural log of Gamma(x) for real x > 0, absolute error below
/// `10^-target_digits`.
pub fn log_gamma(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !x.is_finite() || !x.is_sign_positive() || x.is_zero() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x.to_f64() > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "log_gamma argument cap {MAX_ARGUMENT} exceeded: {x}"
        )));
    }
    // write x = r + n with r in (0,1]; then
    // log Gamma(x) = log Gamma(r) + sum_{j=0}^{n-1} log(r + j)
    let mut shift = ctx.new_float();
    let mut r = ctx.float_from(x);
    let one = ctx.float_from(1);
    while r > one {
        r -= &one;
        shift += r.clone().ln();
    }
    let zero = Complex::zero(ctx.prec_bits());
    let ds = hurwitz_zeta_ds(&zero, &r, ctx)?;
    Ok(ds.re + ctx.log_2pi() / 2u32 + shift)
}
