//! Dedekind eta and the modular discriminant Delta as a function on lattices.
//!
//! eta(tau) = q^{1/24} prod_{n>=1} (1 - q^n) with q = e^{2 pi i tau}, and
//! Delta(tau) = eta(tau)^24.  On a lattice with oriented basis (omega1,
//! omega2), Delta(L) = omega2^{-12} Delta(omega1/omega2); unimodular basis
//! changes leave it fixed, and Delta(alpha L) = alpha^{-12} Delta(L).
//!
//! tau is first reduced into the standard fundamental domain by the SL_2(Z)
//! reduction algorithm while tracking the eta multiplier through
//! eta(tau+1) = e^{i pi/12} eta(tau) and eta(-1/tau) = sqrt(-i tau) eta(tau),
//! so the q-series always runs at |q| <= e^{-pi sqrt(3)} ~ 0.0043.

use super::{Complex, PrecisionContext};
use crate::error::{Error, Result};
use rug::Float;

/// An oriented lattice basis.  `normalized` swaps generators if needed so
/// the period ratio lands in the upper half plane.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    pub omega1: Complex,
    pub omega2: Complex,
}

impl LatticeBasis {
    pub fn new(omega1: Complex, omega2: Complex) -> Self {
        LatticeBasis { omega1, omega2 }
    }

    /// (tau, denominator) with Im(tau) > 0, or an error for a degenerate
    /// (real-ratio) basis.
    fn normalized(&self, ctx: &PrecisionContext) -> Result<(Complex, Complex)> {
        if self.omega1.is_zero() || self.omega2.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        let ratio = &self.omega1 / &self.omega2;
        if ratio.im.is_zero() || !ratio.im.is_finite() {
            return Err(Error::DegenerateLattice);
        }
        let _ = ctx;
        if ratio.im.is_sign_positive() {
            Ok((ratio, self.omega2.clone()))
        } else {
            Ok((ratio.recip(), self.omega1.clone()))
        }
    }
}

/// Reduction guard: the standard algorithm terminates in a handful of steps
/// for any tau we construct; this bound only rules out infinite loops on
/// adversarial near-real input.
const MAX_REDUCTION_STEPS: u32 = 20_000;

/// Reduce tau into the fundamental domain |Re| <= 1/2, |tau| >= 1, returning
/// the reduced point and the factor F with eta(tau_input) = F * eta(tau_red).
fn reduce(tau: &Complex, ctx: &PrecisionContext) -> Result<(Complex, Complex)> {
    let prec = ctx.prec_bits();
    let mut t = tau.clone();
    let mut factor = Complex::one(prec);
    for _ in 0..MAX_REDUCTION_STEPS {
        // translate: tau -> tau - n, eta picks up e^{i pi n / 12}
        let n = t.re.clone().round();
        if !n.is_zero() {
            let n_int = n
                .to_integer()
                .and_then(|z| z.to_i64())
                .ok_or_else(|| Error::Domain("tau real part out of range".into()))?;
            t.re -= &n;
            factor = &factor * &ctx.root_of_unity(n_int, 24);
        }
        // invert if inside the unit circle: tau -> -1/tau,
        // eta(tau) = eta(-1/tau) / sqrt(-i tau)
        if t.norm_sqr() < 1u32 {
            let sqrt = (-&t.mul_i()).sqrt(); // sqrt(-i tau)
            factor = &factor / &sqrt;
            t = -&t.recip();
        } else {
            return Ok((t, factor));
        }
    }
    Err(Error::Domain(
        "SL2(Z) reduction did not terminate; tau too close to the real axis".into(),
    ))
}

/// Dedekind eta(tau) for Im(tau) > 0, relative error below
/// `10^-target_digits`.
pub fn dedekind_eta(tau: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    if !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::Domain("eta requires finite tau".into()));
    }
    if !tau.im.is_sign_positive() || tau.im.is_zero() {
        return Err(Error::Domain(format!(
            "eta requires Im(tau) > 0, got Im = {}",
            tau.im
        )));
    }
    let (t, factor) = reduce(tau, ctx)?;

    // log eta(t) = i pi t / 12 + sum_n log(1 - q^n), q = e^{2 pi i t};
    // after reduction |q| <= e^{-pi sqrt 3}, so the sum needs only
    // O(working digits) terms
    let prec = ctx.prec_bits();
    let pi = ctx.pi();
    let i_pi_t = t.mul_i().scale(&pi);
    let q = (&i_pi_t + &i_pi_t).exp();
    let mut log_eta = i_pi_t.scale(&ctx.float_from_ratio(1, 12));
    // |q^n| < 10^-(working digits + 10) terminates the product
    let cutoff_bits = ((ctx.working_digits() as f64 + 10.0) * super::LOG2_10).ceil() as i32;
    let threshold = Float::with_val(prec, Float::i_exp(1, -2 * cutoff_bits));
    let mut q_pow = q.clone();
    let one = Complex::one(prec);
    loop {
        if q_pow.norm_sqr() < threshold {
            break;
        }
        log_eta = &log_eta + &(&one - &q_pow).ln();
        q_pow = &q_pow * &q;
    }
    Ok(&factor * &log_eta.exp())
}

/// Delta(L) = omega2^{-12} eta(omega1/omega2)^{24} on the lattice spanned by
/// the basis; basis-orientation independent and unimodular invariant.
pub fn delta_on_lattice(basis: &LatticeBasis, ctx: &PrecisionContext) -> Result<Complex> {
    let (tau, denom) = basis.normalized(ctx)?;
    let eta = dedekind_eta(&tau, ctx)?;
    Ok(&eta.powi(24) * &denom.powi(-12))
}
