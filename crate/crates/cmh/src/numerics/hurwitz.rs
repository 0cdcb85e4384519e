//! Hurwitz zeta by Euler-Maclaurin summation, with a termwise-differentiated
//! variant for zeta_H'(s,x), and the Euler-Mascheroni constant.
//!
//! For M large enough,
//!
//! zeta_H(s,x) = sum_{n=0}^{M-1} (n+x)^{-s}
//!             + (M+x)^{1-s}/(s-1) + (M+x)^{-s}/2
//!             + sum_{k=1}^{K} B_{2k}/(2k)! * (s)_{2k-1} * (M+x)^{-s-2k+1}
//!             + R_K(M),
//!
//! where (s)_j is the rising factorial and the remainder obeys the classical
//! Bernoulli-term bound
//!
//! |R_K(M)| <= |B_{2K+2}/(2K+2)!| * |(s)_{2K+1}| * (M+x)^{-Re(s)-2K-1}
//!             * |s+2K+1| / (Re(s)+2K+1).
//!
//! K is fixed at 29 (so the deepest Bernoulli number used is B_60) and M is
//! grown until the bound drops below the working accuracy.  Differentiating
//! every term with respect to s gives zeta_H' with the same error control;
//! the steering bound majorizes the differentiated remainder as well.

use super::bernoulli::bernoulli;
use super::{Complex, PrecisionContext};
use crate::error::{Error, Result};
use rug::Float;
use std::collections::HashMap;
use std::sync::Mutex;

/// Bernoulli tail depth: terms k = 1..=K use B_2..B_58, the bound uses B_60.
const K_TERMS: usize = 29;

/// The remainder bound needs Re(s) + 2K + 1 > 0; stay clear of the edge.
const MIN_RE: f64 = -50.0;

/// Upper bound for log10 |B_{2K+2}/(2K+2)!| via B_{2k}/(2k)! = 2 zeta(2k)/(2 pi)^{2k}.
fn bernoulli_factor_log10(k: usize) -> f64 {
    let n = (2 * k + 2) as f64;
    4f64.log10() - n * (2.0 * std::f64::consts::PI).log10()
}

/// log10 of the Euler-Maclaurin remainder bound for shift M (f64 estimates
/// only steer parameter choice; the margin in `em_core` covers their slack).
///
/// The rising factorial |(s)_{2K+1}| is replaced by the majorant
/// prod_j (|s+j| + 1): at non-positive integer s the true factorial vanishes
/// and would let M collapse, which is fine for the value but not for the
/// derivative, whose remainder does not vanish there.  A further factor
/// (2K + 3 + log(M+x)) covers the product-rule growth under d/ds.
fn tail_bound_log10(s_re: f64, s_im: f64, m: f64, x: f64) -> f64 {
    let mut log10 = bernoulli_factor_log10(K_TERMS);
    for j in 0..(2 * K_TERMS + 1) {
        let re = s_re + j as f64;
        let abs = (re * re + s_im * s_im).sqrt();
        log10 += (abs + 1.0).log10();
    }
    let edge = 2.0 * K_TERMS as f64 + 1.0;
    log10 += (-(s_re) - edge) * (m + x).log10();
    let num = ((s_re + edge) * (s_re + edge) + s_im * s_im).sqrt();
    log10 += (num / (s_re + edge)).log10();
    log10 += (2.0 * K_TERMS as f64 + 3.0 + (m + x).ln()).log10();
    log10
}

/// Shared evaluator; returns (value, derivative if requested).
fn em_core(
    s: &Complex,
    x: &Float,
    want_deriv: bool,
    ctx: &PrecisionContext,
) -> Result<(Complex, Option<Complex>)> {
    if !x.is_finite() || !x.is_sign_positive() || x.is_zero() {
        return Err(Error::Domain(format!("hurwitz_zeta requires x > 0, got {x}")));
    }
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Domain("hurwitz_zeta requires finite s".into()));
    }
    if s.im.is_zero() && s.re == 1u32 {
        return Err(Error::Domain("hurwitz_zeta has a pole at s = 1".into()));
    }
    let s_re = s.re.to_f64();
    let s_im = s.im.to_f64();
    if s_re <= MIN_RE {
        return Err(Error::Domain(format!(
            "hurwitz_zeta continuation supported only for Re(s) > {MIN_RE}, got {s_re}"
        )));
    }

    // choose the shift M against the remainder bound, with margin digits
    let x_f = x.to_f64();
    let goal = -(ctx.working_digits() as f64 + 6.0);
    let s_abs = (s_re * s_re + s_im * s_im).sqrt();
    let mut m: u64 = (s_abs.ceil() as u64).max(4);
    while tail_bound_log10(s_re, s_im, m as f64, x_f) > goal {
        m += m / 4 + 2;
        if m > 200_000 {
            return Err(Error::Internal(
                "Euler-Maclaurin shift failed to converge".into(),
            ));
        }
    }

    // all arithmetic at an elevated precision so accumulated rounding over
    // O(M + K) terms stays far below the advertised accuracy
    let wp = ctx.prec_bits() + 32;
    let up = |f: &Float| Float::with_val(wp, f);
    let s = Complex::new(up(&s.re), up(&s.im));
    let x = up(x);

    // main sum: sum_{n=0}^{M-1} e^{-s log(n+x)}, derivative -log(n+x) * term
    let mut acc = Complex::zero(wp);
    let mut acc_d = Complex::zero(wp);
    for n in 0..m {
        let ln = (x.clone() + n).ln();
        let term = (-&s.scale(&ln)).exp();
        if want_deriv {
            acc_d = &acc_d - &term.scale(&ln);
        }
        acc = &acc + &term;
    }

    let t = x.clone() + m; // M + x
    let ln_t = t.clone().ln();
    let one = Complex::one(wp);
    let s_minus_1 = &s - &one;

    // tail1 = (M+x)^{1-s}/(s-1)
    let pow_1ms = (&(-&s_minus_1).scale(&ln_t)).exp(); // (M+x)^{1-s}
    let tail1 = &pow_1ms / &s_minus_1;
    // d/ds tail1 = -tail1 * log(M+x) - tail1/(s-1)
    let dtail1 = &(-&tail1.scale(&ln_t)) - &(&tail1 / &s_minus_1);

    // tail2 = (M+x)^{-s}/2
    let pow_ms = (-&s.scale(&ln_t)).exp(); // (M+x)^{-s}
    let half = Float::with_val(wp, 0.5);
    let tail2 = pow_ms.scale(&half);
    let dtail2 = -&tail2.scale(&ln_t);

    acc = &(&acc + &tail1) + &tail2;
    if want_deriv {
        acc_d = &(&acc_d + &dtail1) + &dtail2;
    }

    // Bernoulli correction terms; p = (s)_{2k-1} and pd = dp/ds are updated
    // incrementally, q_k = (M+x)^{-s-2k+1} by repeated division by (M+x)^2
    let t_sq = t.clone().square();
    let mut p = s.clone();
    let mut pd = one.clone();
    let mut q = &pow_ms / &Complex::from_real(t.clone());
    for k in 1..=K_TERMS {
        let b = bernoulli(2 * k);
        let mut factorial = rug::Integer::from(1);
        for j in 2..=(2 * k) {
            factorial *= j as u64;
        }
        // B_{2k}/(2k)! as a float at elevated precision
        let coeff_num = Float::with_val(wp, super::integer_from_decimal(&b.numer().to_string()));
        let coeff_den = Float::with_val(wp, super::integer_from_decimal(&b.denom().to_string()))
            * Float::with_val(wp, factorial);
        let coeff = coeff_num / coeff_den;

        let pq = &p * &q;
        acc = &acc + &pq.scale(&coeff);
        if want_deriv {
            // d/ds [p q] = pd q + p q (-log t)
            let d = &(&pd * &q) - &pq.scale(&ln_t);
            acc_d = &acc_d + &d.scale(&coeff);
        }

        if k < K_TERMS {
            // extend the rising factorial by (s+2k-1)(s+2k)
            let f1 = &s + &Complex::from_real(Float::with_val(wp, 2 * k as u32 - 1));
            let f2 = &s + &Complex::from_real(Float::with_val(wp, 2 * k as u32));
            let prod = &f1 * &f2;
            pd = &(&pd * &prod) + &(&p * &(&f1 + &f2));
            p = &p * &prod;
            q = &q / &Complex::from_real(t_sq.clone());
        }
    }

    // round back to the context's advertised precision
    let prec = ctx.prec_bits();
    let down = |c: &Complex| Complex::new(Float::with_val(prec, &c.re), Float::with_val(prec, &c.im));
    let deriv = want_deriv.then(|| down(&acc_d));
    Ok((down(&acc), deriv))
}

/// Hurwitz zeta zeta_H(s,x) = sum_{n>=0} (n+x)^{-s}, analytically continued.
///
/// Absolute error below `10^-target_digits`.  Rejects x <= 0 and the pole
/// s = 1; the continuation is implemented for Re(s) > -50, which covers
/// every use in this crate (special values live near s = 0).
pub fn hurwitz_zeta(s: &Complex, x: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    em_core(s, x, false, ctx).map(|(v, _)| v)
}

/// d/ds of the Hurwitz zeta at (s,x), by termwise differentiation of the
/// same Euler-Maclaurin expansion.  Same domain and error contract as
/// [`hurwitz_zeta`].
pub fn hurwitz_zeta_ds(s: &Complex, x: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    em_core(s, x, true, ctx).map(|(_, d)| d.expect("derivative requested"))
}

/// Riemann zeta at real s as a convenience wrapper: zeta(s) = zeta_H(s, 1).
pub fn riemann_zeta(s: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let sc = Complex::from_real(s.clone());
    let one = ctx.float_from(1);
    Ok(hurwitz_zeta(&sc, &one, ctx)?.re)
}

static GAMMA_CACHE: Mutex<Option<HashMap<u32, Float>>> = Mutex::new(None);

/// The Euler-Mascheroni constant gamma, by the zeta-series acceleration
///
/// gamma = 1 - sum_{k>=2} (zeta(k) - 1)/k,
///
/// whose terms decay like 2^-k.  Cached per working precision.
pub fn euler_gamma(ctx: &PrecisionContext) -> Float {
    let prec = ctx.prec_bits();
    {
        let cache = GAMMA_CACHE.lock().expect("gamma cache poisoned");
        if let Some(map) = cache.as_ref() {
            if let Some(v) = map.get(&prec) {
                return v.clone();
            }
        }
    }
    let one = ctx.float_from(1);
    let mut acc = ctx.float_from(1);
    // (zeta(k)-1)/k < 2^{1-k}; stop once that dips under the working accuracy
    let k_max = prec + 8;
    for k in 2..=k_max {
        let zk = riemann_zeta(&ctx.float_from(k), ctx).expect("zeta(k) for k >= 2 converges");
        acc -= (zk - &one) / ctx.float_from(k);
    }
    let mut cache = GAMMA_CACHE.lock().expect("gamma cache poisoned");
    cache
        .get_or_insert_with(HashMap::new)
        .insert(prec, acc.clone());
    acc
}
