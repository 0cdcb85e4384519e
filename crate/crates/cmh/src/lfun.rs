//! Special values and logarithmic derivatives at s = 0 of Dirichlet
//! L-functions, of zeta, and of the quadratic Hecke character L-function
//! attached to an abelian CM field, plus the completed-Lambda identity.
//!
//! For an odd primitive character chi mod f the closed forms
//!
//!   L(0, chi)  = -(1/f) sum_{a=1}^{f-1} a chi(a)
//!   L'(0, chi) = -log(f) L(0, chi) + sum_{a=1}^{f-1} chi(a) log Gamma(a/f)
//!
//! make both sides finite Gamma-sums; the trivial character contributes the
//! zeta values zeta(0) = -1/2 and zeta'(0) = -(1/2) log(2 pi).  Even
//! nontrivial characters have L(0, chi) = 0 and are rejected: every call
//! site in the height computations is odd-or-trivial by parity, so an even
//! character here is a logic bug, not a degenerate value.
//!
//! Imprimitive characters are rejected rather than silently primitivized:
//! the Artin L-function equals the primitive Dirichlet L-function, and at
//! s = 0 the Euler factors dropped by imprimitivity can vanish, so the
//! caller must decide (and the height code does primitivize explicitly).

use crate::characters::{
    abs_discriminant, field_character_group, AbelianFieldSpec, DirichletCharacter, Parity,
};
use crate::error::{Error, Result};
use crate::numerics::{euler_gamma, log_gamma, Complex, PrecisionContext};
use rug::Float;

/// The three s = 0 quantities for one character, tied by
/// `log_derivative_at_0 * value_at_0 = derivative_at_0`.
#[derive(Clone, Debug)]
pub struct LValueReport {
    pub value_at_0: Complex,
    pub derivative_at_0: Complex,
    pub log_derivative_at_0: Complex,
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    let f = chi.conductor();
    if f != chi.modulus() {
        return Err(Error::NotPrimitive {
            modulus: chi.modulus(),
            conductor: f,
        });
    }
    Ok(())
}

fn require_odd_or_trivial(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_trivial() && chi.parity() == Parity::Even {
        return Err(Error::EvenCharacter {
            modulus: chi.modulus(),
        });
    }
    Ok(())
}

/// `L(0, chi)` for a primitive odd character (finite character sum), or
/// `zeta(0) = -1/2` for the trivial character.
pub fn l_value_at_0(chi: &DirichletCharacter, ctx: &PrecisionContext) -> Result<Complex> {
    require_primitive(chi)?;
    require_odd_or_trivial(chi)?;
    if chi.is_trivial() {
        return Ok(Complex::from_real(ctx.float_from_ratio(-1, 2)));
    }
    let f = chi.modulus();
    let mut acc = Complex::zero(ctx.prec_bits());
    for a in 1..f {
        if let Some(e) = chi.exponent(a) {
            let term = ctx.root_of_unity(e as i64, chi.order());
            acc = &acc + &term.scale(&ctx.float_from(a));
        }
    }
    Ok(acc.scale(&ctx.float_from_ratio(-1, f)))
}

/// `L'(0, chi)` for a primitive odd character (log-Gamma sum), or
/// `zeta'(0) = -(1/2) log(2 pi)` for the trivial character.
pub fn l_derivative_at_0(chi: &DirichletCharacter, ctx: &PrecisionContext) -> Result<Complex> {
    require_primitive(chi)?;
    require_odd_or_trivial(chi)?;
    if chi.is_trivial() {
        return Ok(Complex::from_real(-(ctx.log_2pi() / 2u32)));
    }
    let f = chi.modulus();
    let value = l_value_at_0(chi, ctx)?;
    let mut gamma_sum = Complex::zero(ctx.prec_bits());
    for a in 1..f {
        if let Some(e) = chi.exponent(a) {
            let lg = log_gamma(&ctx.float_from_ratio(a as i64, f), ctx)?;
            let term = ctx.root_of_unity(e as i64, chi.order());
            gamma_sum = &gamma_sum + &term.scale(&lg);
        }
    }
    let log_f = ctx.float_from(f).ln();
    Ok(&(-&value.scale(&log_f)) + &gamma_sum)
}

/// `L'(0, chi) / L(0, chi)` for a primitive odd character, or `log(2 pi)`
/// for the trivial character (zeta neither vanishes nor has a pole at 0).
pub fn l_log_derivative_at_0(
    chi: &DirichletCharacter,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let value = l_value_at_0(chi, ctx)?;
    if chi.is_trivial() {
        return Ok(Complex::from_real(ctx.log_2pi()));
    }
    if value.is_zero() {
        return Err(Error::Internal(format!(
            "L(0, chi) vanished for an odd primitive character mod {}",
            chi.modulus()
        )));
    }
    let derivative = l_derivative_at_0(chi, ctx)?;
    Ok(&derivative / &value)
}

/// All three s = 0 quantities at once.
pub fn l_value_report(chi: &DirichletCharacter, ctx: &PrecisionContext) -> Result<LValueReport> {
    let value_at_0 = l_value_at_0(chi, ctx)?;
    let derivative_at_0 = l_derivative_at_0(chi, ctx)?;
    let log_derivative_at_0 = if chi.is_trivial() {
        Complex::from_real(ctx.log_2pi())
    } else {
        &derivative_at_0 / &value_at_0
    };
    Ok(LValueReport {
        value_at_0,
        derivative_at_0,
        log_derivative_at_0,
    })
}

/// How small the imaginary part of a structurally real sum must be: far
/// below any verification tolerance, far above working-precision noise.
const REALITY_BOUND: f64 = 1e-20;

/// `L'(0, chi_{E/F}) / L(0, chi_{E/F})` for the quadratic Hecke character
/// of a CM extension `E/F`: by the factorization of `zeta_E / zeta_F` this
/// is the sum of `L'(0, chi)/L(0, chi)` over the `d` odd characters of `E`,
/// each primitivized.  The odd characters pair into conjugates, so the sum
/// is real; the imaginary residue is checked against an internal bound.
pub fn hecke_quadratic_log_derivative(
    spec: &AbelianFieldSpec,
    ctx: &PrecisionContext,
) -> Result<Float> {
    spec.require_cm()?;
    let mut acc = Complex::zero(ctx.prec_bits());
    for chi in field_character_group(spec) {
        if chi.parity() == Parity::Odd {
            let prim = chi.primitivize();
            acc = &acc + &l_log_derivative_at_0(&prim, ctx)?;
        }
    }
    if acc.im.clone().abs() > ctx.float_from(REALITY_BOUND) {
        return Err(Error::Internal(format!(
            "Hecke L log-derivative has imaginary part {} (conjugate pairs must cancel)",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// `Lambda'(0, chi_{E/F}) / Lambda(0, chi_{E/F})` for the completed
/// L-function
/// `Lambda(s, chi) = |D_E/D_F|^{s/2} Gamma_R(s+1)^d L(s, chi)`:
///
///   Lambda'/Lambda(0) = L'/L(0) + (1/2) log|D_E/D_F|
///                       - (d/2) log(4 pi e^gamma),
///
/// using `d/ds log Gamma_R(s+1)|_{s=0} = -(1/2) log(4 pi e^gamma)` from
/// `psi(1/2) = -gamma - 2 log 2`.
pub fn completed_lambda_log_derivative(
    spec: &AbelianFieldSpec,
    ctx: &PrecisionContext,
) -> Result<Float> {
    spec.require_cm()?;
    let l_part = hecke_quadratic_log_derivative(spec, ctx)?;
    let d_e = abs_discriminant(spec);
    let d_f = abs_discriminant(&spec.totally_real_subfield()?);
    let disc_part = (ctx.float_from_biguint(&d_e).ln() - ctx.float_from_biguint(&d_f).ln()) / 2u32;
    let d = spec.degree() / 2;
    // log(4 pi e^gamma) = log 4 + log pi + gamma
    let log_4pi_egamma = (ctx.pi() * 4u32).ln() + euler_gamma(ctx);
    Ok(l_part + disc_part - log_4pi_egamma * ctx.float_from_ratio(d as i64, 2))
}
