//! Colmez heights, the averaged Colmez identity (both sides), the three
//! Chowla-Selberg forms, CM elliptic Faltings heights, and the arithmetic
//! degree functional.
//!
//! The two sides of every identity here are built from disjoint code
//! paths.  Class-group sides go through reduced binary quadratic forms and
//! the modular discriminant; L-function sides go through finite character
//! sums and the Hurwitz-zeta kernel.  They only share the base numerics.
//!
//! For an imaginary quadratic field of discriminant `D` with class number
//! `h`, unit count `w` and quadratic character `chi`:
//!
//!   (product)  (2 pi |D|)^(12h) prod_a Delta(a) Delta(a^-1)
//!                = prod_t Gamma(t/|D|)^(6 w chi(t))
//!   (log)      (1/24h) sum_a log|Delta(a) Delta(a^-1)|
//!                = (1/2) L'(0,chi)/L(0,chi) - (1/2) log 2 pi
//!   (lerch)    log|D| + L'(0,chi)/L(0,chi)
//!                = (w/2h) sum_t chi(t) log Gamma(t/|D|)
//!
//! and the Faltings height of a CM elliptic curve is
//! `-(1/2h) sum_a log(4 pi^2 |D|^(1/2) |Delta(a) Delta(a^-1)|^(1/12))`.
//!
//! For an abelian CM field of degree `2d`, the Colmez height of a CM type
//! is `-Z - mu/2` with `Z = sum m(chi) L'(0,chi)/L(0,chi)` and
//! `mu = sum m(chi) log f_chi` over the Artin decomposition of `A^0`; the
//! averaged identity states that the mean over all `2^d` CM types equals
//! `-(1/2) L'(0,chi_{E/F})/L(0,chi_{E/F}) - (1/4) log|D_E/D_F|
//!  - (d/2) log 2 pi`.

use crate::characters::{abs_discriminant, kronecker_character, AbelianFieldSpec};
use crate::cmgalois::{
    a0_function, a0_of_sharp, artin_decompose, enumerate_cm_types, total_reflex_pair,
    CMType, ClassFunction,
};
use crate::error::{Error, Result};
use crate::lfun::{hecke_quadratic_log_derivative, l_log_derivative_at_0};
use crate::numerics::{delta_on_lattice, log_gamma, Complex, LatticeBasis, PrecisionContext};
use rug::ops::Pow;
use rug::Float;

// ---------------------------------------------------------------------------
// binary quadratic forms and class groups
// ---------------------------------------------------------------------------

/// A reduced primitive positive definite binary quadratic form
/// `a x^2 + b x y + c y^2` of negative discriminant; these represent the
/// ideal classes of the imaginary quadratic order of that discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReducedForm {
    a: i64,
    b: i64,
    c: i64,
}

impl ReducedForm {
    /// Validate an already-reduced form.
    pub fn new(a: i64, b: i64, c: i64) -> Result<ReducedForm> {
        let disc = b * b - 4 * a * c;
        if a <= 0 || disc >= 0 {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}, {c}) is not positive definite"
            )));
        }
        if gcd3(a, b, c) != 1 {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}, {c}) is not primitive"
            )));
        }
        if b.abs() > a || a > c || ((b.abs() == a || a == c) && b < 0) {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}, {c}) is not reduced"
            )));
        }
        Ok(ReducedForm { a, b, c })
    }

    /// Gauss-reduce an arbitrary primitive positive definite form.
    pub fn reduce(a: i64, b: i64, c: i64) -> Result<ReducedForm> {
        let disc = b * b - 4 * a * c;
        if a <= 0 || disc >= 0 {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}, {c}) is not positive definite"
            )));
        }
        if gcd3(a, b, c) != 1 {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}, {c}) is not primitive"
            )));
        }
        let (mut a, mut b, mut c) = (a, b, c);
        loop {
            // normalize: -a < b <= a
            if b > a || b <= -a {
                let k = (a - b).div_euclid(2 * a);
                let b_new = b + 2 * a * k;
                c = (b_new * b_new - disc) / (4 * a);
                b = b_new;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
            } else {
                break;
            }
        }
        if (b.abs() == a || a == c) && b < 0 {
            b = -b;
        }
        debug_assert_eq!(b * b - 4 * a * c, disc);
        ReducedForm::new(a, b, c)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    num_integer::gcd(num_integer::gcd(a.abs(), b.abs()), c.abs())
}

fn require_fundamental(d: i64) -> Result<()> {
    if d >= 0 || !crate::characters::is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(())
}

/// All reduced primitive forms of fundamental discriminant `D < 0`,
/// sorted; the count is the class number `h(D)`.
pub fn class_group(d: i64) -> Result<Vec<ReducedForm>> {
    require_fundamental(d)?;
    let mut forms = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in (-a + 1)..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if c < a {
                continue;
            }
            if (b.abs() == a || a == c) && b < 0 {
                continue;
            }
            if gcd3(a, b, c) != 1 {
                continue;
            }
            forms.push(ReducedForm { a, b, c });
        }
        a += 1;
    }
    forms.sort();
    Ok(forms)
}

/// Number of roots of unity in the imaginary quadratic order: 6 for
/// `D = -3`, 4 for `D = -4`, otherwise 2.
pub fn unit_count(d: i64) -> u64 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

// ---------------------------------------------------------------------------
// Delta products over ideal classes
// ---------------------------------------------------------------------------

/// `Delta(a) Delta(a^-1)` for the ideal class of a (not necessarily
/// reduced) form: with `a = Z a + Z (-b + sqrt D)/2` and `N(a) = a`, the
/// conjugation identity `Delta(conj a) = conj Delta(a)` and
/// `a conj(a) = N(a) O` give `Delta(a) Delta(a^-1) = N(a)^12 |Delta(a)|^2`,
/// so one eta evaluation per class suffices.
fn delta_pair_product_raw(a: i64, b: i64, d: i64, ctx: &PrecisionContext) -> Result<Float> {
    let sqrt_abs_d = ctx.float_from(-d).sqrt();
    let omega1 = Complex::new(
        ctx.float_from(-b) / 2u32,
        sqrt_abs_d / 2u32,
    );
    let omega2 = Complex::from_real(ctx.float_from(a));
    let delta = delta_on_lattice(&LatticeBasis::new(omega1, omega2), ctx)?;
    let norm_pow = ctx.float_from(a).pow(12u32);
    Ok(norm_pow * delta.norm_sqr())
}

/// `Delta(a) Delta(a^-1)` for the ideal class of a reduced form, a
/// positive real number.
pub fn delta_pair_product(form: &ReducedForm, ctx: &PrecisionContext) -> Result<Float> {
    delta_pair_product_raw(form.a, form.b, form.discriminant(), ctx)
}

// ---------------------------------------------------------------------------
// identity checks and height reports
// ---------------------------------------------------------------------------

/// One verified identity: both sides, their difference, and the labelled
/// sub-terms and parameters that went into them.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    /// Stable identity name (used by reports and the CLI).
    pub identity: String,
    pub lhs: Float,
    pub rhs: Float,
    /// The quantity compared against the tolerance: `lhs - rhs`, except
    /// for product-scale identities where it is the relative residual
    /// (flagged in `parameters` as `residual_kind = relative`).
    pub residual: Float,
    pub terms: Vec<(String, Float)>,
    pub parameters: Vec<(String, String)>,
}

/// A height value with its signed breakdown; the value equals the sum of
/// the breakdown terms.
#[derive(Clone, Debug)]
pub struct HeightReport {
    pub value: Float,
    pub breakdown: Vec<(String, Float)>,
}

impl HeightReport {
    fn from_terms(breakdown: Vec<(String, Float)>, ctx: &PrecisionContext) -> HeightReport {
        let value = breakdown
            .iter()
            .fold(ctx.new_float(), |acc, (_, t)| acc + t);
        HeightReport { value, breakdown }
    }
}

/// The three Chowla-Selberg identities for a fundamental `D < 0`, each
/// with independently computed sides.
pub fn chowla_selberg_check(d: i64, ctx: &PrecisionContext) -> Result<Vec<IdentityCheck>> {
    require_fundamental(d)?;
    let forms = class_group(d)?;
    let h = forms.len() as u64;
    let w = unit_count(d);
    let abs_d = (-d) as u64;
    let chi = kronecker_character(d)?;

    // class-group side ingredients: one eta evaluation per class
    let pairs: Vec<Float> = forms
        .iter()
        .map(|f| delta_pair_product(f, ctx))
        .collect::<Result<_>>()?;
    let log_pair_sum = pairs
        .iter()
        .fold(ctx.new_float(), |acc, p| acc + p.clone().ln());

    // L-function side ingredients: Gamma values at a/|D| weighted by chi
    let mut gamma_signed_sum = ctx.new_float();
    for a in 1..abs_d {
        if let Some(e) = chi.exponent(a) {
            let lg = log_gamma(&ctx.float_from_ratio(a as i64, abs_d), ctx)?;
            if e == 0 {
                gamma_signed_sum += lg;
            } else {
                gamma_signed_sum -= lg;
            }
        }
    }
    let l_log_derivative = l_log_derivative_at_0(&chi, ctx)?.re;

    let parameters = |extra: &[(&str, String)]| -> Vec<(String, String)> {
        let mut out = vec![
            ("discriminant".to_string(), d.to_string()),
            ("class_number".to_string(), h.to_string()),
            ("unit_count".to_string(), w.to_string()),
        ];
        for (k, v) in extra {
            out.push((k.to_string(), v.clone()));
        }
        out
    };

    // (i) product form: (2 pi |D|)^(12h) prod pairs = prod Gamma^(6 w chi)
    let two_pi_abs_d = ctx.pi() * 2u32 * ctx.float_from(abs_d);
    let lhs_product = pairs
        .iter()
        .fold(two_pi_abs_d.pow((12 * h) as u32), |acc, p| acc * p);
    let rhs_product = (gamma_signed_sum.clone() * ctx.float_from(6 * w)).exp();
    let relative = (lhs_product.clone() - &rhs_product) / rhs_product.clone();
    let product_check = IdentityCheck {
        identity: "chowla-selberg-product".to_string(),
        lhs: lhs_product.clone(),
        rhs: rhs_product.clone(),
        residual: relative,
        terms: vec![
            ("delta-side".to_string(), lhs_product),
            ("gamma-side".to_string(), rhs_product),
        ],
        parameters: parameters(&[("residual_kind", "relative".to_string())]),
    };

    // (ii) logarithmic form: (1/24h) sum log pairs = L'/L / 2 - log(2pi)/2
    let lhs_log = log_pair_sum.clone() / ctx.float_from(24 * h);
    let rhs_log = l_log_derivative.clone() / 2u32 - ctx.log_2pi() / 2u32;
    let log_check = IdentityCheck {
        identity: "chowla-selberg-log".to_string(),
        lhs: lhs_log.clone(),
        rhs: rhs_log.clone(),
        residual: lhs_log.clone() - &rhs_log,
        terms: vec![
            ("delta-log-average".to_string(), lhs_log),
            ("L-term".to_string(), l_log_derivative.clone() / 2u32),
            ("log2pi-term".to_string(), -(ctx.log_2pi() / 2u32)),
        ],
        parameters: parameters(&[]),
    };

    // (iii) Lerch form: log|D| + L'/L = (w/2h) sum chi log Gamma
    let lhs_lerch = ctx.float_from(abs_d).ln() + &l_log_derivative;
    let rhs_lerch = gamma_signed_sum * ctx.float_from(w) / ctx.float_from(2 * h);
    let lerch_check = IdentityCheck {
        identity: "chowla-selberg-lerch".to_string(),
        lhs: lhs_lerch.clone(),
        rhs: rhs_lerch.clone(),
        residual: lhs_lerch.clone() - &rhs_lerch,
        terms: vec![
            ("log-disc-term".to_string(), ctx.float_from(abs_d).ln()),
            ("L-term".to_string(), l_log_derivative),
            ("gamma-side".to_string(), rhs_lerch),
        ],
        parameters: parameters(&[]),
    };

    Ok(vec![product_check, log_check, lerch_check])
}

/// Faltings height of any elliptic curve with CM by the maximal order of
/// fundamental discriminant `D < 0`:
/// `-(1/2h) sum_classes log(4 pi^2 |D|^(1/2) (Delta(a) Delta(a^-1))^(1/12))`.
pub fn cm_elliptic_faltings(d: i64, ctx: &PrecisionContext) -> Result<Float> {
    require_fundamental(d)?;
    let forms = class_group(d)?;
    let h = forms.len() as u64;
    let mut acc = ctx.new_float();
    for form in &forms {
        let pair = delta_pair_product(form, ctx)?;
        let local = (ctx.pi().square() * 4u32).ln()
            + ctx.float_from(-d).ln() / 2u32
            + pair.ln() / 12u32;
        acc += local;
    }
    Ok(-(acc / ctx.float_from(2 * h)))
}

// ---------------------------------------------------------------------------
// Colmez heights of CM types
// ---------------------------------------------------------------------------

/// Shared bound for imaginary residues of structurally real sums.
const REALITY_BOUND: f64 = 1e-20;

/// The Z/mu pipeline: decompose a class function into Artin characters,
/// primitivize each, and form `Z = sum m(chi) L'/L(0, chi)` and
/// `mu = sum m(chi) log f_chi`; the height is `-Z - mu/2`.
fn colmez_from_class_function(
    a0: &ClassFunction,
    ctx: &PrecisionContext,
) -> Result<HeightReport> {
    let decomposition = artin_decompose(a0)?;
    let mut z = Complex::zero(ctx.prec_bits());
    let mut mu = Complex::zero(ctx.prec_bits());
    for (chi, m) in decomposition.nonzero_terms() {
        let m_c = m.to_complex(ctx);
        let prim = chi.primitivize();
        // trivial character: L'/L = log 2 pi and conductor 1
        let l_part = l_log_derivative_at_0(&prim, ctx).map_err(|e| match e {
            Error::EvenCharacter { modulus } => Error::Internal(format!(
                "even character mod {modulus} with nonzero multiplicity in a CM-type \
                 class function"
            )),
            other => other,
        })?;
        z = &z + &(&m_c * &l_part);
        let log_conductor = ctx.float_from(prim.conductor()).ln();
        mu = &mu + &m_c.scale(&log_conductor);
    }
    let bound = ctx.float_from(REALITY_BOUND);
    if z.im.clone().abs() > bound || mu.im.clone().abs() > bound {
        return Err(Error::Internal(
            "Colmez Z/mu sums failed to be real (conjugate multiplicities must pair)".into(),
        ));
    }
    Ok(HeightReport::from_terms(
        vec![
            ("Z-term".to_string(), -z.re),
            ("mu-term".to_string(), -(mu.re / 2u32)),
        ],
        ctx,
    ))
}

/// The Colmez height `h^Col(E, Phi) = -Z - mu/2` of a CM type.
pub fn colmez_height(phi: &CMType, ctx: &PrecisionContext) -> Result<HeightReport> {
    colmez_from_class_function(&a0_function(phi), ctx)
}

/// Left side of the averaged identity: the mean of `colmez_height` over
/// all `2^d` CM types (for abelian fields this is also the mean Faltings
/// height of the corresponding CM abelian varieties).
pub fn averaged_colmez_lhs(spec: &AbelianFieldSpec, ctx: &PrecisionContext) -> Result<HeightReport> {
    let types = enumerate_cm_types(spec)?;
    let count = types.len() as u64;
    let mut z_term = ctx.new_float();
    let mut mu_term = ctx.new_float();
    for phi in &types {
        let report = colmez_height(phi, ctx)?;
        z_term += &report.breakdown[0].1;
        mu_term += &report.breakdown[1].1;
    }
    Ok(HeightReport::from_terms(
        vec![
            ("Z-term".to_string(), z_term / ctx.float_from(count)),
            ("mu-term".to_string(), mu_term / ctx.float_from(count)),
        ],
        ctx,
    ))
}

/// Right side of the averaged identity:
/// `-(1/2) L'(0,chi_{E/F})/L(0,chi_{E/F}) - (1/4) log|D_E/D_F|
///  - (d/2) log 2 pi`.
pub fn averaged_colmez_rhs(spec: &AbelianFieldSpec, ctx: &PrecisionContext) -> Result<HeightReport> {
    spec.require_cm()?;
    let l = hecke_quadratic_log_derivative(spec, ctx)?;
    let d_e = abs_discriminant(spec);
    let d_f = abs_discriminant(&spec.totally_real_subfield()?);
    let disc_ratio_log = ctx.float_from_biguint(&d_e).ln() - ctx.float_from_biguint(&d_f).ln();
    let d = spec.degree() / 2;
    Ok(HeightReport::from_terms(
        vec![
            ("L-term".to_string(), -(l / 2u32)),
            ("disc-term".to_string(), -(disc_ratio_log / 4u32)),
            (
                "log2pi-term".to_string(),
                -(ctx.log_2pi() * ctx.float_from_ratio(d as i64, 2)),
            ),
        ],
        ctx,
    ))
}

/// The reflex height `h^Col(E#, Phi#)`, computed from the `A^0` class
/// function of the total reflex pair through the same Z/mu pipeline; by
/// the reflex-height corollary it equals `(1/2d) sum_Phi h^Col(E, Phi)`.
pub fn sharp_colmez_height(spec: &AbelianFieldSpec, ctx: &PrecisionContext) -> Result<HeightReport> {
    let sharp = total_reflex_pair(spec, 1)?;
    let a0 = a0_of_sharp(&sharp)?;
    colmez_from_class_function(&a0, ctx)
}

/// The averaged Colmez identity packaged as a checked identity.
pub fn averaged_colmez_check(
    spec: &AbelianFieldSpec,
    ctx: &PrecisionContext,
) -> Result<IdentityCheck> {
    let lhs = averaged_colmez_lhs(spec, ctx)?;
    let rhs = averaged_colmez_rhs(spec, ctx)?;
    let residual = lhs.value.clone() - &rhs.value;
    let mut terms = Vec::new();
    for (name, value) in &lhs.breakdown {
        terms.push((format!("lhs-{name}"), value.clone()));
    }
    for (name, value) in &rhs.breakdown {
        terms.push((format!("rhs-{name}"), value.clone()));
    }
    Ok(IdentityCheck {
        identity: "averaged-colmez".to_string(),
        lhs: lhs.value,
        rhs: rhs.value,
        residual,
        terms,
        parameters: vec![
            ("modulus".to_string(), spec.modulus().to_string()),
            (
                "subgroup".to_string(),
                format!("{:?}", spec.subgroup()),
            ),
            ("degree".to_string(), spec.degree().to_string()),
        ],
    })
}

// ---------------------------------------------------------------------------
// arithmetic degree
// ---------------------------------------------------------------------------

/// A finite point of an arithmetic divisor: characteristic, local length,
/// and the order of its automorphism group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FinitePoint {
    pub residue_characteristic: u64,
    pub length: u64,
    pub automorphism_order: u64,
}

/// An archimedean point: Green-function value and automorphism order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArchimedeanPoint {
    pub green_value: f64,
    pub automorphism_order: u64,
}

/// The degree-relevant data of an arithmetic divisor on a stacky arithmetic
/// curve: weighted finite points and weighted archimedean Green values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArithmeticDivisorData {
    pub finite_points: Vec<FinitePoint>,
    pub archimedean_points: Vec<ArchimedeanPoint>,
}

/// The arithmetic degree
/// `sum_finite length * log(p) / |Aut| + (1/2) sum_arch green / |Aut|`.
pub fn arithmetic_degree(data: &ArithmeticDivisorData, ctx: &PrecisionContext) -> Result<Float> {
    let mut acc = ctx.new_float();
    for point in &data.finite_points {
        if point.length == 0 || point.automorphism_order == 0 {
            return Err(Error::InvalidArgument(
                "finite point needs positive length and automorphism order".into(),
            ));
        }
        if point.residue_characteristic < 2 {
            return Err(Error::InvalidArgument(format!(
                "residue characteristic must be at least 2, got {}",
                point.residue_characteristic
            )));
        }
        acc += ctx.float_from(point.residue_characteristic).ln()
            * ctx.float_from(point.length)
            / ctx.float_from(point.automorphism_order);
    }
    for point in &data.archimedean_points {
        if point.automorphism_order == 0 {
            return Err(Error::InvalidArgument(
                "archimedean point needs a positive automorphism order".into(),
            ));
        }
        acc += ctx.float_from(point.green_value)
            / (ctx.float_from(point.automorphism_order) * 2u32);
    }
    Ok(acc)
}
