//! Machine-readable identity reports.
//!
//! Every verified identity becomes a record of decimal strings: both sides,
//! the residual, named sub-terms, and free-form parameters.  The records are
//! built so that a reader can audit them without rerunning the computation:
//! parsing the recorded `lhs` and `rhs` back into exact rationals and
//! recomputing the residual (difference, or relative difference, as flagged
//! by `residual_kind` in the parameters) reproduces the recorded `residual`
//! string byte for byte — see [`reverify_residual`].
//!
//! Decimal strings use the normalized scientific form `-d.dddde<k>`; the
//! difference of two such numbers is again exactly representable in decimal,
//! which is what makes the difference-kind round trip exact.  Relative
//! residuals are rendered by deterministic truncation to a fixed number of
//! significant digits, so recomputation is still reproducible.

use crate::error::{Error, Result};
use crate::heights::{HeightReport, IdentityCheck};
use crate::numerics::PrecisionContext;
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rug::Float;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Significant digits used when a residual cannot be written exactly
/// (relative residuals).
const RESIDUAL_DIGITS: u32 = 20;

/// One verified identity as decimal strings, ready for serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub identity: String,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
    pub pass: bool,
    #[serde(default)]
    pub terms: BTreeMap<String, String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
}

/// Render a finite float in normalized scientific form with `digits`
/// significant digits: `-d.dddde<k>`, or `0` for zero.
pub fn float_to_decimal(f: &Float, digits: usize) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    debug_assert!(f.is_finite(), "only finite values are reported");
    let (neg, mantissa, exp) = f.to_sign_string_exp(10, Some(digits.max(2)));
    // value = sign 0.mantissa * 10^exp
    let exp = exp.unwrap_or(0) as i64;
    let sign = if neg { "-" } else { "" };
    let (first, rest) = mantissa.split_at(1);
    let rest = rest.trim_end_matches('0');
    if rest.is_empty() {
        format!("{sign}{first}e{}", exp - 1)
    } else {
        format!("{sign}{first}.{rest}e{}", exp - 1)
    }
}

/// Parse a decimal string (plain or scientific) into an exact rational.
pub fn decimal_to_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse decimal number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let (mantissa_str, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], exp)
        }
        None => (t, 0i64),
    };
    let (sign, digits_part) = match mantissa_str.strip_prefix('-') {
        Some(rest) => (Sign::Minus, rest),
        None => (Sign::Plus, mantissa_str.strip_prefix('+').unwrap_or(mantissa_str)),
    };
    let (int_part, frac_part) = match digits_part.find('.') {
        Some(pos) => (&digits_part[..pos], &digits_part[pos + 1..]),
        None => (digits_part, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: String = format!("{int_part}{frac_part}");
    let magnitude: BigInt = digits.parse().map_err(|_| bad())?;
    let magnitude = if sign == Sign::Minus { -magnitude } else { magnitude };
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(magnitude * ten.pow(scale as u32))
    } else {
        BigRational::new(magnitude, ten.pow((-scale) as u32))
    })
}

/// Render a rational whose reduced denominator divides a power of ten as
/// an exact decimal string; rationals with other denominators are not
/// exactly representable and yield an error.
pub fn rational_to_exact_decimal(r: &BigRational) -> Result<String> {
    if r.is_zero() {
        return Ok("0".to_string());
    }
    let mut denom = r.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return Err(Error::InvalidArgument(format!(
            "{r} has no terminating decimal expansion"
        )));
    }
    // scale to an integer over 10^k
    let k = twos.max(fives);
    let scale = BigInt::from(2).pow(k - twos) * BigInt::from(5).pow(k - fives);
    let scaled = r.numer() * scale;
    let neg = scaled.is_negative();
    let digits = scaled.magnitude().to_string();
    // value = +- digits * 10^-k; normalize to d.ddd e m
    let point = digits.len() as i64 - 1 - k as i64;
    let trimmed = digits.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
    let (first, rest) = trimmed.split_at(1);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(first);
    if !rest.is_empty() {
        out.push('.');
        out.push_str(rest);
    }
    let _ = write!(out, "e{point}");
    Ok(out)
}

/// The exact decimal difference of two recorded decimal strings.
pub fn exact_difference_decimal(lhs: &str, rhs: &str) -> Result<String> {
    let a = decimal_to_rational(lhs)?;
    let b = decimal_to_rational(rhs)?;
    rational_to_exact_decimal(&(a - b))
}

/// Truncate a rational to `sig` significant digits, deterministically
/// (toward zero), in normalized scientific form.
fn rational_to_truncated_decimal(r: &BigRational, sig: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let mut abs = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    let one = BigRational::one();
    let mut e: i64 = 0;
    while abs >= ten {
        abs /= &ten;
        e += 1;
    }
    while abs < one {
        abs *= &ten;
        e -= 1;
    }
    let scale = BigInt::from(10).pow(sig - 1);
    let scaled = (abs * BigRational::from_integer(scale)).to_integer();
    let digits = scaled.to_string();
    let trimmed = digits.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
    let (first, rest) = trimmed.split_at(1);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(first);
    if !rest.is_empty() {
        out.push('.');
        out.push_str(rest);
    }
    let _ = write!(out, "e{e}");
    out
}

/// The relative residual `(lhs - rhs)/rhs` of two recorded decimal
/// strings, truncated to the standard number of significant digits.
pub fn relative_residual_decimal(lhs: &str, rhs: &str) -> Result<String> {
    let a = decimal_to_rational(lhs)?;
    let b = decimal_to_rational(rhs)?;
    if b.is_zero() {
        return Err(Error::InvalidArgument(
            "relative residual against a zero right side".into(),
        ));
    }
    let r = (a - &b) / b;
    Ok(rational_to_truncated_decimal(&r, RESIDUAL_DIGITS))
}

/// Recompute the residual implied by a record's own `lhs`/`rhs` strings
/// (honoring `residual_kind`); equality with the recorded `residual` is
/// the round-trip audit.
pub fn reverify_residual(record: &IdentityRecord) -> Result<String> {
    match record.parameters.get("residual_kind").map(String::as_str) {
        Some("relative") => relative_residual_decimal(&record.lhs, &record.rhs),
        _ => exact_difference_decimal(&record.lhs, &record.rhs),
    }
}

/// Whether a recorded residual is below the tolerance, decided exactly on
/// the parsed rationals.
pub fn residual_within(residual: &str, tolerance: &str) -> Result<bool> {
    let r = decimal_to_rational(residual)?;
    let t = decimal_to_rational(tolerance)?;
    Ok(r.abs() < t)
}

impl IdentityRecord {
    /// Build a record from a numeric identity check: sides and terms are
    /// rendered at the context's trusted digit count, and the residual is
    /// recomputed *from the rendered strings* so the round-trip invariant
    /// holds exactly.
    pub fn from_check(
        check: &IdentityCheck,
        ctx: &PrecisionContext,
        tolerance: &str,
    ) -> Result<IdentityRecord> {
        let digits = ctx.target_digits() as usize;
        let lhs = float_to_decimal(&check.lhs, digits);
        let rhs = float_to_decimal(&check.rhs, digits);
        let mut parameters: BTreeMap<String, String> = check
            .parameters
            .iter()
            .cloned()
            .collect();
        parameters.insert("tolerance".to_string(), tolerance.to_string());
        let relative = parameters.get("residual_kind").map(String::as_str) == Some("relative");
        let residual = if relative {
            relative_residual_decimal(&lhs, &rhs)?
        } else {
            exact_difference_decimal(&lhs, &rhs)?
        };
        let pass = residual_within(&residual, tolerance)?;
        let terms = check
            .terms
            .iter()
            .map(|(name, value)| (name.clone(), float_to_decimal(value, digits)))
            .collect();
        Ok(IdentityRecord {
            identity: check.identity.clone(),
            lhs,
            rhs,
            residual,
            pass,
            terms,
            parameters,
        })
    }

    /// A failed item that never produced numbers: records the error and
    /// fails the run while keeping the stream well-formed.
    pub fn from_error(identity: &str, error: &Error, extra: &[(&str, String)]) -> IdentityRecord {
        let mut parameters = BTreeMap::new();
        parameters.insert("error".to_string(), error.to_string());
        for (k, v) in extra {
            parameters.insert((*k).to_string(), v.clone());
        }
        IdentityRecord {
            identity: identity.to_string(),
            lhs: "0".to_string(),
            rhs: "0".to_string(),
            residual: "0".to_string(),
            pass: false,
            terms: BTreeMap::new(),
            parameters,
        }
    }

    /// Attach the named breakdown of a height as extra term entries.
    pub fn with_height_terms(
        mut self,
        prefix: &str,
        report: &HeightReport,
        ctx: &PrecisionContext,
    ) -> IdentityRecord {
        let digits = ctx.target_digits() as usize;
        self.terms.insert(
            format!("{prefix}-value"),
            float_to_decimal(&report.value, digits),
        );
        for (name, value) in &report.breakdown {
            self.terms
                .insert(format!("{prefix}-{name}"), float_to_decimal(value, digits));
        }
        self
    }
}

/// Serialize records in the chosen format.
pub fn render_records(records: &[IdentityRecord], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(records)?),
        OutputFormat::Csv => {
            let mut out = String::from("identity,lhs,rhs,residual,pass\n");
            for r in records {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.identity, r.lhs, r.rhs, r.residual, r.pass
                );
            }
            Ok(out)
        }
        OutputFormat::Text => {
            let mut out = String::new();
            for r in records {
                let verdict = if r.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "{verdict} {}: lhs = {}, rhs = {}, residual = {}",
                    r.identity, r.lhs, r.rhs, r.residual
                );
                for (name, value) in &r.terms {
                    let _ = writeln!(out, "    {name} = {value}");
                }
                for (name, value) in &r.parameters {
                    let _ = writeln!(out, "    [{name}] {value}");
                }
            }
            Ok(out)
        }
    }
}

/// Output format selector shared by all commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::standard()
    }

    #[test]
    fn float_rendering_pins_the_exponent_convention() {
        let c = ctx();
        assert_eq!(float_to_decimal(&c.float_from(0), 10), "0");
        assert_eq!(float_to_decimal(&c.float_from(1), 10), "1e0");
        assert_eq!(float_to_decimal(&c.float_from(0.5), 10), "5e-1");
        assert_eq!(float_to_decimal(&c.float_from(-32), 10), "-3.2e1");
        assert_eq!(float_to_decimal(&c.float_from(1234.5), 10), "1.2345e3");
        // rounding at the digit boundary is to nearest
        assert_eq!(float_to_decimal(&c.float_from(1.0 / 3.0f64), 4), "3.333e-1");
    }

    #[test]
    fn decimal_round_trip_is_exact() {
        for s in ["0", "1e0", "5e-1", "-3.2e1", "1.2345e3", "7.25", "-0.125", "3e-40"] {
            let r = decimal_to_rational(s).unwrap();
            let back = rational_to_exact_decimal(&r).unwrap();
            let r2 = decimal_to_rational(&back).unwrap();
            assert_eq!(r, r2, "round trip through {s}");
        }
        assert!(decimal_to_rational("").is_err());
        assert!(decimal_to_rational("1.2.3").is_err());
        assert!(decimal_to_rational("xyz").is_err());
    }

    #[test]
    fn rendering_then_parsing_recovers_the_float_to_tolerance() {
        // rendering at k significant digits carries a half-ulp error of at
        // most 5 * 10^(1-k) relative, far below every identity tolerance
        let c = ctx();
        let v = c.pi().ln();
        let digits = c.target_digits() as usize;
        let s = float_to_decimal(&v, digits);
        let r = decimal_to_rational(&s).unwrap();
        let back = c.float_from_rational(&r);
        let bound = c.float_from(10).pow(-(digits as i32 - 2));
        assert!((back - v).abs() < bound);
    }

    #[test]
    fn exact_difference_examples() {
        assert_eq!(exact_difference_decimal("1e0", "1e0").unwrap(), "0");
        assert_eq!(exact_difference_decimal("1.5e0", "5e-1").unwrap(), "1e0");
        // 0.1 - 0.025 = 0.075 exactly in decimal
        assert_eq!(exact_difference_decimal("1e-1", "2.5e-2").unwrap(), "7.5e-2");
        // non-terminating rationals are rejected by the exact renderer
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!(rational_to_exact_decimal(&third).is_err());
    }

    #[test]
    fn relative_residual_is_deterministic_truncation() {
        // (1.0000000001 - 1)/1 = 1e-10
        assert_eq!(
            relative_residual_decimal("1.0000000001e0", "1e0").unwrap(),
            "1e-10"
        );
        // truncation toward zero: (2/3 - 1)/1 would be -1/3 -> 20 digits
        let r = BigRational::new(BigInt::from(-1), BigInt::from(3));
        assert_eq!(
            rational_to_truncated_decimal(&r, 5),
            "-3.3333e-1"
        );
        assert!(relative_residual_decimal("1e0", "0").is_err());
    }

    #[test]
    fn record_round_trip_reverifies() {
        let c = ctx();
        let check = IdentityCheck {
            identity: "test-identity".to_string(),
            lhs: c.pi(),
            rhs: c.pi() + c.float_from(1e-12),
            residual: c.float_from(-1e-12),
            terms: vec![("half".to_string(), c.pi() / 2u32)],
            parameters: vec![("note".to_string(), "fixture".to_string())],
        };
        let record = IdentityRecord::from_check(&check, &c, "1e-9").unwrap();
        assert!(record.pass);
        // the recorded residual is reproducible from the recorded sides
        assert_eq!(reverify_residual(&record).unwrap(), record.residual);
        // and survives JSON serialization
        let json = serde_json::to_string(&record).unwrap();
        let back: IdentityRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(record, back);
        assert_eq!(reverify_residual(&back).unwrap(), back.residual);
    }

    #[test]
    fn relative_kind_record_reverifies() {
        let c = ctx();
        let check = IdentityCheck {
            identity: "scaled".to_string(),
            lhs: c.float_from(1e30) + c.float_from(1e18),
            rhs: c.float_from(1e30),
            residual: c.float_from(1e-12),
            terms: vec![],
            parameters: vec![("residual_kind".to_string(), "relative".to_string())],
        };
        let record = IdentityRecord::from_check(&check, &c, "1e-9").unwrap();
        assert_eq!(reverify_residual(&record).unwrap(), record.residual);
        assert!(record.pass);
        // the residual is the relative one, ~1e-12, not the absolute 1e18
        let r = decimal_to_rational(&record.residual).unwrap();
        assert!(r.abs() < decimal_to_rational("1e-11").unwrap());
    }

    #[test]
    fn pass_judgment_is_exact() {
        assert!(residual_within("9.99e-10", "1e-9").unwrap());
        assert!(!residual_within("1e-9", "1e-9").unwrap());
        assert!(!residual_within("-2e-9", "1e-9").unwrap());
        assert!(residual_within("0", "1e-9").unwrap());
    }

    #[test]
    fn error_records_fail_and_reverify() {
        let record = IdentityRecord::from_error(
            "chowla-selberg",
            &Error::NotFundamental(-5),
            &[("discriminant", "-5".to_string())],
        );
        assert!(!record.pass);
        assert_eq!(reverify_residual(&record).unwrap(), record.residual);
        assert!(record.parameters.get("error").is_some());
    }

    #[test]
    fn csv_and_text_rendering() {
        let c = ctx();
        let check = IdentityCheck {
            identity: "demo".to_string(),
            lhs: c.float_from(2),
            rhs: c.float_from(2),
            residual: c.new_float(),
            terms: vec![],
            parameters: vec![],
        };
        let record = IdentityRecord::from_check(&check, &c, "1e-9").unwrap();
        let csv = render_records(std::slice::from_ref(&record), OutputFormat::Csv).unwrap();
        assert!(csv.starts_with("identity,lhs,rhs,residual,pass\n"));
        assert!(csv.contains("demo,2e0,2e0,0,true"));
        let text = render_records(std::slice::from_ref(&record), OutputFormat::Text).unwrap();
        assert!(text.contains("PASS demo"));
        let json = render_records(std::slice::from_ref(&record), OutputFormat::Json).unwrap();
        let parsed: Vec<IdentityRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.len(), 1);
    }
}
