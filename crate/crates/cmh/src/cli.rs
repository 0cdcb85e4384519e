//! Command-line surface: batch verification runs that emit identity
//! records in JSON, CSV or text, with exit code 0 exactly when every
//! residual in the run is under the tolerance and no item errored.
//!
//! Per-item failures never abort a batch: invalid discriminants or Gram
//! matrices become error records, the rest of the batch still runs, and the
//! process exits nonzero at the end.  Usage problems (bad flags, bad
//! precision, unreadable files) exit with code 2 before any verification
//! starts.

use crate::characters::{kronecker_character, AbelianFieldSpec, Parity};
use crate::cmgalois::{
    a0_function, a0_of_sharp, artin_decompose, enumerate_cm_types, reflex_pair,
    total_reflex_pair, ClassFunction,
};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::heights::{
    averaged_colmez_check, chowla_selberg_check, cm_elliptic_faltings,
    colmez_height, sharp_colmez_height, IdentityCheck,
};
use crate::lfun::l_log_derivative_at_0;
use crate::numerics::PrecisionContext;
use crate::report::{
    decimal_to_rational, render_records, IdentityRecord, OutputFormat,
};
use crate::weilrep::{
    borcherds_divisor, discriminant_module, validate_form_support, verify_weil_relations,
    FormCoefficients,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "cmh",
    version,
    about = "Numerical verification of Chowla-Selberg and averaged Colmez identities, \
             CM type enumeration, and Weil representation checks"
)]
pub struct Cli {
    /// Working precision in decimal digits (>= 30).
    #[arg(long, global = true, env = "CMH_PRECISION", default_value_t = 50)]
    pub precision: u32,

    /// Residuals below this bound count as passing.
    #[arg(long, global = true, default_value = "1e-9")]
    pub tolerance: String,

    /// Output format for the report stream.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report to this path instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> OutputFormat {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Text => OutputFormat::Text,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify the three Chowla-Selberg identities and the CM elliptic
    /// Faltings height cross-check for each fundamental discriminant.
    ChowlaSelberg {
        /// Comma-separated negative fundamental discriminants.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        disc: Vec<i64>,
    },
    /// Verify the averaged Colmez identity, the reflex height, the exact
    /// average-reflex identity and character parity for one abelian CM field.
    AveragedColmez {
        /// Conductor N of the cyclotomic field containing the CM field.
        #[arg(long)]
        modulus: u64,
        /// Comma-separated generators of the fixing subgroup (empty for
        /// the full cyclotomic field).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        subgroup: Vec<u64>,
    },
    /// Enumerate the CM types of an abelian CM field with their reflex data.
    CmTypes {
        #[arg(long)]
        modulus: u64,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        subgroup: Vec<u64>,
    },
    /// Build the discriminant form of an even Gram matrix and verify the
    /// Weil representation relations; optionally validate form coefficients.
    Weilrep {
        /// Path to a JSON array-of-arrays of integers.
        #[arg(long)]
        gram: PathBuf,
        /// Path to a JSON coefficient file {"weight": "p/q", "entries": [...]}.
        #[arg(long)]
        form: Option<PathBuf>,
    },
}

/// Parse arguments from the environment, run, and return the exit code:
/// 0 all pass, 1 verification failures, 2 usage or internal errors.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cmh: {e}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let ctx = PrecisionContext::new(cli.precision)?;
    // fail fast on an unusable tolerance
    let tolerance_value = decimal_to_rational(&cli.tolerance)?;
    if tolerance_value <= BigRational::from_integer(0.into()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            cli.tolerance
        )));
    }
    let tol = cli.tolerance.as_str();

    let (rendered, all_pass) = match &cli.command {
        Command::ChowlaSelberg { disc } => {
            let records = chowla_selberg_records(disc, &ctx, tol)?;
            let pass = records.iter().all(|r| r.pass);
            (render_records(&records, cli.format.into())?, pass)
        }
        Command::AveragedColmez { modulus, subgroup } => {
            let records = averaged_colmez_records(*modulus, subgroup, &ctx, tol)?;
            let pass = records.iter().all(|r| r.pass);
            (render_records(&records, cli.format.into())?, pass)
        }
        Command::CmTypes { modulus, subgroup } => match cm_type_listing(*modulus, subgroup) {
            Ok(listing) => (render_cm_types(&listing, cli.format), true),
            Err(e) => {
                let record = IdentityRecord::from_error(
                    "cm-types",
                    &e,
                    &[("modulus", modulus.to_string())],
                );
                (render_records(&[record], cli.format.into())?, false)
            }
        },
        Command::Weilrep { gram, form } => {
            let gram_text = std::fs::read_to_string(gram)?;
            let gram_matrix: Vec<Vec<i64>> = serde_json::from_str(&gram_text)?;
            let coeffs = match form {
                Some(path) => {
                    let form_text = std::fs::read_to_string(path)?;
                    Some(serde_json::from_str::<FormCoefficients>(&form_text)?)
                }
                None => None,
            };
            let records = weilrep_records(&gram_matrix, coeffs.as_ref(), &ctx, tol)?;
            let pass = records.iter().all(|r| r.pass);
            (render_records(&records, cli.format.into())?, pass)
        }
    };

    let mut rendered = rendered;
    if !rendered.ends_with('\n') {
        rendered.push('\n');
    }
    match &cli.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(if all_pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// chowla-selberg
// ---------------------------------------------------------------------------

/// Records for a batch of discriminants: the three Chowla-Selberg
/// identities plus the Faltings cross-check per discriminant, with
/// per-item errors folded into the record stream.
pub fn chowla_selberg_records(
    discs: &[i64],
    ctx: &PrecisionContext,
    tol: &str,
) -> Result<Vec<IdentityRecord>> {
    let mut records = Vec::new();
    for &d in discs {
        match chowla_selberg_check(d, ctx) {
            Ok(checks) => {
                for check in &checks {
                    records.push(IdentityRecord::from_check(check, ctx, tol)?);
                }
            }
            Err(e) => {
                records.push(IdentityRecord::from_error(
                    "chowla-selberg",
                    &e,
                    &[("discriminant", d.to_string())],
                ));
                continue;
            }
        }
        records.push(IdentityRecord::from_check(
            &faltings_check(d, ctx)?,
            ctx,
            tol,
        )?);
    }
    Ok(records)
}

/// The d = 1 height identity as a checked record: the CM elliptic Faltings
/// height against its L-function expression.
fn faltings_check(d: i64, ctx: &PrecisionContext) -> Result<IdentityCheck> {
    let falt = cm_elliptic_faltings(d, ctx)?;
    let chi = kronecker_character(d)?;
    let l = l_log_derivative_at_0(&chi, ctx)?.re;
    let l_term = -(l / 2u32);
    let disc_term = -(ctx.float_from(-d).ln() / 4u32);
    let log2pi_term = -(ctx.log_2pi() / 2u32);
    let rhs = l_term.clone() + &disc_term + &log2pi_term;
    Ok(IdentityCheck {
        identity: "cm-elliptic-faltings".to_string(),
        lhs: falt.clone(),
        rhs,
        residual: ctx.new_float(),
        terms: vec![
            ("faltings-height".to_string(), falt),
            ("L-term".to_string(), l_term),
            ("disc-term".to_string(), disc_term),
            ("log2pi-term".to_string(), log2pi_term),
        ],
        parameters: vec![("discriminant".to_string(), d.to_string())],
    })
}

// ---------------------------------------------------------------------------
// averaged-colmez
// ---------------------------------------------------------------------------

/// Records for one abelian CM field: the averaged Colmez identity (with
/// per-type heights and decompositions), the reflex-height corollary, and
/// the two exact identities (average-reflex and character parity).
pub fn averaged_colmez_records(
    modulus: u64,
    subgroup: &[u64],
    ctx: &PrecisionContext,
    tol: &str,
) -> Result<Vec<IdentityRecord>> {
    let spec = match AbelianFieldSpec::new(modulus, subgroup).and_then(|s| {
        s.require_cm()?;
        Ok(s)
    }) {
        Ok(spec) => spec,
        Err(e) => {
            return Ok(vec![IdentityRecord::from_error(
                "averaged-colmez",
                &e,
                &[
                    ("modulus", modulus.to_string()),
                    ("subgroup", format!("{subgroup:?}")),
                ],
            )])
        }
    };

    let mut records = Vec::new();

    // headline identity with per-type heights and decompositions attached
    let main = averaged_colmez_check(&spec, ctx)?;
    let mut main_record = IdentityRecord::from_check(&main, ctx, tol)?;
    let types = enumerate_cm_types(&spec)?;
    let digits = ctx.target_digits() as usize;
    let mut height_sum = ctx.new_float();
    for (k, phi) in types.iter().enumerate() {
        let height = colmez_height(phi, ctx)?;
        height_sum += &height.value;
        main_record.terms.insert(
            format!("type-{k}-height"),
            crate::report::float_to_decimal(&height.value, digits),
        );
        main_record.parameters.insert(
            format!("type-{k}-members"),
            join(&phi.member_representatives()),
        );
        main_record.parameters.insert(
            format!("type-{k}-a0"),
            describe_a0(&a0_function(phi))?,
        );
    }
    records.push(main_record);

    // reflex height corollary: the sharp pair's height equals the
    // (1/2d)-scaled sum over all CM types (which is the plain mean only
    // when the type count 2^d equals the degree 2d, i.e. for d <= 2)
    let sharp = sharp_colmez_height(&spec, ctx)?;
    let scaled_sum = height_sum / ctx.float_from(spec.degree());
    let mut reflex_check = IdentityCheck {
        identity: "reflex-height".to_string(),
        lhs: sharp.value.clone(),
        rhs: scaled_sum,
        residual: ctx.new_float(),
        terms: Vec::new(),
        parameters: vec![
            ("modulus".to_string(), modulus.to_string()),
            ("degree".to_string(), spec.degree().to_string()),
        ],
    };
    for (name, value) in &sharp.breakdown {
        reflex_check.terms.push((format!("sharp-{name}"), value.clone()));
    }
    records.push(IdentityRecord::from_check(&reflex_check, ctx, tol)?);

    // exact identities: average reflex and character parity
    records.push(average_reflex_record(&spec)?);
    records.push(parity_record(&spec)?);

    Ok(records)
}

/// Check the average-reflex identity as exact rational class functions and
/// record the outcome (residual 0 or 1; there is no numerical middle
/// ground for an exact identity).
fn average_reflex_record(spec: &AbelianFieldSpec) -> Result<IdentityRecord> {
    let sharp = total_reflex_pair(spec, 1)?;
    let lhs = a0_of_sharp(&sharp)?;
    let types = enumerate_cm_types(spec)?;
    let mut sum = ClassFunction::constant(spec.modulus(), BigRational::from_integer(0.into()));
    for phi in &types {
        sum = sum.add(&a0_function(phi))?;
    }
    let d = spec.degree() / 2;
    let rhs = sum.scale(&BigRational::new(1.into(), (2 * d as i64).into()));
    let exact = lhs == rhs;
    Ok(exact_record(
        "average-reflex",
        exact,
        &[
            ("modulus", spec.modulus().to_string()),
            ("kind", "exact rational class-function identity".to_string()),
        ],
    ))
}

/// Every nontrivial character with nonzero multiplicity in any A^0
/// decomposition must be odd; exact assertion over all CM types.
fn parity_record(spec: &AbelianFieldSpec) -> Result<IdentityRecord> {
    let types = enumerate_cm_types(spec)?;
    let mut checked = 0u64;
    let mut all_odd = true;
    for phi in &types {
        let decomposition = artin_decompose(&a0_function(phi))?;
        for (chi, _) in decomposition.nonzero_terms() {
            if chi.is_trivial() {
                continue;
            }
            checked += 1;
            if chi.parity() != Parity::Odd {
                all_odd = false;
            }
        }
    }
    Ok(exact_record(
        "character-parity",
        all_odd,
        &[
            ("modulus", spec.modulus().to_string()),
            ("characters_checked", checked.to_string()),
        ],
    ))
}

/// An exact pass/fail identity rendered as a record: residual 0 when the
/// identity holds, 1 when it does not (both reverify trivially).
fn exact_record(identity: &str, holds: bool, extra: &[(&str, String)]) -> IdentityRecord {
    let mut parameters = BTreeMap::new();
    for (k, v) in extra {
        parameters.insert((*k).to_string(), v.clone());
    }
    parameters.insert("exact".to_string(), holds.to_string());
    IdentityRecord {
        identity: identity.to_string(),
        lhs: if holds { "0" } else { "1e0" }.to_string(),
        rhs: "0".to_string(),
        residual: if holds { "0" } else { "1e0" }.to_string(),
        pass: holds,
        terms: BTreeMap::new(),
        parameters,
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Compact description of an A^0 Artin decomposition: one
/// `label: multiplicity` pair per nonzero character term.
fn describe_a0(a0: &ClassFunction) -> Result<String> {
    let decomposition = artin_decompose(a0)?;
    let mut parts = Vec::new();
    for (chi, m) in decomposition.nonzero_terms() {
        parts.push(format!("{}: {}", character_label(chi), multiplicity_label(m)));
    }
    Ok(parts.join("; "))
}

fn character_label(chi: &crate::characters::DirichletCharacter) -> String {
    if chi.is_trivial() {
        return format!("chi0(mod {})", chi.modulus());
    }
    let exponents: Vec<String> = crate::characters::units_mod(chi.modulus())
        .into_iter()
        .map(|a| chi.exponent(a).map(|e| e.to_string()).unwrap_or_default())
        .collect();
    format!(
        "chi(mod {}; ord {}; e=[{}])",
        chi.modulus(),
        chi.order(),
        exponents.join(",")
    )
}

fn multiplicity_label(m: &Cyclotomic) -> String {
    if let Some(r) = m.as_rational() {
        return r.to_string();
    }
    let mut parts = Vec::new();
    for (k, c) in m.coefficients().iter().enumerate() {
        if !num_traits::Zero::is_zero(c) {
            if k == 0 {
                parts.push(c.to_string());
            } else {
                parts.push(format!("({c})*z^{k}"));
            }
        }
    }
    format!("{} with z = zeta_{}", parts.join(" + "), m.ambient_order())
}

// ---------------------------------------------------------------------------
// cm-types
// ---------------------------------------------------------------------------

#[derive(Debug, serde::Serialize)]
pub struct CmTypeListing {
    pub modulus: u64,
    pub subgroup: Vec<u64>,
    pub degree: u64,
    pub cm_type_count: usize,
    pub types: Vec<CmTypeEntry>,
}

#[derive(Debug, serde::Serialize)]
pub struct CmTypeEntry {
    pub index: usize,
    pub members: Vec<u64>,
    pub conjugate_members: Vec<u64>,
    pub reflex_degree: u64,
    pub reflex_type_size: usize,
}

/// Structured enumeration of the CM types of one field with reflex data.
pub fn cm_type_listing(modulus: u64, subgroup: &[u64]) -> Result<CmTypeListing> {
    let spec = AbelianFieldSpec::new(modulus, subgroup)?;
    spec.require_cm()?;
    let types = enumerate_cm_types(&spec)?;
    let mut entries = Vec::new();
    for (index, phi) in types.iter().enumerate() {
        let (reflex_field, reflex_type) = reflex_pair(phi, 1)?;
        entries.push(CmTypeEntry {
            index,
            members: phi.member_representatives(),
            conjugate_members: phi.conjugate().member_representatives(),
            reflex_degree: reflex_field.degree(),
            reflex_type_size: reflex_type.len(),
        });
    }
    Ok(CmTypeListing {
        modulus: spec.modulus(),
        subgroup: spec.subgroup().to_vec(),
        degree: spec.degree(),
        cm_type_count: types.len(),
        types: entries,
    })
}

fn render_cm_types(listing: &CmTypeListing, format: Format) -> String {
    match format {
        Format::Json => {
            serde_json::to_string_pretty(listing).expect("listing serializes") + "\n"
        }
        Format::Csv => {
            let mut out =
                String::from("index,members,conjugate_members,reflex_degree,reflex_type_size\n");
            for t in &listing.types {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    t.index,
                    join_semicolon(&t.members),
                    join_semicolon(&t.conjugate_members),
                    t.reflex_degree,
                    t.reflex_type_size
                );
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "CM field: modulus {}, degree {}, {} CM types\n",
                listing.modulus, listing.degree, listing.cm_type_count
            );
            for t in &listing.types {
                let _ = writeln!(
                    out,
                    "  type {}: members {{{}}}, reflex degree {}, reflex type size {}",
                    t.index,
                    join(&t.members),
                    t.reflex_degree,
                    t.reflex_type_size
                );
            }
            out
        }
    }
}

fn join_semicolon<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

// ---------------------------------------------------------------------------
// weilrep
// ---------------------------------------------------------------------------

/// Records for one Gram matrix: the Weil representation relation checks,
/// and (when form coefficients are supplied) support validation with the
/// resulting special divisor.
pub fn weilrep_records(
    gram: &[Vec<i64>],
    form: Option<&FormCoefficients>,
    ctx: &PrecisionContext,
    tol: &str,
) -> Result<Vec<IdentityRecord>> {
    let module = match discriminant_module(gram) {
        Ok(m) => m,
        Err(e) => {
            return Ok(vec![IdentityRecord::from_error(
                "weilrep",
                &e,
                &[("gram", format!("{gram:?}"))],
            )])
        }
    };
    let relation_report = verify_weil_relations(&module, ctx);

    let base_parameters = vec![
        ("dimension".to_string(), relation_report.dimension.to_string()),
        (
            "generator_orders".to_string(),
            format!("{:?}", module.generator_orders()),
        ),
        (
            "signature".to_string(),
            format!("{:?}", module.signature_pair()),
        ),
        ("level".to_string(), module.level().to_string()),
        (
            "factors_through_sl2".to_string(),
            relation_report.factors_through_sl2.to_string(),
        ),
    ];
    let deviation_check = |name: &str, deviation: &rug::Float| IdentityCheck {
        identity: name.to_string(),
        lhs: deviation.clone(),
        rhs: ctx.new_float(),
        residual: deviation.clone(),
        terms: Vec::new(),
        parameters: base_parameters.clone(),
    };

    let mut records = vec![
        IdentityRecord::from_check(
            &deviation_check("weil-t-unitary", &relation_report.t_unitary_deviation),
            ctx,
            tol,
        )?,
        IdentityRecord::from_check(
            &deviation_check("weil-s-unitary", &relation_report.s_unitary_deviation),
            ctx,
            tol,
        )?,
        IdentityRecord::from_check(
            &deviation_check("weil-braid", &relation_report.braid_deviation),
            ctx,
            tol,
        )?,
        IdentityRecord::from_check(
            &deviation_check("weil-s-squared", &relation_report.s_squared_deviation),
            ctx,
            tol,
        )?,
        IdentityRecord::from_check(
            &deviation_check("weil-s-fourth", &relation_report.s_fourth_deviation),
            ctx,
            tol,
        )?,
        IdentityRecord::from_check(
            &deviation_check("weil-t-power", &relation_report.t_power_deviation),
            ctx,
            tol,
        )?,
    ];

    // T order against the level, as exact integers
    let order_check = IdentityCheck {
        identity: "weil-t-order".to_string(),
        lhs: ctx.float_from(relation_report.t_order),
        rhs: ctx.float_from(module.level()),
        residual: ctx.new_float(),
        terms: Vec::new(),
        parameters: base_parameters.clone(),
    };
    records.push(IdentityRecord::from_check(&order_check, ctx, tol)?);

    if let Some(coeffs) = form {
        let support = validate_form_support(&module, coeffs);
        let mut check = IdentityCheck {
            identity: "form-support".to_string(),
            lhs: ctx.float_from(support.violations.len() as u64
                + u64::from(!support.weight_ok)),
            rhs: ctx.new_float(),
            residual: ctx.new_float(),
            terms: Vec::new(),
            parameters: base_parameters.clone(),
        };
        for (k, v) in support.violations.iter().enumerate() {
            check.parameters.push((
                format!("violation-{k}"),
                format!("m={}, mu={:?}: {}", v.m, v.mu, v.reason),
            ));
        }
        if !support.weight_ok {
            check.parameters.push((
                "violation-weight".to_string(),
                format!(
                    "weight {} does not match 1 - b+/2 = {}",
                    coeffs.weight(),
                    support.expected_weight
                ),
            ));
        }
        if support.is_valid() {
            let (divisor, bundle_power) = borcherds_divisor(&module, coeffs)?;
            let listing: Vec<String> = divisor
                .terms
                .iter()
                .map(|((m, mu), c)| format!("Z({m}, {mu:?}) x {c}"))
                .collect();
            check
                .parameters
                .push(("divisor".to_string(), listing.join("; ")));
            check
                .parameters
                .push(("bundle_power".to_string(), bundle_power.to_string()));
        }
        records.push(IdentityRecord::from_check(&check, ctx, tol)?);
    }

    Ok(records)
}
