//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
///
/// Validation errors (bad moduli, non-CM fields, non-fundamental
/// discriminants, malformed matrices) are distinguished from internal
/// errors, which indicate a broken mathematical invariant and are always
/// bugs rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("subgroup is not multiplicatively closed: {0}")]
    NotASubgroup(String),

    #[error("field spec (modulus {modulus}) is not CM: -1 lies in the subgroup")]
    NotCm { modulus: u64 },

    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),

    #[error("character mod {modulus} is not primitive (conductor {conductor})")]
    NotPrimitive { modulus: u64, conductor: u64 },

    #[error("L-value at s=0 undefined for a nontrivial even character (mod {modulus})")]
    EvenCharacter { modulus: u64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("degenerate lattice basis: omega1/omega2 is real")]
    DegenerateLattice,

    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("invalid form coefficients: {0}")]
    InvalidForm(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
