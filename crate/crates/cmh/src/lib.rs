//! Numerical verification of two classical height identities for CM fields,
//! each computed by two independent routes:
//!
//! * the Chowla-Selberg formula for imaginary quadratic fields, relating
//!   Dedekind-Delta values over the class group to Gamma values and
//!   L'(0, chi_D) — in its original product form, its logarithmic form, and
//!   Lerch's form;
//! * the averaged Colmez formula for abelian CM fields E with maximal
//!   totally real subfield F,
//!   2^-d sum_Phi h^Col(E, Phi)
//!     = -1/2 L'(0,chi)/L(0,chi) - 1/4 log|D_E/D_F| - d/2 log(2 pi),
//!   with the left side built from Galois theory (CM types, A^0 class
//!   functions, Artin decompositions) and the right side from closed-form
//!   L-series and conductor-discriminant data;
//!
//! plus the Weil representation of SL_2(Z) on the group algebra of a
//! discriminant form L^dual/L, with its defining relations checked
//! numerically, and the formal special-divisor bookkeeping Z(f) for weakly
//! holomorphic input data.
//!
//! Abelian CM fields are presented combinatorially: a modulus N and a
//! subgroup H of (Z/N)^x with -1 not in H encode the field with
//! Hom(E, C) = (Z/N)^x / H, and every Galois-theoretic construction
//! (CM types, reflex fields, character groups) is exact arithmetic on that
//! quotient.

pub mod characters;
pub mod cli;
pub mod cmgalois;
pub mod cyclotomic;
pub mod error;
pub mod heights;
pub mod lfun;
pub mod numerics;
pub mod report;
pub mod weilrep;

pub use error::{Error, Result};
pub use numerics::PrecisionContext;
