//! CM types of abelian CM fields, the Galois action on them, the `A` and
//! `A^0` class functions, their decomposition into Dirichlet characters,
//! and the reflex / total-reflex constructions.
//!
//! For an abelian CM field `E` given by `(N, H)`, the embeddings of `E`
//! form the coset space `G = (Z/N)^x / H`, complex conjugation is the
//! coset `c` of `-1`, and a CM type is a subset `Phi` with
//! `Phi ⊔ cPhi = G`.  Everything here is finite abelian group arithmetic:
//! the Galois action of the absolute Galois group factors through
//! `(Z/N)^x`, reflex fields of abelian fields stay abelian, and the class
//! functions `A(t) = |Phi ∩ tPhi|` and the orbit average `A^0` have exact
//! rational values, so the average-reflex identity is tested as a strict
//! equality, not a tolerance check.

use crate::characters::{dual_group, units_mod, AbelianFieldSpec, DirichletCharacter};
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::numerics::PrecisionContext;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// the Galois set G = (Z/N)^x / H
// ---------------------------------------------------------------------------

/// The coset space a CM field's embeddings live on, with the unit-group
/// action precomputed as an index lookup.
struct GaloisSet {
    modulus: u64,
    cosets: Vec<Vec<u64>>,
    index_of: BTreeMap<u64, usize>,
}

impl GaloisSet {
    fn new(spec: &AbelianFieldSpec) -> GaloisSet {
        let cosets = spec.cosets();
        let mut index_of = BTreeMap::new();
        for (i, coset) in cosets.iter().enumerate() {
            for &u in coset {
                index_of.insert(u, i);
            }
        }
        GaloisSet {
            modulus: spec.modulus(),
            cosets,
            index_of,
        }
    }

    fn size(&self) -> usize {
        self.cosets.len()
    }

    /// Index of the coset of `t * rep(i)`.
    fn act_index(&self, t: u64, i: usize) -> usize {
        let rep = self.cosets[i][0];
        let product = crate::characters::mul_mod(t.max(1), rep.max(1), self.modulus);
        self.index_of[&(product % self.modulus)]
    }

    /// Image of a member bitset under multiplication by the unit `t`.
    fn act_bits(&self, t: u64, bits: u64) -> u64 {
        let mut out = 0u64;
        for i in 0..self.size() {
            if bits >> i & 1 == 1 {
                out |= 1 << self.act_index(t, i);
            }
        }
        out
    }

    fn conjugation_unit(&self) -> u64 {
        self.modulus - 1
    }
}

// ---------------------------------------------------------------------------
// CM types
// ---------------------------------------------------------------------------

#[derive(Clone, Serialize, Deserialize)]
struct CMTypeJson {
    modulus: u64,
    subgroup_generators: Vec<u64>,
    members: Vec<u64>,
}

/// A CM type of an abelian CM field: a choice of one embedding from each
/// conjugate pair, stored as a bitset over the canonical coset enumeration
/// of `G = (Z/N)^x / H` (cosets sorted by smallest representative).
///
/// Serializes as
/// `{"modulus": N, "subgroup_generators": [..], "members": [unit reps]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CMTypeJson", into = "CMTypeJson")]
pub struct CMType {
    parent: AbelianFieldSpec,
    bits: u64,
}

impl TryFrom<CMTypeJson> for CMType {
    type Error = Error;
    fn try_from(raw: CMTypeJson) -> Result<CMType> {
        let parent = AbelianFieldSpec::new(raw.modulus, &raw.subgroup_generators)?;
        CMType::new(&parent, &raw.members)
    }
}

impl From<CMType> for CMTypeJson {
    fn from(phi: CMType) -> CMTypeJson {
        CMTypeJson {
            modulus: phi.parent.modulus(),
            subgroup_generators: phi.parent.generators().to_vec(),
            members: phi.member_representatives(),
        }
    }
}

impl CMType {
    /// Build a CM type from unit representatives of its member cosets,
    /// validating the defining partition `Phi ⊔ cPhi = G`.
    pub fn new(parent: &AbelianFieldSpec, members: &[u64]) -> Result<CMType> {
        parent.require_cm()?;
        let gs = GaloisSet::new(parent);
        let n = parent.modulus();
        let mut bits = 0u64;
        for &m in members {
            let r = m % n;
            match gs.index_of.get(&r) {
                Some(&i) => bits |= 1 << i,
                None => {
                    return Err(Error::NotAUnit {
                        value: m,
                        modulus: n,
                    })
                }
            }
        }
        let phi = CMType {
            parent: parent.clone(),
            bits,
        };
        phi.validate(&gs)?;
        Ok(phi)
    }

    fn validate(&self, gs: &GaloisSet) -> Result<()> {
        let conj_bits = gs.act_bits(gs.conjugation_unit(), self.bits);
        let full = if gs.size() == 64 {
            u64::MAX
        } else {
            (1u64 << gs.size()) - 1
        };
        if self.bits & conj_bits != 0 || self.bits | conj_bits != full {
            return Err(Error::InvalidArgument(format!(
                "members do not select exactly one embedding per conjugate pair \
                 (modulus {})",
                self.parent.modulus()
            )));
        }
        Ok(())
    }

    pub fn parent(&self) -> &AbelianFieldSpec {
        &self.parent
    }

    /// Half the degree: `|Phi| = d`.
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    /// Smallest representative of each member coset, ascending.
    pub fn member_representatives(&self) -> Vec<u64> {
        let gs = GaloisSet::new(&self.parent);
        (0..gs.size())
            .filter(|i| self.bits >> i & 1 == 1)
            .map(|i| gs.cosets[i][0])
            .collect()
    }

    /// Does the coset of the unit `u` belong to the type?
    pub fn contains_unit(&self, u: u64) -> bool {
        let gs = GaloisSet::new(&self.parent);
        match gs.index_of.get(&(u % self.parent.modulus())) {
            Some(&i) => self.bits >> i & 1 == 1,
            None => false,
        }
    }

    /// The conjugate type `cPhi` (the complement).
    pub fn conjugate(&self) -> CMType {
        galois_act(self.parent.modulus() - 1, self).expect("-1 is a unit")
    }
}

/// All `2^d` CM types of the field, ordered by the binary choice over the
/// conjugate pairs `{x, cx}` (pairs listed by first appearance, the
/// smaller-representative member chosen for bit value 0).
pub fn enumerate_cm_types(spec: &AbelianFieldSpec) -> Result<Vec<CMType>> {
    spec.require_cm()?;
    let gs = GaloisSet::new(spec);
    let c = gs.conjugation_unit();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut paired = vec![false; gs.size()];
    for i in 0..gs.size() {
        if !paired[i] {
            let j = gs.act_index(c, i);
            debug_assert!(j > i);
            paired[i] = true;
            paired[j] = true;
            pairs.push((i, j));
        }
    }
    let d = pairs.len();
    let mut out = Vec::with_capacity(1 << d);
    for mask in 0u64..(1 << d) {
        let mut bits = 0u64;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            bits |= 1 << if mask >> k & 1 == 0 { i } else { j };
        }
        out.push(CMType {
            parent: spec.clone(),
            bits,
        });
    }
    Ok(out)
}

/// The Galois action: `t . Phi = {t x : x in Phi}`.
pub fn galois_act(t: u64, phi: &CMType) -> Result<CMType> {
    let n = phi.parent.modulus();
    if !crate::characters::is_unit(t % n, n) {
        return Err(Error::NotAUnit {
            value: t,
            modulus: n,
        });
    }
    let gs = GaloisSet::new(&phi.parent);
    Ok(CMType {
        parent: phi.parent.clone(),
        bits: gs.act_bits(t % n, phi.bits),
    })
}

// ---------------------------------------------------------------------------
// class functions on (Z/N)^x
// ---------------------------------------------------------------------------

/// A function on the units mod `N` with exact rational values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    modulus: u64,
    values: BTreeMap<u64, BigRational>,
}

impl ClassFunction {
    fn from_values(modulus: u64, values: BTreeMap<u64, BigRational>) -> ClassFunction {
        debug_assert_eq!(values.len(), units_mod(modulus).len());
        ClassFunction { modulus, values }
    }

    /// The constant function with the given value.
    pub fn constant(modulus: u64, value: BigRational) -> ClassFunction {
        let values = units_mod(modulus)
            .into_iter()
            .map(|u| (u, value.clone()))
            .collect();
        ClassFunction::from_values(modulus, values)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Value at the unit `g` (reduced mod `N`); `None` on non-units.
    pub fn value(&self, g: u64) -> Option<&BigRational> {
        self.values.get(&(g % self.modulus))
    }

    /// Iterate `(unit, value)` in increasing unit order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.values.iter().map(|(&u, v)| (u, v))
    }

    pub fn add(&self, other: &ClassFunction) -> Result<ClassFunction> {
        if self.modulus != other.modulus {
            return Err(Error::InvalidArgument(format!(
                "cannot add class functions mod {} and mod {}",
                self.modulus, other.modulus
            )));
        }
        let values = self
            .values
            .iter()
            .map(|(&u, v)| (u, v + &other.values[&u]))
            .collect();
        Ok(ClassFunction::from_values(self.modulus, values))
    }

    pub fn scale(&self, r: &BigRational) -> ClassFunction {
        let values = self.values.iter().map(|(&u, v)| (u, v * r)).collect();
        ClassFunction::from_values(self.modulus, values)
    }

    /// Is the function constant on the cosets of the field datum's
    /// subgroup?
    pub fn is_coset_constant(&self, spec: &AbelianFieldSpec) -> bool {
        spec.modulus() == self.modulus
            && spec.cosets().iter().all(|coset| {
                let v0 = &self.values[&coset[0]];
                coset.iter().all(|u| &self.values[u] == v0)
            })
    }
}

/// `A_(E,Phi)(t) = |Phi ∩ tPhi|` as an exact class function on the units.
pub fn a_function(phi: &CMType) -> ClassFunction {
    let gs = GaloisSet::new(&phi.parent);
    let n = phi.parent.modulus();
    let values = units_mod(n)
        .into_iter()
        .map(|t| {
            let count = (gs.act_bits(t, phi.bits) & phi.bits).count_ones();
            (t, BigRational::from(BigInt::from(count)))
        })
        .collect();
    ClassFunction::from_values(n, values)
}

/// `A^0_(E,Phi)`: the average of `A` over the Galois orbit of `Phi`.
pub fn a0_function(phi: &CMType) -> ClassFunction {
    let gs = GaloisSet::new(&phi.parent);
    let n = phi.parent.modulus();
    let mut orbit: Vec<u64> = Vec::new();
    for g in units_mod(n) {
        let image = gs.act_bits(g, phi.bits);
        if !orbit.contains(&image) {
            orbit.push(image);
        }
    }
    let mut acc = ClassFunction::constant(n, BigRational::zero());
    for bits in &orbit {
        let member = CMType {
            parent: phi.parent.clone(),
            bits: *bits,
        };
        acc = acc.add(&a_function(&member)).expect("same modulus");
    }
    acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(orbit.len())))
}

// ---------------------------------------------------------------------------
// Artin decomposition
// ---------------------------------------------------------------------------

/// A class function written as `sum m(chi) chi` over all Dirichlet
/// characters mod `N`, with exact cyclotomic multiplicities.
#[derive(Clone, Debug)]
pub struct ArtinDecomposition {
    modulus: u64,
    /// Order of the root of unity the multiplicities are expressed in
    /// (the exponent of `(Z/N)^x`).
    zeta_order: u64,
    terms: Vec<(DirichletCharacter, Cyclotomic)>,
}

impl ArtinDecomposition {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn zeta_order(&self) -> u64 {
        self.zeta_order
    }

    /// All `(character, multiplicity)` pairs, trivial character first.
    pub fn terms(&self) -> &[(DirichletCharacter, Cyclotomic)] {
        &self.terms
    }

    /// Only the terms with nonzero multiplicity.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = &(DirichletCharacter, Cyclotomic)> {
        self.terms.iter().filter(|(_, m)| !m.is_zero())
    }

    pub fn multiplicity(&self, chi: &DirichletCharacter) -> Option<&Cyclotomic> {
        self.terms.iter().find(|(c, _)| c == chi).map(|(_, m)| m)
    }

    /// `sum m(chi) chi(g)`, exactly.
    pub fn reconstruct(&self, g: u64) -> Cyclotomic {
        let mut acc = Cyclotomic::zero(self.zeta_order);
        for (chi, m) in &self.terms {
            if let Some(e) = chi.exponent(g) {
                let value = Cyclotomic::zeta_power(
                    self.zeta_order,
                    (e * (self.zeta_order / chi.order())) as i64,
                );
                acc = acc.add(&m.mul(&value));
            }
        }
        acc
    }
}

/// Fourier-analyze a class function over the full dual group:
/// `m(chi) = (1/phi(N)) sum_g cf(g) conj(chi(g))`, exactly, and verify the
/// reconstruction `sum m(chi) chi = cf` before returning.
pub fn artin_decompose(cf: &ClassFunction) -> Result<ArtinDecomposition> {
    let n = cf.modulus();
    let chars = dual_group(n);
    let zeta_order = chars
        .iter()
        .fold(1u64, |acc, chi| num_integer::lcm(acc, chi.order()));
    let group_size = BigRational::new(BigInt::from(1), BigInt::from(chars.len() as u64));
    let mut terms = Vec::with_capacity(chars.len());
    for chi in chars {
        let mut acc = Cyclotomic::zero(zeta_order);
        for (g, v) in cf.entries() {
            let e = chi.exponent(g).expect("class functions live on units");
            // conj(chi(g)) = zeta^(-e * L/r)
            let root = Cyclotomic::zeta_power(
                zeta_order,
                -((e * (zeta_order / chi.order())) as i64),
            );
            acc = acc.add(&root.scale(v));
        }
        terms.push((chi, acc.scale(&group_size)));
    }
    let decomposition = ArtinDecomposition {
        modulus: n,
        zeta_order,
        terms,
    };
    for (g, v) in cf.entries() {
        let rebuilt = decomposition.reconstruct(g);
        if rebuilt.as_rational().as_ref() != Some(v) {
            return Err(Error::Internal(format!(
                "Artin decomposition failed to reconstruct its input at g = {g} (mod {n})"
            )));
        }
    }
    Ok(decomposition)
}

// ---------------------------------------------------------------------------
// reflex and total reflex
// ---------------------------------------------------------------------------

/// The classical reflex pair of `(E, Phi)` with respect to a distinguished
/// embedding `iota0` (a unit mod `N`; the identity coset by default).
///
/// The reflex field is the fixed field of the stabilizer
/// `S = {t : tPhi = Phi}`, and the reflex type collects the cosets of
/// `t^(-1)` over those `t` whose action sends `iota0` into `Phi`.
pub fn reflex_pair(phi: &CMType, iota0: u64) -> Result<(AbelianFieldSpec, CMType)> {
    let n = phi.parent.modulus();
    if !crate::characters::is_unit(iota0 % n, n) {
        return Err(Error::NotAUnit {
            value: iota0,
            modulus: n,
        });
    }
    let gs = GaloisSet::new(&phi.parent);
    let stabilizer: Vec<u64> = units_mod(n)
        .into_iter()
        .filter(|&t| gs.act_bits(t, phi.bits) == phi.bits)
        .collect();
    let reflex_field = AbelianFieldSpec::new(n, &stabilizer)?;
    let phi_euler = crate::characters::euler_phi(n);
    let mut members = Vec::new();
    for t in units_mod(n) {
        let moved = crate::characters::mul_mod(t, iota0 % n, n);
        if phi.bits >> gs.index_of[&moved] & 1 == 1 {
            // t^(-1) = t^(phi(N)-1)
            members.push(crate::characters::pow_mod(t, phi_euler - 1, n));
        }
    }
    let reflex_type = CMType::new(&reflex_field, &members)?;
    Ok((reflex_field, reflex_type))
}

/// The total reflex pair `(E#, Phi#)`: one classical reflex pair per
/// Galois orbit of CM types (orbit representatives in enumeration order);
/// component degrees sum to `2^d` and reflex-type sizes to `2^(d-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMPairSharp {
    components: Vec<(AbelianFieldSpec, CMType)>,
}

impl CMPairSharp {
    pub fn components(&self) -> &[(AbelianFieldSpec, CMType)] {
        &self.components
    }

    /// `[E# : Q] = sum of component degrees`.
    pub fn total_degree(&self) -> u64 {
        self.components.iter().map(|(spec, _)| spec.degree()).sum()
    }

    /// `|Phi#| = sum of component reflex-type sizes`.
    pub fn total_type_size(&self) -> usize {
        self.components.iter().map(|(_, phi)| phi.len()).sum()
    }
}

pub fn total_reflex_pair(spec: &AbelianFieldSpec, iota0: u64) -> Result<CMPairSharp> {
    let types = enumerate_cm_types(spec)?;
    let gs = GaloisSet::new(spec);
    let n = spec.modulus();
    let mut seen: Vec<u64> = Vec::new();
    let mut components = Vec::new();
    for phi in &types {
        if seen.contains(&phi.bits) {
            continue;
        }
        for g in units_mod(n) {
            let image = gs.act_bits(g, phi.bits);
            if !seen.contains(&image) {
                seen.push(image);
            }
        }
        components.push(reflex_pair(phi, iota0)?);
    }
    Ok(CMPairSharp { components })
}

/// `A^0` of the total reflex pair `(E#, Phi#)`, computed on the disjoint
/// union of the component Hom-sets with the diagonal `(Z/N)^x`-action:
/// `A(t) = |Phi# ∩ tPhi#|` splits as a sum over components, and the orbit
/// average runs over the diagonal orbit of the component tuple.
pub fn a0_of_sharp(pair: &CMPairSharp) -> Result<ClassFunction> {
    if pair.components.is_empty() {
        return Err(Error::InvalidArgument(
            "total reflex pair has no components".into(),
        ));
    }
    let n = pair.components[0].0.modulus();
    let sets: Vec<GaloisSet> = pair
        .components
        .iter()
        .map(|(spec, _)| GaloisSet::new(spec))
        .collect();
    let base: Vec<u64> = pair.components.iter().map(|(_, phi)| phi.bits).collect();
    // diagonal orbit of the component tuple
    let mut orbit: Vec<Vec<u64>> = Vec::new();
    for g in units_mod(n) {
        let image: Vec<u64> = sets
            .iter()
            .zip(&base)
            .map(|(gs, &bits)| gs.act_bits(g, bits))
            .collect();
        if !orbit.contains(&image) {
            orbit.push(image);
        }
    }
    let values = units_mod(n)
        .into_iter()
        .map(|t| {
            let mut count = 0u64;
            for tuple in &orbit {
                for (gs, &bits) in sets.iter().zip(tuple) {
                    count += u64::from((gs.act_bits(t, bits) & bits).count_ones());
                }
            }
            (
                t,
                BigRational::new(BigInt::from(count), BigInt::from(orbit.len() as u64)),
            )
        })
        .collect();
    Ok(ClassFunction::from_values(n, values))
}

/// Numerical value of a cyclotomic multiplicity (used by the height code
/// at the L-function boundary).
pub fn multiplicity_to_complex(
    m: &Cyclotomic,
    ctx: &PrecisionContext,
) -> crate::numerics::Complex {
    m.to_complex(ctx)
}
