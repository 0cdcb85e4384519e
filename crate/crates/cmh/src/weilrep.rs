//! Finite quadratic modules (discriminant forms) of even lattices, the Weil
//! representation on the group algebra of the discriminant group, and the
//! input data of Borcherds products: weakly holomorphic form coefficients and
//! the formal special divisors they define.
//!
//! For an even nondegenerate Gram matrix `G` the discriminant group is
//! `D = L'/L` with `L = Z^n` and `L' = G^{-1} Z^n`; it carries the quadratic
//! form `Q(x) = (1/2) x^T G x mod 1` and the bilinear form
//! `B(x, y) = x^T G y mod 1`.  The Weil representation `omega_L` acts on the
//! basis `{phi_mu}` indexed by `D`:
//!
//!   omega(T) phi_mu = e(-Q(mu)) phi_mu,
//!   omega(S) phi_mu = (xi / sqrt|D|) sum_nu e(B(mu, nu)) phi_nu,
//!
//! with `xi = e((b+ - b-)/8)` and `e(x) = exp(2 pi i x)`; this is the complex
//! conjugate of the representation normally attached to `rho_L`.  The
//! relation suite (unitarity, `(ST)^3 = S^2`, the `S^2` negation-phase law,
//! `T`-order = level, Milgram's formula in the tests) pins the normalization:
//! a wrong eighth root of unity fails them immediately.

use crate::error::{Error, Result};
use crate::numerics::{Complex, PrecisionContext};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rug::Float;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

// ---------------------------------------------------------------------------
// exact integer linear algebra
// ---------------------------------------------------------------------------

type IMatrix = Vec<Vec<BigInt>>;

fn identity_matrix(n: usize) -> IMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn matrix_product(a: &IMatrix, b: &IMatrix) -> IMatrix {
    let n = a.len();
    let m = b[0].len();
    let k_dim = b.len();
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut acc = BigInt::zero();
            for k in 0..k_dim {
                acc += &a[i][k] * &b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Smith normal form `P * A * Q = D` with unimodular `P`, `Q` and
/// nonnegative diagonal `D` whose entries divide in sequence.
fn smith_normal_form(a: &IMatrix) -> (IMatrix, IMatrix, IMatrix) {
    let n = a.len();
    let mut d = a.clone();
    let mut p = identity_matrix(n);
    let mut q = identity_matrix(n);

    for k in 0..n {
        loop {
            // move a nonzero pivot of smallest magnitude to (k, k)
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if !d[i][j].is_zero()
                        && pivot
                            .map(|(pi, pj)| d[i][j].abs() < d[pi][pj].abs())
                            .unwrap_or(true)
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            if pi != k {
                d.swap(pi, k);
                p.swap(pi, k);
            }
            if pj != k {
                for row in d.iter_mut() {
                    row.swap(pj, k);
                }
                for row in q.iter_mut() {
                    row.swap(pj, k);
                }
            }
            // clear column k below the pivot
            let mut dirty = false;
            for i in (k + 1)..n {
                if !d[i][k].is_zero() {
                    let f = d[i][k].div_floor(&d[k][k]);
                    for j in 0..n {
                        let sub = &f * &d[k][j];
                        d[i][j] -= sub;
                        let sub = &f * &p[k][j];
                        p[i][j] -= sub;
                    }
                    if !d[i][k].is_zero() {
                        dirty = true;
                    }
                }
            }
            // clear row k to the right of the pivot
            for j in (k + 1)..n {
                if !d[k][j].is_zero() {
                    let f = d[k][j].div_floor(&d[k][k]);
                    for i in 0..n {
                        let sub = &f * &d[i][k];
                        d[i][j] -= sub;
                        let sub = &f * &q[i][k];
                        q[i][j] -= sub;
                    }
                    if !d[k][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            let column_clear = ((k + 1)..n).all(|i| d[i][k].is_zero());
            let row_clear = ((k + 1)..n).all(|j| d[k][j].is_zero());
            if !dirty && column_clear && row_clear {
                break;
            }
        }
    }

    // force nonnegative diagonal
    for k in 0..n {
        if d[k][k].is_negative() {
            for j in 0..n {
                d[k][j] = -d[k][j].clone();
                p[k][j] = -p[k][j].clone();
            }
        }
    }

    // enforce the divisibility chain d_k | d_{k+1}
    loop {
        let mut fixed = true;
        for k in 0..n.saturating_sub(1) {
            if !d[k][k].is_zero() && !(&d[k + 1][k + 1] % &d[k][k]).is_zero() {
                fixed = false;
                // fold the next diagonal entry into row k, then re-reduce
                // the trailing 2x2 block: gcd goes to position k
                for j in 0..n {
                    let add = d[k + 1][j].clone();
                    d[k][j] += add;
                    let add = p[k + 1][j].clone();
                    p[k][j] += add;
                }
                let (g, x, y) = extended_gcd_bigint(&d[k][k], &d[k][k + 1]);
                // column operations sending (d_k, d_{k+1}) -> (g, 0)
                let ck = d.iter().map(|row| row[k].clone()).collect::<Vec<_>>();
                let ck1 = d.iter().map(|row| row[k + 1].clone()).collect::<Vec<_>>();
                let u = &d[k][k] / &g;
                let v = &d[k][k + 1] / &g;
                for (i, row) in d.iter_mut().enumerate() {
                    row[k] = &x * &ck[i] + &y * &ck1[i];
                    row[k + 1] = -&v * &ck[i] + &u * &ck1[i];
                }
                let qk = q.iter().map(|row| row[k].clone()).collect::<Vec<_>>();
                let qk1 = q.iter().map(|row| row[k + 1].clone()).collect::<Vec<_>>();
                for (i, row) in q.iter_mut().enumerate() {
                    row[k] = &x * &qk[i] + &y * &qk1[i];
                    row[k + 1] = -&v * &qk[i] + &u * &qk1[i];
                }
                // the block is now triangular; clear the stray entry
                let f = d[k + 1][k].div_floor(&d[k][k]);
                for j in 0..n {
                    let sub = &f * &d[k][j];
                    d[k + 1][j] -= sub;
                    let sub = &f * &p[k][j];
                    p[k + 1][j] -= sub;
                }
                // and the leftover in row k
                if !d[k][k + 1].is_zero() {
                    let f = d[k][k + 1].div_floor(&d[k][k]);
                    for i in 0..n {
                        let sub = &f * &d[i][k];
                        d[i][k + 1] -= sub;
                        let sub = &f * &q[i][k];
                        q[i][k + 1] -= sub;
                    }
                }
            }
        }
        if fixed {
            break;
        }
    }

    for k in 0..n {
        if d[k][k].is_negative() {
            for j in 0..n {
                d[k][j] = -d[k][j].clone();
                p[k][j] = -p[k][j].clone();
            }
        }
    }

    (p, d, q)
}

fn extended_gcd_bigint(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        if a.is_negative() {
            return (-a.clone(), -BigInt::one(), BigInt::zero());
        }
        return (a.clone(), BigInt::one(), BigInt::zero());
    }
    let (g, x, y) = extended_gcd_bigint(b, &a.mod_floor(b));
    let q = a.div_floor(b);
    (g, y.clone(), x - q * y)
}

/// Characteristic polynomial `det(lambda I - A)` of an integer matrix by
/// the Faddeev-LeVerrier recursion; the divisions are exact over Z.
fn characteristic_polynomial(a: &IMatrix) -> Vec<BigInt> {
    let n = a.len();
    let mut coeffs = vec![BigInt::one()];
    let mut m = a.clone();
    for k in 1..=n {
        let trace: BigInt = (0..n).map(|i| m[i][i].clone()).sum();
        let k_big = BigInt::from(k);
        let (c, rem) = (-trace).div_rem(&k_big);
        debug_assert!(rem.is_zero(), "Faddeev-LeVerrier division must be exact");
        coeffs.push(c.clone());
        if k < n {
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += &c;
            }
            m = matrix_product(a, &m);
        }
    }
    coeffs
}

/// Signature `(b+, b-)` of a nondegenerate symmetric integer matrix: the
/// characteristic polynomial has only real roots, so Descartes' rule of
/// signs counts them exactly.
fn signature_pair_of(a: &IMatrix) -> Result<(u32, u32)> {
    let coeffs = characteristic_polynomial(a);
    if coeffs.last().map(|c| c.is_zero()).unwrap_or(true) {
        return Err(Error::DegenerateLattice);
    }
    let positives = sign_variations(&coeffs);
    let negated: Vec<BigInt> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
        .collect();
    let negatives = sign_variations(&negated);
    debug_assert_eq!(positives + negatives, a.len() as u32);
    Ok((positives, negatives))
}

fn sign_variations(coeffs: &[BigInt]) -> u32 {
    let mut count = 0;
    let mut last = 0i8;
    for c in coeffs {
        let s = if c.is_zero() {
            continue;
        } else if c.is_negative() {
            -1
        } else {
            1
        };
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

// ---------------------------------------------------------------------------
// finite quadratic modules
// ---------------------------------------------------------------------------

/// Reduce a rational into `[0, 1)`, the canonical representative mod 1.
fn frac_mod1(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// The discriminant form of an even lattice: the finite group `L'/L` in
/// invariant-factor coordinates, its quadratic and bilinear forms with
/// values in Q/Z, and the signature of the source lattice.
///
/// Elements are coordinate tuples `(c_1, ..., c_k)` with
/// `0 <= c_i < d_i` over the invariant factors `d_i > 1`, enumerated in
/// lexicographic order; every matrix in this module is written with
/// respect to that order.
#[derive(Clone, Debug)]
pub struct FiniteQuadraticModule {
    generator_orders: Vec<u64>,
    /// `Q(mu)` in `[0, 1)`, indexed by element position.
    q_form: Vec<BigRational>,
    /// `B(mu, nu)` in `[0, 1)`, indexed by element positions.
    bilinear: Vec<Vec<BigRational>>,
    signature_pair: (u32, u32),
    /// Dual-coset generators in lattice-basis coordinates, one per
    /// invariant factor `d_i > 1`.
    generators: Vec<Vec<BigRational>>,
}

impl FiniteQuadraticModule {
    pub fn generator_orders(&self) -> &[u64] {
        &self.generator_orders
    }

    /// `|D|`, the product of the invariant factors.
    pub fn order(&self) -> u64 {
        self.generator_orders.iter().product()
    }

    pub fn signature_pair(&self) -> (u32, u32) {
        self.signature_pair
    }

    /// `(b+ - b-) mod 8`, the residue governing the eighth root of unity.
    pub fn signature_difference_mod_8(&self) -> u64 {
        let d = self.signature_pair.0 as i64 - self.signature_pair.1 as i64;
        d.rem_euclid(8) as u64
    }

    /// Dual-coset representatives of the generators, in lattice-basis
    /// coordinates.
    pub fn generators(&self) -> &[Vec<BigRational>] {
        &self.generators
    }

    /// Coordinates of the element at lexicographic position `index`.
    pub fn element(&self, index: usize) -> Vec<u64> {
        let mut coords = vec![0u64; self.generator_orders.len()];
        let mut rest = index as u64;
        for (slot, d) in self.generator_orders.iter().enumerate().rev() {
            coords[slot] = rest % d;
            rest /= d;
        }
        coords
    }

    /// Lexicographic position of an element given by coordinates.
    pub fn index_of(&self, coords: &[u64]) -> Result<usize> {
        if coords.len() != self.generator_orders.len() {
            return Err(Error::InvalidForm(format!(
                "element has {} coordinates, module needs {}",
                coords.len(),
                self.generator_orders.len()
            )));
        }
        let mut index = 0u64;
        for (c, d) in coords.iter().zip(&self.generator_orders) {
            if c >= d {
                return Err(Error::InvalidForm(format!(
                    "coordinate {c} exceeds invariant factor {d}"
                )));
            }
            index = index * d + c;
        }
        Ok(index as usize)
    }

    /// Position of `-mu` for the element at `index`.
    pub fn negation_index(&self, index: usize) -> usize {
        let coords = self.element(index);
        let negated: Vec<u64> = coords
            .iter()
            .zip(&self.generator_orders)
            .map(|(c, d)| (d - c) % d)
            .collect();
        self.index_of(&negated).expect("negation stays in range")
    }

    /// `Q(mu)` in `[0, 1)` by element position.
    pub fn q_value(&self, index: usize) -> &BigRational {
        &self.q_form[index]
    }

    /// `B(mu, nu)` in `[0, 1)` by element positions.
    pub fn bilinear_value(&self, i: usize, j: usize) -> &BigRational {
        &self.bilinear[i][j]
    }

    /// The level: the smallest `N >= 1` with `N Q(mu)` integral for every
    /// element, found by scanning divisors of the denominator lcm.  For a
    /// reduced rational `q`, `N q` is integral exactly when `denom(q) | N`.
    pub fn level(&self) -> u64 {
        let mut bound = BigInt::one();
        for q in &self.q_form {
            bound = bound.lcm(q.denom());
        }
        let bound: u64 = bound.try_into().expect("level fits in u64");
        let mut level = bound;
        for n in 1..=bound {
            if bound % n != 0 {
                continue;
            }
            let n_big = BigInt::from(n);
            if self.q_form.iter().all(|q| (&n_big % q.denom()).is_zero()) {
                level = n;
                break;
            }
        }
        level
    }
}

/// Build the discriminant form `L'/L` of an even nondegenerate Gram
/// matrix: invariant factors from the Smith normal form `P G Q = D`, dual
/// generators `(1/d_i) Q e_i`, and `Q`, `B` evaluated on dual-coset
/// representatives.
pub fn discriminant_module(gram: &[Vec<i64>]) -> Result<FiniteQuadraticModule> {
    let n = gram.len();
    if n == 0 || gram.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidGram("gram matrix must be square and nonempty".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if gram[i][j] != gram[j][i] {
                return Err(Error::InvalidGram(format!(
                    "gram matrix not symmetric at ({i}, {j})"
                )));
            }
        }
        if gram[i][i] % 2 != 0 {
            return Err(Error::InvalidGram(format!(
                "diagonal entry {} at ({i}, {i}) is odd; the lattice must be even",
                gram[i][i]
            )));
        }
    }
    let g: IMatrix = gram
        .iter()
        .map(|row| row.iter().map(|&e| BigInt::from(e)).collect())
        .collect();
    let signature_pair = signature_pair_of(&g)?;

    let (p, d, q) = smith_normal_form(&g);
    debug_assert_eq!(matrix_product(&matrix_product(&p, &g), &q), d);
    let diag: Vec<BigInt> = (0..n).map(|i| d[i][i].clone()).collect();
    if diag.iter().any(|e| e.is_zero()) {
        return Err(Error::DegenerateLattice);
    }

    // dual generators for the nontrivial invariant factors
    let mut generator_orders = Vec::new();
    let mut generators: Vec<Vec<BigRational>> = Vec::new();
    for (i, di) in diag.iter().enumerate() {
        if di.is_one() {
            continue;
        }
        let order: u64 = di.try_into().map_err(|_| {
            Error::InvalidGram("invariant factor does not fit in u64".into())
        })?;
        generator_orders.push(order);
        let column: Vec<BigRational> = (0..n)
            .map(|r| BigRational::new(q[r][i].clone(), di.clone()))
            .collect();
        generators.push(column);
    }

    let g_rational: Vec<Vec<BigRational>> = g
        .iter()
        .map(|row| row.iter().map(|e| BigRational::from(e.clone())).collect())
        .collect();
    let coset_vector = |coords: &[u64]| -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); n];
        for (c, gen) in coords.iter().zip(&generators) {
            let c_big = BigRational::from(BigInt::from(*c));
            for (slot, entry) in v.iter_mut().zip(gen) {
                *slot += &c_big * entry;
            }
        }
        v
    };
    let pairing = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..n {
            for j in 0..n {
                acc += &x[i] * &g_rational[i][j] * &y[j];
            }
        }
        acc
    };

    let size: u64 = generator_orders.iter().product();
    let size = size as usize;
    let skeleton = FiniteQuadraticModule {
        generator_orders: generator_orders.clone(),
        q_form: Vec::new(),
        bilinear: Vec::new(),
        signature_pair,
        generators: generators.clone(),
    };
    let vectors: Vec<Vec<BigRational>> = (0..size)
        .map(|idx| coset_vector(&skeleton.element(idx)))
        .collect();
    let two = BigRational::from(BigInt::from(2));
    let q_form: Vec<BigRational> = vectors
        .iter()
        .map(|v| frac_mod1(&(pairing(v, v) / &two)))
        .collect();
    let bilinear: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|x| vectors.iter().map(|y| frac_mod1(&pairing(x, y))).collect())
        .collect();

    Ok(FiniteQuadraticModule {
        generator_orders,
        q_form,
        bilinear,
        signature_pair,
        generators,
    })
}

// ---------------------------------------------------------------------------
// the Weil representation
// ---------------------------------------------------------------------------

/// Square complex matrix in the lexicographic element basis.
pub type ComplexMatrix = Vec<Vec<Complex>>;

/// `e(r) = exp(2 pi i r)` for an exact rational argument.
fn e_of_rational(r: &BigRational, ctx: &PrecisionContext) -> Complex {
    let frac = frac_mod1(r);
    let theta = ctx.pi() * 2u32 * ctx.float_from_rational(&frac);
    let (sin, cos) = theta.sin_cos(ctx.new_float());
    Complex::new(cos, sin)
}

/// The generator matrices `omega(T)` (diagonal, `e(-Q(mu))`) and
/// `omega(S)` (`(xi / sqrt|D|) e(B(mu, nu))` with `xi = e((b+ - b-)/8)`).
pub fn weil_generators(
    fqm: &FiniteQuadraticModule,
    ctx: &PrecisionContext,
) -> (ComplexMatrix, ComplexMatrix) {
    let size = fqm.order() as usize;
    let prec = ctx.prec_bits();
    let mut t = vec![vec![Complex::zero(prec); size]; size];
    for (i, row) in t.iter_mut().enumerate() {
        row[i] = e_of_rational(&-fqm.q_value(i).clone(), ctx);
    }
    let xi = e_of_rational(
        &BigRational::new(
            BigInt::from(fqm.signature_pair.0 as i64 - fqm.signature_pair.1 as i64),
            BigInt::from(8),
        ),
        ctx,
    );
    let scale = ctx.float_from(fqm.order()).sqrt().recip();
    let front = xi.scale(&scale);
    let mut s = vec![vec![Complex::zero(prec); size]; size];
    for nu in 0..size {
        for mu in 0..size {
            // omega(S) phi_mu = (xi/sqrt|D|) sum_nu e(B(mu,nu)) phi_nu:
            // column mu, row nu
            s[nu][mu] = &front * &e_of_rational(fqm.bilinear_value(mu, nu), ctx);
        }
    }
    (t, s)
}

fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.len();
    let prec = a[0][0].prec();
    let mut out = vec![vec![Complex::zero(prec); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex::zero(prec);
            for (k, b_row) in b.iter().enumerate() {
                acc = &acc + &(&a[i][k] * &b_row[j]);
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat_identity(n: usize, prec: u32) -> ComplexMatrix {
    let mut out = vec![vec![Complex::zero(prec); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = Complex::one(prec);
    }
    out
}

fn mat_dagger(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[j][i].conj()).collect())
        .collect()
}

/// Largest entrywise distance between two matrices.
fn mat_max_deviation(a: &ComplexMatrix, b: &ComplexMatrix, ctx: &PrecisionContext) -> Float {
    let mut max = ctx.new_float();
    for (ra, rb) in a.iter().zip(b) {
        for (ea, eb) in ra.iter().zip(rb) {
            let d = ea.dist(eb);
            if d > max {
                max = d;
            }
        }
    }
    max
}

fn mat_scale(a: &ComplexMatrix, s: &Complex) -> ComplexMatrix {
    a.iter()
        .map(|row| row.iter().map(|e| s * e).collect())
        .collect()
}

/// Outcome of the relation suite for `omega_L` on one module: every
/// deviation is an entrywise matrix distance that should sit at rounding
/// level for a correct construction.
#[derive(Clone, Debug)]
pub struct WeilRelationReport {
    pub dimension: usize,
    pub signature_difference_mod_8: u64,
    /// The representation descends from the metaplectic double cover to
    /// `SL_2(Z)` exactly when `b+ - b-` is even.
    pub factors_through_sl2: bool,
    pub t_unitary_deviation: Float,
    pub s_unitary_deviation: Float,
    /// `(S T)^3 = S^2`.
    pub braid_deviation: Float,
    /// `S^2 phi_mu = e((b+ - b-)/4) phi_{-mu}`.
    pub s_squared_deviation: Float,
    /// `(S^2)^2 = e((b+ - b-)/2) I`.
    pub s_fourth_deviation: Float,
    /// Exact order of `omega(T)` (lcm of the `Q`-value denominators).
    pub t_order: u64,
    pub t_order_equals_level: bool,
    /// `T^level = I` measured numerically.
    pub t_power_deviation: Float,
    pub max_deviation: Float,
}

impl WeilRelationReport {
    pub fn all_relations_hold(&self, tolerance: &Float) -> bool {
        self.t_order_equals_level && self.max_deviation < *tolerance
    }
}

/// Check every structural relation of the Weil representation on `fqm`
/// and report the worst deviations; failures are carried in the report,
/// never raised.
pub fn verify_weil_relations(
    fqm: &FiniteQuadraticModule,
    ctx: &PrecisionContext,
) -> WeilRelationReport {
    let (t, s) = weil_generators(fqm, ctx);
    let size = t.len();
    let prec = ctx.prec_bits();
    let identity = mat_identity(size, prec);

    let t_unitary_deviation = mat_max_deviation(&mat_mul(&t, &mat_dagger(&t)), &identity, ctx);
    let s_unitary_deviation = mat_max_deviation(&mat_mul(&s, &mat_dagger(&s)), &identity, ctx);

    let st = mat_mul(&s, &t);
    let st3 = mat_mul(&mat_mul(&st, &st), &st);
    let s2 = mat_mul(&s, &s);
    let braid_deviation = mat_max_deviation(&st3, &s2, ctx);

    // S^2 against phase * negation permutation
    let sig_diff = fqm.signature_pair.0 as i64 - fqm.signature_pair.1 as i64;
    let quarter_phase = e_of_rational(&BigRational::new(sig_diff.into(), 4.into()), ctx);
    let mut negation = vec![vec![Complex::zero(prec); size]; size];
    for j in 0..size {
        negation[fqm.negation_index(j)][j] = Complex::one(prec);
    }
    let s_squared_deviation =
        mat_max_deviation(&s2, &mat_scale(&negation, &quarter_phase), ctx);

    // (S^2)^2 against phase * identity
    let half_phase = e_of_rational(&BigRational::new(sig_diff.into(), 2.into()), ctx);
    let s_fourth_deviation = mat_max_deviation(
        &mat_mul(&s2, &s2),
        &mat_scale(&identity, &half_phase),
        ctx,
    );

    // order of T: exact from the stored rationals, then T^level measured
    let t_order = {
        let mut ord = BigInt::one();
        for q in &fqm.q_form {
            ord = ord.lcm(q.denom());
        }
        let ord: u64 = ord.try_into().expect("T order fits in u64");
        ord
    };
    let level = fqm.level();
    let mut t_power = identity.clone();
    for _ in 0..level {
        t_power = mat_mul(&t_power, &t);
    }
    let t_power_deviation = mat_max_deviation(&t_power, &identity, ctx);

    let mut max_deviation = ctx.new_float();
    for d in [
        &t_unitary_deviation,
        &s_unitary_deviation,
        &braid_deviation,
        &s_squared_deviation,
        &s_fourth_deviation,
        &t_power_deviation,
    ] {
        if *d > max_deviation {
            max_deviation = d.clone();
        }
    }

    WeilRelationReport {
        dimension: size,
        signature_difference_mod_8: fqm.signature_difference_mod_8(),
        factors_through_sl2: sig_diff % 2 == 0,
        t_unitary_deviation,
        s_unitary_deviation,
        braid_deviation,
        s_squared_deviation,
        s_fourth_deviation,
        t_order,
        t_order_equals_level: t_order == level,
        t_power_deviation,
        max_deviation,
    }
}

// ---------------------------------------------------------------------------
// form coefficients and special divisors
// ---------------------------------------------------------------------------

/// Fourier coefficients of a candidate weakly holomorphic input form:
/// integer entries `c(m, mu)` keyed by rational index and element
/// coordinates, plus the claimed weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FormCoefficientsJson", into = "FormCoefficientsJson")]
pub struct FormCoefficients {
    weight: BigRational,
    entries: BTreeMap<(BigRational, Vec<u64>), i64>,
}

#[derive(Serialize, Deserialize)]
struct FormEntryJson {
    m: String,
    mu: Vec<u64>,
    c: i64,
}

#[derive(Serialize, Deserialize)]
struct FormCoefficientsJson {
    weight: String,
    entries: Vec<FormEntryJson>,
}

fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim())
        .map_err(|e| Error::InvalidForm(format!("cannot parse rational {s:?}: {e}")))
}

impl TryFrom<FormCoefficientsJson> for FormCoefficients {
    type Error = Error;
    fn try_from(json: FormCoefficientsJson) -> Result<FormCoefficients> {
        let weight = parse_rational(&json.weight)?;
        let mut entries = BTreeMap::new();
        for entry in json.entries {
            let m = parse_rational(&entry.m)?;
            if entries.insert((m, entry.mu.clone()), entry.c).is_some() {
                return Err(Error::InvalidForm(format!(
                    "duplicate coefficient at m={}, mu={:?}",
                    entry.m, entry.mu
                )));
            }
        }
        Ok(FormCoefficients { weight, entries })
    }
}

impl From<FormCoefficients> for FormCoefficientsJson {
    fn from(c: FormCoefficients) -> FormCoefficientsJson {
        FormCoefficientsJson {
            weight: c.weight.to_string(),
            entries: c
                .entries
                .into_iter()
                .map(|((m, mu), value)| FormEntryJson {
                    m: m.to_string(),
                    mu,
                    c: value,
                })
                .collect(),
        }
    }
}

impl FormCoefficients {
    pub fn new(
        weight: BigRational,
        entries: impl IntoIterator<Item = ((BigRational, Vec<u64>), i64)>,
    ) -> FormCoefficients {
        FormCoefficients {
            weight,
            entries: entries.into_iter().collect(),
        }
    }

    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn entries(&self) -> &BTreeMap<(BigRational, Vec<u64>), i64> {
        &self.entries
    }

    /// The most negative index carrying a nonzero entry, if any: the
    /// principal-part cutoff.
    pub fn principal_part_cutoff(&self) -> Option<&BigRational> {
        self.entries
            .iter()
            .filter(|(_, &c)| c != 0)
            .map(|((m, _), _)| m)
            .min()
    }
}

/// One flagged entry of a support validation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportViolation {
    pub m: BigRational,
    pub mu: Vec<u64>,
    pub reason: String,
}

/// Validation outcome for form coefficients against a module.
#[derive(Clone, Debug)]
pub struct FormSupportReport {
    pub violations: Vec<SupportViolation>,
    /// Whether the stored weight equals `1 - b+/2`, the input weight
    /// matching a signature-`(b+, 2)` orthogonal setting.
    pub weight_ok: bool,
    pub expected_weight: BigRational,
}

impl FormSupportReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.weight_ok
    }
}

/// Flag every nonzero entry whose index violates `m + Q(mu)` integral or
/// `m` not in `(1/level) Z`, and check the weight field.  The containment
/// scale must be the level of the form, not the group order or exponent:
/// over the rank-one even lattice of discriminant 2 the index 3/4 is
/// admissible (3/4 + Q([1]) = 1), and only the level 4 admits it.
pub fn validate_form_support(
    fqm: &FiniteQuadraticModule,
    coeffs: &FormCoefficients,
) -> FormSupportReport {
    let level = BigInt::from(fqm.level());
    let mut violations = Vec::new();
    for ((m, mu), &c) in &coeffs.entries {
        if c == 0 {
            continue;
        }
        let index = match fqm.index_of(mu) {
            Ok(i) => i,
            Err(_) => {
                violations.push(SupportViolation {
                    m: m.clone(),
                    mu: mu.clone(),
                    reason: "element coordinates outside the module".into(),
                });
                continue;
            }
        };
        if !(m + fqm.q_value(index)).denom().is_one() {
            violations.push(SupportViolation {
                m: m.clone(),
                mu: mu.clone(),
                reason: format!("m + Q(mu) = {} is not an integer", m + fqm.q_value(index)),
            });
        }
        if !(&level % m.denom()).is_zero() {
            violations.push(SupportViolation {
                m: m.clone(),
                mu: mu.clone(),
                reason: format!("m = {m} is not a multiple of 1/level = 1/{level}"),
            });
        }
    }
    let expected_weight = BigRational::one()
        - BigRational::new(BigInt::from(fqm.signature_pair.0), BigInt::from(2));
    let weight_ok = coeffs.weight == expected_weight;
    FormSupportReport {
        violations,
        weight_ok,
        expected_weight,
    }
}

/// The formal special-divisor combination defined by a principal part:
/// term `(m, mu) -> c(-m, mu)` for every negative-index nonzero entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSpecialDivisor {
    pub terms: BTreeMap<(BigRational, Vec<u64>), i64>,
}

/// Reindex the principal part of validated coefficients into the formal
/// divisor, and return the constant coefficient `c(0, 0)` (the power of
/// the tautological bundle carried by the associated product).
pub fn borcherds_divisor(
    fqm: &FiniteQuadraticModule,
    coeffs: &FormCoefficients,
) -> Result<(FormalSpecialDivisor, i64)> {
    let report = validate_form_support(fqm, coeffs);
    if !report.is_valid() {
        let detail = report
            .violations
            .first()
            .map(|v| v.reason.clone())
            .unwrap_or_else(|| {
                format!(
                    "weight must be {} for this module",
                    report.expected_weight
                )
            });
        return Err(Error::InvalidForm(format!(
            "coefficients fail support validation: {detail}"
        )));
    }
    let mut terms = BTreeMap::new();
    for ((m, mu), &c) in &coeffs.entries {
        if c != 0 && m.is_negative() {
            terms.insert((-m.clone(), mu.clone()), c);
        }
    }
    let zero_coords = vec![0u64; fqm.generator_orders.len()];
    let c00 = coeffs
        .entries
        .get(&(BigRational::zero(), zero_coords))
        .copied()
        .unwrap_or(0);
    Ok((FormalSpecialDivisor { terms }, c00))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PrecisionContext {
        PrecisionContext::standard()
    }

    fn rational(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn hyperbolic_plane() -> Vec<Vec<i64>> {
        vec![vec![0, 1], vec![1, 0]]
    }

    fn signature_2_2() -> Vec<Vec<i64>> {
        vec![
            vec![0, 1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, 1, 0],
        ]
    }

    fn test_grams() -> Vec<Vec<Vec<i64>>> {
        vec![
            hyperbolic_plane(),
            vec![vec![2]],
            vec![vec![2, 0], vec![0, 2]],
            vec![vec![2, 1], vec![1, 2]],
            signature_2_2(),
            vec![vec![-2]],
            vec![vec![2, 1], vec![1, 4]],
        ]
    }

    /// Determinant by the Smith normal form product, cross-checked
    /// against cofactor expansion.
    fn det_cofactor(a: &[Vec<i64>]) -> i64 {
        let n = a.len();
        if n == 1 {
            return a[0][0];
        }
        let mut det = 0;
        for j in 0..n {
            let minor: Vec<Vec<i64>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, &e)| e)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            det += sign * a[0][j] * det_cofactor(&minor);
        }
        det
    }

    #[test]
    fn smith_normal_form_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
        let mut tried = 0;
        while tried < 40 {
            let n = rng.random_range(1..=4);
            let a: IMatrix = (0..n)
                .map(|_| (0..n).map(|_| BigInt::from(rng.random_range(-6i64..=6))).collect())
                .collect();
            tried += 1;
            let (p, d, q) = smith_normal_form(&a);
            // P A Q = D
            assert_eq!(matrix_product(&matrix_product(&p, &a), &q), d);
            // D diagonal, nonnegative, divisibility chain
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert!(d[i][j].is_zero(), "off-diagonal entry in SNF");
                    }
                }
                assert!(!d[i][i].is_negative());
            }
            for i in 0..n.saturating_sub(1) {
                if !d[i][i].is_zero() {
                    assert!((&d[i + 1][i + 1] % &d[i][i]).is_zero(), "divisibility chain");
                }
            }
            // P and Q unimodular: integer char poly constant term = +-det
            let det_p = characteristic_polynomial(&p).pop().unwrap();
            let det_q = characteristic_polynomial(&q).pop().unwrap();
            assert!(det_p.abs().is_one(), "P not unimodular");
            assert!(det_q.abs().is_one(), "Q not unimodular");
        }
    }

    #[test]
    fn signature_by_descartes_matches_known_cases() {
        let known: Vec<(Vec<Vec<i64>>, (u32, u32))> = vec![
            (vec![vec![2]], (1, 0)),
            (vec![vec![-2]], (0, 1)),
            (hyperbolic_plane(), (1, 1)),
            (vec![vec![2, 0], vec![0, 2]], (2, 0)),
            (vec![vec![2, 1], vec![1, 2]], (2, 0)),
            (signature_2_2(), (2, 2)),
            (vec![vec![-2, 1], vec![1, -2]], (0, 2)),
        ];
        for (gram, expected) in known {
            let m = discriminant_module(&gram).unwrap();
            assert_eq!(m.signature_pair(), expected, "signature of {gram:?}");
        }
    }

    #[test]
    fn discriminant_module_examples() {
        // unimodular: trivial module
        let trivial = discriminant_module(&hyperbolic_plane()).unwrap();
        assert_eq!(trivial.order(), 1);
        assert!(trivial.generator_orders().is_empty());
        assert_eq!(trivial.level(), 1);

        // [[2]]: Z/2 with Q(g) = 1/4
        let a1 = discriminant_module(&[vec![2]]).unwrap();
        assert_eq!(a1.generator_orders(), &[2]);
        assert_eq!(a1.q_value(0), &BigRational::zero());
        assert_eq!(a1.q_value(1), &rational(1, 4));
        assert_eq!(a1.level(), 4);

        // diag(2,2): (Z/2)^2 with Q values {0, 1/4, 1/4, 1/2}
        let a1a1 = discriminant_module(&[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(a1a1.generator_orders(), &[2, 2]);
        let mut qs: Vec<BigRational> =
            (0..4).map(|i| a1a1.q_value(i).clone()).collect();
        qs.sort();
        assert_eq!(
            qs,
            vec![BigRational::zero(), rational(1, 4), rational(1, 4), rational(1, 2)]
        );

        // A2 = [[2,1],[1,2]]: Z/3 with Q = {0, 1/3, 1/3}
        let a2 = discriminant_module(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(a2.generator_orders(), &[3]);
        let mut qs: Vec<BigRational> = (0..3).map(|i| a2.q_value(i).clone()).collect();
        qs.sort();
        assert_eq!(qs, vec![BigRational::zero(), rational(1, 3), rational(1, 3)]);
        assert_eq!(a2.level(), 3);
    }

    #[test]
    fn module_order_matches_determinant() {
        for gram in test_grams() {
            let m = discriminant_module(&gram).unwrap();
            assert_eq!(
                m.order() as i64,
                det_cofactor(&gram).abs(),
                "|D| = |det G| for {gram:?}"
            );
        }
    }

    #[test]
    fn rejects_bad_gram_matrices() {
        // odd diagonal
        assert!(matches!(
            discriminant_module(&[vec![1]]),
            Err(Error::InvalidGram(_))
        ));
        // not symmetric
        assert!(matches!(
            discriminant_module(&[vec![2, 1], vec![0, 2]]),
            Err(Error::InvalidGram(_))
        ));
        // degenerate
        assert!(matches!(
            discriminant_module(&[vec![2, 2], vec![2, 2]]),
            Err(Error::DegenerateLattice)
        ));
        // not square
        assert!(discriminant_module(&[vec![2, 0]]).is_err());
    }

    #[test]
    fn quadratic_and_bilinear_forms_are_consistent() {
        // B(x, y) = Q(x + y) - Q(x) - Q(y) mod 1 and Q(-x) = Q(x)
        for gram in test_grams() {
            let m = discriminant_module(&gram).unwrap();
            let size = m.order() as usize;
            for i in 0..size {
                assert_eq!(
                    m.q_value(i),
                    m.q_value(m.negation_index(i)),
                    "Q(-x) = Q(x) in {gram:?}"
                );
                for j in 0..size {
                    let xi = m.element(i);
                    let xj = m.element(j);
                    let sum: Vec<u64> = xi
                        .iter()
                        .zip(&xj)
                        .zip(m.generator_orders())
                        .map(|((a, b), d)| (a + b) % d)
                        .collect();
                    let k = m.index_of(&sum).unwrap();
                    let polar =
                        frac_mod1(&(m.q_value(k) - m.q_value(i) - m.q_value(j)));
                    assert_eq!(
                        &polar,
                        m.bilinear_value(i, j),
                        "polarization identity in {gram:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn milgram_formula() {
        // sum_mu e(Q(mu)) = sqrt|D| e((b+ - b-)/8): ties Q values and the
        // signature computation together through an independent identity
        let c = ctx();
        for gram in test_grams() {
            let m = discriminant_module(&gram).unwrap();
            let mut acc = Complex::zero(c.prec_bits());
            for i in 0..m.order() as usize {
                acc = &acc + &e_of_rational(m.q_value(i), &c);
            }
            let sig = m.signature_pair().0 as i64 - m.signature_pair().1 as i64;
            let expected = e_of_rational(&rational(sig, 8), &c)
                .scale(&c.float_from(m.order()).sqrt());
            assert!(
                acc.dist(&expected) < c.float_from(1e-30),
                "Milgram formula for {gram:?}"
            );
        }
    }

    #[test]
    fn weil_generator_examples() {
        let c = ctx();
        // trivial module: T = [1], S = [e((b+-b-)/8)] = [1] at signature (1,1)
        let trivial = discriminant_module(&hyperbolic_plane()).unwrap();
        let (t, s) = weil_generators(&trivial, &c);
        assert_eq!(t.len(), 1);
        assert!(t[0][0].dist(&Complex::one(c.prec_bits())) < c.float_from(1e-30));
        assert!(s[0][0].dist(&Complex::one(c.prec_bits())) < c.float_from(1e-30));

        // diag(2,2): T = diag(1, -i, -i, -1) in lexicographic order
        let a1a1 = discriminant_module(&[vec![2, 0], vec![0, 2]]).unwrap();
        let (t, _) = weil_generators(&a1a1, &c);
        let minus_i = Complex::new(c.new_float(), c.float_from(-1));
        let minus_one = Complex::new(c.float_from(-1), c.new_float());
        let one = Complex::one(c.prec_bits());
        let tol = c.float_from(1e-30);
        assert!(t[0][0].dist(&one) < tol);
        assert!(t[1][1].dist(&minus_i) < tol);
        assert!(t[2][2].dist(&minus_i) < tol);
        assert!(t[3][3].dist(&minus_one) < tol);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(t[i][j].is_zero(), "T must be diagonal");
                }
            }
        }
    }

    #[test]
    fn weil_relations_hold_on_test_modules() {
        let c = ctx();
        let tol = c.float_from(1e-12);
        for gram in test_grams() {
            let m = discriminant_module(&gram).unwrap();
            let report = verify_weil_relations(&m, &c);
            assert!(
                report.all_relations_hold(&tol),
                "relations fail for {gram:?}: max deviation {}",
                report.max_deviation
            );
            assert_eq!(report.dimension as u64, m.order());
            assert_eq!(report.t_order, m.level());
        }
    }

    #[test]
    fn sl2_descent_flag_tracks_signature_parity() {
        let c = ctx();
        let even = discriminant_module(&[vec![2, 0], vec![0, 2]]).unwrap();
        assert!(verify_weil_relations(&even, &c).factors_through_sl2);
        let odd = discriminant_module(&[vec![2]]).unwrap();
        assert!(!verify_weil_relations(&odd, &c).factors_through_sl2);
    }

    #[test]
    fn equivalent_grams_give_conjugate_representations() {
        // diag(2,2) vs U^T diag(2,2) U for unimodular U = [[1,1],[0,1]]:
        // same discriminant form, so some Q- and B-preserving bijection of
        // elements must conjugate one matrix pair into the other
        let c = ctx();
        let m1 = discriminant_module(&[vec![2, 0], vec![0, 2]]).unwrap();
        let m2 = discriminant_module(&[vec![2, 2], vec![2, 4]]).unwrap();
        assert_eq!(m1.generator_orders(), m2.generator_orders());
        assert_eq!(m1.signature_pair(), m2.signature_pair());

        let size = m1.order() as usize;
        let indices: Vec<usize> = (0..size).collect();
        let mut found = false;
        'perm: for perm in permutations(&indices) {
            for i in 0..size {
                if m1.q_value(i) != m2.q_value(perm[i]) {
                    continue 'perm;
                }
                for j in 0..size {
                    if m1.bilinear_value(i, j) != m2.bilinear_value(perm[i], perm[j]) {
                        continue 'perm;
                    }
                }
            }
            // this bijection must conjugate (T1, S1) into (T2, S2)
            let (t1, s1) = weil_generators(&m1, &c);
            let (t2, s2) = weil_generators(&m2, &c);
            let tol = c.float_from(1e-12);
            for i in 0..size {
                for j in 0..size {
                    assert!(t1[i][j].dist(&t2[perm[i]][perm[j]]) < tol);
                    assert!(s1[i][j].dist(&s2[perm[i]][perm[j]]) < tol);
                }
            }
            found = true;
            break;
        }
        assert!(found, "no form-preserving bijection found");
    }

    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, &x) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, x);
                out.push(tail);
            }
        }
        out
    }

    #[test]
    fn support_validation_examples() {
        // trivial module, integer indices: valid
        let trivial = discriminant_module(&signature_2_2()).unwrap();
        let coeffs = FormCoefficients::new(
            BigRational::one() - rational(2, 2),
            [
                ((rational(-1, 1), vec![]), 1),
                ((rational(0, 1), vec![]), 24),
            ],
        );
        let report = validate_form_support(&trivial, &coeffs);
        assert!(report.is_valid(), "violations: {:?}", report.violations);

        // [[2]] module: m = 3/4 valid (3/4 + 1/4 integral), m = 1/2 flagged
        let a1 = discriminant_module(&[vec![2]]).unwrap();
        let good = FormCoefficients::new(
            rational(1, 2),
            [((rational(3, 4), vec![1]), 5)],
        );
        let report = validate_form_support(&a1, &good);
        assert!(report.is_valid(), "violations: {:?}", report.violations);

        let bad = FormCoefficients::new(
            rational(1, 2),
            [((rational(1, 2), vec![1]), 5)],
        );
        let report = validate_form_support(&a1, &bad);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].reason.contains("not an integer"));

        // wrong weight flagged (expected 1 - 1/2 = 1/2 for b+ = 1)
        let wrong_weight = FormCoefficients::new(
            rational(3, 2),
            [((rational(0, 1), vec![0]), 1)],
        );
        let report = validate_form_support(&a1, &wrong_weight);
        assert!(!report.weight_ok);
        assert_eq!(report.expected_weight, rational(1, 2));

        // out-of-range coordinates flagged, zero entries ignored
        let stray = FormCoefficients::new(
            rational(1, 2),
            [
                ((rational(-1, 4), vec![7]), 1),
                ((rational(1, 2), vec![1]), 0),
            ],
        );
        let report = validate_form_support(&a1, &stray);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0]
            .reason
            .contains("outside the module"));
    }

    #[test]
    fn borcherds_divisor_examples() {
        let trivial = discriminant_module(&signature_2_2()).unwrap();
        // only c(0,0) = 12: empty divisor, bundle power 12
        let constant = FormCoefficients::new(
            rational(0, 1),
            [((BigRational::zero(), vec![]), 12)],
        );
        let (div, c00) = borcherds_divisor(&trivial, &constant).unwrap();
        assert!(div.terms.is_empty());
        assert_eq!(c00, 12);

        // c(-1, 0) = 1: divisor {(1, 0): 1}
        let principal = FormCoefficients::new(
            rational(0, 1),
            [((rational(-1, 1), vec![]), 1)],
        );
        let (div, c00) = borcherds_divisor(&trivial, &principal).unwrap();
        assert_eq!(div.terms.len(), 1);
        assert_eq!(div.terms.get(&(rational(1, 1), vec![])), Some(&1));
        assert_eq!(c00, 0);

        // invalid support errors out
        let a1 = discriminant_module(&[vec![2]]).unwrap();
        let invalid = FormCoefficients::new(
            rational(1, 2),
            [((rational(1, 2), vec![1]), 5)],
        );
        assert!(borcherds_divisor(&a1, &invalid).is_err());
    }

    #[test]
    fn borcherds_divisor_matches_reindex_oracle() {
        // mixed entries over [[2]]: the divisor must be exactly the
        // independent brute-force flip of the negative-index entries
        let a1 = discriminant_module(&[vec![2]]).unwrap();
        let entries = vec![
            ((rational(-5, 4), vec![1]), 3),
            ((rational(-1, 1), vec![0]), 1),
            ((rational(-3, 4), vec![1]), 0),
            ((rational(0, 1), vec![0]), 24),
            ((rational(3, 4), vec![1]), -5),
            ((rational(1, 1), vec![0]), 7),
        ];
        let coeffs = FormCoefficients::new(rational(1, 2), entries.clone());
        let (div, c00) = borcherds_divisor(&a1, &coeffs).unwrap();

        let mut oracle = BTreeMap::new();
        for ((m, mu), c) in &entries {
            if *c != 0 && m < &BigRational::zero() {
                oracle.insert((-m.clone(), mu.clone()), *c);
            }
        }
        assert_eq!(div.terms, oracle);
        assert_eq!(c00, 24);
        // term count = number of nonzero negative-index entries
        assert_eq!(div.terms.len(), 2);
        // cutoff is the most negative nonzero index
        assert_eq!(coeffs.principal_part_cutoff(), Some(&rational(-5, 4)));
    }

    #[test]
    fn form_coefficients_serde_round_trip() {
        let coeffs = FormCoefficients::new(
            rational(1, 2),
            [
                ((rational(-3, 4), vec![1]), 2),
                ((BigRational::zero(), vec![0]), 24),
            ],
        );
        let json = serde_json::to_string(&coeffs).unwrap();
        let back: FormCoefficients = serde_json::from_str(&json).unwrap();
        assert_eq!(coeffs, back);

        // external shape: list of {"m": "p/q", "mu": [...], "c": n}
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(parsed["entries"][0]["m"].is_string());
        assert!(parsed["entries"][0]["mu"].is_array());

        // duplicate entries rejected
        let dup = r#"{"weight":"1/2","entries":[
            {"m":"-3/4","mu":[1],"c":1},{"m":"-3/4","mu":[1],"c":2}]}"#;
        assert!(serde_json::from_str::<FormCoefficients>(dup).is_err());
        // junk rationals rejected
        let junk = r#"{"weight":"x","entries":[]}"#;
        assert!(serde_json::from_str::<FormCoefficients>(junk).is_err());
    }

    #[test]
    fn element_indexing_round_trips() {
        let m = discriminant_module(&[vec![2, 0], vec![0, 4]]).unwrap();
        let size = m.order() as usize;
        assert_eq!(size, 8);
        for i in 0..size {
            assert_eq!(m.index_of(&m.element(i)).unwrap(), i);
        }
        // lexicographic: first element is the identity
        assert!(m.element(0).iter().all(|&c| c == 0));
        // negation is an involution fixing 2-torsion
        for i in 0..size {
            assert_eq!(m.negation_index(m.negation_index(i)), i);
        }
    }
}
