//! Exact arithmetic in cyclotomic fields `Q(zeta_n)`.
//!
//! Elements are coordinate vectors over the power basis
//! `1, zeta, ..., zeta^(phi(n)-1)` with rational coefficients, reduced by
//! the `n`-th cyclotomic polynomial.  This keeps Fourier coefficients of
//! class functions on `(Z/N)^x` exact, so character-decomposition
//! identities can be tested as strict equalities rather than to a
//! tolerance.  Conversion to floating complex numbers happens only at
//! L-function boundaries.

use crate::numerics::{Complex, PrecisionContext};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Reduction data for one `n`: the power basis dimension `phi(n)` and the
/// coordinates of `zeta^k` for every `k` in `0..n`.
struct Table {
    dim: usize,
    powers: Vec<Vec<BigRational>>,
}

static TABLES: OnceLock<Mutex<HashMap<u64, Arc<Table>>>> = OnceLock::new();

/// Coefficients (ascending, monic) of the `n`-th cyclotomic polynomial,
/// by exact division of `x^n - 1` by all `Phi_d` for proper divisors `d`.
fn cyclotomic_polynomial(n: u64) -> Vec<BigRational> {
    assert!(n >= 1);
    // p = x^n - 1
    let mut p: Vec<BigRational> = vec![BigRational::zero(); n as usize + 1];
    p[0] = -BigRational::one();
    p[n as usize] = BigRational::one();
    for d in 1..n {
        if n % d == 0 {
            p = divide_by_monic(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

/// Exact division of `p` by a monic `q` with zero remainder (ascending
/// coefficient vectors).
fn divide_by_monic(p: &[BigRational], q: &[BigRational]) -> Vec<BigRational> {
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    assert!(dp >= dq);
    let mut rem = p.to_vec();
    let mut quot = vec![BigRational::zero(); dp - dq + 1];
    for k in (0..=(dp - dq)).rev() {
        let c = rem[k + dq].clone();
        if !c.is_zero() {
            quot[k] = c.clone();
            for (i, qi) in q.iter().enumerate() {
                rem[k + i] -= &c * qi;
            }
        }
    }
    debug_assert!(rem.iter().all(BigRational::is_zero), "non-exact division");
    quot
}

fn table(n: u64) -> Arc<Table> {
    let cache = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("cyclotomic table cache poisoned");
    if let Some(t) = guard.get(&n) {
        return Arc::clone(t);
    }
    let phi = cyclotomic_polynomial(n);
    let dim = phi.len() - 1;
    // zeta^dim = -(phi_0 + phi_1 zeta + ... + phi_{dim-1} zeta^{dim-1})
    let top: Vec<BigRational> = phi[..dim].iter().map(|c| -c).collect();
    let mut powers: Vec<Vec<BigRational>> = Vec::with_capacity(n as usize);
    for k in 0..n as usize {
        if k < dim {
            let mut v = vec![BigRational::zero(); dim];
            v[k] = BigRational::one();
            powers.push(v);
        } else {
            // multiply the previous power by zeta: shift up, fold the
            // overflowing top coefficient back through the minimal polynomial
            let prev = &powers[k - 1];
            let mut v = vec![BigRational::zero(); dim];
            for i in 1..dim {
                v[i] = prev[i - 1].clone();
            }
            let carry = prev[dim - 1].clone();
            if !carry.is_zero() {
                for i in 0..dim {
                    v[i] += &carry * &top[i];
                }
            }
            powers.push(v);
        }
    }
    let t = Arc::new(Table { dim, powers });
    guard.insert(n, Arc::clone(&t));
    t
}

/// An element of `Q(zeta_n)` in the power basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclotomic {
    n: u64,
    coords: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(n: u64) -> Cyclotomic {
        let dim = table(n).dim;
        Cyclotomic {
            n,
            coords: vec![BigRational::zero(); dim],
        }
    }

    pub fn from_rational(n: u64, r: BigRational) -> Cyclotomic {
        let mut out = Cyclotomic::zero(n);
        out.coords[0] = r;
        out
    }

    /// `zeta_n^k` for any integer `k` (reduced mod `n`).
    pub fn zeta_power(n: u64, k: i64) -> Cyclotomic {
        let t = table(n);
        let k = k.rem_euclid(n as i64) as usize;
        Cyclotomic {
            n,
            coords: t.powers[k].clone(),
        }
    }

    /// The `n` of the ambient field `Q(zeta_n)`.
    pub fn ambient_order(&self) -> u64 {
        self.n
    }

    /// Rational coordinates over the power basis `1, zeta, ..., zeta^(k-1)`
    /// of `Q(zeta_n)`.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(BigRational::is_zero)
    }

    /// Rational iff all non-constant power-basis coordinates vanish.
    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(BigRational::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn assert_same_field(&self, other: &Cyclotomic) {
        assert_eq!(
            self.n, other.n,
            "cyclotomic arithmetic requires a common ambient field"
        );
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        self.assert_same_field(other);
        Cyclotomic {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cyclotomic) -> Cyclotomic {
        self.assert_same_field(other);
        Cyclotomic {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        self.assert_same_field(other);
        let t = table(self.n);
        let dim = t.dim;
        // convolve in Z[x], then reduce each power through the table
        let mut conv = vec![BigRational::zero(); 2 * dim - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if !b.is_zero() {
                    conv[i + j] += a * b;
                }
            }
        }
        let mut out = vec![BigRational::zero(); dim];
        for (k, c) in conv.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis = &t.powers[k % self.n as usize];
            // k < 2 dim - 1 <= 2n, so one fold through zeta^n = 1 suffices
            for i in 0..dim {
                if !basis[i].is_zero() {
                    out[i] += &c * &basis[i];
                }
            }
        }
        Cyclotomic { n: self.n, coords: out }
    }

    pub fn scale(&self, r: &BigRational) -> Cyclotomic {
        Cyclotomic {
            n: self.n,
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugation `zeta -> zeta^(-1)` (a field automorphism).
    pub fn conjugate(&self) -> Cyclotomic {
        let t = table(self.n);
        let dim = t.dim;
        let mut out = vec![BigRational::zero(); dim];
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = ((self.n as usize) - i) % self.n as usize;
            let basis = &t.powers[k];
            for j in 0..dim {
                if !basis[j].is_zero() {
                    out[j] += c * &basis[j];
                }
            }
        }
        Cyclotomic { n: self.n, coords: out }
    }

    /// Numerical embedding sending `zeta_n` to `e^(2 pi i / n)`.
    pub fn to_complex(&self, ctx: &PrecisionContext) -> Complex {
        let mut acc = Complex::zero(ctx.prec_bits());
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let root = ctx.root_of_unity(i as i64, self.n);
            acc = &acc + &root.scale(&ctx.float_from_rational(c));
        }
        acc
    }
}
