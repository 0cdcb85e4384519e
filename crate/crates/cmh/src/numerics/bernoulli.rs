//! Exact Bernoulli numbers B_0, B_1, B_2, ... as big rationals.
//!
//! Computed once by the defining recurrence
//! sum_{j=0}^{m} C(m+1, j) B_j = 0 (m >= 1), B_0 = 1, which gives the
//! B_1 = -1/2 convention; the Euler-Maclaurin kernel only consumes the
//! even-index values B_2, B_4, ..., B_60.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Mutex;

/// Highest index the Euler-Maclaurin tail ever requests (2K+2 with K = 29).
pub const MAX_INDEX: usize = 60;

static CACHE: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

/// B_n as an exact rational.  Panics if `n > MAX_INDEX`: no caller should
/// ever need deeper tail terms, and the bound keeps the table small.
pub fn bernoulli(n: usize) -> BigRational {
    assert!(n <= MAX_INDEX, "Bernoulli index {n} exceeds table bound {MAX_INDEX}");
    let mut cache = CACHE.lock().expect("Bernoulli cache poisoned");
    while cache.len() <= n {
        let m = cache.len();
        if m == 0 {
            cache.push(BigRational::one());
            continue;
        }
        // B_m = -1/(m+1) * sum_{j=0}^{m-1} C(m+1, j) B_j
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, b) in cache.iter().enumerate() {
            acc += b * BigRational::from_integer(binom.clone());
            // C(m+1, j+1) = C(m+1, j) * (m+1-j) / (j+1)
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let b_m = -acc / BigRational::from_integer(BigInt::from(m + 1));
        cache.push(b_m);
    }
    cache[n].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_values_match_the_classical_table() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(3), q(0, 1));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(6), q(1, 42));
        assert_eq!(bernoulli(8), q(-1, 30));
        assert_eq!(bernoulli(10), q(5, 66));
        assert_eq!(bernoulli(12), q(-691, 2730));
    }

    #[test]
    fn odd_values_vanish_beyond_one() {
        for n in (3..=59).step_by(2) {
            assert!(bernoulli(n).is_zero(), "B_{n} should vanish");
        }
    }

    #[test]
    fn von_staudt_clausen_denominator_at_sixty() {
        // von Staudt-Clausen: denom(B_2k) = product of primes p with (p-1) | 2k.
        // For 2k = 60: p in {2,3,5,7,11,13,31,61}, product 56786730.
        let b60 = bernoulli(60);
        assert_eq!(b60.denom(), &BigInt::from(56786730u64));
    }
}
