//! Exact rational arithmetic: the backbone of every exact formula path.
//!
//! [`Rational`] is a ratio of arbitrary-precision integers, always stored in
//! lowest terms with a positive denominator. Arithmetic never rounds. On top
//! of it this module provides the handful of exact special-function kernels
//! the formulas need: Pochhammer symbols, factorials and binomials.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// `n/d` as an exact rational. Panics on `d = 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as an exact rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_integer(a: &Rational) -> bool {
    a.denom().is_one()
}

/// True when `a` is an integer `<= 0`, returning `-a` (the termination index).
pub fn nonpositive_integer(a: &Rational) -> Option<u64> {
    if is_integer(a) && !a.numer().is_positive() {
        let m = -a.numer().clone();
        m.try_into().ok()
    } else {
        None
    }
}

/// Pochhammer symbol (a)_n = prod_{i=1..n} (a + i - 1), with (a)_0 = 1.
pub fn pochhammer(a: &Rational, n: u64) -> Rational {
    let mut acc = Rational::one();
    let mut f = a.clone();
    for _ in 0..n {
        if f.is_zero() {
            return Rational::zero();
        }
        acc *= &f;
        f += Rational::one();
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

pub fn factorial_rat(n: u64) -> Rational {
    Rational::from_integer(factorial(n))
}

/// 2^k for signed k.
pub fn pow2(k: i64) -> Rational {
    let base = rat_int(2);
    pow_int(&base, k)
}

/// a^k for signed k; panics on 0^negative.
pub fn pow_int(a: &Rational, k: i64) -> Rational {
    let mut acc = Rational::one();
    let p = k.unsigned_abs();
    for _ in 0..p {
        acc *= a;
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}
