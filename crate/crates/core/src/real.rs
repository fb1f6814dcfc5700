//! Configurable-precision real numbers.
//!
//! [`BigReal`] is a binary floating-point number whose working precision (in
//! bits) travels with the value. Every numeric formula path in the crate
//! states a target relative error; the working precision must sit at least 60
//! bits beyond that target, which the default of 256 bits satisfies for every
//! tolerance the acceptance battery pins.
//!
//! [`Prec`] is the small context handle that constructs values and constants
//! at a chosen precision.

use crate::rational::Rational;
use crate::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

pub type BigReal = Float;

pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Working-precision context. Copy-cheap; pass by value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prec(pub u32);

impl Default for Prec {
    fn default() -> Self {
        Prec(DEFAULT_PRECISION_BITS)
    }
}

impl Prec {
    /// Reads `SEPSCOPE_PRECISION_BITS` if set, otherwise the 256-bit default.
    pub fn from_env() -> Prec {
        match std::env::var("SEPSCOPE_PRECISION_BITS") {
            Ok(s) => match s.trim().parse::<u32>() {
                Ok(bits) if bits >= 16 => Prec(bits),
                _ => Prec::default(),
            },
            Err(_) => Prec::default(),
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn zero(self) -> BigReal {
        Float::with_val(self.0, 0)
    }

    pub fn one(self) -> BigReal {
        Float::with_val(self.0, 1)
    }

    pub fn int(self, n: i64) -> BigReal {
        Float::with_val(self.0, n)
    }

    pub fn f64(self, x: f64) -> BigReal {
        Float::with_val(self.0, x)
    }

    pub fn rational(self, q: &Rational) -> BigReal {
        // exact decimal round-trip; not a hot path
        let rq = rug::Rational::from_str_radix(&format!("{}/{}", q.numer(), q.denom()), 10)
            .expect("rational digits");
        Float::with_val(self.0, &rq)
    }

    pub fn pi(self) -> BigReal {
        Float::with_val(self.0, Constant::Pi)
    }

    pub fn euler(self) -> BigReal {
        Float::with_val(self.0, Constant::Euler)
    }

    /// 2^-k, the usual epsilon ladder.
    pub fn eps(self, k: u32) -> BigReal {
        Float::with_val(self.0, Float::i_exp(1, -(k as i32)))
    }

    /// Machine epsilon at this precision.
    pub fn ulp(self) -> BigReal {
        self.eps(self.0 - 1)
    }
}

/// Declares `x` equal to the rational `p/q` only when `|x - p/q| < 2^(-prec/2)`
/// and `q` stays below `max_den`. Guards exact-target tests against false
/// rationalization of near-misses.
pub fn rationalize(x: &BigReal, max_den: u64) -> Option<Rational> {
    let prec = x.prec();
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)));
    // continued-fraction convergents
    let mut a = x.clone();
    let (mut p0, mut q0) = (num_bigint::BigInt::from(1), num_bigint::BigInt::from(0));
    let (mut p1, mut q1) = (num_bigint::BigInt::from(0), num_bigint::BigInt::from(1));
    for _ in 0..200 {
        let fl = a.clone().floor();
        let k = match fl.to_integer() {
            Some(i) => num_bigint::BigInt::parse_bytes(i.to_string_radix(10).as_bytes(), 10)?,
            None => return None,
        };
        let p2 = &k * &p0 + &p1;
        let q2 = &k * &q0 + &q1;
        if q2 > num_bigint::BigInt::from(max_den) {
            return None;
        }
        let cand = Rational::new(p2.clone(), q2.clone());
        let diff: Float = (x - Prec(prec).rational(&cand)).abs();
        if diff < tol {
            return Some(cand);
        }
        p1 = p0;
        q1 = q0;
        p0 = p2;
        q0 = q2;
        let frac = a - fl;
        if frac == 0 {
            return None;
        }
        a = frac.recip();
    }
    None
}

/// `|x - y| <= tol * (1 + max(|x|,|y|))`, the mixed tolerance the quadrature
/// and series contracts use.
pub fn close(x: &BigReal, y: &BigReal, tol: &BigReal) -> bool {
    let d: Float = (x - y.clone()).abs();
    let sx = x.clone().abs();
    let sy = y.clone().abs();
    let scale = if sx > sy { sx } else { sy };
    d <= tol.clone() * (Float::with_val(x.prec(), 1) + scale)
}

/// x^k for signed integer k.
pub fn powi(x: &BigReal, k: i64) -> BigReal {
    x.clone().pow(k as i32)
}

pub fn ensure_domain(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(what.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rational_conversion_exact() {
        let p = Prec(128);
        let x = p.rational(&rat(-22, 7));
        let y = p.int(-22) / p.int(7);
        assert_eq!(x, y);
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        let p = Prec(256);
        let x = p.rational(&rat(44482, 4091349));
        assert_eq!(rationalize(&x, 1_000_000_000), Some(rat(44482, 4091349)));
    }

    #[test]
    fn rationalize_rejects_near_misses() {
        let p = Prec(256);
        // 8/33 perturbed by 2^-60: far bigger than the 2^-128 acceptance band
        let x = p.rational(&rat(8, 33)) + p.eps(60);
        assert_eq!(rationalize(&x, 1_000_000_000), None);
    }

    #[test]
    fn rationalize_rejects_irrational() {
        let p = Prec(256);
        assert_eq!(rationalize(&p.pi(), 1_000_000_000), None);
    }
}
