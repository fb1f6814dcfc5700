//! Exact gamma values at rational arguments with denominator 1, 2, 3 or 6.
//!
//! Every closed-form constant in the probability formulas is a product of
//! gamma functions at such arguments. Shift identities reduce each factor to
//! a rational Pochhammer times one of the base values Gamma(1/2), Gamma(1/3),
//! Gamma(2/3), Gamma(1/6), Gamma(5/6); reflection then cancels the thirds and
//! sixths pairwise:
//!
//! ```text
//! Gamma(1/2)           = sqrt(pi)
//! Gamma(1/3)Gamma(2/3) = 2 pi / sqrt(3)
//! Gamma(1/6)Gamma(5/6) = 2 pi
//! ```
//!
//! A [`GammaValue`] is a rational times integer powers of sqrt(pi) and
//! sqrt(3), plus any unpaired base factors. A value with no unpaired factors
//! is "closed"; asking a closed value with zero radical powers for a rational
//! fails loudly otherwise, so a transcendental residue can never leak into an
//! exact result.

use crate::rational::{is_integer, pochhammer, rat, Rational};
use crate::real::{BigReal, Prec};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use rug::ops::Pow;
use std::collections::BTreeMap;
use std::fmt;

/// Fractional parts a base gamma factor can carry, as (numerator, denominator).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Frac(pub u8, pub u8);

impl Frac {
    fn rational(self) -> Rational {
        rat(self.0 as i64, self.1 as i64)
    }
}

/// A product rational * sqrt(pi)^sqrt_pi * sqrt(3)^sqrt3 * prod Gamma(f)^e.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaValue {
    pub rat: Rational,
    pub sqrt_pi: i64,
    pub sqrt3: i64,
    residual: BTreeMap<Frac, i64>,
}

impl GammaValue {
    pub fn one() -> Self {
        GammaValue {
            rat: Rational::one(),
            sqrt_pi: 0,
            sqrt3: 0,
            residual: BTreeMap::new(),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        GammaValue {
            rat: r,
            ..GammaValue::one()
        }
    }

    /// rational * sqrt(pi)^sp * sqrt(3)^s3, no gamma residue.
    pub fn radical(rat: Rational, sqrt_pi: i64, sqrt3: i64) -> Self {
        let mut v = GammaValue {
            rat,
            sqrt_pi,
            sqrt3,
            residual: BTreeMap::new(),
        };
        v.normalize();
        v
    }

    fn base(f: Frac) -> Self {
        let mut v = GammaValue::one();
        match f {
            Frac(1, 2) => v.sqrt_pi = 1,
            _ => {
                v.residual.insert(f, 1);
            }
        }
        v
    }

    fn push_residual(&mut self, f: Frac, e: i64) {
        let slot = self.residual.entry(f).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.residual.remove(&f);
        }
    }

    /// Cancel reflection pairs 1/3 * 2/3 and 1/6 * 5/6 as far as signs allow.
    fn normalize(&mut self) {
        for (a, b, two_pi_over_sqrt3) in
            [(Frac(1, 3), Frac(2, 3), true), (Frac(1, 6), Frac(5, 6), false)]
        {
            let ea = self.residual.get(&a).copied().unwrap_or(0);
            let eb = self.residual.get(&b).copied().unwrap_or(0);
            let s = if ea > 0 && eb > 0 {
                ea.min(eb)
            } else if ea < 0 && eb < 0 {
                ea.max(eb)
            } else {
                0
            };
            if s != 0 {
                // Gamma(a)Gamma(b) = 2 pi (/ sqrt 3), applied s times
                self.push_residual(a, -s);
                self.push_residual(b, -s);
                self.rat *= crate::rational::pow_int(&rat(2, 1), s);
                self.sqrt_pi += 2 * s;
                if two_pi_over_sqrt3 {
                    self.sqrt3 -= s;
                }
            }
        }
        // sqrt(3)^2 = 3 folds into the rational part
        while self.sqrt3 >= 2 {
            self.rat *= rat(3, 1);
            self.sqrt3 -= 2;
        }
        while self.sqrt3 <= -2 {
            self.rat *= rat(1, 3);
            self.sqrt3 += 2;
        }
    }

    pub fn mul(&self, other: &GammaValue) -> GammaValue {
        let mut out = GammaValue {
            rat: &self.rat * &other.rat,
            sqrt_pi: self.sqrt_pi + other.sqrt_pi,
            sqrt3: self.sqrt3 + other.sqrt3,
            residual: self.residual.clone(),
        };
        for (f, e) in &other.residual {
            out.push_residual(*f, *e);
        }
        out.normalize();
        out
    }

    pub fn inv(&self) -> GammaValue {
        let mut out = GammaValue {
            rat: self.rat.clone().recip(),
            sqrt_pi: -self.sqrt_pi,
            sqrt3: -self.sqrt3,
            residual: BTreeMap::new(),
        };
        for (f, e) in &self.residual {
            out.push_residual(*f, -*e);
        }
        out
    }

    pub fn div(&self, other: &GammaValue) -> GammaValue {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> GammaValue {
        let mut acc = GammaValue::one();
        let base = if k < 0 { self.inv() } else { self.clone() };
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> GammaValue {
        let mut out = self.clone();
        out.rat *= r;
        out
    }

    /// No unpaired third/sixth gamma factors left.
    pub fn is_closed(&self) -> bool {
        self.residual.is_empty()
    }

    /// Exact rational value; errors if any radical or gamma residue remains.
    pub fn into_rational(self) -> Result<Rational> {
        if !self.is_closed() {
            return Err(Error::NotClosed(format!(
                "unpaired gamma factors remain: {:?}",
                self.residual
            )));
        }
        if self.sqrt_pi != 0 || self.sqrt3 != 0 {
            return Err(Error::NotClosed(format!(
                "radical residue sqrt(pi)^{} sqrt(3)^{}",
                self.sqrt_pi, self.sqrt3
            )));
        }
        Ok(self.rat)
    }

    /// Numeric value at precision `p` (residual factors evaluated via gamma).
    pub fn to_real(&self, p: Prec) -> BigReal {
        let mut v = p.rational(&self.rat);
        if self.sqrt_pi != 0 {
            v *= p.pi().sqrt().pow(self.sqrt_pi as i32);
        }
        if self.sqrt3 != 0 {
            v *= p.int(3).sqrt().pow(self.sqrt3 as i32);
        }
        for (f, e) in &self.residual {
            v *= p.rational(&f.rational()).gamma().pow(*e as i32);
        }
        v
    }
}

impl fmt::Display for GammaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rat)?;
        if self.sqrt_pi != 0 {
            write!(f, " * sqrt(pi)^{}", self.sqrt_pi)?;
        }
        if self.sqrt3 != 0 {
            write!(f, " * sqrt(3)^{}", self.sqrt3)?;
        }
        for (fr, e) in &self.residual {
            write!(f, " * Gamma({}/{})^{}", fr.0, fr.1, e)?;
        }
        Ok(())
    }
}

/// Gamma(a) for rational `a` with denominator in {1, 2, 3, 6}.
///
/// Integer and half-integer arguments come out fully closed; thirds and
/// sixths carry a base factor that cancels when multiplied with its
/// reflection partner. Poles (a a nonpositive integer) and other
/// denominators are errors.
pub fn gamma_rational_closed(a: &Rational) -> Result<GammaValue> {
    let den: i64 = match a.denom().try_into() {
        Ok(d) => d,
        Err(_) => return Err(Error::NotClosed("denominator too large".into())),
    };
    if ![1, 2, 3, 6].contains(&den) {
        return Err(Error::NotClosed(format!(
            "gamma argument {} has unsupported denominator {}",
            a, den
        )));
    }
    if is_integer(a) {
        if !a.numer().is_positive() {
            return Err(Error::Domain(format!("gamma pole at {}", a)));
        }
        let n: u64 = a.numer().try_into().expect("positive integer");
        return Ok(GammaValue::from_rational(crate::rational::factorial_rat(
            n - 1,
        )));
    }
    // a = f + n with f in (0,1), n integer (possibly negative)
    let fl = a.floor();
    let f = a - &fl;
    let n: i64 = fl.numer().try_into().map_err(|_| {
        Error::NotClosed("gamma shift out of range".into())
    })?;
    let frac = Frac(
        f.numer().try_into().expect("small numerator"),
        f.denom().try_into().expect("small denominator"),
    );
    let base = GammaValue::base(frac);
    // Gamma(f + n) = (f)_n Gamma(f) for n >= 0; Gamma(f - k) = Gamma(f)/(f-k)_k
    if n >= 0 {
        let shift = pochhammer(&f, n as u64);
        Ok(base.scale(&shift))
    } else {
        let k = (-n) as u64;
        let start = f - Rational::from_integer(k.into());
        let down = pochhammer(&start, k);
        if down.is_zero() {
            return Err(Error::Domain(format!("gamma pole at {}", a)));
        }
        Ok(base.scale(&down.recip()))
    }
}

/// Product of gammas at rational points, as one symbolic value.
pub fn gamma_product(args: &[(Rational, i64)]) -> Result<GammaValue> {
    let mut acc = GammaValue::one();
    for (a, e) in args {
        acc = acc.mul(&gamma_rational_closed(a)?.pow(*e));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let g = gamma_rational_closed(&rat(1, 2)).unwrap();
        assert!(g.is_closed());
        assert_eq!(g.rat, rat_int(1));
        assert_eq!(g.sqrt_pi, 1);
        assert_eq!(g.sqrt3, 0);
    }

    #[test]
    fn gamma_integer_is_factorial() {
        let g = gamma_rational_closed(&rat_int(5)).unwrap();
        assert_eq!(g.into_rational().unwrap(), rat_int(24));
    }

    #[test]
    fn reflection_sixths() {
        // Gamma(1/6) Gamma(5/6) = 2 pi
        let g = gamma_product(&[(rat(1, 6), 1), (rat(5, 6), 1)]).unwrap();
        assert!(g.is_closed());
        assert_eq!(g.rat, rat_int(2));
        assert_eq!(g.sqrt_pi, 2);
        assert_eq!(g.sqrt3, 0);
    }

    #[test]
    fn gamma_5_6_times_7_6_is_pi_over_3() {
        // Gamma(7/6) = (1/6) Gamma(1/6), then reflection gives pi/3
        let g = gamma_product(&[(rat(5, 6), 1), (rat(7, 6), 1)]).unwrap();
        assert!(g.is_closed());
        assert_eq!(g.rat, rat(1, 3));
        assert_eq!(g.sqrt_pi, 2);
        assert_eq!(g.sqrt3, 0);
    }

    #[test]
    fn reflection_thirds() {
        // Gamma(1/3) Gamma(2/3) = 2 pi / sqrt(3)
        let g = gamma_product(&[(rat(1, 3), 1), (rat(2, 3), 1)]).unwrap();
        assert!(g.is_closed());
        assert_eq!(g.rat, rat_int(2));
        assert_eq!(g.sqrt_pi, 2);
        assert_eq!(g.sqrt3, -1);
    }

    #[test]
    fn single_third_is_not_closed() {
        let g = gamma_rational_closed(&rat(1, 3)).unwrap();
        assert!(!g.is_closed());
        assert!(g.into_rational().is_err());
    }

    #[test]
    fn unsupported_denominator() {
        assert!(matches!(
            gamma_rational_closed(&rat(1, 5)),
            Err(Error::NotClosed(_))
        ));
    }

    #[test]
    fn pole_rejected() {
        assert!(gamma_rational_closed(&rat_int(0)).is_err());
        assert!(gamma_rational_closed(&rat_int(-3)).is_err());
    }

    #[test]
    fn recurrence_shift_symbolic() {
        // Gamma(a+1) = a Gamma(a) for all supported a, including negatives
        for (n, d) in [
            (1i64, 2i64),
            (3, 2),
            (1, 3),
            (2, 3),
            (1, 6),
            (5, 6),
            (7, 6),
            (-1, 2),
            (-5, 6),
            (-4, 3),
            (4, 1),
        ] {
            let a = rat(n, d);
            let lhs = gamma_rational_closed(&(a.clone() + rat_int(1))).unwrap();
            let rhs = gamma_rational_closed(&a).unwrap().scale(&a);
            assert_eq!(lhs, rhs, "failed at a = {}/{}", n, d);
        }
    }

    #[test]
    fn numeric_agreement_with_mpfr() {
        let p = Prec(128);
        for (n, d) in [(1i64, 6i64), (5, 6), (1, 3), (2, 3), (7, 2), (9, 1), (-7, 6)] {
            let a = rat(n, d);
            let sym = gamma_rational_closed(&a).unwrap().to_real(p);
            let num = p.rational(&a).gamma();
            let diff: BigReal = (sym - &num).abs();
            assert!(diff < p.eps(100) * num.abs(), "gamma({}/{})", n, d);
        }
    }
}
