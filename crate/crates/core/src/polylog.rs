//! Dilogarithm on [-1, 1].
//!
//! Li2(x) = sum_{k>=1} x^k / k^2. The defining series is used directly on
//! |x| <= 1/2 where it converges geometrically; the standard functional
//! equations move every other argument into that range:
//!
//! - Euler reflection for x in (1/2, 1):
//!   Li2(x) = pi^2/6 - ln(x) ln(1-x) - Li2(1-x)
//! - Landen for x in (-1, -1/2):
//!   Li2(x) = -Li2(x/(x-1)) - ln(1-x)^2 / 2

use crate::real::{ensure_domain, BigReal, Prec};
use crate::Result;
use rug::Float;

/// Li2 at the argument's own precision (computed with 64 guard bits).
pub fn dilog(x: &BigReal) -> Result<BigReal> {
    let out_prec = x.prec();
    let p = Prec(out_prec + 64);
    ensure_domain(
        x.clone().abs() <= 1,
        "dilog argument must satisfy |x| <= 1",
    )?;
    let v = dilog_inner(&Float::with_val(p.0, x), p);
    let mut out = v;
    out.set_prec(out_prec);
    Ok(out)
}

fn dilog_inner(x: &BigReal, p: Prec) -> BigReal {
    if x.is_zero() {
        return p.zero();
    }
    let one = p.one();
    if *x == one {
        let pi = p.pi();
        return pi.square() / p.int(6);
    }
    if *x == -one.clone() {
        let pi = p.pi();
        return -pi.square() / p.int(12);
    }
    let half = p.f64(0.5);
    if x.clone().abs() <= half {
        return dilog_series(x, p);
    }
    if x.is_sign_positive() {
        // pi^2/6 - ln(x) ln(1-x) - Li2(1-x)
        let one_minus = one - x.clone();
        let pi2_6 = p.pi().square() / p.int(6);
        pi2_6 - x.clone().ln() * one_minus.clone().ln() - dilog_series(&one_minus, p)
    } else {
        // Landen: x in (-1, -1/2) maps to x/(x-1) in (1/3, 1/2)
        let om = one - x.clone(); // 1 - x > 1
        let y = x.clone() / (x.clone() - p.one());
        let l = om.ln();
        -dilog_series(&y, p) - l.square() / p.int(2)
    }
}

fn dilog_series(x: &BigReal, p: Prec) -> BigReal {
    debug_assert!(x.clone().abs() <= p.f64(0.50001));
    let mut sum = p.zero();
    let mut xk = x.clone();
    let cutoff = p.ulp() / p.int(4);
    for k in 1u64.. {
        let term = xk.clone() / p.int((k * k) as i64);
        sum += &term;
        if term.abs() < cutoff.clone() * sum.clone().abs().max(&p.one()) {
            break;
        }
        xk *= x;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Partial sums of the defining series with an integral tail bound:
    /// sum_{k>N} 1/k^2 < 1/N.
    fn zeta2_oracle(n: u64) -> (f64, f64) {
        let mut s = 0.0;
        for k in 1..=n {
            s += 1.0 / (k as f64 * k as f64);
        }
        (s, 1.0 / n as f64)
    }

    #[test]
    fn at_zero() {
        let p = Prec(128);
        assert_eq!(dilog(&p.zero()).unwrap(), p.zero());
    }

    #[test]
    fn at_one_is_pi2_over_6() {
        let p = Prec(128);
        let v = dilog(&p.one()).unwrap().to_f64();
        let (lo, tail) = zeta2_oracle(2_000_000);
        assert!(v > lo && v < lo + tail, "Li2(1) = {} not in [{}, {}]", v, lo, lo + tail);
        let exact = p.pi().square() / p.int(6);
        assert!((dilog(&p.one()).unwrap() - exact).abs() < p.eps(120));
    }

    #[test]
    fn at_half_matches_series_oracle() {
        // direct 200-term partial sum of sum x^k/k^2 at x = 1/2; frozen value
        let p = Prec(256);
        let v = dilog(&p.f64(0.5)).unwrap();
        assert!((v.clone() - p.f64(0.5822405264650125)).abs() < p.f64(1e-15));
        let mut oracle = 0.0f64;
        for k in (1..60).rev() {
            oracle += 0.5f64.powi(k) / (k * k) as f64;
        }
        assert!((v.to_f64() - oracle).abs() < 1e-15);
    }

    #[test]
    fn domain_rejected() {
        let p = Prec(64);
        assert!(dilog(&p.f64(1.5)).is_err());
        assert!(dilog(&p.f64(-1.0000001)).is_err());
    }

    #[test]
    fn agrees_with_mpfr_li2_on_grid() {
        let p = Prec(192);
        for i in -20..=20 {
            let x = p.int(i) / p.int(20);
            let mine = dilog(&x).unwrap();
            let theirs = x.clone().li2();
            assert!(
                (mine - &theirs).abs() < p.eps(180) * (theirs.abs() + p.one()),
                "mismatch at {}",
                i
            );
        }
    }

    #[test]
    fn square_identity() {
        // Li2(x) + Li2(-x) = Li2(x^2) / 2
        let p = Prec(192);
        for i in 1..10 {
            let x = p.int(i) / p.int(10);
            let lhs = dilog(&x).unwrap() + dilog(&(-x.clone())).unwrap();
            let rhs = dilog(&x.clone().square()).unwrap() / p.int(2);
            assert!((lhs - rhs).abs() < p.eps(170));
        }
    }
}
