//! Separability functions chi_d of the singular-value ratio epsilon.
//!
//! - d = 1: closed polylog / inverse-tanh form, [`chi1_closed`];
//! - even d: exact polynomial in even powers of eps times eps^d, assembled
//!   from the terminating regularized 3F2 with an exact factorial prefactor;
//! - odd d >= 3: numeric regularized series.
//!
//! All of them are nondecreasing on [0,1] with chi_d(0) = 0, chi_d(1) = 1.
//! The module also carries the X-state functions eps^d, the reduced-set
//! functions of the diagonal-ratio variable mu, and the defect function.

use crate::gamma::{gamma_rational_closed, GammaValue};
use crate::hyper::{hyp_pfq_numeric, HypergeometricSpec};
use crate::polylog::dilog;
use crate::rational::{factorial_rat, pochhammer, pow_int, rat, rat_int, Rational};
use crate::real::{ensure_domain, BigReal, Prec};
use crate::Result;
use num_traits::{One, Signed, Zero};
use rug::ops::Pow;
use rug::Float;

/// How an evaluable chi_d is represented.
#[derive(Clone, Debug)]
pub enum ChiForm {
    /// d = 1 closed form.
    ClosedPolylog,
    /// Even d: coefficients of eps^{d+2k}, k = 0..d/2.
    ExactPolynomial(Vec<Rational>),
    /// Odd d >= 3: term-by-term series evaluation.
    NumericSeries,
}

#[derive(Clone, Debug)]
pub struct ChiFunction {
    pub d: u32,
    pub form: ChiForm,
}

impl ChiFunction {
    pub fn new(d: u32) -> Result<ChiFunction> {
        ensure_domain(d >= 1, "chi_d needs d >= 1")?;
        let form = if d == 1 {
            ChiForm::ClosedPolylog
        } else if d % 2 == 0 {
            ChiForm::ExactPolynomial(chi_poly_coeffs(d)?)
        } else {
            ChiForm::NumericSeries
        };
        Ok(ChiFunction { d, form })
    }

    pub fn eval(&self, eps: &BigReal, p: Prec) -> Result<BigReal> {
        match &self.form {
            ChiForm::ClosedPolylog => {
                if eps.is_zero() {
                    Ok(p.zero())
                } else {
                    chi1_closed(eps, p)
                }
            }
            ChiForm::ExactPolynomial(coeffs) => Ok(eval_poly(self.d, coeffs, eps, p)),
            ChiForm::NumericSeries => chi_master(self.d, eps, p),
        }
    }

    /// Exact rational value (even d at rational eps only).
    pub fn eval_exact(&self, eps: &Rational) -> Option<Rational> {
        match &self.form {
            ChiForm::ExactPolynomial(coeffs) => Some(chi_poly_eval_exact(self.d, coeffs, eps)),
            _ => None,
        }
    }

    pub fn coefficients(&self) -> Option<&[Rational]> {
        match &self.form {
            ChiForm::ExactPolynomial(c) => Some(c),
            _ => None,
        }
    }
}

fn eval_poly(d: u32, coeffs: &[Rational], eps: &BigReal, p: Prec) -> BigReal {
    let e2 = eps.clone().square();
    let mut acc = p.zero();
    for c in coeffs.iter().rev() {
        acc = acc * e2.clone() + p.rational(c);
    }
    acc * eps.clone().pow(d as i32)
}

fn chi_poly_eval_exact(d: u32, coeffs: &[Rational], eps: &Rational) -> Rational {
    let e2 = eps * eps;
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &e2 + c;
    }
    acc * pow_int(eps, d as i64)
}

/// Coefficients of chi_d(eps) on the powers eps^{d+2k}, exact for even d:
/// the terminating 3F2~ times Gamma(d+1)^3 / Gamma(d/2+1)^2, all integer
/// factorials.
pub fn chi_poly_coeffs(d: u32) -> Result<Vec<Rational>> {
    ensure_domain(d >= 2 && d % 2 == 0, "exact coefficients need even d")?;
    let m = (d / 2) as u64;
    let du = d as u64;
    // Gamma(d+1)^3 / Gamma(d/2+1)^2
    let pref = pow_int(&factorial_rat(du), 3) / pow_int(&factorial_rat(m), 2);
    let (a1, a2, a3) = (rat_int(-(m as i64)), rat(d as i64, 2), rat_int(d as i64));
    let mut out = Vec::with_capacity(m as usize + 1);
    for k in 0..=m {
        let num = pochhammer(&a1, k) * pochhammer(&a2, k) * pochhammer(&a3, k);
        let den = factorial_rat(k) * factorial_rat(m + k) * factorial_rat(3 * m + k);
        out.push(&pref * num / den);
    }
    Ok(out)
}

/// The d = 1 closed form:
///
/// chi_1(eps) = 2 (eps^2 (4 Li2(eps) - Li2(eps^2)) - eps^4 artanh(eps)
///              + eps^3 - eps + artanh(eps)) / (pi^2 eps^2).
///
/// artanh diverges at 1 but the combination is finite; above 1 - 2^-20 the
/// series form of the master formula avoids the cancellation.
pub fn chi1_closed(eps: &BigReal, p: Prec) -> Result<BigReal> {
    ensure_domain(
        eps.is_sign_positive() && !eps.is_zero() && *eps <= 1,
        "chi_1 domain is (0, 1]",
    )?;
    if *eps == 1 {
        return Ok(p.one());
    }
    let near_one: Float = p.one() - p.eps(20);
    if *eps > near_one {
        return chi_master(1, eps, p);
    }
    let e = Float::with_val(p.0, eps);
    let e2 = e.clone().square();
    let e3: Float = e2.clone() * &e;
    let e4 = e2.clone().square();
    let li_e = dilog(&e)?;
    let li_e2 = dilog(&e2)?;
    let ath = e.clone().atanh();
    let inner: Float = e2.clone() * (p.int(4) * li_e - li_e2) - e4 * ath.clone() + e3 - e.clone()
        + ath;
    let pi2: Float = p.pi().square();
    Ok(p.int(2) * inner / (pi2 * e2))
}

/// Master formula for any d >= 1:
///
/// chi_d(eps) = eps^d Gamma(d+1)^3 3F2~(-d/2, d/2, d; d/2+1, 3d/2+1; eps^2)
///              / Gamma(d/2+1)^2.
///
/// Even d assembles the exact polynomial; odd d sums the regularized series
/// (Levin-accelerated near eps = 1, where the raw tail decays like 1/n^2).
pub fn chi_master(d: u32, eps: &BigReal, p: Prec) -> Result<BigReal> {
    ensure_domain(d >= 1, "chi_d needs d >= 1")?;
    ensure_domain(
        eps.is_sign_positive() || eps.is_zero(),
        "chi_d domain is [0, 1]",
    )?;
    ensure_domain(*eps <= 1, "chi_d domain is [0, 1]")?;
    if eps.is_zero() {
        return Ok(p.zero());
    }
    if *eps == 1 {
        return Ok(p.one());
    }
    if d % 2 == 0 {
        let coeffs = chi_poly_coeffs(d)?;
        return Ok(eval_poly(d, &coeffs, eps, p));
    }
    let spec = master_series_spec(d);
    let x = eps.clone().square();
    let f = hyp_pfq_numeric(&spec, &x, 1e-14, p)?;
    // Gamma(d+1)^3 / Gamma(d/2+1)^2, exact symbolically (sqrt-pi powers cancel
    // into pi for odd d)
    let pref = gamma_rational_closed(&rat_int(d as i64 + 1))?
        .pow(3)
        .mul(&gamma_rational_closed(&rat(d as i64 + 2, 2))?.pow(-2));
    Ok(eps.clone().pow(d as i32) * pref.to_real(p) * f)
}

fn master_series_spec(d: u32) -> HypergeometricSpec {
    let di = d as i64;
    HypergeometricSpec::regularized(
        vec![rat(-di, 2), rat(di, 2), rat_int(di)],
        vec![rat(di + 2, 2), rat(3 * di + 2, 2)],
    )
}

/// Exact chi_d at rational eps (even d).
pub fn chi_master_exact(d: u32, eps: &Rational) -> Result<Rational> {
    ensure_domain(d % 2 == 0, "exact path needs even d")?;
    ensure_domain(
        !eps.is_negative() && *eps <= Rational::one(),
        "chi_d domain is [0, 1]",
    )?;
    let coeffs = chi_poly_coeffs(d)?;
    Ok(chi_poly_eval_exact(d, &coeffs, eps))
}

/// Printed closed forms for the constant and eps^2 coefficients of
/// chi_d(eps) / eps^d, reduced to exact rationals. Must agree with
/// [`chi_poly_coeffs`] exactly.
pub fn chi_coefficient_checks(d: u32) -> Result<(Rational, Rational)> {
    ensure_domain(d >= 2 && d % 2 == 0, "coefficient formulas apply to even d")?;
    let di = d as i64;
    // constant: 8^d Gamma((d+1)/2)^3 / (pi^{3/2} Gamma(3d/2+1))
    let constant = gamma_rational_closed(&rat(di + 1, 2))?
        .pow(3)
        .mul(&gamma_rational_closed(&rat(3 * di + 2, 2))?.inv())
        .scale(&pow_int(&rat_int(8), di))
        .mul(&GammaValue::radical(Rational::one(), -3, 0))
        .into_rational()?;
    // eps^2: -2^{3d-1} 3^{-3(d+1)/2} d^3 Gamma((d+1)/2)^3
    //        / (sqrt(pi) Gamma(d/2+2/3) Gamma(d/2+4/3) Gamma(d/2+2))
    // 3^{-3(d+1)/2} = 3^{-(3d+2)/2} * 3^{-1/2} with 3d+2 even
    let three_pow = pow_int(&rat_int(3), -(3 * di + 2) / 2);
    let eps2 = gamma_rational_closed(&rat(di + 1, 2))?
        .pow(3)
        .mul(&gamma_rational_closed(&rat(3 * di + 4, 6))?.inv())
        .mul(&gamma_rational_closed(&rat(3 * di + 8, 6))?.inv())
        .mul(&gamma_rational_closed(&rat(di + 4, 2))?.inv())
        .scale(&(-pow_int(&rat_int(2), 3 * di - 1) * three_pow * pow_int(&rat_int(di), 3)))
        .mul(&GammaValue::radical(Rational::one(), -1, -1))
        .into_rational()?;
    Ok((constant, eps2))
}

/// X-state separability functions: eps^d, including the half-odd case
/// d = 3/2.
pub fn chi_xstate(d: &Rational, eps: &BigReal, p: Prec) -> Result<BigReal> {
    ensure_domain(
        !eps.is_sign_negative() && *eps <= 1,
        "chi_xstate domain is [0, 1]",
    )?;
    if eps.is_zero() {
        return Ok(if d.is_zero() { p.one() } else { p.zero() });
    }
    let e = Float::with_val(p.0, eps);
    Ok(e.pow(p.rational(d)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReducedSetKind {
    SevenDimMinor,
    ElevenDimMinor,
    ElevenDimFull,
}

/// Reduced-set separability functions of mu > 0; each branch takes the
/// value 1 at mu = 1.
pub fn reduced_set_function(kind: ReducedSetKind, mu: &BigReal, p: Prec) -> Result<BigReal> {
    ensure_domain(mu.is_sign_positive() && !mu.is_zero(), "mu must be > 0")?;
    let m = Float::with_val(p.0, mu);
    let m2 = m.clone().square();
    let one = p.one();
    Ok(match kind {
        ReducedSetKind::SevenDimMinor => {
            if *mu > 1 {
                // 2 (sqrt(mu^2-1) + mu^2 csc^-1(mu)) / (pi mu^2)
                let s: Float = (m2.clone() - &one).sqrt();
                let acsc = (one / m.clone()).asin();
                p.int(2) * (s + m2.clone() * acsc) / (p.pi() * m2)
            } else if *mu == 1 {
                one
            } else {
                // printed with 2i log(mu + i sqrt(1-mu^2)); the argument lies
                // on the unit circle, so the log is i acos(mu) and the branch
                // is real: (2 mu sqrt(1-mu^2) + pi - 2 acos(mu)) / pi
                let s: Float = (one.clone() - &m2).sqrt();
                (p.int(2) * m.clone() * s + p.pi() - p.int(2) * m.clone().acos()) / p.pi()
            }
        }
        ReducedSetKind::ElevenDimMinor => {
            if *mu > 1 {
                // (2 mu^2 - 1) / mu^4
                (p.int(2) * m2.clone() - &one) / m2.clone().square()
            } else {
                // mu^2 (2 - mu^2)
                m2.clone() * (p.int(2) - &m2)
            }
        }
        ReducedSetKind::ElevenDimFull => {
            if *mu > 1 {
                // f(mu) = (4 mu^2 - 1) / (3 mu^4); chi_2(eps) = f(1/eps)
                (p.int(4) * m2.clone() - &one) / (p.int(3) * m2.clone().square())
            } else {
                // chi_2(mu) itself
                m2.clone() * (p.int(4) - &m2) / p.int(3)
            }
        }
    })
}

/// Reusable chi_d evaluator for quadrature inner loops.
///
/// Even d evaluates the exact polynomial. Odd d (and d = 1) precomputes the
/// regularized master-series coefficients once; each evaluation is then a
/// plain power-series sum, Levin-accelerated near eps = 1 where the raw tail
/// decays only algebraically.
#[derive(Clone, Debug)]
pub struct ChiEvaluator {
    d: u32,
    poly: Option<Vec<BigReal>>,
    series: Option<(BigReal, Vec<BigReal>)>, // (prefactor, c_j)
    p: Prec,
}

impl ChiEvaluator {
    const SERIES_LEN: usize = 1400;

    pub fn new(d: u32, p: Prec) -> Result<ChiEvaluator> {
        ensure_domain(d >= 1, "chi_d needs d >= 1")?;
        if d % 2 == 0 {
            let coeffs = chi_poly_coeffs(d)?;
            let poly = coeffs.iter().map(|c| p.rational(c)).collect();
            return Ok(ChiEvaluator {
                d,
                poly: Some(poly),
                series: None,
                p,
            });
        }
        let spec = master_series_spec(d);
        let mut t = p.one();
        for b in &spec.lower {
            t /= p.rational(b).gamma();
        }
        let mut coeffs = Vec::with_capacity(Self::SERIES_LEN);
        for j in 0..Self::SERIES_LEN as u64 {
            coeffs.push(t.clone());
            let jf = p.int(j as i64);
            let mut n = p.one();
            for a in &spec.upper {
                n *= p.rational(a) + jf.clone();
            }
            for b in &spec.lower {
                n /= p.rational(b) + jf.clone();
            }
            t = t * n / (jf + p.one());
        }
        let pref = gamma_rational_closed(&rat_int(d as i64 + 1))?
            .pow(3)
            .mul(&gamma_rational_closed(&rat(d as i64 + 2, 2))?.pow(-2))
            .to_real(p);
        Ok(ChiEvaluator {
            d,
            poly: None,
            series: Some((pref, coeffs)),
            p,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn eval(&self, eps: &BigReal) -> BigReal {
        let p = self.p;
        if eps.is_zero() {
            return p.zero();
        }
        if *eps >= 1 {
            return p.one();
        }
        if let Some(poly) = &self.poly {
            let e2 = eps.clone().square();
            let mut acc = p.zero();
            for c in poly.iter().rev() {
                acc = acc * e2.clone() + c;
            }
            return acc * eps.clone().pow(self.d as i32);
        }
        let (pref, coeffs) = self.series.as_ref().expect("series form");
        let x = eps.clone().square();
        let f = if x > p.f64(0.9025) {
            // Levin on the precomputed terms; keep the most stable estimate
            // and bail out once the high-order table destabilizes
            let mut levin = crate::accel::LevinU::new(p);
            let mut sum = p.zero();
            let mut xj = p.one();
            let mut best: Option<(BigReal, BigReal)> = None;
            let mut prev: Option<BigReal> = None;
            for (j, c) in coeffs.iter().enumerate() {
                let term: Float = c.clone() * &xj;
                sum += &term;
                levin.push(&sum, &term);
                xj *= &x;
                if j < 8 {
                    continue;
                }
                if let Some(est) = levin.estimate() {
                    if let Some(pv) = &prev {
                        let diff: Float = (est.clone() - pv).abs();
                        let scale: Float = est.clone().abs() + p.f64(1e-300);
                        if diff <= p.f64(1e-14) * scale {
                            return eps.clone().pow(self.d as i32) * pref.clone() * est;
                        }
                        let degraded = best
                            .as_ref()
                            .map_or(false, |(_, bd)| diff > bd.clone() * p.f64(1e8) && j > 40);
                        if best.as_ref().map_or(true, |(_, bd)| diff < *bd) {
                            best = Some((est.clone(), diff.clone()));
                        }
                        if degraded {
                            break;
                        }
                    }
                    prev = Some(est);
                }
            }
            best.map(|(v, _)| v).unwrap_or(sum)
        } else {
            let mut sum = p.zero();
            let mut xj = p.one();
            let cutoff = p.eps(p.0 - 16);
            for c in coeffs.iter() {
                let term: Float = c.clone() * &xj;
                sum += &term;
                if term.abs() < cutoff.clone() * (sum.clone().abs() + p.one()) {
                    break;
                }
                xj *= &x;
            }
            sum
        };
        eps.clone().pow(self.d as i32) * pref.clone() * f
    }
}

/// Defect function: Delta(delta) = 2 pi^2/3 - chi_1(e^{-delta}).
pub fn defect(delta: &BigReal, p: Prec) -> Result<BigReal> {
    ensure_domain(!delta.is_sign_negative(), "defect needs delta >= 0")?;
    let base: Float = p.int(2) * p.pi().square() / p.int(3);
    let e = (-delta.clone()).exp();
    Ok(base - chi1_closed(&e, p)?)
}

/// The integral form of the defect function:
/// (16/3) int_0^delta [cosh t - sinh(t)^2 ln((e^t+1)/(e^t-1))] dt,
/// with the logarithmic endpoint at t = 0 flagged.
pub fn defect_integral_form(delta: &BigReal, p: Prec) -> Result<BigReal> {
    ensure_domain(delta.is_sign_positive(), "integral form needs delta > 0")?;
    let q = crate::quad::integrate_1d(
        |t: &BigReal| {
            let et = t.clone().exp();
            let ratio: Float = (et.clone() + p.one()) / (et - p.one());
            t.clone().cosh() - t.clone().sinh().square() * ratio.ln()
        },
        &p.zero(),
        delta,
        1e-14,
        crate::quad::EndpointFlags::LEFT,
        p,
    )?;
    Ok(p.int(16) * q.value / p.int(3))
}

/// Measures the constant relating the closed and integral defect forms on a
/// grid: ratio(delta) = integral_form(delta) / (1 - chi_1(e^{-delta})).
/// Returns (mean ratio, max relative spread). The mean lands on 2 pi^2 / 3,
/// the chi_1 normalization constant.
pub fn defect_scaling_ratio(p: Prec) -> Result<(BigReal, BigReal)> {
    let grid = [0.25f64, 0.5, 1.0, 2.0];
    let mut ratios = Vec::new();
    for &dv in &grid {
        let delta = p.f64(dv);
        let int_form = defect_integral_form(&delta, p)?;
        let e = (-delta.clone()).exp();
        let denom: Float = p.one() - chi1_closed(&e, p)?;
        ratios.push(int_form / denom);
    }
    let n = p.int(ratios.len() as i64);
    let mean: Float = ratios.iter().fold(p.zero(), |a, r| a + r) / n;
    let mut spread = p.zero();
    for r in &ratios {
        let dev: Float = (r.clone() - &mean).abs() / mean.clone().abs();
        if dev > spread {
            spread = dev;
        }
    }
    Ok((mean, spread))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_1d, EndpointFlags};

    fn p() -> Prec {
        Prec(256)
    }

    #[test]
    fn chi1_endpoints() {
        let p = p();
        assert_eq!(chi1_closed(&p.one(), p).unwrap(), p.one());
        // eps -> 0+: all terms vanish
        let v = chi1_closed(&p.f64(1e-6), p).unwrap();
        assert!(v.is_sign_positive() && v < p.f64(1e-5));
        assert!(chi1_closed(&p.f64(0.0), p).is_err());
        assert!(chi1_closed(&p.f64(1.5), p).is_err());
    }

    /// Quadrature oracle on the defining integral:
    /// chi_1(eps) = (4/pi^2) int_0^eps (s + 1/s - (1/2)(s-1/s)^2 ln((1+s)/(1-s))) ds/s.
    fn chi1_integral_oracle(eps: f64, p: Prec) -> BigReal {
        let q = integrate_1d(
            |s: &BigReal| {
                let inv = p.one() / s.clone();
                let diff: Float = s.clone() - &inv;
                let lg: Float = ((p.one() + s) / (p.one() - s.clone())).ln();
                let inner: Float =
                    s.clone() + &inv - diff.square() * lg / p.int(2);
                inner / s.clone()
            },
            &p.zero(),
            &p.f64(eps),
            1e-16,
            EndpointFlags::NONE,
            p,
        )
        .unwrap();
        p.int(4) * q.value / p.pi().square()
    }

    #[test]
    fn chi1_matches_defining_integral() {
        let p = p();
        for eps in [0.25, 0.5, 0.75] {
            let closed = chi1_closed(&p.f64(eps), p).unwrap();
            let oracle = chi1_integral_oracle(eps, p);
            assert!(
                (closed.clone() - &oracle).abs() < p.f64(1e-12),
                "eps = {}: closed {} vs integral {}",
                eps,
                closed.to_f64(),
                oracle.to_f64()
            );
        }
    }

    #[test]
    fn chi2_polynomial_is_printed_form() {
        // (1/3) eps^2 (4 - eps^2): coefficients [4/3, -1/3]
        let c = chi_poly_coeffs(2).unwrap();
        assert_eq!(c, vec![rat(4, 3), rat(-1, 3)]);
    }

    #[test]
    fn chi4_polynomial_is_printed_form() {
        // (1/35) eps^4 (15 eps^4 - 64 eps^2 + 84)
        let c = chi_poly_coeffs(4).unwrap();
        assert_eq!(c, vec![rat(84, 35), rat(-64, 35), rat(15, 35)]);
    }

    #[test]
    fn chi8_polynomial_is_printed_form() {
        // (1/1287) eps^8 (1155 eps^8 - 7680 eps^6 + 20160 eps^4 - 25088 eps^2 + 12740)
        let c = chi_poly_coeffs(8).unwrap();
        assert_eq!(
            c,
            vec![
                rat(12740, 1287),
                rat(-25088, 1287),
                rat(20160, 1287),
                rat(-7680, 1287),
                rat(1155, 1287)
            ]
        );
    }

    #[test]
    fn coefficients_sum_to_one_up_to_d20() {
        for d in (2..=20).step_by(2) {
            let c = chi_poly_coeffs(d).unwrap();
            assert_eq!(c.len() as u32, d / 2 + 1);
            let s: Rational = c.iter().cloned().sum();
            assert_eq!(s, rat_int(1), "chi_{}(1) != 1", d);
        }
    }

    #[test]
    fn master_matches_chi1_on_grid() {
        let p = p();
        for i in 1..10 {
            let eps = p.f64(i as f64 / 10.0);
            let closed = chi1_closed(&eps, p).unwrap();
            let series = chi_master(1, &eps, p).unwrap();
            assert!(
                (closed.clone() - &series).abs() < p.f64(1e-10),
                "eps = 0.{}: {} vs {}",
                i,
                closed.to_f64(),
                series.to_f64()
            );
        }
    }

    #[test]
    fn nondecreasing_on_grid() {
        let p = Prec(128);
        for d in 1..=10u32 {
            let chi = ChiFunction::new(d).unwrap();
            let mut last = p.zero();
            for k in 0..=100 {
                let eps = p.int(k) / p.int(100);
                let v = chi.eval(&eps, p).unwrap();
                assert!(
                    v >= last.clone() - p.f64(1e-20),
                    "chi_{} decreases at {}",
                    d,
                    k
                );
                last = v;
            }
            assert!((last - p.one()).abs() < p.f64(1e-20));
        }
    }

    #[test]
    fn coefficient_formulas_match_polynomial() {
        for d in [2u32, 4, 6, 8, 10] {
            let (c0, c2) = chi_coefficient_checks(d).unwrap();
            let poly = chi_poly_coeffs(d).unwrap();
            assert_eq!(c0, poly[0], "constant term at d = {}", d);
            assert_eq!(c2, poly[1], "eps^2 coefficient at d = {}", d);
        }
        // printed spot values
        let (c0, c2) = chi_coefficient_checks(2).unwrap();
        assert_eq!(c0, rat(4, 3));
        assert_eq!(c2, rat(-1, 3));
        let (c0, _) = chi_coefficient_checks(4).unwrap();
        assert_eq!(c0, rat(12, 5));
    }

    #[test]
    fn xstate_values() {
        let p = p();
        let v = chi_xstate(&rat_int(1), &p.f64(0.3), p).unwrap();
        assert!((v - p.f64(0.3)).abs() < p.eps(200));
        let v = chi_xstate(&rat_int(2), &p.f64(0.3), p).unwrap();
        assert!((v - p.f64(0.09)).abs() < p.f64(1e-17));
        let v = chi_xstate(&rat(3, 2), &p.one(), p).unwrap();
        assert_eq!(v, p.one());
    }

    #[test]
    fn reduced_set_eleven_full() {
        let p = p();
        assert_eq!(
            reduced_set_function(ReducedSetKind::ElevenDimFull, &p.one(), p).unwrap(),
            p.one()
        );
        // mu = 2 -> 5/16, and chi_2(1/2) = (1/3)(1/4)(4 - 1/4) = 5/16
        let v = reduced_set_function(ReducedSetKind::ElevenDimFull, &p.int(2), p).unwrap();
        let target = p.int(5) / p.int(16);
        assert!((v - &target).abs() < p.eps(200));
        assert_eq!(chi_master_exact(2, &rat(1, 2)).unwrap(), rat(5, 16));
    }

    #[test]
    fn reduced_set_seven_dim_limits() {
        let p = p();
        let above = reduced_set_function(ReducedSetKind::SevenDimMinor, &p.f64(1.0 + 1e-9), p)
            .unwrap();
        let below = reduced_set_function(ReducedSetKind::SevenDimMinor, &p.f64(1.0 - 1e-9), p)
            .unwrap();
        assert!((above.clone() - p.one()).abs() < p.f64(1e-4));
        assert!((below.clone() - p.one()).abs() < p.f64(1e-4));
        assert!((above - below).abs() < p.f64(1e-4));
    }

    #[test]
    fn eleven_dim_minor_branches() {
        let p = p();
        let hi = reduced_set_function(ReducedSetKind::ElevenDimMinor, &p.int(2), p).unwrap();
        let target = p.int(7) / p.int(16);
        assert!((hi - target).abs() < p.eps(200));
        let lo = reduced_set_function(ReducedSetKind::ElevenDimMinor, &p.f64(0.5), p).unwrap();
        let target = p.f64(0.25) * p.f64(1.75);
        assert!((lo - target).abs() < p.eps(200));
    }

    #[test]
    fn defect_values() {
        let p = p();
        let base: Float = p.int(2) * p.pi().square() / p.int(3);
        // delta = 0: 2 pi^2/3 - chi_1(1) = 2 pi^2/3 - 1
        let v = defect(&p.zero(), p).unwrap();
        assert!((v - (base.clone() - p.one())).abs() < p.eps(200));
        // delta -> inf: chi_1(0+) -> 0
        let v = defect(&p.int(40), p).unwrap();
        assert!((v - &base).abs() < p.f64(1e-15));
        // delta = ln 2
        let v = defect(&p.int(2).ln(), p).unwrap();
        let want: Float = base - chi1_closed(&p.f64(0.5), p).unwrap();
        assert!((v - want).abs() < p.eps(200));
    }

    #[test]
    fn evaluator_matches_reference_paths() {
        let p = Prec(192);
        for d in [1u32, 2, 3, 5, 8] {
            let ev = ChiEvaluator::new(d, p).unwrap();
            for &e in &[0.05, 0.3, 0.6, 0.9, 0.97, 0.999] {
                let eps = p.f64(e);
                let fast = ev.eval(&eps);
                let slow = chi_master(d, &eps, p).unwrap();
                assert!(
                    (fast.clone() - &slow).abs() < p.f64(1e-13),
                    "d={} eps={}: {} vs {}",
                    d,
                    e,
                    fast.to_f64(),
                    slow.to_f64()
                );
            }
            assert_eq!(ev.eval(&p.one()), p.one());
            assert_eq!(ev.eval(&p.zero()), p.zero());
        }
    }

    #[test]
    fn defect_scaling_is_two_pi2_over_three() {
        let p = Prec(192);
        let (mean, spread) = defect_scaling_ratio(p).unwrap();
        let expected: Float = p.int(2) * p.pi().square() / p.int(3);
        assert!(
            spread < p.f64(1e-10),
            "ratio not constant: spread {}",
            spread.to_f64()
        );
        assert!(
            (mean.clone() - &expected).abs() < p.f64(1e-10) * expected.clone(),
            "measured scaling {} vs 2 pi^2/3 = {}",
            mean.to_f64(),
            expected.to_f64()
        );
    }
}
