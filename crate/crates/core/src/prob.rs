//! The equivalent separability-probability formulas.
//!
//! Five independent evaluation routes for the generalized two-qubit
//! Hilbert-Schmidt separability/PPT probability at Dyson index d
//! (alpha = d/2):
//!
//! 1. [`prob_dunkl_exact`] -- exact rational finite double sum, even d;
//! 2. [`prob_concise`] -- sum of gamma-ratio terms f(alpha + i) with a
//!    measured geometric tail bound;
//! 3. [`prob_induced_6f5`] -- one minus a prefactored unit-argument 6F5
//!    (induced-measure index k = 0), Levin-accelerated;
//! 4. [`prob_via_t_integral`] -- quadrature over t of a product of a
//!    zero-balanced 2F1 and the terminating/regularized 3F2;
//! 5. [`prob_ansatz_2d`] -- the Dyson-index ansatz double integral of a
//!    separability function over the ordered triangle, normalized by the
//!    exact denominator.
//!
//! [`cross_formula_report`] runs every applicable route per d and records
//! the maximum pairwise deviation; mutual agreement replaces the
//! figure-only recurrence as the equivalence check.

use crate::chi::ChiEvaluator;
use crate::gamma::{gamma_product, gamma_rational_closed, GammaValue};
use crate::hyper::{hyp2f1, HypergeometricSpec};
use crate::quad::{integrate_1d, integrate_2d_rect, integrate_2d_triangle, EndpointFlags};
use crate::rational::{factorial_rat, pochhammer, pow_int, rat, rat_int, Rational};
use crate::real::{ensure_domain, BigReal, Prec};
use crate::{Error, Result};
use num_traits::{Signed, Zero};
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

/// Parameters of one formula run; the induced-measure index is fixed at
/// k = 0 (Hilbert-Schmidt) in this crate.
#[derive(Clone, Debug)]
pub struct FormulaParams {
    pub d: u32,
    pub alpha: Rational,
    pub k: u32,
}

impl FormulaParams {
    pub fn new(d: u32) -> Self {
        FormulaParams {
            d,
            alpha: rat(d as i64, 2),
            k: 0,
        }
    }
}

/// Per-d record of every computed formula value.
#[derive(Clone, Debug, Serialize)]
pub struct ProbabilityReport {
    pub d: u32,
    /// exact rational as "p/q" (even d only)
    pub value_dunkl: Option<String>,
    pub value_concise: f64,
    pub value_6f5: f64,
    pub value_integral: f64,
    pub value_ansatz2d: f64,
    pub max_pairwise_dev: f64,
}

/// Denominator of the ansatz ratio at alpha = d/2:
///
/// int int (1-x^2)^{2a} (1-y^2)^{2a} (x-y)^{2a} over the triangle
///   = pi 2^{6a+1} 3^{-3a} a Gamma(3a) Gamma(2a+1)^2
///     / (Gamma(a+5/6) Gamma(a+7/6) Gamma(5a+2)),
///
/// reduced to an exact rational; all pi, sqrt(pi), sqrt(3) factors must
/// cancel, and a leftover residue is an error.
pub fn denominator_exact(d: u32) -> Result<Rational> {
    ensure_domain(d >= 1, "denominator needs d >= 1")?;
    let di = d as i64;
    let a = rat(di, 2);
    // 3^{-3a}: integer power for even d, else rational * sqrt(3)
    let (three_rat, three_sqrt) = if d % 2 == 0 {
        (pow_int(&rat_int(3), -3 * di / 2), 0)
    } else {
        (pow_int(&rat_int(3), -(3 * di + 1) / 2), 1)
    };
    let scale = pow_int(&rat_int(2), 3 * di + 1) * three_rat * &a;
    let gammas = gamma_product(&[
        (rat(3 * di, 2), 1),
        (rat_int(di + 1), 2),
        (a.clone() + rat(5, 6), -1),
        (a.clone() + rat(7, 6), -1),
        (rat(5 * di + 4, 2), -1),
    ])?;
    // leading pi = sqrt(pi)^2
    gammas
        .mul(&GammaValue::radical(scale, 2, three_sqrt))
        .into_rational()
}

/// Exact separability probability for even d: the finite double-sum form
///
/// P(d) = 3456^d [(1/2)_{d/2}^3 (7/6)_{d/2}^2 (5/6)_{d/2}^2 (2d)!]
///        / [(d/2)! (3)_{5d}]
///        * sum_{i,j>=0, i+j<=d/2} [(-d/2)_{i+j} (d/2)_j (d)_j (2+3d)_i (1+d)_i]
///          / [(2+5d/2)_{i+j} (1+d/2)_j i! j! (-2d)_i].
pub fn prob_dunkl_exact(d: u32) -> Result<Rational> {
    ensure_domain(d >= 2 && d % 2 == 0, "finite-sum formula needs even d")?;
    let di = d as i64;
    let m = (d / 2) as u64;
    let pref = pow_int(&rat_int(3456), di)
        * pow_int(&pochhammer(&rat(1, 2), m), 3)
        * pow_int(&pochhammer(&rat(7, 6), m), 2)
        * pow_int(&pochhammer(&rat(5, 6), m), 2)
        * factorial_rat(2 * d as u64)
        / (factorial_rat(m) * pochhammer(&rat_int(3), 5 * d as u64));
    let mut sum = Rational::zero();
    let (a_mj, a_j1, a_j2) = (rat(-di, 2), rat(di, 2), rat_int(di));
    let (b_ij, b_j, b_i1, b_i2, b_i3) = (
        rat(5 * di + 4, 2),
        rat(di + 2, 2),
        rat_int(3 * di + 2),
        rat_int(di + 1),
        rat_int(-2 * di),
    );
    for i in 0..=m {
        for j in 0..=(m - i) {
            let num = pochhammer(&a_mj, i + j)
                * pochhammer(&a_j1, j)
                * pochhammer(&a_j2, j)
                * pochhammer(&b_i1, i)
                * pochhammer(&b_i2, i);
            let den = pochhammer(&b_ij, i + j)
                * pochhammer(&b_j, j)
                * factorial_rat(i)
                * factorial_rat(j)
                * pochhammer(&b_i3, i);
            sum += num / den;
        }
    }
    Ok(pref * sum)
}

#[derive(Clone, Debug)]
pub struct ConciseResult {
    pub value: BigReal,
    /// last measured term ratio f(alpha+i+1)/f(alpha+i)
    pub measured_ratio: f64,
    pub terms: u32,
}

/// The "concise" series P(alpha) = sum_{i>=0} f(alpha + i) with
///
/// f(a) = q(a) 2^{-4a-6} Gamma(3a+5/2) Gamma(5a+2)
///        / (3 Gamma(a+1) Gamma(2a+3) Gamma(5a+13/2)),
/// q(a) = 185000 a^5 + 779750 a^4 + 1289125 a^3 + 1042015 a^2 + 410694 a + 63000.
///
/// The term ratio is measured; once it stays below r < 1 for three
/// consecutive terms the tail is bounded by term * r / (1 - r).
pub fn prob_concise(alpha: &Rational, tol: f64, p: Prec) -> Result<ConciseResult> {
    ensure_domain(alpha.is_positive(), "concise series needs alpha > 0")?;
    let f = |a: &BigReal| -> BigReal {
        let q = ((((p.f64(185000.0) * a.clone() + p.f64(779750.0)) * a.clone()
            + p.f64(1289125.0))
            * a.clone()
            + p.f64(1042015.0))
            * a.clone()
            + p.f64(410694.0))
            * a.clone()
            + p.f64(63000.0);
        let two_pow: Float = (-p.int(4) * a.clone() - p.int(6)) * p.int(2).ln();
        let g1 = (p.int(3) * a.clone() + p.f64(2.5)).gamma();
        let g2 = (p.int(5) * a.clone() + p.int(2)).gamma();
        let g3 = (a.clone() + p.one()).gamma();
        let g4 = (p.int(2) * a.clone() + p.int(3)).gamma();
        let g5 = (p.int(5) * a.clone() + p.f64(6.5)).gamma();
        q * two_pow.exp() * g1 * g2 / (p.int(3) * g3 * g4 * g5)
    };
    let a0 = p.rational(alpha);
    let mut sum = p.zero();
    let mut term = f(&a0);
    let mut ratio = 1.0f64;
    let mut consec = 0u32;
    let tolv = p.f64(tol);
    for i in 0..10_000u32 {
        sum += &term;
        let next = f(&(a0.clone() + p.int(i as i64 + 1)));
        ratio = (next.clone() / term.clone()).to_f64().abs();
        if ratio < 0.9 {
            consec += 1;
            if consec >= 3 {
                let tail: Float =
                    next.clone().abs() * p.f64(ratio) / (p.one() - p.f64(ratio));
                if tail <= tolv.clone() * (sum.clone().abs() + p.one()) {
                    return Ok(ConciseResult {
                        value: sum + next,
                        measured_ratio: ratio,
                        terms: i + 2,
                    });
                }
            }
        } else {
            consec = 0;
        }
        term = next;
    }
    Err(Error::Divergence(format!(
        "concise series: ratio stuck at {}",
        ratio
    )))
}

/// Specialized induced-measure formula at k = 0:
///
/// P(d) = 1 - sqrt(pi) 2^{-9d/2-5/2}
///        Gamma(3(d+1)/2) Gamma(5d/4+19/8) Gamma(2d+2) Gamma(5d/2+2) / Gamma(d)
///        * 6F5~(1, d+3/2, 5d/4+1, (5d+6)/4, 5d/4+19/8, 3(d+1)/2;
///               (d+4)/2, 5d/4+11/8, (5d+7)/4, (5d+9)/4, 2(d+1); 1).
///
/// The parameter excess is -1/2 independent of d, so naive truncation decays
/// like n^{-1/2}; the unit-argument path Levin-accelerates.
pub fn prob_induced_6f5(d: u32, tol: f64, p: Prec) -> Result<BigReal> {
    ensure_domain(d >= 1, "6F5 formula needs d >= 1")?;
    let di = d as i64;
    let spec = HypergeometricSpec::regularized(
        vec![
            rat_int(1),
            rat(2 * di + 3, 2),
            rat(5 * di + 4, 4),
            rat(5 * di + 6, 4),
            rat(10 * di + 19, 8),
            rat(3 * di + 3, 2),
        ],
        vec![
            rat(di + 4, 2),
            rat(10 * di + 11, 8),
            rat(5 * di + 7, 4),
            rat(5 * di + 9, 4),
            rat_int(2 * di + 2),
        ],
    );
    let f = crate::hyper::hyp_pfq_numeric(&spec, &p.one(), tol * 0.1, p)?;
    let g = |num: i64, den: i64| p.rational(&rat(num, den)).gamma();
    let two_pow: Float = (p.rational(&rat(-9 * di - 5, 2)) * p.int(2).ln()).exp();
    let pref: Float = p.pi().sqrt()
        * two_pow
        * g(3 * di + 3, 2)
        * g(10 * di + 19, 8)
        * g(2 * di + 2, 1)
        * g(5 * di + 4, 2)
        / g(di, 1);
    Ok(p.one() - pref * f)
}

/// The printed s-integral prefactor as a function of t in (0,1):
///
/// (-1)^d 2^{5d+3} t^{-4d-3} (t^2-1)^d Gamma(3d+2)^2
///   2F1~(3d+2, 3d+2; 6d+4; 1 - 1/t^2)
///
/// evaluated through the Pfaff rewrite
/// 2F1(a,a;2a;1-1/t^2) = t^{2a} 2F1(a,a;2a;1-t^2), which keeps the argument
/// in [0,1): positive for all d and t.
pub fn prefactor_s_integral(d: u32, t: &BigReal, p: Prec) -> Result<BigReal> {
    ensure_domain(
        t.is_sign_positive() && !t.is_zero() && *t < 1,
        "prefactor needs 0 < t < 1",
    )?;
    let di = d as i64;
    let a = rat_int(3 * di + 2);
    let c = rat_int(6 * di + 4);
    let arg: Float = p.one() - t.clone().square();
    let f = hyp2f1(&a, &a, &c, &arg, 1e-25, p)?;
    let g32: Float = p.rational(&a).gamma().square();
    let g64 = p.rational(&c).gamma();
    let omt2: Float = p.one() - t.clone().square();
    Ok(p.int(2).pow((5 * di + 3) as i32) * t.clone().pow((2 * di + 1) as i32)
        * omt2.pow(di as i32)
        * g32
        * f
        / g64)
}

/// Generalization of the Lovas-Andai d = 1 integrand factor,
/// f(d,s,t) = (-1)^d 2^{5d+3} s^{3d+1} t^{2d+1} (t^2-1)^d ((s+t)(st+1))^{-3d-2};
/// integrating it over s recovers [`prefactor_s_integral`]. Test oracle.
pub fn f_dst(d: u32, s: &BigReal, t: &BigReal, p: Prec) -> BigReal {
    let di = d as i32;
    let omt2: Float = p.one() - t.clone().square();
    let base: Float = (s.clone() + t) * (s.clone() * t + p.one());
    p.int(2).pow(5 * di + 3)
        * s.clone().pow(3 * di + 1)
        * t.clone().pow(2 * di + 1)
        * omt2.pow(di)
        * base.pow(-(3 * di + 2))
}

/// Constant in front of the t-integral: collecting the gamma factors of the
/// printed product (after the Pfaff rewrite and regularization bookkeeping)
/// gives
///
/// C(d) = 3^{3d/2+1} 8^{2d+1} Gamma(d/2+5/6) Gamma(d/2+7/6) Gamma((d+1)/2)
///        Gamma(3(d+1)/2) Gamma(5d/2+2) Gamma(3d+2)
///        / (pi^2 Gamma(d/2+1) Gamma(6d+4)).
fn t_integral_constant(d: u32) -> Result<GammaValue> {
    let di = d as i64;
    let (three_rat, three_sqrt) = if d % 2 == 0 {
        (pow_int(&rat_int(3), 3 * di / 2 + 1), 0)
    } else {
        // 3^{(3d+2)/2} with odd 3d+2: integer part (3d+1)/2 plus one sqrt(3)
        (pow_int(&rat_int(3), (3 * di + 1) / 2), 1)
    };
    let scale = pow_int(&rat_int(8), 2 * di + 1) * three_rat;
    let gammas = gamma_product(&[
        (rat(3 * di + 5, 6), 1),
        (rat(3 * di + 7, 6), 1),
        (rat(di + 1, 2), 1),
        (rat(3 * di + 3, 2), 1),
        (rat(5 * di + 4, 2), 1),
        (rat_int(3 * di + 2), 1),
        (rat(di + 2, 2), -1),
        (rat_int(6 * di + 4), -1),
    ])?;
    Ok(gammas.mul(&GammaValue::radical(scale, -4, three_sqrt)))
}

/// Separability probability as the t-integral of the printed product:
///
/// P(d) = C(d) int_0^1 t^{3d+1} 2F1(3d+2,3d+2;6d+4;1-t^2) (1-t^2)^d
///              3F2~(-d/2, d/2, d; d/2+1, 3d/2+1; t^2) dt,
///
/// with the logarithmic endpoint at t -> 0 flagged (the zero-balanced 2F1
/// blows up like ln t there, tamed by t^{3d+1}).
pub fn prob_via_t_integral(d: u32, tol: f64, p: Prec) -> Result<BigReal> {
    ensure_domain(d >= 1, "t-integral needs d >= 1")?;
    let di = d as i64;
    let c = t_integral_constant(d)?.to_real(p);
    let a = rat_int(3 * di + 2);
    let cc = rat_int(6 * di + 4);
    let chi = ChiEvaluator::new(d, p)?;
    // 3F2~(..; t^2) = chi_d(t) Gamma(d/2+1)^2 / (t^d Gamma(d+1)^3)
    let unpack = gamma_rational_closed(&rat(di + 2, 2))?
        .pow(2)
        .mul(&gamma_rational_closed(&rat_int(di + 1))?.pow(-3))
        .to_real(p);
    let integrand = |t: &BigReal| -> BigReal {
        let arg: Float = p.one() - t.clone().square();
        let f1 = match hyp2f1(&a, &a, &cc, &arg, 1e-26, p) {
            Ok(v) => v,
            Err(_) => return p.zero(),
        };
        let f2: Float = chi.eval(t) * unpack.clone() / t.clone().pow(di as i32);
        let omt2: Float = p.one() - t.clone().square();
        t.clone().pow((3 * di + 1) as i32) * f1 * omt2.pow(di as i32) * f2
    };
    let q = integrate_1d(
        integrand,
        &p.zero(),
        &p.one(),
        tol * 0.5,
        EndpointFlags::BOTH,
        p,
    )?;
    Ok(c * q.value)
}

#[derive(Clone, Debug)]
pub struct Ansatz2dResult {
    pub value: BigReal,
    pub numerator: BigReal,
    pub denominator: Rational,
}

/// Dyson-index ansatz: the separability probability as
///
/// int int chi(eps(x,y)) (1-x^2)^d (1-y^2)^d (x-y)^d dy dx / denominator(d),
/// eps(x,y) = sqrt((1-x)/(1+x)) / sqrt((1-y)/(1+y)),
///
/// over -1 <= y <= x <= 1. On the triangle the ratio never exceeds 1; any
/// rounding spill past 1 is clamped by inversion, and the argument handed to
/// chi is asserted to stay in (0, 1].
pub fn prob_ansatz_2d<F>(d: u32, chi: F, tol: f64, p: Prec) -> Result<Ansatz2dResult>
where
    F: Fn(&BigReal) -> BigReal + Sync,
{
    ensure_domain(d >= 1, "ansatz needs d >= 1")?;
    let di = d as i32;
    let denominator = denominator_exact(d)?;
    let integrand = |x: &BigReal, y: &BigReal| -> BigReal {
        let omx: Float = p.one() - x;
        let opx: Float = p.one() + x;
        let omy: Float = p.one() - y;
        let opy: Float = p.one() + y;
        let r2: Float = (omx.clone() * opy.clone()) / (opx.clone() * omy.clone());
        let mut eps = r2.sqrt();
        if eps > 1 {
            eps.recip_mut();
        }
        debug_assert!(eps.clone() <= 1 && eps.is_sign_positive());
        let w: Float = (omx * opx * omy * opy).pow(di) * (x.clone() - y).pow(di);
        chi(&eps) * w
    };
    let q = integrate_2d_triangle(integrand, tol, p)?;
    let den = p.rational(&denominator);
    Ok(Ansatz2dResult {
        value: q.value.clone() / den,
        numerator: q.value,
        denominator,
    })
}

#[derive(Clone, Debug)]
pub struct MonotoneResult {
    pub value: BigReal,
    pub numerator: BigReal,
    pub denominator: BigReal,
}

/// Operator-monotone sqrt(x) variant for d in {1, 2}: the same ansatz ratio
/// with weight (1-x^2)^{-d/4} (1-y^2)^{-d/4} (x-y)^d. The substitution
/// x = cos(theta) removes the algebraic endpoint singularity, leaving
/// (sin theta sin phi)^{1-d/2} (cos theta - cos phi)^d over
/// 0 <= theta <= phi <= pi, with eps = tan(theta/2)/tan(phi/2).
pub fn prob_monotone_sqrt(d: u32, tol: f64, p: Prec) -> Result<MonotoneResult> {
    if !(d == 1 || d == 2) {
        return Err(Error::Domain(format!(
            "monotone-sqrt route is defined here for d in {{1,2}} only (d = {}); \
             the d = 4 normalization diverges at the printed exponent",
            d
        )));
    }
    let chi = ChiEvaluator::new(d, p)?;
    let sin_pow = 1.0 - d as f64 / 2.0;
    let weight = |th: &BigReal, ph: &BigReal| -> BigReal {
        let st = th.clone().sin();
        let sp = ph.clone().sin();
        let base: Float = st * sp;
        let diff: Float = th.clone().cos() - ph.clone().cos();
        let w = if d == 2 {
            p.one()
        } else {
            base.pow(p.f64(sin_pow))
        };
        // theta <= phi so cos(theta) >= cos(phi)
        w * diff.abs().pow(d as i32)
    };
    let num_integrand = |th: &BigReal, ph: &BigReal| -> BigReal {
        let tt: Float = (th.clone() / p.int(2)).tan();
        let tp: Float = (ph.clone() / p.int(2)).tan();
        let mut eps: Float = tt / tp;
        if eps > 1 {
            eps.recip_mut();
        }
        chi.eval(&eps) * weight(th, ph)
    };
    // inner phi from theta to pi; map phi = theta + (pi - theta) u
    let pi_v = p.pi();
    let run = |with_chi: bool| -> Result<BigReal> {
        let f = |th: &BigReal, u: &BigReal| -> BigReal {
            let span: Float = pi_v.clone() - th;
            let ph: Float = th.clone() + span.clone() * u;
            let v = if with_chi {
                num_integrand(th, &ph)
            } else {
                weight(th, &ph)
            };
            v * span
        };
        Ok(integrate_2d_rect(
            f,
            (&p.zero(), &pi_v),
            (&p.zero(), &p.one()),
            tol,
            EndpointFlags::BOTH,
            EndpointFlags::BOTH,
            p,
        )?
        .value)
    };
    let numerator = run(true)?;
    let denominator = run(false)?;
    Ok(MonotoneResult {
        value: numerator.clone() / denominator.clone(),
        numerator,
        denominator,
    })
}

/// Runs every applicable formula for d = 1..d_max and reports the maximum
/// pairwise deviation per d.
pub fn cross_formula_report(d_max: u32, tol: f64, p: Prec) -> Result<Vec<ProbabilityReport>> {
    ensure_domain(d_max >= 2, "report needs d_max >= 2")?;
    let mut out = Vec::new();
    for d in 1..=d_max {
        out.push(single_report(d, tol, p)?);
    }
    Ok(out)
}

pub fn single_report(d: u32, tol: f64, p: Prec) -> Result<ProbabilityReport> {
    let alpha = rat(d as i64, 2);
    let concise = prob_concise(&alpha, tol, p)?.value;
    let f6f5 = prob_induced_6f5(d, tol, p)?;
    let integral = prob_via_t_integral(d, tol, p)?;
    let chi = ChiEvaluator::new(d, p)?;
    let ansatz = prob_ansatz_2d(d, |e| chi.eval(e), tol, p)?.value;
    let dunkl = if d % 2 == 0 {
        Some(prob_dunkl_exact(d)?)
    } else {
        None
    };
    let mut values = vec![
        concise.to_f64(),
        f6f5.to_f64(),
        integral.to_f64(),
        ansatz.to_f64(),
    ];
    if let Some(q) = &dunkl {
        values.push(p.rational(q).to_f64());
    }
    let mut dev = 0.0f64;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            dev = dev.max((values[i] - values[j]).abs());
        }
    }
    Ok(ProbabilityReport {
        d,
        value_dunkl: dunkl.map(|q| format!("{}", q)),
        value_concise: concise.to_f64(),
        value_6f5: f6f5.to_f64(),
        value_integral: integral.to_f64(),
        value_ansatz2d: ansatz.to_f64(),
        max_pairwise_dev: dev,
    })
}
