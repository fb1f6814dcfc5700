//! Generalized hypergeometric series pFq, exact and numeric.
//!
//! A [`HypergeometricSpec`] carries rational upper and lower parameters and a
//! regularization flag. Regularized series divide term j by
//! prod_i Gamma(b_i + j) instead of the lower Pochhammer products, which keeps
//! the sum well defined when a lower parameter is a nonpositive integer.
//!
//! Three evaluation routes:
//!
//! - [`hyp_terminating_exact`]: exact rational finite sum when some upper
//!   parameter is a nonpositive integer -m (exactly m+1 nonzero terms);
//! - [`hyp_pfq_numeric`]: partial summation with a running geometric tail
//!   bound for |x| well inside the unit disc, switching to Levin-u
//!   acceleration near and at the unit argument (where convergence decays
//!   like a power of 1/n);
//! - [`hyp2f1_log_branch`]: the logarithmic connection formula for the
//!   zero-balanced Gauss function 2F1(a, b; a+b; z) near z = 1, needed by the
//!   t-integral formula where the direct series is useless.

use crate::accel::accelerated_sum;
use crate::gamma::{gamma_rational_closed, GammaValue};
use crate::rational::{is_integer, nonpositive_integer, pochhammer, Rational};
use crate::real::{BigReal, Prec};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use rug::Float;

#[derive(Clone, Debug)]
pub struct HypergeometricSpec {
    pub upper: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub regularized: bool,
}

impl HypergeometricSpec {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>) -> Self {
        HypergeometricSpec {
            upper,
            lower,
            regularized: false,
        }
    }

    pub fn regularized(upper: Vec<Rational>, lower: Vec<Rational>) -> Self {
        HypergeometricSpec {
            upper,
            lower,
            regularized: true,
        }
    }

    /// Smallest m such that some upper parameter equals -m (m >= 0).
    pub fn terminating_index(&self) -> Option<u64> {
        self.upper
            .iter()
            .filter_map(nonpositive_integer)
            .min()
    }

    /// sum(lower) - sum(upper); the series at x = 1 converges iff positive.
    pub fn parameter_excess(&self) -> Rational {
        let up: Rational = self.upper.iter().cloned().sum();
        let lo: Rational = self.lower.iter().cloned().sum();
        lo - up
    }
}

/// Exact value of a terminating series: a rational times a symbolic gamma
/// prefactor (the prefactor is 1 unless regularization left non-integer
/// Gamma(b) factors behind).
#[derive(Clone, Debug)]
pub struct HypExact {
    pub rational: Rational,
    pub prefactor: GammaValue,
}

impl HypExact {
    pub fn exact_rational(&self) -> Result<Rational> {
        let f = self.prefactor.clone().into_rational()?;
        Ok(&self.rational * f)
    }

    pub fn to_real(&self, p: Prec) -> BigReal {
        p.rational(&self.rational) * self.prefactor.to_real(p)
    }
}

/// Exact finite sum over the terminating index. Rejects non-terminating
/// specs and any term that would be undefined.
pub fn hyp_terminating_exact(spec: &HypergeometricSpec, x: &Rational) -> Result<HypExact> {
    let m = spec.terminating_index().ok_or_else(|| {
        Error::Domain("series does not terminate: no nonpositive-integer upper parameter".into())
    })?;

    // Regularization: integer lower parameters become exact factorials,
    // non-integer ones contribute 1/Gamma(b) prefactors via (b)_j Gamma(b).
    let mut prefactor = GammaValue::one();
    if spec.regularized {
        for b in &spec.lower {
            if !is_integer(b) {
                prefactor = prefactor.mul(&gamma_rational_closed(b)?.inv());
            }
        }
    }

    let mut sum = Rational::zero();
    for j in 0..=m {
        let mut num = Rational::one();
        for a in &spec.upper {
            num *= pochhammer(a, j);
        }
        if num.is_zero() {
            continue;
        }
        num *= crate::rational::pow_int(x, j as i64);
        let mut den = crate::rational::factorial_rat(j);
        let mut skip = false;
        for b in &spec.lower {
            if spec.regularized && is_integer(b) {
                // Gamma(b + j) = (b + j - 1)!; 1/Gamma at a pole kills the term
                let bj = b + Rational::from_integer(j.into());
                if bj.is_positive() {
                    let n: u64 = bj.numer().try_into().expect("positive integer");
                    den *= crate::rational::factorial_rat(n - 1);
                } else {
                    skip = true;
                    break;
                }
            } else {
                let pb = pochhammer(b, j);
                if pb.is_zero() {
                    return Err(Error::Domain(format!(
                        "lower parameter {} makes term {} undefined",
                        b, j
                    )));
                }
                den *= pb;
            }
        }
        if skip {
            continue;
        }
        sum += num / den;
    }
    Ok(HypExact {
        rational: sum,
        prefactor,
    })
}

/// Numeric pFq. Converges for |x| < 1, or |x| = 1 with positive parameter
/// excess; terminating specs sum exactly. Near the unit circle the partial
/// sums are Levin-accelerated.
pub fn hyp_pfq_numeric(
    spec: &HypergeometricSpec,
    x: &BigReal,
    target_rel: f64,
    p: Prec,
) -> Result<BigReal> {
    // first term: 1, or 1/prod Gamma(b) when regularized
    let mut t0 = p.one();
    if spec.regularized {
        for b in &spec.lower {
            t0 /= p.rational(b).gamma();
        }
    }

    let ax = x.clone().abs();
    let terminating = spec.terminating_index();

    if let Some(m) = terminating {
        let mut sum = p.zero();
        let mut t = t0;
        for j in 0..=m {
            sum += &t;
            t = next_term(spec, &t, x, j, p);
        }
        return Ok(sum);
    }

    if ax > 1 {
        return Err(Error::Divergence(format!(
            "pFq series diverges for |x| = {} > 1",
            ax.to_f64()
        )));
    }
    if ax == 1 {
        let excess = spec.parameter_excess();
        if !excess.is_positive() {
            return Err(Error::Divergence(format!(
                "pFq at unit argument needs positive parameter excess, got {}",
                excess
            )));
        }
    }

    let near_unit = ax > p.f64(0.9);
    if near_unit {
        // O(n^{-s}) truncation decay: accelerate
        let mut t = t0.clone();
        let mut j = 0u64;
        let accelerated = accelerated_sum(
            |k| {
                debug_assert_eq!(k, j);
                let out = t.clone();
                t = next_term(spec, &t, x, j, p);
                j += 1;
                out
            },
            target_rel,
            4000,
            p,
        );
        match accelerated {
            Ok((v, _e, _n)) => Ok(v),
            // strictly inside the disc the raw tail is still geometric, so a
            // long direct sum can certify what the transform could not
            Err(e @ Error::Budget { .. }) if ax < 1 => {
                direct_sum(spec, &t0, x, target_rel, 800_000, 0.999, p).map_err(|_| e)
            }
            Err(e) => Err(e),
        }
    } else {
        direct_sum(spec, &t0, x, target_rel, 200_000, 0.95, p)
    }
}

fn direct_sum(
    spec: &HypergeometricSpec,
    t0: &BigReal,
    x: &BigReal,
    target_rel: f64,
    max_terms: u64,
    ratio_cap: f64,
    p: Prec,
) -> Result<BigReal> {
    let mut sum = p.zero();
    let mut t = t0.clone();
    let mut consec = 0u32;
    let tol = p.f64(target_rel);
    for j in 0..max_terms {
        sum += &t;
        let tn = next_term(spec, &t, x, j, p);
        let ta = t.clone().abs();
        if !ta.is_zero() {
            let r: Float = tn.clone().abs() / ta;
            if r < ratio_cap {
                consec += 1;
                if consec >= 3 {
                    let tail: Float = tn.clone().abs() * r.clone() / (p.one() - r);
                    let scale: Float = sum.clone().abs() + t0.clone().abs();
                    if tail <= tol.clone() * scale {
                        return Ok(sum + tn);
                    }
                }
            } else {
                consec = 0;
            }
        } else if j > 4 {
            return Ok(sum);
        }
        t = tn;
    }
    Err(Error::Divergence(
        "pFq direct summation exceeded term budget".into(),
    ))
}

fn next_term(
    spec: &HypergeometricSpec,
    t: &BigReal,
    x: &BigReal,
    j: u64,
    p: Prec,
) -> BigReal {
    let jf = p.int(j as i64);
    let mut t = t.clone() * x;
    for a in &spec.upper {
        t *= p.rational(a) + jf.clone();
    }
    for b in &spec.lower {
        t /= p.rational(b) + jf.clone();
    }
    t / (jf + p.one())
}

/// 2F1(a, b; a+b; 1-w) for 0 < w <= 1/2 via the zero-balanced logarithmic
/// connection formula:
///
/// ```text
/// 2F1(a,b;a+b;z) = G(a,b) sum_j r_j [ 2 psi(j+1) - psi(a+j) - psi(b+j) - ln w ] w^j,
/// r_j = (a)_j (b)_j / (j!)^2,  G = Gamma(a+b)/(Gamma(a)Gamma(b)),  w = 1-z.
/// ```
pub fn hyp2f1_log_branch(a: &Rational, b: &Rational, w: &BigReal, p: Prec) -> Result<BigReal> {
    if !(w.is_sign_positive() && *w <= 1) {
        return Err(Error::Domain(
            "log branch needs 0 < w <= 1 (argument z = 1-w in [0,1))".into(),
        ));
    }
    let af = p.rational(a);
    let bf = p.rational(b);
    let lnw = w.clone().ln();
    // digammas advance by 1/x per term
    let mut psi1 = -p.euler(); // psi(1)
    let mut psia = af.clone().digamma();
    let mut psib = bf.clone().digamma();
    let mut r = p.one();
    let mut wj = p.one();
    let mut sum = p.zero();
    let cutoff = p.ulp();
    for j in 0u64..100_000 {
        let jf = p.int(j as i64);
        let bracket: Float = p.int(2) * psi1.clone() - psia.clone() - psib.clone() - lnw.clone();
        let term: Float = r.clone() * wj.clone() * bracket;
        sum += &term;
        if j > 2 && term.abs() <= cutoff.clone() * (sum.clone().abs() + p.one()) {
            break;
        }
        // advance r_j, w^j, psi's
        let ja: Float = af.clone() + &jf;
        let jb: Float = bf.clone() + &jf;
        let j1: Float = jf + p.one();
        r = r * ja.clone() * jb.clone() / (j1.clone() * j1.clone());
        wj *= w;
        psi1 += p.one() / j1;
        psia += p.one() / ja;
        psib += p.one() / jb;
    }
    let g = p.rational(&(a + b)).gamma() / (af.gamma() * bf.gamma());
    Ok(g * sum)
}

/// 2F1(a, b; c; x) numeric, choosing between the direct series and (for the
/// zero-balanced case c = a + b) the logarithmic branch near x = 1.
pub fn hyp2f1(a: &Rational, b: &Rational, c: &Rational, x: &BigReal, target_rel: f64, p: Prec) -> Result<BigReal> {
    if *c == a + b && x.is_sign_positive() && *x > p.f64(0.5) && *x < 1 {
        let w: Float = p.one() - x;
        return hyp2f1_log_branch(a, b, &w, p);
    }
    let spec = HypergeometricSpec::new(vec![a.clone(), b.clone()], vec![c.clone()]);
    hyp_pfq_numeric(&spec, x, target_rel, p)
}
