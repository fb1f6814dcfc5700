//! Sequence acceleration for slowly convergent series.
//!
//! The unit-argument hypergeometric sums in the probability formulas have
//! partial sums converging like O(n^{-1/2}); naive truncation cannot reach
//! 1e-6 in any reasonable budget. The Levin u-transformation turns the same
//! partial sums into a rapidly convergent sequence; Wynn's epsilon algorithm
//! is kept alongside as an independent cross-check.

use crate::real::{BigReal, Prec};
use crate::{Error, Result};
use rug::Float;

/// Levin u-transformation, incremental form with beta = 1.
///
/// Feed partial sums and their terms in order; `estimate()` returns the
/// current accelerated limit.
pub struct LevinU {
    p: Prec,
    n: usize,
    numer: Vec<BigReal>,
    denom: Vec<BigReal>,
}

impl LevinU {
    pub fn new(p: Prec) -> Self {
        LevinU {
            p,
            n: 0,
            numer: Vec::new(),
            denom: Vec::new(),
        }
    }

    /// Push S_n and a_n (= S_n - S_{n-1}); remainder estimate is the
    /// u-variant omega_n = (beta + n) a_n.
    pub fn push(&mut self, partial_sum: &BigReal, term: &BigReal) {
        let p = self.p;
        let beta = p.one();
        let n = self.n;
        let omega: Float = (beta.clone() + p.int(n as i64)) * term.clone();
        if omega.is_zero() {
            // exact termination; freeze the table on the final sum
            self.numer = vec![partial_sum.clone()];
            self.denom = vec![p.one()];
            self.n += 1;
            return;
        }
        let mut t: Float = p.one() / (beta.clone() + p.int(n as i64));
        self.denom.push(t.clone() / &omega);
        self.numer.push(partial_sum.clone() * self.denom[n].clone());
        if n > 0 {
            let ratio: Float = (beta.clone() + p.int(n as i64 - 1)) * t.clone();
            for j in 1..=n {
                let fact: Float = (p.int((n - j) as i64) + beta.clone()) * t.clone();
                self.numer[n - j] = self.numer[n - j + 1].clone() - fact.clone() * &self.numer[n - j];
                self.denom[n - j] = self.denom[n - j + 1].clone() - fact * &self.denom[n - j];
                t *= &ratio;
            }
        }
        self.n += 1;
    }

    pub fn estimate(&self) -> Option<BigReal> {
        if self.n == 0 || self.denom[0].is_zero() {
            return None;
        }
        Some(self.numer[0].clone() / self.denom[0].clone())
    }
}

/// Sum `term(j)` for j = 0.. with Levin-u acceleration until two consecutive
/// accelerated estimates agree to `target_rel`. Returns (value, error
/// estimate, terms consumed).
pub fn accelerated_sum<F>(
    mut term: F,
    target_rel: f64,
    max_terms: u64,
    p: Prec,
) -> Result<(BigReal, BigReal, u64)>
where
    F: FnMut(u64) -> BigReal,
{
    let mut levin = LevinU::new(p);
    let mut sum = p.zero();
    let mut prev: Option<BigReal> = None;
    let mut stable = 0u32;
    let tol = p.f64(target_rel);
    // best = (estimate, consecutive-diff) with the smallest diff seen so far;
    // at very high order the transform goes numerically unstable, so once the
    // diff blows up well past the best we stop and fall back on it.
    let mut best: Option<(BigReal, BigReal)> = None;
    let mut terms_used = 0;
    for j in 0..max_terms {
        let t = term(j);
        terms_used = j + 1;
        sum += &t;
        levin.push(&sum, &t);
        if t.is_zero() && j > 2 {
            // series terminated exactly
            return Ok((sum, p.zero(), j + 1));
        }
        if j < 6 {
            continue;
        }
        if let Some(est) = levin.estimate() {
            if let Some(pv) = &prev {
                let diff: Float = (est.clone() - pv).abs();
                let scale: Float = est.clone().abs() + p.f64(1e-300);
                if diff <= tol.clone() * scale.clone() {
                    stable += 1;
                    if stable >= 2 {
                        return Ok((est, diff, j + 1));
                    }
                } else {
                    stable = 0;
                }
                let degraded = match &best {
                    Some((_, bd)) => {
                        diff > bd.clone() * p.f64(1e8) && j > 40
                    }
                    None => false,
                };
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
    match best {
        Some((v, e)) => {
            let scale: Float = v.clone().abs() + p.f64(1e-300);
            if e.clone() <= p.f64(target_rel) * scale {
                Ok((v, e, terms_used))
            } else {
                Err(Error::Budget {
                    best: v.to_f64(),
                    achieved: e.to_f64() / (1.0 + v.to_f64().abs()),
                    requested: target_rel,
                })
            }
        }
        None => Err(Error::Divergence(
            "acceleration produced no estimate".into(),
        )),
    }
}

/// Wynn's epsilon algorithm on a finite block of partial sums; returns the
/// top even-column entry. Used as an independent oracle for the Levin path.
pub fn wynn_epsilon(partial_sums: &[BigReal], p: Prec) -> Option<BigReal> {
    let n = partial_sums.len();
    if n < 3 {
        return partial_sums.last().cloned();
    }
    let mut prev_col: Vec<BigReal> = vec![p.zero(); n + 1]; // eps_{-1}
    let mut col: Vec<BigReal> = partial_sums.to_vec(); // eps_0
    let mut last_even = col.last().cloned();
    let cols = if n % 2 == 0 { n - 1 } else { n };
    for _k in 1..cols {
        let mut next: Vec<BigReal> = Vec::with_capacity(col.len() - 1);
        for i in 0..col.len() - 1 {
            let diff: Float = col[i + 1].clone() - &col[i];
            if diff.is_zero() {
                return last_even;
            }
            next.push(prev_col[i + 1].clone() + p.one() / diff);
        }
        prev_col = std::mem::replace(&mut col, next);
        if _k % 2 == 0 {
            last_even = col.last().cloned();
        }
    }
    last_even
}
