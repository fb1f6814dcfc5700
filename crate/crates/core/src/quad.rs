//! Adaptive quadrature at working precision.
//!
//! Two rules share the job:
//!
//! - smooth panels: Gauss-Legendre pairs (16/32 nodes) with adaptive
//!   bisection, local error |G32 - G16|;
//! - flagged endpoints: a tanh-sinh (double-exponential) transform whose
//!   nodes cluster exponentially at the endpoints, absorbing logarithmic and
//!   integrable algebraic singularities.
//!
//! Node abscissae are computed once per (count, precision) by Newton
//! iteration on the Legendre recurrence and cached.
//!
//! All routines satisfy |error| <= tol * (1 + |result|) on success and return
//! [`Error::Budget`] carrying the best estimate otherwise.

use crate::real::{BigReal, Prec};
use crate::{Error, Result};
use rug::Float;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: BigReal,
    pub err: BigReal,
    pub evals: u64,
}

/// Marks endpoints carrying an integrable singularity (log or algebraic).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EndpointFlags {
    pub left: bool,
    pub right: bool,
}

impl EndpointFlags {
    pub const NONE: EndpointFlags = EndpointFlags {
        left: false,
        right: false,
    };
    pub const LEFT: EndpointFlags = EndpointFlags {
        left: true,
        right: false,
    };
    pub const RIGHT: EndpointFlags = EndpointFlags {
        left: false,
        right: true,
    };
    pub const BOTH: EndpointFlags = EndpointFlags {
        left: true,
        right: true,
    };
    pub fn any(self) -> bool {
        self.left || self.right
    }
}

// ---------------------------------------------------------------- nodes

type NodeSet = Arc<(Vec<BigReal>, Vec<BigReal>)>; // abscissae in (0,1) half + weights

fn gl_cache() -> &'static Mutex<HashMap<(usize, u32), NodeSet>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), NodeSet>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Positive Gauss-Legendre abscissae and weights on [-1,1] for even n.
fn gl_nodes(n: usize, p: Prec) -> NodeSet {
    if let Some(hit) = gl_cache().lock().unwrap().get(&(n, p.0)) {
        return hit.clone();
    }
    let work = Prec(p.0 + 32);
    let mut xs = Vec::with_capacity(n / 2);
    let mut ws = Vec::with_capacity(n / 2);
    let pi = work.pi();
    for i in 0..n / 2 {
        // Chebyshev initial guess, then Newton on P_n
        let mut x: Float =
            (pi.clone() * work.f64(i as f64 + 0.75) / work.f64(n as f64 + 0.5)).cos();
        for _ in 0..120 {
            let (pn, dpn) = legendre(&x, n, work);
            let dx: Float = pn / dpn;
            x -= &dx;
            if dx.abs() < work.eps(work.0 - 8) {
                break;
            }
        }
        let (_, dpn) = legendre(&x, n, work);
        let omx2: Float = work.one() - x.clone().square();
        let w: Float = work.int(2) / (omx2 * dpn.square());
        let mut xr = x;
        xr.set_prec(p.0);
        let mut wr = w;
        wr.set_prec(p.0);
        xs.push(xr);
        ws.push(wr);
    }
    let set: NodeSet = Arc::new((xs, ws));
    gl_cache()
        .lock()
        .unwrap()
        .insert((n, p.0), set.clone());
    set
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(x: &BigReal, n: usize, p: Prec) -> (BigReal, BigReal) {
    let mut p0 = p.one();
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = p.int(k as i64);
        let a: Float = (p.int(2 * k as i64 - 1) * x.clone() * &p1
            - p.int(k as i64 - 1) * p0.clone())
            / kf;
        p0 = std::mem::replace(&mut p1, a);
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num: Float = p.int(n as i64) * (x.clone() * &p1 - p0);
    let den: Float = x.clone().square() - p.one();
    (p1, num / den)
}

fn gl_panel<F>(f: &F, a: &BigReal, b: &BigReal, n: usize, p: Prec) -> (BigReal, u64)
where
    F: Fn(&BigReal) -> BigReal + ?Sized,
{
    let nodes = gl_nodes(n, p);
    let c: Float = (a.clone() + b) / p.int(2);
    let h: Float = (b.clone() - a) / p.int(2);
    let mut acc = p.zero();
    let mut evals = 0;
    for (x, w) in nodes.0.iter().zip(nodes.1.iter()) {
        let dx: Float = h.clone() * x;
        let xp: Float = c.clone() + &dx;
        let xm: Float = c.clone() - &dx;
        acc += w.clone() * (f(&xp) + f(&xm));
        evals += 2;
    }
    (acc * h, evals)
}

// ------------------------------------------------------------ adaptive GL

fn integrate_gl<F>(
    f: &F,
    a: &BigReal,
    b: &BigReal,
    tol: f64,
    p: Prec,
) -> Result<QuadResult>
where
    F: Fn(&BigReal) -> BigReal + ?Sized,
{
    const MAX_PANELS: usize = 4000;
    let total_width: Float = (b.clone() - a).abs();
    if total_width.is_zero() {
        return Ok(QuadResult {
            value: p.zero(),
            err: p.zero(),
            evals: 0,
        });
    }
    let mut stack = vec![(a.clone(), b.clone())];
    let mut value = p.zero();
    let mut err = p.zero();
    let mut evals = 0u64;
    let mut panels = 0usize;
    let tolv = p.f64(tol);
    while let Some((lo, hi)) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            let best = value.to_f64();
            return Err(Error::Budget {
                best,
                achieved: err.to_f64() / (1.0 + best.abs()),
                requested: tol,
            });
        }
        let (coarse, e1) = gl_panel(f, &lo, &hi, 16, p);
        let (fine, e2) = gl_panel(f, &lo, &hi, 32, p);
        evals += e1 + e2;
        let local: Float = (fine.clone() - &coarse).abs();
        let width: Float = (hi.clone() - &lo).abs();
        let budget: Float = tolv.clone() * width.clone() / total_width.clone();
        let min_width = total_width.clone() * p.eps(p.0 / 2);
        if local <= budget || width < min_width {
            value += fine;
            err += local;
        } else {
            let mid: Float = (lo.clone() + &hi) / p.int(2);
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
    }
    Ok(QuadResult { value, err, evals })
}

// ------------------------------------------------------------- tanh-sinh

/// Double-exponential rule on [a, b]. Nodes are generated as exact offsets
/// from each endpoint so integrands may be evaluated arbitrarily close to a
/// flagged singularity without cancellation in the abscissa itself.
fn integrate_tanh_sinh<F>(
    f: &F,
    a: &BigReal,
    b: &BigReal,
    tol: f64,
    p: Prec,
) -> Result<QuadResult>
where
    F: Fn(&BigReal) -> BigReal + ?Sized,
{
    let half: Float = (b.clone() - a) / p.int(2);
    if half.is_zero() {
        return Ok(QuadResult {
            value: p.zero(),
            err: p.zero(),
            evals: 0,
        });
    }
    let pi_half = p.pi() / p.int(2);

    // cap so node offsets stay representable: delta >= 2^-(prec-24) * half
    let u_max = 0.5 * ((p.0 as f64 - 24.0) * std::f64::consts::LN_2)
        - 0.5 * half.to_f64().abs().max(1.0).ln();
    let t_max = (2.0 * u_max / std::f64::consts::PI).asinh();

    let eval_at = |t: &BigReal, acc: &mut Float, evals: &mut u64| {
        // u = pi/2 sinh t; x = center +- half tanh u, via exact offsets
        let u: Float = pi_half.clone() * t.clone().sinh();
        let ch = t.clone().cosh();
        let sech2: Float = {
            let c = u.clone().cosh();
            p.one() / c.square()
        };
        let w: Float = pi_half.clone() * ch * sech2;
        // offset from the nearer endpoint: half * (1 - tanh|u|) = half * 2 e^{-2u}/(1+e^{-2u})
        let ua = u.clone().abs();
        let e2: Float = (-p.int(2) * ua.clone()).exp();
        let off: Float =
            half.clone().abs() * p.int(2) * e2.clone() / (p.one() + &e2);
        let (xl, xr): (Float, Float) = (a.clone() + &off, b.clone() - &off);
        let x = if (u.is_sign_negative()) ^ (half.is_sign_negative()) {
            xl
        } else {
            xr
        };
        let v = f(&x);
        *evals += 1;
        if v.is_finite() {
            *acc += w * v;
        }
    };

    let mut evals = 0u64;
    // level 0: step 1
    let mut sum = p.zero();
    eval_at(&p.zero(), &mut sum, &mut evals);
    let mut step = 1.0f64;
    let mut j = 1.0f64;
    while j <= t_max {
        eval_at(&p.f64(j), &mut sum, &mut evals);
        eval_at(&p.f64(-j), &mut sum, &mut evals);
        j += step;
    }
    let mut estimate: Float = sum.clone() * half.clone() * p.f64(step);
    let tolv = p.f64(tol);
    let mut prev = estimate.clone();
    let mut err: Float = estimate.clone().abs();
    for _level in 1..=12 {
        step /= 2.0;
        let mut j = step;
        while j <= t_max {
            eval_at(&p.f64(j), &mut sum, &mut evals);
            eval_at(&p.f64(-j), &mut sum, &mut evals);
            j += 2.0 * step;
        }
        estimate = sum.clone() * half.clone() * p.f64(step);
        err = (estimate.clone() - &prev).abs();
        let scale: Float = estimate.clone().abs() + p.one();
        if err <= tolv.clone() * scale && _level >= 3 {
            return Ok(QuadResult {
                value: estimate,
                err,
                evals,
            });
        }
        prev = estimate.clone();
    }
    let best = estimate.to_f64();
    Err(Error::Budget {
        best,
        achieved: err.to_f64() / (1.0 + best.abs()),
        requested: tol,
    })
}

// ------------------------------------------------------------ public API

/// Adaptive quadrature of `f` on [a, b] meeting `|error| <= tol (1 + |I|)`.
/// Flag endpoints that carry logarithmic or algebraic singularities.
pub fn integrate_1d<F>(
    f: F,
    a: &BigReal,
    b: &BigReal,
    tol: f64,
    flags: EndpointFlags,
    p: Prec,
) -> Result<QuadResult>
where
    F: Fn(&BigReal) -> BigReal,
{
    if flags.any() {
        integrate_tanh_sinh(&f, a, b, tol, p)
    } else {
        integrate_gl(&f, a, b, tol, p)
    }
}

/// Iterated integral of `f(x, y)` over the triangle -1 <= y <= x <= 1.
///
/// Both axes run the tanh-sinh rule: the weights of the probability-formula
/// integrands vanish at the boundary but half-integer powers appear for odd
/// Dyson index, and the double-exponential rule absorbs either way.
pub fn integrate_2d_triangle<F>(f: F, tol: f64, p: Prec) -> Result<QuadResult>
where
    F: Fn(&BigReal, &BigReal) -> BigReal + Sync,
{
    let inner_tol = tol / 20.0;
    let neg_one = p.int(-1);
    let one = p.one();
    let evals = std::sync::atomic::AtomicU64::new(0);
    let outer = |x: &BigReal| -> BigReal {
        let r = integrate_tanh_sinh(&|y: &BigReal| f(x, y), &neg_one, x, inner_tol, p);
        match r {
            Ok(q) => {
                evals.fetch_add(q.evals, std::sync::atomic::Ordering::Relaxed);
                q.value
            }
            Err(Error::Budget { best, .. }) => p.f64(best),
            Err(_) => p.zero(),
        }
    };
    let res = integrate_tanh_sinh(&outer, &neg_one, &one, tol / 2.0, p)?;
    Ok(QuadResult {
        value: res.value,
        err: res.err,
        evals: evals.load(std::sync::atomic::Ordering::Relaxed) ,
    })
}

/// Iterated integral over an axis-aligned rectangle with per-axis flags.
pub fn integrate_2d_rect<F>(
    f: F,
    x_range: (&BigReal, &BigReal),
    y_range: (&BigReal, &BigReal),
    tol: f64,
    flags_x: EndpointFlags,
    flags_y: EndpointFlags,
    p: Prec,
) -> Result<QuadResult>
where
    F: Fn(&BigReal, &BigReal) -> BigReal,
{
    let inner_tol = tol / 20.0;
    let outer = |x: &BigReal| -> BigReal {
        match integrate_1d(|y: &BigReal| f(x, y), y_range.0, y_range.1, inner_tol, flags_y, p) {
            Ok(q) => q.value,
            Err(Error::Budget { best, .. }) => p.f64(best),
            Err(_) => p.zero(),
        }
    };
    integrate_1d(outer, x_range.0, x_range.1, tol / 2.0, flags_x, p)
}

/// Integral over [0, inf) via s = u/(1-u), right endpoint flagged.
pub fn integrate_semi_infinite<F>(f: F, tol: f64, p: Prec) -> Result<QuadResult>
where
    F: Fn(&BigReal) -> BigReal,
{
    let g = |u: &BigReal| -> BigReal {
        let om: Float = p.one() - u;
        let s: Float = u.clone() / &om;
        f(&s) / om.square()
    };
    integrate_tanh_sinh(&g, &p.zero(), &p.one(), tol, p)
}
