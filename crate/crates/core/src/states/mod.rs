//! Random density matrices, the partial-transpose separability test, and the
//! ratio variables the binned experiments are conditioned on.
//!
//! Everything here is plain f64: the Monte Carlo hot loop runs millions of
//! samples and never touches the extended-precision stack. Samplers are pure
//! functions of an [`RngStream`]; distinct workers own distinct stream ids
//! and merge downstream.

pub mod linalg;
pub mod quaternion;
pub mod rng;

use crate::{Error, Result};
use linalg::{eigenvalues, leading_minors, psd_inv_sqrt, psd_sqrt, CMat};
use num_complex::Complex64 as C;
use rng::RngStream;

pub const PSD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Real,
    Complex,
}

/// Unit-trace positive-semidefinite matrix with the 2x2-of-blocks structure
/// (block size n/2).
#[derive(Clone, Copy, Debug)]
pub struct DensityMatrix {
    pub mat: CMat,
    pub field: FieldKind,
}

impl DensityMatrix {
    pub fn n(&self) -> usize {
        self.mat.n
    }

    pub fn block_split(&self) -> usize {
        self.mat.n / 2
    }

    /// Hermitian within 1e-12, unit trace within 1e-12, leading principal
    /// minors >= -1e-12.
    pub fn validate(&self) -> Result<()> {
        if self.mat.max_hermitian_defect() > PSD_TOL {
            return Err(Error::Domain("matrix is not Hermitian".into()));
        }
        if (self.mat.trace_re() - 1.0).abs() > PSD_TOL {
            return Err(Error::Domain("trace differs from 1".into()));
        }
        let minors = leading_minors(&self.mat);
        for k in 0..self.n() {
            if minors[k] < -PSD_TOL {
                return Err(Error::Domain(format!(
                    "leading minor {} is negative: {}",
                    k + 1,
                    minors[k]
                )));
            }
        }
        Ok(())
    }
}

/// Hilbert-Schmidt random density matrix via the Ginibre construction:
/// an M x N matrix of iid standard normals over the field (real: M = N+1,
/// complex: M = N), then Q = H*H / tr(H*H).
pub fn sample_hs_ginibre(field: FieldKind, n: usize, rng: &mut RngStream) -> DensityMatrix {
    debug_assert!(n == 4 || n == 6);
    let m = match field {
        FieldKind::Real => n + 1,
        FieldKind::Complex => n,
    };
    // H stored row-wise; Q = H^dagger H accumulated directly
    let mut h = [[C::new(0.0, 0.0); linalg::MAXN]; linalg::MAXN + 1];
    for row in h.iter_mut().take(m) {
        for col in row.iter_mut().take(n) {
            *col = match field {
                FieldKind::Real => C::new(rng.normal(), 0.0),
                FieldKind::Complex => C::new(rng.normal(), rng.normal()),
            };
        }
    }
    let mut q = CMat::zero(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = C::new(0.0, 0.0);
            for hr in h.iter().take(m) {
                acc += hr[i].conj() * hr[j];
            }
            q.a[i][j] = acc;
            q.a[j][i] = acc.conj();
        }
    }
    let tr = q.trace_re();
    q.scale(1.0 / tr);
    // clean the diagonal
    for i in 0..n {
        q.a[i][i] = C::new(q.a[i][i].re, 0.0);
    }
    DensityMatrix { mat: q, field }
}

/// Partial transpose: transpose each (n/2)x(n/2) block in place (block
/// positions fixed). An involution.
pub fn partial_transpose(m: &CMat) -> CMat {
    let n = m.n;
    let h = n / 2;
    let mut out = CMat::zero(n);
    for bi in 0..2 {
        for bj in 0..2 {
            for i in 0..h {
                for j in 0..h {
                    out.a[bi * h + i][bj * h + j] = m.a[bi * h + j][bj * h + i];
                }
            }
        }
    }
    out
}

/// Peres-Horodecki test: all leading principal minors of the partial
/// transpose >= -1e-12 (Sylvester with a semidefinite tolerance). Necessary
/// and sufficient for separability at 4x4; only necessary at 6x6.
pub fn is_ppt(rho: &DensityMatrix) -> bool {
    let pt = partial_transpose(&rho.mat);
    let minors = leading_minors(&pt);
    minors[..rho.n()].iter().all(|&m| m >= -PSD_TOL)
}

/// Count of eigenvalues below -tol, via cyclic Jacobi.
pub fn negative_eigenvalue_count(m: &CMat, tol: f64) -> Result<u32> {
    let vals = eigenvalues(m).map_err(Error::Divergence)?;
    Ok(vals[..m.n].iter().filter(|&&v| v < -tol).count() as u32)
}

/// Both PPT verdict and negative-eigenvalue count of the partial transpose
/// from one diagonalization (the 6x6 experiments need both).
pub fn ppt_profile(rho: &DensityMatrix) -> Result<(bool, u32)> {
    let pt = partial_transpose(&rho.mat);
    let neg = negative_eigenvalue_count(&pt, PSD_TOL)?;
    Ok((neg == 0, neg))
}

/// Singular-value ratio(s) of V = D2^{1/2} D1^{-1/2}.
#[derive(Clone, Copy, Debug)]
pub struct SingularRatio {
    /// s2/s1 (<= 1); for n = 6 the first ratio s2/s1
    pub eps: f64,
    /// n = 6 second ratio s3/s2
    pub eps2: Option<f64>,
    /// closed-form value (n = 4 only): exp(-arccosh(...))
    pub closed: Option<f64>,
    /// explicit singular-value route
    pub svd: f64,
}

impl SingularRatio {
    /// |closed - svd| for the 4x4 dual-route self-check.
    pub fn path_disagreement(&self) -> f64 {
        self.closed.map_or(0.0, |c| (c - self.svd).abs())
    }
}

/// Extract the singular-value ratio. For n = 4 it is computed BOTH through
/// the closed form exp(-arccosh( tr(D2 D1^{-1}) sqrt(det D1/det D2) / 2 ))
/// and through explicit singular values of D2^{1/2} D1^{-1/2}; callers can
/// assert the two agree. For n = 6 the three singular values give
/// (s2/s1, s3/s2).
pub fn sigma_ratio(rho: &DensityMatrix) -> Result<SingularRatio> {
    let n = rho.n();
    let h = n / 2;
    let mut d1 = CMat::zero(h);
    let mut d2 = CMat::zero(h);
    for i in 0..h {
        for j in 0..h {
            d1.a[i][j] = rho.mat.a[i][j];
            d2.a[i][j] = rho.mat.a[h + i][h + j];
        }
    }
    if n == 4 {
        let det1 = (d1.a[0][0].re * d1.a[1][1].re) - d1.a[0][1].norm_sqr();
        let det2 = (d2.a[0][0].re * d2.a[1][1].re) - d2.a[0][1].norm_sqr();
        if det1 <= 0.0 {
            return Err(Error::Domain("upper block D1 is singular".into()));
        }
        // tr(D2 D1^{-1})
        let tr = (d2.a[0][0].re * d1.a[1][1].re + d2.a[1][1].re * d1.a[0][0].re
            - 2.0 * (d2.a[0][1] * d1.a[0][1].conj()).re)
            / det1;
        let x = (0.5 * (det1 / det2).sqrt() * tr).max(1.0);
        let closed = (-x.acosh()).exp();
        // explicit route
        let v = psd_sqrt(&d2)
            .and_then(|s2| psd_inv_sqrt(&d1).map(|i1| s2.mul(&i1)))
            .map_err(Error::Divergence)?;
        let g = v.adjoint().mul(&v);
        // 2x2 Hermitian eigenvalues in closed form
        let tr_g = g.trace_re();
        let det_g = g.a[0][0].re * g.a[1][1].re - g.a[0][1].norm_sqr();
        let disc = (tr_g * tr_g - 4.0 * det_g).max(0.0).sqrt();
        let (lo, hi) = ((tr_g - disc) / 2.0, (tr_g + disc) / 2.0);
        let svd = (lo.max(0.0) / hi).sqrt();
        Ok(SingularRatio {
            eps: closed,
            eps2: None,
            closed: Some(closed),
            svd,
        })
    } else {
        let v = psd_sqrt(&d2)
            .and_then(|s2| psd_inv_sqrt(&d1).map(|i1| s2.mul(&i1)))
            .map_err(Error::Divergence)?;
        let g = v.adjoint().mul(&v);
        let vals = eigenvalues(&g).map_err(Error::Divergence)?;
        let (s3, s2, s1) = (
            vals[0].max(0.0).sqrt(),
            vals[1].max(0.0).sqrt(),
            vals[2].sqrt(),
        );
        Ok(SingularRatio {
            eps: s2 / s1,
            eps2: Some(s3 / s2),
            closed: None,
            svd: s2 / s1,
        })
    }
}

/// Diagonal-entry ratio mu = sqrt(rho_11 rho_44 / (rho_22 rho_33)) (n = 4).
pub fn mu_ratio(rho: &DensityMatrix) -> Result<f64> {
    let d = &rho.mat;
    for i in 0..rho.n() {
        if d.a[i][i].re <= 0.0 {
            return Err(Error::Domain("zero diagonal entry".into()));
        }
    }
    Ok(((d.a[0][0].re * d.a[3][3].re) / (d.a[1][1].re * d.a[2][2].re)).sqrt())
}

/// 6x6 diagonal ratios: tau1 = sqrt(r11 r55 / (r22 r44)),
/// tau2 = sqrt(r22 r66 / (r33 r55)), tau = tau1 tau2 = sqrt(r11 r66/(r33 r44)).
pub fn tau_ratios(rho: &DensityMatrix) -> Result<(f64, f64, f64)> {
    let d = &rho.mat;
    for i in 0..6 {
        if d.a[i][i].re <= 0.0 {
            return Err(Error::Domain("zero diagonal entry".into()));
        }
    }
    let g = |i: usize| d.a[i][i].re;
    let tau1 = (g(0) * g(4) / (g(1) * g(3))).sqrt();
    let tau2 = (g(1) * g(5) / (g(2) * g(4))).sqrt();
    let tau = (g(0) * g(5) / (g(2) * g(3))).sqrt();
    Ok((tau1, tau2, tau))
}

/// Forward link eps(mu, z, y): with the (1,2)/(3,4) pairs nullified,
///
/// eps = exp(-arccosh( (mu^2 + 1 - 2 mu (z12 z34 + y12 y34))
///                     / (2 mu sqrt(1-z12^2-y12^2) sqrt(1-z34^2-y34^2)) )).
///
/// The real case has y12 = y34 = 0. The printed form carries
/// sqrt(z^2 - 1) factors whose product is the negative of ours, matched by
/// the sign of the numerator.
pub fn epsilon_from_mu(z12: f64, z34: f64, y12: f64, y34: f64, mu: f64) -> Result<f64> {
    if mu <= 0.0 {
        return Err(Error::Domain("mu must be positive".into()));
    }
    let r1 = 1.0 - z12 * z12 - y12 * y12;
    let r2 = 1.0 - z34 * z34 - y34 * y34;
    if r1 <= 0.0 || r2 <= 0.0 {
        return Err(Error::Domain("off-diagonal magnitudes must stay below 1".into()));
    }
    let arg = (mu * mu + 1.0 - 2.0 * mu * (z12 * z34 + y12 * y34)) / (2.0 * mu * (r1 * r2).sqrt());
    if arg < 1.0 - 1e-12 {
        return Err(Error::Domain(format!("arccosh argument {} below 1", arg)));
    }
    Ok((-arg.max(1.0).acosh()).exp())
}

/// Inverse link: mu = (lambda - sqrt(lambda^2 - 4)) / 2 with
/// lambda = 2 (z12 z34 + y12 y34) + sqrt(1-z12^2-y12^2) sqrt(1-z34^2-y34^2)
/// (eps + 1/eps). Returns the root <= 1 (the map loses the mu <-> 1/mu
/// distinction).
pub fn mu_from_epsilon(eps: f64, z12: f64, z34: f64, y12: f64, y34: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain("eps must lie in (0, 1]".into()));
    }
    let r1 = 1.0 - z12 * z12 - y12 * y12;
    let r2 = 1.0 - z34 * z34 - y34 * y34;
    if r1 <= 0.0 || r2 <= 0.0 {
        return Err(Error::Domain("off-diagonal magnitudes must stay below 1".into()));
    }
    let lambda = 2.0 * (z12 * z34 + y12 * y34) + (r1 * r2).sqrt() * (eps + 1.0 / eps);
    if lambda < 2.0 - 1e-12 {
        return Err(Error::Domain(format!("lambda {} below 2", lambda)));
    }
    let disc = (lambda * lambda - 4.0).max(0.0).sqrt();
    // smaller root, computed in the cancellation-free form
    Ok(2.0 / (lambda + disc))
}

/// Uniform (Hilbert-Schmidt / flat Lebesgue) X-state sample with an
/// importance weight.
///
/// Diagonal from the flat simplex; antidiagonal entries uniform on the
/// full-radius interval (real) or disc (complex) of radius sqrt(r11 r44) and
/// sqrt(r22 r33). The weight (product of interval lengths resp. disc areas,
/// constants dropped) restores flat measure on the raw entries; weighted
/// averages estimate Lebesgue expectations.
pub fn sample_xstate(field: FieldKind, rng: &mut RngStream) -> (DensityMatrix, f64) {
    // Dirichlet(1,1,1,1) via normalized exponentials
    let mut d = [0.0f64; 4];
    let mut s = 0.0;
    for v in d.iter_mut() {
        *v = -rng.uniform().ln();
        s += *v;
    }
    for v in d.iter_mut() {
        *v /= s;
    }
    let r14 = (d[0] * d[3]).sqrt();
    let r23 = (d[1] * d[2]).sqrt();
    let mut m = CMat::zero(4);
    for i in 0..4 {
        m.a[i][i] = C::new(d[i], 0.0);
    }
    let weight;
    match field {
        FieldKind::Real => {
            let a14 = rng.symmetric() * r14;
            let a23 = rng.symmetric() * r23;
            m.a[0][3] = C::new(a14, 0.0);
            m.a[3][0] = C::new(a14, 0.0);
            m.a[1][2] = C::new(a23, 0.0);
            m.a[2][1] = C::new(a23, 0.0);
            weight = r14 * r23;
        }
        FieldKind::Complex => {
            let (m14, t14) = (r14 * rng.uniform().sqrt(), rng.angle());
            let (m23, t23) = (r23 * rng.uniform().sqrt(), rng.angle());
            let a14 = C::new(m14 * t14.cos(), m14 * t14.sin());
            let a23 = C::new(m23 * t23.cos(), m23 * t23.sin());
            m.a[0][3] = a14;
            m.a[3][0] = a14.conj();
            m.a[1][2] = a23;
            m.a[2][1] = a23.conj();
            weight = r14 * r14 * r23 * r23;
        }
    }
    (DensityMatrix { mat: m, field }, weight)
}

/// Bloore parameterization coordinates of a 4x4 state with the (1,2)/(3,4)
/// pairs nullified: the diagonal ratio mu (nu = mu^2) and the four non-null
/// off-diagonal entries in polar form r_ij e^{i phi_ij} (real case: phi = 0,
/// z_ij = r_ij).
#[derive(Clone, Copy, Debug)]
pub struct BlooreCoordinates {
    pub mu: f64,
    /// r13, r14, r23, r24
    pub r: [f64; 4],
    /// phi13, phi14, phi23, phi24
    pub phi: [f64; 4],
}

impl BlooreCoordinates {
    pub fn new(mu: f64, r: [f64; 4], phi: [f64; 4]) -> Result<Self> {
        if mu <= 0.0 {
            return Err(Error::Domain("mu must be positive".into()));
        }
        if r.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::Domain("each r_ij must lie in [0, 1]".into()));
        }
        Ok(BlooreCoordinates { mu, r, phi })
    }

    pub fn nu(&self) -> f64 {
        self.mu * self.mu
    }

    pub fn cos_phase(&self) -> f64 {
        (self.phi[0] - self.phi[1] - self.phi[2] + self.phi[3]).cos()
    }

    /// (positivity, ppt) per the printed constraint sets.
    pub fn constraints(&self, field: FieldKind) -> (bool, bool) {
        constraint_sets(field, self.mu, self.r, self.cos_phase())
    }

    pub fn assemble(&self, field: FieldKind) -> DensityMatrix {
        assemble_bloore(field, self.mu, self.r, self.phi)
    }
}

/// The printed positivity / PPT constraint sets in the Bloore variables,
/// with the two pairs (1,2)/(3,4) nullified. `cos_phase` is
/// cos(phi13 - phi14 - phi23 + phi24); the real case fixes it at 1.
pub fn constraint_sets(
    field: FieldKind,
    mu: f64,
    r: [f64; 4], // r13, r14, r23, r24
    cos_phase: f64,
) -> (bool, bool) {
    let k = match field {
        FieldKind::Real => 1.0,
        FieldKind::Complex => cos_phase,
    };
    let (r13, r14, r23, r24) = (r[0], r[1], r[2], r[3]);
    let cross = 2.0 * r13 * r14 * r23 * r24 * k;
    let c0 = 1.0 - r13 * r13 - r23 * r23 > 0.0;
    let c1 = -r13 * r13 - cross - r14 * r14 + r14 * r14 * r23 * r23 - r23 * r23
        + (r13 * r13 - 1.0) * r24 * r24
        + 1.0
        > 0.0;
    let mu2 = mu * mu;
    let c2 = -mu2 * mu2 * r14 * r14
        + mu2
            * (-r13 * r13 - cross + r14 * r14 * r23 * r23 + (r13 * r13 - 1.0) * r24 * r24
                + 1.0)
        - r23 * r23
        > 0.0;
    (c0 && c1, c2)
}

/// Assemble the density matrix of the Bloore parameterization with
/// (1,2)/(3,4) entries nullified, diagonal fixed by mu (r11 = r44 = mu s,
/// r22 = r33 = s), and off-diagonal z_ij = r_ij e^{i phi_ij}.
pub fn assemble_bloore(
    field: FieldKind,
    mu: f64,
    r: [f64; 4],
    phi: [f64; 4],
) -> DensityMatrix {
    let s = 1.0 / (2.0 + 2.0 * mu);
    let d = [mu * s, s, s, mu * s];
    let mut m = CMat::zero(4);
    for i in 0..4 {
        m.a[i][i] = C::new(d[i], 0.0);
    }
    let put = |m: &mut CMat, i: usize, j: usize, rij: f64, ph: f64| {
        let scale = (d[i] * d[j]).sqrt();
        let z = match field {
            FieldKind::Real => C::new(rij, 0.0),
            FieldKind::Complex => C::new(rij * ph.cos(), rij * ph.sin()),
        };
        m.a[i][j] = z * scale;
        m.a[j][i] = (z * scale).conj();
    };
    put(&mut m, 0, 2, r[0], phi[0]); // 1,3
    put(&mut m, 0, 3, r[1], phi[1]); // 1,4
    put(&mut m, 1, 2, r[2], phi[2]); // 2,3
    put(&mut m, 1, 3, r[3], phi[3]); // 2,4
    DensityMatrix { mat: m, field }
}

// ------------------------------------------------- Cholesky / Ginibre moments

/// Division-algebra parameter alpha for the moment comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alpha {
    Half,
    One,
    Two,
}

impl Alpha {
    pub fn value(self) -> f64 {
        match self {
            Alpha::Half => 0.5,
            Alpha::One => 1.0,
            Alpha::Two => 2.0,
        }
    }

    /// reals per off-diagonal entry (1, 2, 4)
    pub fn reals(self) -> usize {
        match self {
            Alpha::Half => 1,
            Alpha::One => 2,
            Alpha::Two => 4,
        }
    }
}

/// One Cholesky-method draw: a uniform point on the sphere S^{3+12 alpha}
/// assembled into an upper-triangular A with nonnegative diagonal, Q = A*A.
/// Returns (Q11, weight) where the weight
/// A11^{1+6a} A22^{1+4a} A33^{1+2a} A44 * (det Q)^k targets the
/// (det Q)^k x HS measure.
pub fn sample_cholesky_weighted(alpha: Alpha, k: i32, rng: &mut RngStream) -> (f64, f64) {
    let off_reals = 12 * alpha.reals() / 2; // 6 entries
    let dim = 4 + off_reals;
    let mut x = [0.0f64; 28];
    let mut norm = 0.0;
    for v in x.iter_mut().take(dim) {
        *v = rng.normal();
        norm += *v * *v;
    }
    let norm = norm.sqrt();
    for v in x.iter_mut().take(dim) {
        *v /= norm;
    }
    // first four coordinates (absolute values) are the diagonal
    let a11 = x[0].abs();
    let a22 = x[1].abs();
    let a33 = x[2].abs();
    let a44 = x[3].abs();
    let q11 = a11 * a11;
    let a = alpha.value();
    let mut weight = a11.powf(1.0 + 6.0 * a) * a22.powf(1.0 + 4.0 * a) * a33.powf(1.0 + 2.0 * a)
        * a44;
    if k != 0 {
        let det_q = (a11 * a22 * a33 * a44).powi(2);
        weight *= det_q.powi(k);
    }
    (q11, weight)
}

/// One quaternionic Ginibre draw of Q11: H is M x 4 with quaternion entries
/// of iid standard normal components, Q = H*H / tr(H*H).
pub fn ginibre_quaternion_q11(m_rows: usize, rng: &mut RngStream) -> f64 {
    use quaternion::Quaternion;
    let mut q11 = 0.0;
    let mut tr = 0.0;
    for _ in 0..m_rows {
        let mut row_first = Quaternion::default();
        for j in 0..4 {
            let h = Quaternion::new(rng.normal(), rng.normal(), rng.normal(), rng.normal());
            if j == 0 {
                row_first = h;
            }
            tr += h.norm_sqr();
        }
        q11 += (row_first.conj() * row_first).x1;
    }
    q11 / tr
}

/// Ratio estimator sum(w x)/sum(w) with a tail-honest standard error.
/// Heavy-tailed weights (the Cholesky jacobians raise diagonals to large
/// powers) collapse the effective sample size and make the delta-method
/// variance estimate unreliable; the reported stderr is the larger of the
/// batch-means spread and the ESS-adjusted weighted deviation,
/// ESS = (sum w)^2 / sum w^2.
pub struct WeightedMoment {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
    pub effective_n: f64,
}

pub fn weighted_moment_batched<I>(samples: I, batches: usize) -> WeightedMoment
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let draws: Vec<(f64, f64)> = samples.into_iter().collect();
    let n = draws.len();
    let b = batches.max(2).min(n.max(2));
    let (mut num, mut den, mut den2) = (0.0f64, 0.0f64, 0.0f64);
    let mut batch_ratios = Vec::with_capacity(b);
    let per = n.div_ceil(b);
    for chunk in draws.chunks(per) {
        let (mut cn, mut cd) = (0.0, 0.0);
        for (x, w) in chunk {
            cn += w * x;
            cd += w;
            den2 += w * w;
        }
        num += cn;
        den += cd;
        if cd > 0.0 {
            batch_ratios.push(cn / cd);
        }
    }
    let value = num / den;
    let m = batch_ratios.len() as f64;
    let mean_b: f64 = batch_ratios.iter().sum::<f64>() / m;
    let var_b: f64 = batch_ratios
        .iter()
        .map(|r| (r - mean_b).powi(2))
        .sum::<f64>()
        / (m - 1.0);
    let se_batch = (var_b / m).sqrt();
    let ess = den * den / den2;
    let wvar: f64 = draws
        .iter()
        .map(|(x, w)| w * (x - value).powi(2))
        .sum::<f64>()
        / den;
    let se_ess = (wvar / ess).sqrt();
    WeightedMoment {
        value,
        stderr: se_batch.max(se_ess),
        n: n as u64,
        effective_n: ess,
    }
}

/// Bell state |00> + |11> (up to normalization), the canonical non-PPT case.
pub fn bell_state() -> DensityMatrix {
    let mut m = CMat::zero(4);
    let h = C::new(0.5, 0.0);
    m.a[0][0] = h;
    m.a[0][3] = h;
    m.a[3][0] = h;
    m.a[3][3] = h;
    DensityMatrix {
        mat: m,
        field: FieldKind::Real,
    }
}

pub fn maximally_mixed(n: usize) -> DensityMatrix {
    let mut m = CMat::zero(n);
    for i in 0..n {
        m.a[i][i] = C::new(1.0 / n as f64, 0.0);
    }
    DensityMatrix {
        mat: m,
        field: FieldKind::Real,
    }
}
