//! Small dense Hermitian linear algebra (n <= 6), allocation-free.
//!
//! Everything the sampling hot loop needs: leading principal minors through
//! unpivoted LU with a pivoted per-minor fallback, a cyclic Jacobi
//! eigensolver for complex Hermitian matrices, and spectral square roots.

use num_complex::Complex64 as C;

pub const MAXN: usize = 6;

/// Fixed-capacity complex matrix; `n` rows/cols are in use.
#[derive(Clone, Copy, Debug)]
pub struct CMat {
    pub n: usize,
    pub a: [[C; MAXN]; MAXN],
}

impl CMat {
    pub fn zero(n: usize) -> Self {
        CMat {
            n,
            a: [[C::new(0.0, 0.0); MAXN]; MAXN],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zero(n);
        for i in 0..n {
            m.a[i][i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.n).map(|i| self.a[i][i].re).sum()
    }

    pub fn scale(&mut self, s: f64) {
        for i in 0..self.n {
            for j in 0..self.n {
                self.a[i][j] *= s;
            }
        }
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        let n = self.n;
        let mut out = CMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let v = self.a[i][k];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i][j] += v * o.a[k][j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] = self.a[j][i].conj();
            }
        }
        out
    }

    pub fn sub(&self, o: &CMat) -> CMat {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] -= o.a[i][j];
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.a[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            worst = worst.max(self.a[i][i].im.abs());
            for j in i + 1..self.n {
                let d = self.a[i][j] - self.a[j][i].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// Leading principal minors m_1..m_n (real parts; Hermitian input makes them
/// real). Unpivoted elimination, with a pivoted determinant recomputation for
/// any prefix the fast path cannot certify.
pub fn leading_minors(m: &CMat) -> [f64; MAXN] {
    let n = m.n;
    let mut out = [0.0f64; MAXN];
    let mut a = m.a;
    let mut ok = true;
    let mut prod = C::new(1.0, 0.0);
    for k in 0..n {
        let piv = a[k][k];
        if ok {
            prod *= piv;
            out[k] = prod.re;
        }
        if piv.norm() < 1e-150 {
            ok = false;
        }
        if !ok {
            out[k] = pivoted_det(m, k + 1);
            continue;
        }
        for i in k + 1..n {
            let f = a[i][k] / piv;
            for j in k..n {
                let t = f * a[k][j];
                a[i][j] -= t;
            }
        }
    }
    out
}

/// Determinant of the leading k x k block with partial pivoting.
fn pivoted_det(m: &CMat, k: usize) -> f64 {
    let mut a = m.a;
    let mut sign = 1.0f64;
    let mut det = C::new(1.0, 0.0);
    for c in 0..k {
        let mut best = c;
        let mut bn = a[c][c].norm_sqr();
        for r in c + 1..k {
            let v = a[r][c].norm_sqr();
            if v > bn {
                bn = v;
                best = r;
            }
        }
        if bn == 0.0 {
            return 0.0;
        }
        if best != c {
            a.swap(best, c);
            sign = -sign;
        }
        det *= a[c][c];
        for r in c + 1..k {
            let f = a[r][c] / a[c][c];
            for j in c..k {
                let t = f * a[c][j];
                a[r][j] -= t;
            }
        }
    }
    sign * det.re
}

/// Eigenvalues and eigenvectors of a complex Hermitian matrix by cyclic
/// Jacobi rotations. Converges when the off-diagonal Frobenius mass drops
/// below 1e-13 * ||M||; errs after `max_sweeps`.
pub fn jacobi_hermitian(m: &CMat, max_sweeps: u32) -> Result<([f64; MAXN], CMat), String> {
    let n = m.n;
    let mut a = *m;
    let mut v = CMat::identity(n);
    let norm = a.frobenius().max(1e-300);
    let tol = 1e-13 * norm;
    for _sweep in 0..max_sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a.a[p][q].norm_sqr();
            }
        }
        if off.sqrt() < tol {
            let mut vals = [0.0f64; MAXN];
            for i in 0..n {
                vals[i] = a.a[i][i].re;
            }
            return Ok((vals, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.a[p][q];
                let g = apq.norm();
                if g < 1e-300 {
                    continue;
                }
                // unitary U: U[pp] = c, U[pq] = s phi, U[qp] = -s conj(phi),
                // U[qq] = c, with phi the pivot phase; theta zeroes A'[p][q]
                let phase = apq / g;
                let app = a.a[p][p].re;
                let aqq = a.a[q][q].re;
                let theta = 0.5 * (2.0 * g).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                let sp = phase * s; // s phi
                // columns: B = A U
                for i in 0..n {
                    let aip = a.a[i][p];
                    let aiq = a.a[i][q];
                    a.a[i][p] = aip * c - aiq * sp.conj();
                    a.a[i][q] = aip * sp + aiq * c;
                }
                // rows: A' = U^H B
                for j in 0..n {
                    let apj = a.a[p][j];
                    let aqj = a.a[q][j];
                    a.a[p][j] = apj * c - aqj * sp;
                    a.a[q][j] = apj * sp.conj() + aqj * c;
                }
                // accumulate eigenvectors: V = V U
                for i in 0..n {
                    let vip = v.a[i][p];
                    let viq = v.a[i][q];
                    v.a[i][p] = vip * c - viq * sp.conj();
                    v.a[i][q] = vip * sp + viq * c;
                }
            }
        }
    }
    Err(format!(
        "jacobi did not converge within {} sweeps",
        max_sweeps
    ))
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(m: &CMat) -> Result<[f64; MAXN], String> {
    let (mut vals, _) = jacobi_hermitian(m, 30)?;
    vals[..m.n].sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// Spectral f(M) for Hermitian PSD M: rebuild with mapped eigenvalues.
fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat, String> {
    let (vals, vecs) = jacobi_hermitian(m, 30)?;
    let n = m.n;
    let mut out = CMat::zero(n);
    for k in 0..n {
        let fv = f(vals[k].max(0.0));
        if fv == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out.a[i][j] += vecs.a[i][k] * vecs.a[j][k].conj() * fv;
            }
        }
    }
    Ok(out)
}

pub fn psd_sqrt(m: &CMat) -> Result<CMat, String> {
    spectral_map(m, |x| x.sqrt())
}

pub fn psd_inv_sqrt(m: &CMat) -> Result<CMat, String> {
    let (vals, _) = jacobi_hermitian(m, 30)?;
    for i in 0..m.n {
        if vals[i] <= 0.0 {
            return Err("matrix not positive definite".into());
        }
    }
    spectral_map(m, |x| 1.0 / x.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        let mut rng = crate::states::rng::RngStream::new(seed, 0);
        let mut m = CMat::zero(n);
        for i in 0..n {
            m.a[i][i] = c(rng.normal(), 0.0);
            for j in i + 1..n {
                let v = c(rng.normal(), rng.normal());
                m.a[i][j] = v;
                m.a[j][i] = v.conj();
            }
        }
        m
    }

    #[test]
    fn minors_of_identity() {
        let m = CMat::identity(4);
        let mins = leading_minors(&m);
        assert_eq!(&mins[..4], &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn minors_match_pivoted_dets() {
        for seed in 0..20 {
            let m = random_hermitian(6, seed);
            let fast = leading_minors(&m);
            for k in 1..=6 {
                let slow = pivoted_det(&m, k);
                assert!(
                    (fast[k - 1] - slow).abs() < 1e-9 * (1.0 + slow.abs()),
                    "k={} {} vs {}",
                    k,
                    fast[k - 1],
                    slow
                );
            }
        }
    }

    #[test]
    fn jacobi_diagonalizes() {
        for seed in 0..10 {
            let m = random_hermitian(6, seed + 100);
            let (vals, vecs) = jacobi_hermitian(&m, 30).unwrap();
            // M V = V diag(vals)
            let mv = m.mul(&vecs);
            let mut vd = vecs;
            for j in 0..6 {
                for i in 0..6 {
                    vd.a[i][j] *= vals[j];
                }
            }
            assert!(mv.sub(&vd).frobenius() < 1e-10 * (1.0 + m.frobenius()));
            // eigenvalue sum = trace
            let tr: f64 = (0..6).map(|i| m.a[i][i].re).sum();
            let vs: f64 = vals.iter().sum();
            assert!((tr - vs).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_known_eigenvalues() {
        // [[2,1],[1,2]] -> {1, 3}
        let mut m = CMat::zero(2);
        m.a[0][0] = c(2.0, 0.0);
        m.a[0][1] = c(1.0, 0.0);
        m.a[1][0] = c(1.0, 0.0);
        m.a[1][1] = c(2.0, 0.0);
        let vals = eigenvalues(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        for seed in 0..5 {
            let h = random_hermitian(3, seed + 55);
            // make it PSD: M = H^2
            let m = h.mul(&h);
            let r = psd_sqrt(&m).unwrap();
            let back = r.mul(&r);
            assert!(back.sub(&m).frobenius() < 1e-9 * (1.0 + m.frobenius()));
            let inv = psd_inv_sqrt(&m).unwrap();
            let ident = inv.mul(&m).mul(&inv);
            assert!(ident.sub(&CMat::identity(3)).frobenius() < 1e-8);
        }
    }
}
