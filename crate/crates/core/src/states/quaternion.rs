//! Quaternions, just enough for the Ginibre / Cholesky moment comparisons.

use std::ops::{Add, Mul};

/// q = x1 + x2 i + x3 j + x4 k.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl Quaternion {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Quaternion { x1, x2, x3, x4 }
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.x1, -self.x2, -self.x3, -self.x4)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3 + self.x4 * self.x4
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3, self.x4 + o.x4)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.x1 * o.x1 - self.x2 * o.x2 - self.x3 * o.x3 - self.x4 * o.x4,
            self.x1 * o.x2 + self.x2 * o.x1 + self.x3 * o.x4 - self.x4 * o.x3,
            self.x1 * o.x3 - self.x2 * o.x4 + self.x3 * o.x1 + self.x4 * o.x2,
            self.x1 * o.x4 + self.x2 * o.x3 - self.x3 * o.x2 + self.x4 * o.x1,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d)
    }

    #[test]
    fn norm_is_conj_product() {
        let v = q(1.5, -2.0, 0.25, 3.0);
        let p = v.conj() * v;
        assert!((p.x1 - v.norm_sqr()).abs() < 1e-12);
        assert!(p.x2.abs() + p.x3.abs() + p.x4.abs() < 1e-12);
    }

    #[test]
    fn multiplication_associative() {
        let a = q(0.3, 1.0, -0.7, 0.2);
        let b = q(-1.1, 0.5, 0.9, -0.4);
        let c = q(2.0, -0.3, 0.1, 1.3);
        let lhs = (a * b) * c;
        let rhs = a * (b * c);
        for (l, r) in [
            (lhs.x1, rhs.x1),
            (lhs.x2, rhs.x2),
            (lhs.x3, rhs.x3),
            (lhs.x4, rhs.x4),
        ] {
            assert!((l - r).abs() < 1e-12);
        }
    }

    #[test]
    fn conj_antihomomorphism() {
        let a = q(0.3, 1.0, -0.7, 0.2);
        let b = q(-1.1, 0.5, 0.9, -0.4);
        let lhs = (a * b).conj();
        let rhs = b.conj() * a.conj();
        assert!((lhs.x1 - rhs.x1).abs() < 1e-12);
        assert!((lhs.x2 - rhs.x2).abs() < 1e-12);
        assert!((lhs.x3 - rhs.x3).abs() < 1e-12);
        assert!((lhs.x4 - rhs.x4).abs() < 1e-12);
    }

    #[test]
    fn ij_is_k() {
        let i = q(0.0, 1.0, 0.0, 0.0);
        let j = q(0.0, 0.0, 1.0, 0.0);
        assert_eq!(i * j, q(0.0, 0.0, 0.0, 1.0));
        assert_eq!(j * i, q(0.0, 0.0, 0.0, -1.0));
    }
}
