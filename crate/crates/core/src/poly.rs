//! Dense polynomials in ascending coefficient order with companion-matrix
//! root finding.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

pub const MAX_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Coefficients `c0 + c1 z + ...`; trailing zeros are trimmed.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(RealPolynomial { coeffs })
    }

    pub fn from_roots(roots: &[f64]) -> Self {
        let mut p = RealPolynomial { coeffs: vec![1.0] };
        for &r in roots {
            p = p.mul(&RealPolynomial { coeffs: vec![-r, 1.0] });
        }
        p
    }

    pub fn one() -> Self {
        RealPolynomial { coeffs: vec![1.0] }
    }

    /// The zero polynomial, stored as the single coefficient 0 (degree 0).
    pub fn zero() -> Self {
        RealPolynomial { coeffs: vec![0.0] }
    }

    /// Like `new`, but an all-zero input gives `zero()` instead of an error.
    pub fn new_or_zero(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().all(|&c| c == 0.0) {
            return Ok(Self::zero());
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> RealPolynomial {
        if self.coeffs.len() == 1 {
            return RealPolynomial { coeffs: vec![0.0] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        RealPolynomial { coeffs }
    }

    pub fn mul(&self, other: &RealPolynomial) -> RealPolynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPolynomial { coeffs: out }
    }

    /// Quotient and remainder by `z - r`.
    pub fn deflate(&self, r: f64) -> (RealPolynomial, f64) {
        let n = self.coeffs.len();
        if n == 1 {
            return (RealPolynomial { coeffs: vec![0.0] }, self.coeffs[0]);
        }
        let mut q = vec![0.0; n - 1];
        let mut acc = 0.0;
        for k in (0..n).rev() {
            acc = acc * r + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (RealPolynomial { coeffs: q }, acc)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn to_complex(&self) -> ComplexPolynomial {
        ComplexPolynomial {
            coeffs: self.coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(),
        }
    }

    pub fn roots(&self) -> Result<Vec<C64>> {
        self.to_complex().roots()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    coeffs: Vec<C64>,
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        while coeffs.last().map(|c| c.norm() == 0.0).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        Ok(ComplexPolynomial { coeffs })
    }

    pub fn one() -> Self {
        ComplexPolynomial {
            coeffs: vec![C64::new(1.0, 0.0)],
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Coefficientwise conjugate, so that `p.conj().eval(z) = conj(p(conj z))`.
    pub fn conj(&self) -> ComplexPolynomial {
        ComplexPolynomial {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Roots by eigenvalues of the companion matrix, each polished by one
    /// Newton step.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        if n > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(n));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = self.coeffs[n];
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        let (_, t) = m.schur().unpack();
        let mut roots: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
        for r in roots.iter_mut() {
            let (p, dp) = self.eval_with_derivative(*r);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.norm() < 1e-3 * (1.0 + r.norm()) {
                    *r -= step;
                }
            }
        }
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_products() {
        let p = RealPolynomial::from_roots(&[-1.0, -2.0, 3.0]);
        let r = p.roots().unwrap();
        let want = [-2.0, -1.0, 3.0];
        for (a, b) in r.iter().zip(want) {
            assert!((a - b).norm() < 1e-12);
        }
        let q = RealPolynomial::new(vec![1.0, 0.0, 1.0]).unwrap();
        let r = q.roots().unwrap();
        assert!(r.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12));
    }

    #[test]
    fn deflation() {
        let p = RealPolynomial::new(vec![-1.0, 2.0, 4.0]).unwrap();
        let (q, rem) = p.deflate(0.5);
        assert!((rem - 1.0).abs() < 1e-15);
        assert_eq!(q.coeffs(), &[4.0, 4.0]);
    }

    #[test]
    fn trims_and_rejects() {
        assert_eq!(RealPolynomial::new(vec![1.0, 2.0, 0.0]).unwrap().degree(), 1);
        assert!(RealPolynomial::new(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn degree_cap() {
        let p = RealPolynomial::new(vec![1.0; 70]).unwrap();
        assert!(matches!(p.roots(), Err(Error::DegreeTooLarge(69))));
    }
}
