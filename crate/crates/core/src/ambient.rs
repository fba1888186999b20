//! The ambient algebra a loop takes values in.
//!
//! Values are stored as flat slices of complex coordinates. Matrix ambients
//! use row-major order, so the Hermitian product `tr(A B*)` is the plain
//! coordinate sum `Σ a_k conj(b_k)` and a single inner product serves every
//! kind.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ambient {
    /// `ℝ^d`, stored with zero imaginary parts.
    Real(usize),
    /// `ℂ^d`.
    Complex(usize),
    /// `n × n` complex matrices with the Frobenius pairing.
    Matrix(usize),
}

impl Ambient {
    /// Number of complex coordinates of one value.
    pub fn dim(&self) -> usize {
        match *self {
            Ambient::Real(d) | Ambient::Complex(d) => d,
            Ambient::Matrix(n) => n * n,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Ambient::Real(_))
    }

    pub fn check(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::Precondition(format!("{self} has dimension zero")));
        }
        Ok(())
    }

    pub fn ensure_same(&self, other: &Ambient) -> Result<()> {
        if self != other {
            return Err(Error::AmbientMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, a: &[C64], b: &[C64]) -> C64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
    }

    pub fn norm_sqr(&self, a: &[C64]) -> f64 {
        a.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn norm(&self, a: &[C64]) -> f64 {
        self.norm_sqr(a).sqrt()
    }

    pub fn zero(&self) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); self.dim()]
    }

    /// Multiplicative identity, when the ambient is an algebra.
    pub fn identity(&self) -> Option<Vec<C64>> {
        match *self {
            Ambient::Matrix(n) => {
                let mut id = self.zero();
                for i in 0..n {
                    id[i * n + i] = C64::new(1.0, 0.0);
                }
                Some(id)
            }
            Ambient::Real(1) | Ambient::Complex(1) => Some(vec![C64::new(1.0, 0.0)]),
            _ => None,
        }
    }

    pub fn supports_product(&self) -> bool {
        self.identity().is_some()
    }

    /// `out = a · b` (matrix product for matrix ambients, scalar product for
    /// one-dimensional ones).
    pub fn multiply_into(&self, a: &[C64], b: &[C64], out: &mut [C64]) -> Result<()> {
        match *self {
            Ambient::Matrix(n) => {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = C64::new(0.0, 0.0);
                        for k in 0..n {
                            acc += a[i * n + k] * b[k * n + j];
                        }
                        out[i * n + j] = acc;
                    }
                }
                Ok(())
            }
            Ambient::Real(1) | Ambient::Complex(1) => {
                out[0] = a[0] * b[0];
                Ok(())
            }
            _ => Err(Error::NotAnAlgebra(self.to_string())),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Real(d) => write!(f, "R^{d}"),
            Ambient::Complex(d) => write!(f, "C^{d}"),
            Ambient::Matrix(n) => write!(f, "M_{n}(C)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_pairing_matches_trace() {
        let amb = Ambient::Matrix(2);
        let a: Vec<C64> = [1.0, 2.0, 3.0, 4.0].iter().map(|&x| C64::new(x, 0.5)).collect();
        let b: Vec<C64> = [0.0, 1.0, -1.0, 2.0].iter().map(|&x| C64::new(x, -x)).collect();
        // tr(A B*) = Σ_ij A_ij conj(B_ij)
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..2 {
            for k in 0..2 {
                tr += a[i * 2 + k] * b[i * 2 + k].conj();
            }
        }
        assert!((amb.inner(&a, &b) - tr).norm() < 1e-14);
        assert!(amb.norm_sqr(&a) > 0.0);
    }

    #[test]
    fn identity_norm_is_finite_and_nonzero() {
        for amb in [Ambient::Matrix(1), Ambient::Matrix(3), Ambient::Complex(1)] {
            let id = amb.identity().unwrap();
            let n = amb.norm(&id);
            assert!(n.is_finite() && n > 0.0);
        }
        assert!(Ambient::Real(3).identity().is_none());
    }

    #[test]
    fn vector_ambient_refuses_products() {
        let amb = Ambient::Real(3);
        let mut out = amb.zero();
        let err = amb.multiply_into(&amb.zero(), &amb.zero(), &mut out);
        assert!(matches!(err, Err(Error::NotAnAlgebra(_))));
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(Ambient::Real(0).check().is_err());
        assert!(Ambient::Matrix(0).check().is_err());
    }
}
