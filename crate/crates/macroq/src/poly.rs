//! Sparse bivariate polynomials in the phase-space coordinates (x, p).

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum total degree of a term polynomial. Large enough for the Fock
/// expansion up to n = 32 (degree 2n) with margin.
pub const D_MAX: usize = 64;

/// A polynomial sum of c * x^i * p^j monomials with complex coefficients,
/// keyed by (i, j). The map is ordered so iteration (and therefore every
/// floating-point reduction built on it) is deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), C64>,
}

impl Poly2 {
    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// A constant polynomial.
    pub fn constant(c: C64) -> Self {
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert((0, 0), c);
        }
        Self { terms }
    }

    /// The monomial c * x^i * p^j.
    pub fn monomial(i: u32, j: u32, c: C64) -> Result<Self> {
        let degree = (i + j) as usize;
        if degree > D_MAX {
            return Err(Error::DegreeOverflow {
                degree,
                max: D_MAX,
            });
        }
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert((i, j), c);
        }
        Ok(Self { terms })
    }

    /// Build from (i, j, coefficient) triples, accumulating duplicates.
    pub fn from_monomials(monomials: &[(u32, u32, C64)]) -> Result<Self> {
        let mut poly = Self::default();
        for &(i, j, c) in monomials {
            let degree = (i + j) as usize;
            if degree > D_MAX {
                return Err(Error::DegreeOverflow {
                    degree,
                    max: D_MAX,
                });
            }
            poly.add_monomial(i, j, c);
        }
        Ok(poly)
    }

    fn add_monomial(&mut self, i: u32, j: u32, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest i + j over stored monomials (0 for the zero polynomial).
    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|&(i, j)| (i + j) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Largest exponent of x over stored monomials.
    pub fn max_degree_x(&self) -> usize {
        self.terms.keys().map(|&(i, _)| i as usize).max().unwrap_or(0)
    }

    /// Largest exponent of p over stored monomials.
    pub fn max_degree_p(&self) -> usize {
        self.terms.keys().map(|&(_, j)| j as usize).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &C64)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), &c) in other.terms.iter() {
            out.add_monomial(i, j, c);
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return Self::default();
        }
        Self {
            terms: self.terms.iter().map(|(&k, &v)| (k, v * c)).collect(),
        }
    }

    /// Polynomial product, rejecting results above `D_MAX`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let degree = self.total_degree() + other.total_degree();
        if !self.is_zero() && !other.is_zero() && degree > D_MAX {
            return Err(Error::DegreeOverflow {
                degree,
                max: D_MAX,
            });
        }
        let mut out = Self::default();
        for (&(i1, j1), &c1) in self.terms.iter() {
            for (&(i2, j2), &c2) in other.terms.iter() {
                out.add_monomial(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Partial derivative with respect to x.
    pub fn diff_x(&self) -> Self {
        let mut out = Self::default();
        for (&(i, j), &c) in self.terms.iter() {
            if i > 0 {
                out.add_monomial(i - 1, j, c * (i as f64));
            }
        }
        out
    }

    /// Partial derivative with respect to p.
    pub fn diff_p(&self) -> Self {
        let mut out = Self::default();
        for (&(i, j), &c) in self.terms.iter() {
            if j > 0 {
                out.add_monomial(i, j - 1, c * (j as f64));
            }
        }
        out
    }

    /// Evaluate at a real phase-space point.
    pub fn eval(&self, x: f64, p: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (&(i, j), &c) in self.terms.iter() {
            acc += c * x.powi(i as i32) * p.powi(j as i32);
        }
        acc
    }

    /// Sum of |c| * s^(i+j): an upper envelope of |poly| on the disk of radius s.
    pub fn abs_bound(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c.norm() * s.powi((i + j) as i32))
            .sum()
    }

    /// Same monomials with absolute coefficients.
    pub fn abs_coeffs(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&k, &v)| (k, C64::new(v.norm(), 0.0)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_and_degree() {
        let x = Poly2::monomial(1, 0, c(1.0, 0.0)).unwrap();
        let p = Poly2::monomial(0, 1, c(1.0, 0.0)).unwrap();
        let xp = x.mul(&p).unwrap();
        assert_eq!(xp.total_degree(), 2);
        assert_eq!(xp.eval(2.0, 3.0), c(6.0, 0.0));
    }

    #[test]
    fn degree_cap_enforced() {
        let high = Poly2::monomial(33, 0, c(1.0, 0.0)).unwrap();
        let err = high.mul(&high).unwrap_err();
        assert!(matches!(err, Error::DegreeOverflow { degree: 66, .. }));
    }

    #[test]
    fn derivative_of_quadratic() {
        // d/dx (x^2 p + 3x) = 2xp + 3
        let poly = Poly2::from_monomials(&[(2, 1, c(1.0, 0.0)), (1, 0, c(3.0, 0.0))]).unwrap();
        let dx = poly.diff_x();
        assert_eq!(dx.eval(2.0, 5.0), c(23.0, 0.0));
    }

    #[test]
    fn cancellation_removes_monomials() {
        let a = Poly2::monomial(1, 1, c(2.0, 0.0)).unwrap();
        let b = Poly2::monomial(1, 1, c(-2.0, 0.0)).unwrap();
        assert!(a.add(&b).is_zero());
    }
}
