//! Exact algebra of complex polynomial x complex Gaussian terms on 2D phase space.
//!
//! Every term has the closed form
//!
//! ```text
//!     coeff * poly(x, p) * exp(-1/2 u^T A u + b^T u),    u = (x, p),
//! ```
//!
//! with A complex symmetric and Re(A) positive definite, which guarantees
//! absolute convergence of the plane integral for any polynomial prefactor.
//! The family is closed under multiplication, differentiation and analytic
//! integration, so overlaps of Wigner functions and their gradients never
//! involve quadrature: they reduce to Gaussian moments generated by the
//! two-variable Wick recurrence.
//!
//! Conventions: alpha = x + i p, d^2 alpha = dx dp, Wigner functions are
//! normalized to integral 1 and Tr(rho1 rho2) = pi * integral of W1 W2.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::poly::{Poly2, D_MAX};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Relative tolerance for imaginary residuals of quantities that must be real.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Term-pruning threshold relative to the running envelope total.
const PRUNE_REL: f64 = 1e-15;

/// A complex symmetric 2x2 matrix; the off-diagonal entry is stored once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat2 {
    pub xx: C64,
    pub xp: C64,
    pub pp: C64,
}

impl SymMat2 {
    pub fn new(xx: C64, xp: C64, pp: C64) -> Self {
        Self { xx, xp, pp }
    }

    /// s times the identity.
    pub fn scaled_identity(s: f64) -> Self {
        Self::new(C64::new(s, 0.0), ZERO, C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.xx + other.xx, self.xp + other.xp, self.pp + other.pp)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.xx - other.xx, self.xp - other.xp, self.pp - other.pp)
    }

    pub fn det(&self) -> C64 {
        self.xx * self.pp - self.xp * self.xp
    }

    pub fn trace(&self) -> C64 {
        self.xx + self.pp
    }

    /// Both leading minors of Re(A) strictly positive.
    pub fn re_is_positive_definite(&self) -> bool {
        let rxx = self.xx.re;
        let rdet = self.xx.re * self.pp.re - self.xp.re * self.xp.re;
        rxx > 0.0 && rdet > 0.0
    }

    /// Eigenvalues of Re(A) (real symmetric part), ascending.
    pub fn re_eigenvalues(&self) -> (f64, f64) {
        let a = self.xx.re;
        let b = self.xp.re;
        let c = self.pp.re;
        let mean = 0.5 * (a + c);
        let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        (mean - r, mean + r)
    }

    /// Eigenvalues of the full complex matrix via the 2x2 quadratic formula.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let half_tr = 0.5 * self.trace();
        let disc = (half_tr * half_tr - self.det()).sqrt();
        (half_tr - disc, half_tr + disc)
    }

    /// (det A)^(-1/2) on the branch fixed by taking the principal square root
    /// of each eigenvalue. When Re(A) is positive definite both eigenvalues
    /// lie in the open right half-plane, so the per-eigenvalue principal
    /// roots are well defined and vary continuously with A.
    pub fn inv_sqrt_det(&self) -> Result<C64> {
        let det_abs = self.det().norm();
        if det_abs < 1e-30 {
            return Err(Error::SingularMatrix { det_abs });
        }
        let (l1, l2) = self.eigenvalues();
        let s = l1.sqrt() * l2.sqrt();
        Ok(C64::new(1.0, 0.0) / s)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.norm() < 1e-30 {
            return Err(Error::SingularMatrix {
                det_abs: det.norm(),
            });
        }
        Ok(Self::new(self.pp / det, -self.xp / det, self.xx / det))
    }

    pub fn mul_vec(&self, v: &CVec2) -> CVec2 {
        CVec2::new(
            self.xx * v.x + self.xp * v.p,
            self.xp * v.x + self.pp * v.p,
        )
    }
}

/// A complex 2-vector over the (x, p) coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec2 {
    pub x: C64,
    pub p: C64,
}

impl CVec2 {
    pub fn new(x: C64, p: C64) -> Self {
        Self { x, p }
    }

    pub fn zero() -> Self {
        Self::new(ZERO, ZERO)
    }

    pub fn real(x: f64, p: f64) -> Self {
        Self::new(C64::new(x, 0.0), C64::new(p, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.x + other.x, self.p + other.p)
    }

    /// Bilinear (unconjugated) dot product b^T u.
    pub fn dot(&self, other: &Self) -> C64 {
        self.x * other.x + self.p * other.p
    }

    pub fn re(&self) -> (f64, f64) {
        (self.x.re, self.p.re)
    }

    pub fn im_norm(&self) -> f64 {
        (self.x.im * self.x.im + self.p.im * self.p.im).sqrt()
    }
}

/// A general complex 2x2 matrix, used for linear couplings between the
/// integration variables and the outer phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2c {
    pub m: [[C64; 2]; 2],
}

impl Mat2c {
    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Self {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self::new(C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0))
    }

    /// B^T S B for symmetric S; the result is symmetric for any B.
    pub fn congruence(&self, s: &SymMat2) -> SymMat2 {
        let b = &self.m;
        // columns of B
        let c0 = CVec2::new(b[0][0], b[1][0]);
        let c1 = CVec2::new(b[0][1], b[1][1]);
        let sc0 = s.mul_vec(&c0);
        let sc1 = s.mul_vec(&c1);
        SymMat2::new(c0.dot(&sc0), c0.dot(&sc1), c1.dot(&sc1))
    }

    /// B^T v.
    pub fn transpose_mul_vec(&self, v: &CVec2) -> CVec2 {
        let b = &self.m;
        CVec2::new(b[0][0] * v.x + b[1][0] * v.p, b[0][1] * v.x + b[1][1] * v.p)
    }
}

/// One closed-form atom: coeff * poly(x, p) * exp(-1/2 u^T A u + b^T u).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussTerm {
    pub coeff: C64,
    pub quad: SymMat2,
    pub lin: CVec2,
    pub poly: Poly2,
}

/// Differentiation axis on the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    P,
}

/// Validating constructor: rejects non-integrable exponents and oversized
/// polynomials.
pub fn make_term(coeff: C64, quad: SymMat2, lin: CVec2, poly: Poly2) -> Result<GaussTerm> {
    if !quad.re_is_positive_definite() {
        return Err(Error::NonIntegrable(format!(
            "Re(A) is not positive definite (Re A = [[{}, {}], [{}, {}]])",
            quad.xx.re, quad.xp.re, quad.xp.re, quad.pp.re
        )));
    }
    let degree = poly.total_degree();
    if degree > D_MAX {
        return Err(Error::DegreeOverflow {
            degree,
            max: D_MAX,
        });
    }
    Ok(GaussTerm {
        coeff,
        quad,
        lin,
        poly,
    })
}

impl GaussTerm {
    /// Value of the full term at a real phase-space point.
    pub fn eval(&self, x: f64, p: f64) -> C64 {
        self.coeff * self.poly.eval(x, p) * self.exponent(x, p).exp()
    }

    fn exponent(&self, x: f64, p: f64) -> C64 {
        let a = &self.quad;
        let quad_part = a.xx * (x * x) + 2.0 * a.xp * (x * p) + a.pp * (p * p);
        -0.5 * quad_part + self.lin.x * x + self.lin.p * p
    }

    /// Total degree of the polynomial prefactor.
    pub fn degree(&self) -> usize {
        self.poly.total_degree()
    }
}

/// Pointwise product of two terms: coefficients multiply, exponents add,
/// polynomials convolve. Re(A1) + Re(A2) stays positive definite, so the
/// result is always integrable; only the degree cap can fail.
pub fn term_mul(t1: &GaussTerm, t2: &GaussTerm) -> Result<GaussTerm> {
    let poly = t1.poly.mul(&t2.poly)?;
    make_term(
        t1.coeff * t2.coeff,
        t1.quad.add(&t2.quad),
        t1.lin.add(&t2.lin),
        poly,
    )
}

/// Exact partial derivative along `axis`:
/// d(poly e^E) = (d poly + poly * dE) e^E with dE linear in (x, p).
pub fn term_diff(t: &GaussTerm, axis: Axis) -> Result<GaussTerm> {
    let (dpoly, b_i, row) = match axis {
        Axis::X => (
            t.poly.diff_x(),
            t.lin.x,
            (t.quad.xx, t.quad.xp),
        ),
        Axis::P => (
            t.poly.diff_p(),
            t.lin.p,
            (t.quad.xp, t.quad.pp),
        ),
    };
    // dE/du_i = b_i - (A u)_i
    let de = Poly2::from_monomials(&[(0, 0, b_i), (1, 0, -row.0), (0, 1, -row.1)])?;
    let poly = dpoly.add(&t.poly.mul(&de)?);
    make_term(t.coeff, t.quad, t.lin, poly)
}

/// Table of normalized Gaussian moments E[x^i p^j] for the complex Gaussian
/// with precision matrix `a` and linear term `b`, for all i <= mx, j <= mp.
///
/// With Sigma = A^-1 and mu = A^-1 b the moments follow the Wick/Stein
/// recurrence E[y^(m+e_i)] = mu_i E[y^m] + sum_j m_j Sigma_ij E[y^(m-e_j)],
/// which remains valid for complex A by analytic continuation.
fn moment_table(a: &SymMat2, b: &CVec2, mx: usize, mp: usize) -> Result<Vec<Vec<C64>>> {
    if !a.re_is_positive_definite() {
        return Err(Error::NonIntegrable(
            "moment requested for a non-positive-definite Re(A)".into(),
        ));
    }
    let sigma = a.inverse()?;
    let mu = sigma.mul_vec(b);
    let mut table = vec![vec![ZERO; mp + 1]; mx + 1];
    table[0][0] = C64::new(1.0, 0.0);
    for j in 1..=mp {
        let mut v = mu.p * table[0][j - 1];
        if j >= 2 {
            v += sigma.pp * ((j - 1) as f64) * table[0][j - 2];
        }
        table[0][j] = v;
    }
    for i in 1..=mx {
        for j in 0..=mp {
            let mut v = mu.x * table[i - 1][j];
            if i >= 2 {
                v += sigma.xx * ((i - 1) as f64) * table[i - 2][j];
            }
            if j >= 1 {
                v += sigma.xp * (j as f64) * table[i - 1][j - 1];
            }
            table[i][j] = v;
        }
    }
    Ok(table)
}

/// Overall normalization N = 2 pi (det A)^(-1/2) exp(1/2 b^T A^-1 b) of the
/// plane integral of exp(-1/2 u^T A u + b^T u).
fn gaussian_normalizer(a: &SymMat2, b: &CVec2) -> Result<C64> {
    let isd = a.inv_sqrt_det()?;
    let mu = a.inverse()?.mul_vec(b);
    Ok(2.0 * std::f64::consts::PI * isd * (0.5 * b.dot(&mu)).exp())
}

/// The moment integral over the whole plane:
/// integral of x^mx p^mp exp(-1/2 u^T A u + b^T u) du.
pub fn gaussian_moment(a: &SymMat2, b: &CVec2, m: (usize, usize)) -> Result<C64> {
    let table = moment_table(a, b, m.0, m.1)?;
    Ok(gaussian_normalizer(a, b)? * table[m.0][m.1])
}

/// Exact plane integral of a term: the polynomial is integrated monomial by
/// monomial against the Gaussian moments.
pub fn term_integral(t: &GaussTerm) -> Result<C64> {
    if t.poly.is_zero() {
        return Ok(ZERO);
    }
    let table = moment_table(&t.quad, &t.lin, t.poly.max_degree_x(), t.poly.max_degree_p())?;
    let norm = gaussian_normalizer(&t.quad, &t.lin)?;
    let mut acc = ZERO;
    for (&(i, j), &c) in t.poly.iter() {
        acc += c * table[i as usize][j as usize];
    }
    Ok(t.coeff * norm * acc)
}

/// Positive bound used for pruning: |coeff| times the integral of the
/// absolute-value envelope |poly| exp(-1/2 u^T Re(A) u + Re(b)^T u).
pub fn term_envelope_integral(t: &GaussTerm) -> Result<f64> {
    let re_a = SymMat2::new(
        C64::new(t.quad.xx.re, 0.0),
        C64::new(t.quad.xp.re, 0.0),
        C64::new(t.quad.pp.re, 0.0),
    );
    let (bx, bp) = t.lin.re();
    let re_b = CVec2::real(bx, bp);
    if t.poly.is_zero() {
        return Ok(0.0);
    }
    let table = moment_table(&re_a, &re_b, t.poly.max_degree_x(), t.poly.max_degree_p())?;
    let norm = gaussian_normalizer(&re_a, &re_b)?;
    let mut acc = 0.0;
    for (&(i, j), &c) in t.poly.iter() {
        acc += c.norm() * (norm * table[i as usize][j as usize]).norm();
    }
    Ok(t.coeff.norm() * acc)
}

/// Result of integrating exp(-1/2 a^T Aa a + (b0 + B u)^T a) over the inner
/// Gaussian variable a, leaving a function of the outer point u. Folding it
/// into a u-space term multiplies the coefficient by `coeff`, adds `lin` to
/// the linear exponent and subtracts `quad_reduction` from the quadratic form.
#[derive(Debug, Clone, Copy)]
pub struct AlphaIntegral {
    pub coeff: C64,
    pub lin: CVec2,
    pub quad_reduction: SymMat2,
}

/// Analytic Gaussian integration over a parametric linear coefficient:
/// the inner integral's exp(1/2 (b0 + Bu)^T Aa^-1 (b0 + Bu)) factor expands
/// into constant, linear and quadratic pieces in u.
pub fn integrate_alpha_gaussian(
    a_alpha: &SymMat2,
    b0: &CVec2,
    b_mat: &Mat2c,
) -> Result<AlphaIntegral> {
    if !a_alpha.re_is_positive_definite() {
        return Err(Error::NonIntegrable(
            "alpha-space Gaussian is not integrable".into(),
        ));
    }
    let inv = a_alpha.inverse()?;
    let coeff = gaussian_normalizer(a_alpha, b0)?;
    let inv_b0 = inv.mul_vec(b0);
    let lin = b_mat.transpose_mul_vec(&inv_b0);
    let quad_reduction = b_mat.congruence(&inv);
    Ok(AlphaIntegral {
        coeff,
        lin,
        quad_reduction,
    })
}

/// A finite sum of Gaussian terms carrying the Wigner function (or Weyl
/// symbol) of an operator.
#[derive(Debug, Clone)]
pub struct WignerRep {
    pub terms: Vec<GaussTerm>,
    pub label: String,
    /// Asserts that the represented function is real-valued on the plane.
    pub hermitian: bool,
}

impl WignerRep {
    /// Assemble a representation, pruning terms whose absolute-value envelope
    /// contributes less than 1e-15 of the running total and validating the
    /// hermiticity claim on a coarse sample grid.
    pub fn from_terms(terms: Vec<GaussTerm>, label: impl Into<String>, hermitian: bool) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::DegenerateState("representation with no terms".into()));
        }
        let envelopes: Vec<f64> = terms
            .iter()
            .map(term_envelope_integral)
            .collect::<Result<_>>()?;
        let total: f64 = envelopes.iter().sum();
        let kept: Vec<GaussTerm> = terms
            .into_iter()
            .zip(envelopes)
            .filter(|(_, e)| *e >= PRUNE_REL * total)
            .map(|(t, _)| t)
            .collect();
        if kept.is_empty() {
            return Err(Error::DegenerateState(
                "all terms pruned; state is numerically zero".into(),
            ));
        }
        let rep = Self {
            terms: kept,
            label: label.into(),
            hermitian,
        };
        if rep.hermitian {
            rep.check_hermitian_on_samples()?;
        }
        Ok(rep)
    }

    fn check_hermitian_on_samples(&self) -> Result<()> {
        for ix in 0..5 {
            for ip in 0..5 {
                let x = -3.0 + 1.5 * ix as f64;
                let p = -3.0 + 1.5 * ip as f64;
                let (value, magsum) = self.eval_complex(x, p);
                if value.im.abs() > HERMITICITY_TOL * magsum {
                    return Err(Error::HermiticityViolation(format!(
                        "imaginary residual {:.3e} at ({x}, {p}) exceeds {:.1e} of term magnitude {:.3e}",
                        value.im, HERMITICITY_TOL, magsum
                    )));
                }
            }
        }
        Ok(())
    }

    /// Complex sum over terms plus the sum of term magnitudes at the point
    /// (the scale against which imaginary residuals are judged).
    pub fn eval_complex(&self, x: f64, p: f64) -> (C64, f64) {
        let mut acc = ZERO;
        let mut magsum = 0.0;
        for t in &self.terms {
            let v = t.eval(x, p);
            acc += v;
            magsum += v.norm();
        }
        (acc, magsum)
    }

    /// Multiply all coefficients by a real scalar.
    pub fn scaled(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| GaussTerm {
                coeff: t.coeff * s,
                ..t.clone()
            })
            .collect();
        Self {
            terms,
            label: self.label.clone(),
            hermitian: self.hermitian,
        }
    }

    /// Weighted concatenation of several representations.
    pub fn combine(
        parts: &[(f64, &WignerRep)],
        label: impl Into<String>,
        hermitian: bool,
    ) -> Result<Self> {
        let mut terms = Vec::new();
        for (w, rep) in parts {
            if *w == 0.0 {
                continue;
            }
            terms.extend(rep.scaled(*w).terms);
        }
        Self::from_terms(terms, label, hermitian)
    }

    /// Per-term derivative along an axis. Derivatives of a real function are
    /// real, so the hermitian flag carries over.
    pub fn diff(&self, axis: Axis) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| term_diff(t, axis))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            terms,
            label: format!("d/d{} {}", if axis == Axis::X { "x" } else { "p" }, self.label),
            hermitian: self.hermitian,
        })
    }

    /// Deterministic content key: the bit patterns of every float in term
    /// order. Used to order operands so that symmetric bilinear forms are
    /// evaluated by a literally identical float program for either argument
    /// order.
    fn content_key(&self) -> Vec<u64> {
        let mut key = Vec::with_capacity(self.terms.len() * 16);
        for t in &self.terms {
            for c in [
                t.coeff, t.quad.xx, t.quad.xp, t.quad.pp, t.lin.x, t.lin.p,
            ] {
                key.push(c.re.to_bits());
                key.push(c.im.to_bits());
            }
            for (&(i, j), c) in t.poly.iter() {
                key.push(((i as u64) << 32) | j as u64);
                key.push(c.re.to_bits());
                key.push(c.im.to_bits());
            }
        }
        key
    }
}

/// Full-plane integral of the representation; the value must be real.
pub fn rep_integral_complex(r: &WignerRep) -> Result<(C64, f64)> {
    let mut acc = ZERO;
    let mut scale = 0.0;
    for t in &r.terms {
        let v = term_integral(t)?;
        acc += v;
        scale += v.norm();
    }
    Ok((acc, scale))
}

/// Full-plane integral with the hermiticity residual enforced.
pub fn rep_integral(r: &WignerRep) -> Result<f64> {
    let (total, scale) = rep_integral_complex(r)?;
    if total.im.abs() > HERMITICITY_TOL * scale.max(1.0) {
        return Err(Error::HermiticityViolation(format!(
            "imaginary residual {:.3e} in the trace integral (scale {:.3e})",
            total.im, scale
        )));
    }
    Ok(total.re)
}

/// Real value of the represented function at a point.
pub fn rep_eval(r: &WignerRep, x: f64, p: f64) -> Result<f64> {
    if !r.hermitian {
        return Err(Error::HermiticityViolation(
            "rep_eval requires a hermitian representation".into(),
        ));
    }
    let (value, magsum) = r.eval_complex(x, p);
    if magsum > 0.0 && value.im.abs() > HERMITICITY_TOL * magsum {
        return Err(Error::HermiticityViolation(format!(
            "imaginary residual {:.3e} at ({x}, {p}) against magnitude {:.3e}",
            value.im, magsum
        )));
    }
    Ok(value.re)
}

fn pairwise_integral(terms1: &[GaussTerm], terms2: &[GaussTerm]) -> Result<(C64, f64)> {
    let mut acc = ZERO;
    let mut scale = 0.0;
    for t1 in terms1 {
        for t2 in terms2 {
            let v = term_integral(&term_mul(t1, t2)?)?;
            acc += v;
            scale += v.norm();
        }
    }
    Ok((acc, scale))
}

fn real_part_checked(value: C64, scale: f64, what: &str) -> Result<f64> {
    if value.im.abs() > HERMITICITY_TOL * scale.max(1.0) {
        return Err(Error::HermiticityViolation(format!(
            "imaginary residual {:.3e} in {what} (scale {:.3e})",
            value.im, scale
        )));
    }
    Ok(value.re)
}

/// Overlap integral of two Wigner functions over the plane. The operands are
/// put into a canonical order first so the result is bit-for-bit symmetric.
pub fn rep_overlap(r1: &WignerRep, r2: &WignerRep) -> Result<f64> {
    let (a, b) = if r1.content_key() <= r2.content_key() {
        (r1, r2)
    } else {
        (r2, r1)
    };
    let (value, scale) = pairwise_integral(&a.terms, &b.terms)?;
    real_part_checked(value, scale, "rep_overlap")
}

/// Gradient overlap: integral of grad W1 . grad W2 over the plane.
pub fn rep_grad_overlap(r1: &WignerRep, r2: &WignerRep) -> Result<f64> {
    let (a, b) = if r1.content_key() <= r2.content_key() {
        (r1, r2)
    } else {
        (r2, r1)
    };
    let ax = a.diff(Axis::X)?;
    let ap = a.diff(Axis::P)?;
    let bx = b.diff(Axis::X)?;
    let bp = b.diff(Axis::P)?;
    let (vx, sx) = pairwise_integral(&ax.terms, &bx.terms)?;
    let (vp, sp) = pairwise_integral(&ap.terms, &bp.terms)?;
    real_part_checked(vx + vp, sx + sp, "rep_grad_overlap")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn vacuum_term() -> GaussTerm {
        make_term(
            c(2.0 / PI, 0.0),
            SymMat2::scaled_identity(4.0),
            CVec2::zero(),
            Poly2::one(),
        )
        .unwrap()
    }

    fn fock1_term() -> GaussTerm {
        // (2/pi)(4x^2 + 4p^2 - 1) e^{-2r^2}
        let poly = Poly2::from_monomials(&[
            (2, 0, c(4.0, 0.0)),
            (0, 2, c(4.0, 0.0)),
            (0, 0, c(-1.0, 0.0)),
        ])
        .unwrap();
        make_term(
            c(2.0 / PI, 0.0),
            SymMat2::scaled_identity(4.0),
            CVec2::zero(),
            poly,
        )
        .unwrap()
    }

    fn thermal_term(v: f64) -> GaussTerm {
        make_term(
            c(2.0 / (PI * v), 0.0),
            SymMat2::scaled_identity(4.0 / v),
            CVec2::zero(),
            Poly2::one(),
        )
        .unwrap()
    }

    /// Brute-force 2D Simpson quadrature of a complex integrand over
    /// [-l, l]^2; the independent oracle for the closed-form integrals.
    fn simpson2d<F: Fn(f64, f64) -> C64>(f: F, l: f64, n: usize) -> C64 {
        assert!(n % 2 == 1);
        let h = 2.0 * l / (n - 1) as f64;
        let w = |i: usize| -> f64 {
            if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        };
        let mut acc = C64::new(0.0, 0.0);
        for iy in 0..n {
            let y = -l + iy as f64 * h;
            let mut row = C64::new(0.0, 0.0);
            for ix in 0..n {
                let x = -l + ix as f64 * h;
                row += w(ix) * f(x, y);
            }
            acc += w(iy) * row;
        }
        acc * (h / 3.0) * (h / 3.0)
    }

    #[test]
    fn vacuum_term_is_normalized() {
        let t = vacuum_term();
        assert!((t.eval(0.0, 0.0) - c(2.0 / PI, 0.0)).norm() < 1e-15);
        let integral = term_integral(&t).unwrap();
        assert!((integral - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn indefinite_real_part_is_rejected() {
        let a = SymMat2::new(c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let err = make_term(c(1.0, 0.0), a, CVec2::zero(), Poly2::one()).unwrap_err();
        assert!(matches!(err, Error::NonIntegrable(_)));
    }

    #[test]
    fn complex_quad_with_pd_real_part_is_accepted() {
        // Re(A) = 2 I is positive definite regardless of the imaginary part.
        let a = SymMat2::new(c(2.0, 0.0), c(0.0, 1.0), c(2.0, 0.0));
        let b = CVec2::new(c(1.0, 0.0), c(0.0, -1.0));
        let poly = Poly2::monomial(1, 1, c(1.0, 0.0)).unwrap();
        assert!(make_term(c(1.0, 0.0), a, b, poly).is_ok());
    }

    #[test]
    fn vacuum_product_doubles_the_exponent() {
        let t = vacuum_term();
        let sq = term_mul(&t, &t).unwrap();
        assert!((sq.coeff - c(4.0 / (PI * PI), 0.0)).norm() < 1e-15);
        assert_eq!(sq.quad, SymMat2::scaled_identity(8.0));
        assert_eq!(sq.lin, CVec2::zero());
    }

    #[test]
    fn constant_term_cannot_be_constructed() {
        // A cheap guard against identity-like misuse: A = 0 is not integrable.
        let err = make_term(
            c(1.0, 0.0),
            SymMat2::scaled_identity(0.0),
            CVec2::zero(),
            Poly2::one(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonIntegrable(_)));
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let t1 = fock1_term();
        let t2 = thermal_term(3.0);
        let prod = term_mul(&t1, &t2).unwrap();
        assert_eq!(prod.degree(), 2);
        assert_eq!(prod.quad, t1.quad.add(&t2.quad));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let x = rng.gen_range(-2.0..2.0);
            let p = rng.gen_range(-2.0..2.0);
            let lhs = prod.eval(x, p);
            let rhs = t1.eval(x, p) * t2.eval(x, p);
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1e-30));
        }
    }

    #[test]
    fn derivative_of_vacuum_is_minus_four_x() {
        let d = term_diff(&vacuum_term(), Axis::X).unwrap();
        // poly must be -4x
        assert!((d.eval(0.5, 0.3) - (-4.0 * 0.5) * vacuum_term().eval(0.5, 0.3)).norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // A dyad-like term with b = (0, 4i): the derivative gains 4i in the
        // polynomial factor.
        let t = make_term(
            c(0.4, 0.1),
            SymMat2::scaled_identity(4.0),
            CVec2::new(c(0.0, 0.0), c(0.0, 4.0)),
            Poly2::one(),
        )
        .unwrap();
        let dp = term_diff(&t, Axis::P).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for _ in 0..5 {
            let x = rng.gen_range(-1.5..1.5);
            let p = rng.gen_range(-1.5..1.5);
            let numeric = (t.eval(x, p + h) - t.eval(x, p - h)) / (2.0 * h);
            let exact = dp.eval(x, p);
            assert!(
                (numeric - exact).norm() < 1e-6 * exact.norm().max(1e-12),
                "finite-difference mismatch at ({x}, {p})"
            );
        }
    }

    #[test]
    fn second_derivative_of_vacuum_at_origin() {
        let dxx = term_diff(&term_diff(&vacuum_term(), Axis::X).unwrap(), Axis::X).unwrap();
        let expected = -4.0 * (2.0 / PI);
        assert!((dxx.eval(0.0, 0.0) - c(expected, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn moment_normalizations() {
        let a = SymMat2::scaled_identity(1.0);
        let b = CVec2::zero();
        let m00 = gaussian_moment(&a, &b, (0, 0)).unwrap();
        assert!((m00 - c(2.0 * PI, 0.0)).norm() < 1e-12);
        let m20 = gaussian_moment(&a, &b, (2, 0)).unwrap();
        assert!((m20 - c(2.0 * PI, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn complex_determinant_branch_matches_quadrature() {
        let a = SymMat2::new(c(2.0, -1.0), c(0.0, 0.0), c(2.0, 0.0));
        let b = CVec2::zero();
        let closed = gaussian_moment(&a, &b, (0, 0)).unwrap();
        let brute = simpson2d(
            |x, p| {
                (-0.5 * (a.xx * x * x + 2.0 * a.xp * x * p + a.pp * p * p)).exp()
            },
            8.0,
            801,
        );
        assert!(
            (closed - brute).norm() < 1e-8 * closed.norm(),
            "closed {closed} vs quadrature {brute}"
        );
        // and the principal branch agrees with ((2-i) * 2)^(-1/2)
        let expected = 2.0 * PI * (c(2.0, -1.0) * 2.0).powf(-0.5);
        assert!((closed - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn moment_recurrence_matches_direct_second_moment() {
        let a = SymMat2::new(c(2.0, 0.3), c(0.4, -0.1), c(3.0, 0.2));
        let b = CVec2::new(c(0.7, 0.2), c(-0.4, 0.5));
        let sigma = a.inverse().unwrap();
        let mu = sigma.mul_vec(&b);
        let m00 = gaussian_moment(&a, &b, (0, 0)).unwrap();
        let m20 = gaussian_moment(&a, &b, (2, 0)).unwrap();
        let expected = (mu.x * mu.x + sigma.xx) * m00;
        assert!((m20 - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = SymMat2::new(c(1e-16, 0.0), c(0.0, 0.0), c(1e-16, 0.0));
        let err = gaussian_moment(&a, &CVec2::zero(), (0, 0)).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
    }

    #[test]
    fn odd_moment_of_centered_gaussian_vanishes() {
        let t = make_term(
            c(1.0, 0.0),
            SymMat2::scaled_identity(2.0),
            CVec2::zero(),
            Poly2::monomial(1, 0, c(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        assert!(term_integral(&t).unwrap().norm() < 1e-15);
    }

    #[test]
    fn fock1_term_is_normalized() {
        let brute = simpson2d(|x, p| fock1_term().eval(x, p), 6.0, 401);
        let closed = term_integral(&fock1_term()).unwrap();
        assert!((closed - c(1.0, 0.0)).norm() < 1e-12);
        assert!((brute - closed).norm() < 1e-9);
    }

    #[test]
    fn random_terms_match_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..20 {
            let a11: f64 = rng.gen_range(0.5..4.0);
            let a22: f64 = rng.gen_range(0.5..4.0);
            let a12 = rng.gen_range(-0.9..0.9) * (a11 * a22).sqrt();
            let quad = SymMat2::new(
                c(a11, rng.gen_range(-2.0..2.0)),
                c(a12, rng.gen_range(-1.0..1.0)),
                c(a22, rng.gen_range(-2.0..2.0)),
            );
            let lin = CVec2::new(
                c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
                c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            );
            let poly = Poly2::from_monomials(&[
                (0, 0, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
                (
                    rng.gen_range(0..3),
                    rng.gen_range(0..3),
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                ),
            ])
            .unwrap();
            let term = make_term(c(1.0, 0.0), quad, lin, poly).unwrap();
            let closed = term_integral(&term).unwrap();
            // box wide enough for eigmin >= 0.28 (0.5 - 0.9 * cross) exponents
            let brute = simpson2d(|x, p| term.eval(x, p), 18.0, 1201);
            assert!(
                (closed - brute).norm() <= 1e-6 * closed.norm().max(1e-9),
                "case {case}: closed {closed} vs quadrature {brute}"
            );
        }
    }

    #[test]
    fn vacuum_overlap_and_gradient_overlap() {
        let vac = WignerRep::from_terms(vec![vacuum_term()], "vacuum", true).unwrap();
        let overlap = rep_overlap(&vac, &vac).unwrap();
        assert!((overlap - 1.0 / PI).abs() < 1e-14);
        let grad = rep_grad_overlap(&vac, &vac).unwrap();
        assert!((grad - 4.0 / PI).abs() < 1e-13);
    }

    #[test]
    fn fock1_gradient_overlap_pins_chi2_six() {
        let f1 = WignerRep::from_terms(vec![fock1_term()], "fock(1)", true).unwrap();
        let grad = rep_grad_overlap(&f1, &f1).unwrap();
        assert!((grad - 12.0 / PI).abs() < 1e-12);
        let brute = simpson2d(
            |x, p| {
                let dx = term_diff(&fock1_term(), Axis::X).unwrap();
                let dp = term_diff(&fock1_term(), Axis::P).unwrap();
                dx.eval(x, p) * dx.eval(x, p) + dp.eval(x, p) * dp.eval(x, p)
            },
            6.0,
            301,
        );
        assert!((brute.re - grad).abs() < 1e-8);
    }

    #[test]
    fn thermal_gradient_overlap() {
        let v = 3.0;
        let th = WignerRep::from_terms(vec![thermal_term(v)], "thermal", true).unwrap();
        let grad = rep_grad_overlap(&th, &th).unwrap();
        assert!((grad - 4.0 / (PI * v * v)).abs() < 1e-14);
    }

    #[test]
    fn overlap_is_exactly_symmetric() {
        let f1 = WignerRep::from_terms(vec![fock1_term()], "fock(1)", true).unwrap();
        let th = WignerRep::from_terms(vec![thermal_term(2.5)], "thermal", true).unwrap();
        let ab = rep_overlap(&f1, &th).unwrap();
        let ba = rep_overlap(&th, &f1).unwrap();
        assert_eq!(ab.to_bits(), ba.to_bits());
        let gab = rep_grad_overlap(&f1, &th).unwrap();
        let gba = rep_grad_overlap(&th, &f1).unwrap();
        assert_eq!(gab.to_bits(), gba.to_bits());
    }

    #[test]
    fn overlaps_are_bilinear_in_term_coefficients() {
        let f1 = WignerRep::from_terms(vec![fock1_term()], "fock(1)", true).unwrap();
        let th = WignerRep::from_terms(vec![thermal_term(2.0)], "thermal", true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let s = rng.gen_range(0.1..3.0);
            let t = rng.gen_range(0.1..3.0);
            let base = rep_overlap(&f1, &th).unwrap();
            let scaled = rep_overlap(&f1.scaled(s), &th.scaled(t)).unwrap();
            assert!((scaled - s * t * base).abs() < 1e-12 * base.abs().max(1.0));
            let gbase = rep_grad_overlap(&f1, &th).unwrap();
            let gscaled = rep_grad_overlap(&f1.scaled(s), &th.scaled(t)).unwrap();
            assert!((gscaled - s * t * gbase).abs() < 1e-12 * gbase.abs().max(1.0));
        }
    }

    #[test]
    fn scaled_rep_integral_is_linear() {
        let vac = WignerRep::from_terms(vec![vacuum_term()], "vacuum", true).unwrap();
        let half = vac.scaled(0.5);
        assert!((rep_integral(&half).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rep_eval_rejects_non_hermitian_flag() {
        let mut rep = WignerRep::from_terms(vec![vacuum_term()], "vacuum", true).unwrap();
        rep.hermitian = false;
        assert!(matches!(
            rep_eval(&rep, 0.0, 0.0),
            Err(Error::HermiticityViolation(_))
        ));
    }

    #[test]
    fn alpha_integration_reproduces_displaced_thermal() {
        // Integrating the coherent-projector symbol against P_th(V, d) must
        // give the closed-form displaced thermal Gaussian.
        let (v, d) = (3.0, 0.8);
        let a_alpha = SymMat2::scaled_identity(4.0 / (v - 1.0) + 4.0);
        let b0 = CVec2::real(4.0 * d / (v - 1.0), 0.0);
        let coupling = Mat2c::scaled_identity(4.0);
        let inner = integrate_alpha_gaussian(&a_alpha, &b0, &coupling).unwrap();
        let prefactor = 2.0 / (PI * (v - 1.0)) * (-2.0 * d * d / (v - 1.0)).exp() * (2.0 / PI);
        let coeff = prefactor * inner.coeff;
        let quad = SymMat2::scaled_identity(4.0).sub(&inner.quad_reduction);
        let expected_coeff = 2.0 / (PI * v) * (-2.0 * d * d / v).exp();
        assert!((coeff - c(expected_coeff, 0.0)).norm() < 1e-14);
        assert!((quad.xx - c(4.0 / v, 0.0)).norm() < 1e-13);
        assert!((quad.xp).norm() < 1e-14);
        assert!((inner.lin.x - c(4.0 * d / v, 0.0)).norm() < 1e-13);
    }
}
