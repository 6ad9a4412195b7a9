//! Truncated Fock-basis density matrices, the photon-loss Lindblad purity
//! slope, and displaced-parity Wigner evaluation.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{MeasureReport, Method};
use crate::states::{Parity, StateSpec};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Construction fails when more probability mass than this sits above n_max.
pub const FOCK_TAIL_LIMIT: f64 = 1e-8;

/// Hard cap on the truncation dimension.
pub const FOCK_N_CAP: usize = 200;

/// Points per axis of the Simpson rule used for the numeric P-function fills.
const P_INTEGRAL_POINTS: usize = 401;

/// Row blocks for the parallel fill; fixed so the reduction order (and hence
/// the bits of the result) never depends on the thread count.
const FILL_BLOCKS: usize = 16;

/// A density matrix truncated to the span of |0> .. |n_max>.
#[derive(Debug, Clone)]
pub struct FockMatrix {
    pub n_max: usize,
    pub elements: Array2<C64>,
    /// Estimated probability mass above the truncation.
    pub tail_bound: f64,
}

impl FockMatrix {
    fn new(elements: Array2<C64>, tail_bound: f64) -> Result<Self> {
        let n_max = elements.nrows() - 1;
        if tail_bound > FOCK_TAIL_LIMIT {
            return Err(Error::TailTooLarge {
                tail: tail_bound,
                limit: FOCK_TAIL_LIMIT,
            });
        }
        Ok(Self {
            n_max,
            elements,
            tail_bound,
        })
    }

    pub fn trace(&self) -> C64 {
        (0..=self.n_max).map(|n| self.elements[(n, n)]).sum()
    }

    /// Largest hermiticity residual |rho_mn - conj(rho_nm)|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for m in 0..=self.n_max {
            for n in m..=self.n_max {
                let r = (self.elements[(m, n)] - self.elements[(n, m)].conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Positive semidefiniteness within `tol`, tested through a Cholesky
    /// factorization of rho + tol * I (it exists iff every eigenvalue of rho
    /// exceeds -tol, up to rounding).
    pub fn is_psd_within(&self, tol: f64) -> bool {
        let n = self.n_max + 1;
        let mut a = self.elements.clone();
        for i in 0..n {
            a[(i, i)] += C64::new(tol, 0.0);
        }
        for k in 0..n {
            let mut pivot = a[(k, k)].re;
            for j in 0..k {
                pivot -= a[(k, j)].norm_sqr();
            }
            if pivot <= 0.0 {
                return false;
            }
            let l = pivot.sqrt();
            a[(k, k)] = C64::new(l, 0.0);
            for i in (k + 1)..n {
                let mut v = a[(i, k)];
                for j in 0..k {
                    v -= a[(i, j)] * a[(k, j)].conj();
                }
                a[(i, k)] = v / l;
            }
        }
        true
    }
}

/// Coherent-state coefficients <n|beta> for n <= n_max, built incrementally so
/// no factorial or power ever overflows.
fn coherent_coeffs(beta: C64, n_max: usize) -> Vec<C64> {
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0));
    for n in 0..n_max {
        let next = c[n] * beta / ((n + 1) as f64).sqrt();
        c.push(next);
    }
    c
}

fn outer_product(v: &[C64]) -> Array2<C64> {
    let n = v.len();
    let mut m = Array2::from_elem((n, n), ZERO);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = v[i] * v[j].conj();
        }
    }
    m
}

/// Thermal occupation (1 - q) q^n with q = (V - 1) / (V + 1).
fn thermal_diag(v: f64, n_max: usize) -> (Array2<C64>, f64) {
    let q = (v - 1.0) / (v + 1.0);
    let n = n_max + 1;
    let mut m = Array2::from_elem((n, n), ZERO);
    let mut occ = 1.0 - q;
    for i in 0..n {
        m[(i, i)] = C64::new(occ, 0.0);
        occ *= q;
    }
    let tail = if q == 0.0 { 0.0 } else { q.powi(n_max as i32 + 1) };
    (m, tail)
}

/// Apply the parity operator on the right: (A Pi)_mn = (-1)^n A_mn.
fn parity_right(m: &Array2<C64>) -> Array2<C64> {
    let mut out = m.clone();
    for ((_, j), v) in out.indexed_iter_mut() {
        if j % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// Apply the parity operator on the left: (Pi A)_mn = (-1)^m A_mn.
fn parity_left(m: &Array2<C64>) -> Array2<C64> {
    let mut out = m.clone();
    for ((i, _), v) in out.indexed_iter_mut() {
        if i % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// Numeric fill of rho_th(V, d)_mn = integral of P_th(V, d) <m|a><a|n> over
/// the alpha plane by 2D composite Simpson over six P_th standard deviations,
/// together with the (truncation-free) trace of sigma(V, d):
/// Tr sigma = integral of P_th(alpha) <-alpha|alpha> = integral P_th exp(-2|alpha|^2).
///
/// sigma itself follows from the same integral because <-alpha|n> =
/// (-1)^n <alpha|n>: sigma(V, d) = rho_th(V, d) Pi elementwise.
fn fill_thermal_p_integral(v: f64, d: f64, n_max: usize) -> (Array2<C64>, f64) {
    let dim = n_max + 1;
    let s = ((v - 1.0) / 4.0).sqrt();
    let half = 6.0 * s;
    let n_pts = P_INTEGRAL_POINTS;
    let h = 2.0 * half / (n_pts - 1) as f64;
    let mut w1 = vec![0.0; n_pts];
    for (i, wi) in w1.iter_mut().enumerate() {
        *wi = if i == 0 || i == n_pts - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        } * h
            / 3.0;
    }
    let prefactor = 2.0 / (std::f64::consts::PI * (v - 1.0));

    let block_len = n_pts.div_ceil(FILL_BLOCKS);
    let blocks: Vec<(Array2<C64>, f64)> = (0..FILL_BLOCKS)
        .into_par_iter()
        .map(|blk| {
            let mut acc = Array2::from_elem((dim, dim), ZERO);
            let mut sigma_trace = 0.0;
            let lo = blk * block_len;
            let hi = ((blk + 1) * block_len).min(n_pts);
            for iy in lo..hi {
                let ay = -half + iy as f64 * h;
                for ix in 0..n_pts {
                    let ax = d - half + ix as f64 * h;
                    let alpha = C64::new(ax, ay);
                    let p_th = prefactor
                        * (-2.0 * ((ax - d) * (ax - d) + ay * ay) / (v - 1.0)).exp();
                    let wt = w1[ix] * w1[iy] * p_th;
                    if wt == 0.0 {
                        continue;
                    }
                    sigma_trace += wt * (-2.0 * alpha.norm_sqr()).exp();
                    let scaled: Vec<C64> = coherent_coeffs(alpha, n_max)
                        .into_iter()
                        .map(|c| c * wt.sqrt())
                        .collect();
                    // upper triangle only; mirrored after the reduction
                    for m in 0..dim {
                        let cm = scaled[m];
                        for n in m..dim {
                            acc[(m, n)] += cm * scaled[n].conj();
                        }
                    }
                }
            }
            (acc, sigma_trace)
        })
        .collect();

    let mut m = Array2::from_elem((dim, dim), ZERO);
    let mut sigma_trace = 0.0;
    for (acc, st) in &blocks {
        m += acc;
        sigma_trace += st;
    }
    for i in 0..dim {
        for j in 0..i {
            m[(i, j)] = m[(j, i)].conj();
        }
    }
    (m, sigma_trace)
}

fn cat_vector(beta: C64, parity: Parity, n_max: usize) -> (Vec<C64>, f64) {
    let overlap = (-2.0 * beta.norm_sqr()).exp();
    let (sign, norm_sq) = match parity {
        Parity::Even => (1.0, 2.0 * (1.0 + overlap)),
        Parity::Odd => (-1.0, 2.0 * (1.0 - overlap)),
    };
    let plus = coherent_coeffs(beta, n_max);
    let minus = coherent_coeffs(-beta, n_max);
    let norm = norm_sq.sqrt();
    let v: Vec<C64> = plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| (a + sign * b) / norm)
        .collect();
    let captured: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    (v, (1.0 - captured).max(0.0))
}

/// Build the truncated number-basis density matrix of a state spec.
///
/// `sigma_interference` alone is not a density operator (non-hermitian trace
/// structure for d != 0) and is rejected; it enters the oracle only through
/// `rho_M`.
pub fn fock_state_matrix(spec: &StateSpec, n_max: usize) -> Result<FockMatrix> {
    if n_max > FOCK_N_CAP {
        return Err(Error::InvalidSpec(format!(
            "n_max = {n_max} exceeds the cap {FOCK_N_CAP}"
        )));
    }
    spec.validate()?;
    let dim = n_max + 1;
    match spec {
        StateSpec::Coherent { beta } => {
            let c = coherent_coeffs(C64::new(beta[0], beta[1]), n_max);
            let captured: f64 = c.iter().map(|x| x.norm_sqr()).sum();
            FockMatrix::new(outer_product(&c), (1.0 - captured).max(0.0))
        }
        StateSpec::Fock { n } => {
            let n = *n as usize;
            if n > n_max {
                return Err(Error::TailTooLarge {
                    tail: 1.0,
                    limit: FOCK_TAIL_LIMIT,
                });
            }
            let mut m = Array2::from_elem((dim, dim), ZERO);
            m[(n, n)] = C64::new(1.0, 0.0);
            FockMatrix::new(m, 0.0)
        }
        StateSpec::DisplacedThermal { v, d } => {
            if *v == 1.0 {
                return fock_state_matrix(&StateSpec::Coherent { beta: [*d, 0.0] }, n_max);
            }
            if *d == 0.0 {
                let (m, tail) = thermal_diag(*v, n_max);
                return FockMatrix::new(m, tail);
            }
            let (m, _) = fill_thermal_p_integral(*v, *d, n_max);
            let trace = (0..dim).map(|i| m[(i, i)].re).sum::<f64>();
            FockMatrix::new(m, (1.0 - trace).max(0.0))
        }
        StateSpec::SigmaInterference { .. } => Err(Error::InvalidSpec(
            "sigma_interference is not a density operator; use rho_M".into(),
        )),
        StateSpec::RhoM { v, d } => {
            if *v == 1.0 {
                return fock_state_matrix(
                    &StateSpec::Cat {
                        beta: [*d, 0.0],
                        parity: Parity::Even,
                    },
                    n_max,
                );
            }
            let (m, sigma_trace) = fill_thermal_p_integral(*v, *d, n_max);
            // rho_th(V,-d) = Pi rho_th(V,d) Pi, sigma(V,d) = rho_th(V,d) Pi,
            // sigma(V,-d) = Pi rho_th(V,d); all four pieces from one fill.
            let sum =
                &m + &parity_left(&parity_right(&m)) + &parity_right(&m) + &parity_left(&m);
            let norm = 2.0 + 2.0 * sigma_trace;
            let rho = sum.mapv(|x| x / norm);
            let trace = (0..dim).map(|i| rho[(i, i)].re).sum::<f64>();
            FockMatrix::new(rho, (1.0 - trace).max(0.0))
        }
        StateSpec::RhoSmallM { p, v } => {
            let photon = fock_state_matrix(&StateSpec::Fock { n: 1 }, n_max)?;
            let (thermal, t_tail) = thermal_diag(*v, n_max);
            let m = photon.elements.mapv(|x| x * *p) + thermal.mapv(|x| x * (1.0 - *p));
            FockMatrix::new(m, (1.0 - p) * t_tail)
        }
        StateSpec::Cat { beta, parity } => {
            let (v, tail) = cat_vector(C64::new(beta[0], beta[1]), *parity, n_max);
            FockMatrix::new(outer_product(&v), tail)
        }
        StateSpec::Mixture { components } => {
            let mut m = Array2::from_elem((dim, dim), ZERO);
            let mut tail = 0.0;
            for (w, sub) in components {
                let part = fock_state_matrix(sub, n_max)?;
                m += &part.elements.mapv(|x| x * *w);
                tail += w * part.tail_bound;
            }
            FockMatrix::new(m, tail)
        }
    }
}

/// Purity P = Tr(rho^2) and the Lindblad slope
/// Pdot = 2 Tr(rho (a rho a+ - 1/2 {a+a, rho})) for photon loss at unit rate.
pub fn fock_purity_and_slope(m: &FockMatrix) -> (f64, f64) {
    let dim = m.n_max + 1;
    let rho = &m.elements;
    let mut purity = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            purity += (rho[(i, j)] * rho[(j, i)]).re;
        }
    }
    // L(rho)_mn = sqrt((m+1)(n+1)) rho_{m+1,n+1} - (m + n)/2 rho_mn
    let mut slope = C64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            let mut l = -0.5 * ((i + j) as f64) * rho[(i, j)];
            if i + 1 < dim && j + 1 < dim {
                l += (((i + 1) * (j + 1)) as f64).sqrt() * rho[(i + 1, j + 1)];
            }
            slope += rho[(j, i)] * l;
        }
    }
    (purity, 2.0 * slope.re)
}

/// Matrix elements <m|D(alpha)|n> of the displacement operator, via the
/// bounded two-term recurrence (every entry of a unitary matrix has modulus
/// at most one, so nothing can overflow).
pub fn displacement_matrix(alpha: C64, n_max: usize) -> Array2<C64> {
    let dim = n_max + 1;
    let mut d = Array2::from_elem((dim, dim), ZERO);
    let col0 = coherent_coeffs(alpha, n_max);
    for m in 0..dim {
        d[(m, 0)] = col0[m];
    }
    let ac = alpha.conj();
    for n in 0..n_max {
        let scale = 1.0 / ((n + 1) as f64).sqrt();
        for m in 0..dim {
            let raise = if m > 0 {
                (m as f64).sqrt() * d[(m - 1, n)]
            } else {
                ZERO
            };
            d[(m, n + 1)] = (raise - ac * d[(m, n)]) * scale;
        }
    }
    d
}

/// Displaced-parity Wigner value
/// W(alpha) = (2/pi) Tr(rho D(alpha) Pi D(alpha)+) at alpha = x + i p.
pub fn fock_wigner_point(m: &FockMatrix, x: f64, p: f64) -> f64 {
    let alpha = C64::new(x, p);
    let d = displacement_matrix(alpha, m.n_max);
    let t = m.elements.dot(&d);
    let mut acc = ZERO;
    for col in 0..=m.n_max {
        let mut diag = ZERO;
        for row in 0..=m.n_max {
            diag += d[(row, col)].conj() * t[(row, col)];
        }
        if col % 2 == 0 {
            acc += diag;
        } else {
            acc -= diag;
        }
    }
    std::f64::consts::FRAC_2_PI * acc.re
}

/// Measure report through the Fock route at a caller-chosen truncation.
pub fn fock_report(spec: &StateSpec, n_max: usize) -> Result<MeasureReport> {
    let matrix = fock_state_matrix(spec, n_max)?;
    let (p, pdot) = fock_purity_and_slope(&matrix);
    let label = crate::states::build(spec)?.label;
    MeasureReport::from_purity_slope(p, pdot, Method::Fock, &label)
}

/// Fock-route report with the truncation grown until the tail bound drops
/// below 1e-10 (or the cap is reached while still satisfying the hard limit).
pub fn fock_report_auto(spec: &StateSpec) -> Result<MeasureReport> {
    let mut last_err = None;
    for n_max in [40, 80, 120, 160, FOCK_N_CAP] {
        match fock_state_matrix(spec, n_max) {
            Ok(matrix) => {
                if matrix.tail_bound < 1e-10 || n_max == FOCK_N_CAP {
                    let (p, pdot) = fock_purity_and_slope(&matrix);
                    let label = crate::states::build(spec)?.label;
                    return MeasureReport::from_purity_slope(p, pdot, Method::Fock, &label);
                }
            }
            Err(e @ Error::TailTooLarge { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::TailTooLarge {
        tail: f64::NAN,
        limit: FOCK_TAIL_LIMIT,
    }))
}
