//! Brute-force 2D composite-Simpson quadrature over an automatically sized
//! phase-space box.

use rayon::prelude::*;

use crate::algebra::{Axis, WignerRep, HERMITICITY_TOL};
use crate::error::{Error, Result};
use crate::measures::{MeasureReport, Method};

/// Hard cap on points per axis; beyond it the grid route is declared
/// infeasible and the closed form stands alone (expected for V >~ 1e4).
pub const GRID_POINTS_CAP: usize = 8192;

/// Per-term boundary envelope target for choosing the box half-width.
const BOUNDARY_ENVELOPE: f64 = 1e-16;

/// Points per finest feature (interference fringe or sharp Gaussian width).
const POINTS_PER_FEATURE: f64 = 12.0;

/// A square integration domain [-L, L]^2 sampled on an odd uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Half-width L of the box.
    pub extent: f64,
    /// Points per axis; odd so the origin lies on the grid.
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(extent: f64, points_per_axis: usize) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "grid extent must be positive, got {extent}"
            )));
        }
        if points_per_axis < 65 || points_per_axis % 2 == 0 {
            return Err(Error::InvalidSpec(format!(
                "points per axis must be odd and >= 65, got {points_per_axis}"
            )));
        }
        Ok(Self {
            extent,
            points_per_axis,
        })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.extent / (self.points_per_axis - 1) as f64
    }
}

/// Choose a box that suppresses every term's Gaussian envelope below 1e-16 at
/// the boundary and resolves the finest feature (fringe wavelength 2 pi /
/// |Im b| or sharp-Gaussian width sqrt(2 / eigmax)) with at least 12 points.
pub fn auto_grid(rep: &WignerRep) -> Result<GridSpec> {
    let mut half_width: f64 = 4.0;
    let mut feature: f64 = f64::INFINITY;
    for term in &rep.terms {
        let (eig_min, eig_max) = term.quad.re_eigenvalues();
        let (bx, bp) = term.lin.re();
        // real center of the envelope Gaussian
        let rdet = term.quad.xx.re * term.quad.pp.re - term.quad.xp.re * term.quad.xp.re;
        let cx = (term.quad.pp.re * bx - term.quad.xp.re * bp) / rdet;
        let cp = (term.quad.xx.re * bp - term.quad.xp.re * bx) / rdet;
        let center_norm = (cx * cx + cp * cp).sqrt();
        // peak of the envelope (value at the center, polynomial aside)
        let peak = term.coeff.norm() * (0.5 * (bx * cx + bp * cp)).exp();
        // find the radius where peak * polybound * exp(-eig_min r^2 / 2) < target
        let sigma = (1.0 / eig_min).sqrt();
        let mut reach = 0.0;
        for k in 1..=2000 {
            let r = k as f64 * 0.25 * sigma;
            let bound = peak
                * term.poly.abs_bound(center_norm + r).max(1e-300)
                * (-0.5 * eig_min * r * r).exp();
            if bound < BOUNDARY_ENVELOPE {
                reach = r;
                break;
            }
            reach = r;
        }
        half_width = half_width.max(center_norm + reach);
        // sharp-Gaussian width, tightened by the polynomial degree
        let degree = term.poly.total_degree() as f64;
        let gauss_feature = 2.0 * (2.0 / eig_max).sqrt() / (1.0 + degree).sqrt();
        feature = feature.min(gauss_feature);
        // interference fringe wavelength from the imaginary linear exponent
        let im_norm = term.lin.im_norm();
        if im_norm > 1e-12 {
            feature = feature.min(2.0 * std::f64::consts::PI / im_norm);
        }
    }
    let step = feature / POINTS_PER_FEATURE;
    let mut n = (2.0 * half_width / step).ceil() as usize + 1;
    if n % 2 == 0 {
        n += 1;
    }
    n = n.max(65);
    if n > GRID_POINTS_CAP {
        return Err(Error::InfeasibleGrid {
            required: n,
            cap: GRID_POINTS_CAP,
        });
    }
    GridSpec::new(half_width, n)
}

/// Composite-Simpson weights for an odd number of points with step h.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        } * h
            / 3.0;
    }
    w
}

struct RowSums {
    trace: f64,
    square: f64,
    grad: f64,
    max_residual: f64,
}

/// Evaluate W and its analytic per-term gradient on the grid and integrate
/// W^2 and |grad W|^2 by composite Simpson. Rows are processed in parallel
/// but reduced in fixed order, so results are bit-reproducible for any
/// thread count.
pub fn grid_measures(rep: &WignerRep, grid: &GridSpec) -> Result<MeasureReport> {
    if !rep.hermitian {
        return Err(Error::HermiticityViolation(
            "grid measures require a hermitian representation".into(),
        ));
    }
    let n = grid.points_per_axis;
    let h = grid.step();
    let weights = simpson_weights(n, h);
    let dx_rep = rep.diff(Axis::X)?;
    let dp_rep = rep.diff(Axis::P)?;

    let rows: Vec<RowSums> = (0..n)
        .into_par_iter()
        .map(|ip| {
            let p = -grid.extent + ip as f64 * h;
            let wp = weights[ip];
            let mut trace = 0.0;
            let mut square = 0.0;
            let mut gradsq = 0.0;
            let mut max_residual: f64 = 0.0;
            for ix in 0..n {
                let x = -grid.extent + ix as f64 * h;
                let wt = wp * weights[ix];
                let (wv, mag) = rep.eval_complex(x, p);
                if mag > 0.0 {
                    max_residual = max_residual.max(wv.im.abs() / mag);
                }
                let (gx, _) = dx_rep.eval_complex(x, p);
                let (gp, _) = dp_rep.eval_complex(x, p);
                trace += wt * wv.re;
                square += wt * wv.re * wv.re;
                gradsq += wt * (gx.re * gx.re + gp.re * gp.re);
            }
            RowSums {
                trace,
                square,
                grad: gradsq,
                max_residual,
            }
        })
        .collect();

    let mut trace = 0.0;
    let mut square = 0.0;
    let mut grad = 0.0;
    let mut max_residual: f64 = 0.0;
    for row in &rows {
        trace += row.trace;
        square += row.square;
        grad += row.grad;
        max_residual = max_residual.max(row.max_residual);
    }
    if max_residual > HERMITICITY_TOL {
        return Err(Error::HermiticityViolation(format!(
            "imaginary residual fraction {max_residual:.3e} on the grid"
        )));
    }
    if (trace - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(trace));
    }
    MeasureReport::from_integrals(square, grad, Method::Grid, &rep.label)
}
