//! The five outputs P, Pdot, I, I+, chi^2 computed through the purity route.
//!
//! Under the photon-loss channel at unit rate the purity slope at tau = 0 has
//! the Wigner-integral form
//!
//! ```text
//!     Pdot = pi * integral W^2 - (pi/4) * integral |grad W|^2,
//! ```
//!
//! obtained by integrating the loss Fokker-Planck generator by parts. It is
//! pinned numerically by two independent facts: chi^2 of the single photon
//! comes out 6, and the value matches the Fock-basis Lindblad slope
//! 2 Tr(rho (a rho a+ - 1/2 {a+a, rho})) on every test state.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::algebra::{rep_grad_overlap, rep_integral, rep_overlap, WignerRep};
use crate::error::{Error, Result};

/// Which computation route produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Grid,
    Fock,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::ClosedForm => "closed_form",
            Method::Grid => "grid",
            Method::Fock => "fock",
        };
        write!(f, "{name}")
    }
}

/// The five measure outputs plus computation-route metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureReport {
    pub purity: f64,
    pub purity_decay: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "I_plus")]
    pub i_plus: f64,
    pub chi2: f64,
    pub method: Method,
    pub state_label: String,
}

impl MeasureReport {
    /// Assemble a report from the two base integrals
    /// sq = integral W^2 and grad = integral |grad W|^2, enforcing the
    /// internal identities before returning.
    pub fn from_integrals(sq: f64, grad: f64, method: Method, label: &str) -> Result<Self> {
        let purity = PI * sq;
        if !(purity > 0.0 && purity <= 1.0 + 1e-9) {
            return Err(Error::PurityOutOfRange(purity));
        }
        let purity_decay = PI * (sq - 0.25 * grad);
        let i = -0.5 * purity_decay;
        let i_plus = 0.5 * (purity - purity_decay);
        if purity < 1e-12 {
            return Err(Error::DegenerateState(format!(
                "purity {purity:.3e} below the chi^2 denominator guard"
            )));
        }
        let chi2 = 2.0 * (1.0 - purity_decay / purity);
        // The gradient-ratio route is algebraically identical; disagreement
        // beyond rounding signals an engine defect.
        let chi2_direct = 0.5 * grad / sq;
        if (chi2 - chi2_direct).abs() > 1e-10 * chi2.abs().max(1.0) {
            return Err(Error::InternalCheck(format!(
                "chi^2 routes disagree: purity route {chi2:.15e} vs gradient ratio {chi2_direct:.15e}"
            )));
        }
        if chi2 < -1e-12 {
            return Err(Error::InternalCheck(format!(
                "chi^2 = {chi2:.3e} negative beyond rounding"
            )));
        }
        Ok(Self {
            purity,
            purity_decay,
            i,
            i_plus,
            chi2,
            method,
            state_label: label.to_string(),
        })
    }

    /// Assemble a report from a purity and purity-slope pair (the Fock-route
    /// inputs, where no gradient integral exists).
    pub fn from_purity_slope(
        purity: f64,
        purity_decay: f64,
        method: Method,
        label: &str,
    ) -> Result<Self> {
        if !(purity > 0.0 && purity <= 1.0 + 1e-9) {
            return Err(Error::PurityOutOfRange(purity));
        }
        if purity < 1e-12 {
            return Err(Error::DegenerateState(format!(
                "purity {purity:.3e} below the chi^2 denominator guard"
            )));
        }
        let i = -0.5 * purity_decay;
        let i_plus = 0.5 * (purity - purity_decay);
        let chi2 = 2.0 * (1.0 - purity_decay / purity);
        Ok(Self {
            purity,
            purity_decay,
            i,
            i_plus,
            chi2,
            method,
            state_label: label.to_string(),
        })
    }
}

fn base_integrals(r: &WignerRep) -> Result<(f64, f64)> {
    if !r.hermitian {
        return Err(Error::HermiticityViolation(
            "measures are defined for hermitian representations only".into(),
        ));
    }
    let trace = rep_integral(r)?;
    if (trace - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(trace));
    }
    let sq = rep_overlap(r, r)?;
    let grad = rep_grad_overlap(r, r)?;
    Ok((sq, grad))
}

/// Purity P = pi * integral W^2 = Tr rho^2.
pub fn purity(r: &WignerRep) -> Result<f64> {
    Ok(report(r)?.purity)
}

/// Purity slope Pdot at tau = 0 under photon loss at unit rate.
pub fn purity_decay(r: &WignerRep) -> Result<f64> {
    Ok(report(r)?.purity_decay)
}

/// The macroscopic-quantumness measure I = -Pdot / 2.
pub fn measure_i(r: &WignerRep) -> Result<f64> {
    Ok(report(r)?.i)
}

/// The modified, nonnegative variant I+ = (P - Pdot) / 2.
pub fn measure_i_plus(r: &WignerRep) -> Result<f64> {
    Ok(report(r)?.i_plus)
}

/// Phase-space heterogeneity chi^2 = 2 (1 - Pdot / P), equivalently
/// (integral |grad W|^2) / (2 integral W^2).
pub fn chi_squared(r: &WignerRep) -> Result<f64> {
    Ok(report(r)?.chi2)
}

/// All five quantities from one pass over the shared overlap integrals.
pub fn report(r: &WignerRep) -> Result<MeasureReport> {
    let (sq, grad) = base_integrals(r)?;
    MeasureReport::from_integrals(sq, grad, Method::ClosedForm, &r.label)
}
