//! Wigner representations of the state families used in the paper plus
//! sanity-check states.
//!
//! All constructors return trace-normalized representations except
//! [`coherent_dyad`] and [`sigma_interference`], which carry Weyl symbols of
//! non-hermitian operators (normalized so the plane integral equals the
//! operator trace).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    integrate_alpha_gaussian, make_term, rep_integral_complex, CVec2, GaussTerm, Mat2c, SymMat2,
    WignerRep,
};
use crate::error::{Error, Result};
use crate::poly::Poly2;

const TWO_OVER_PI: f64 = std::f64::consts::FRAC_2_PI;

/// Largest Fock index with a closed-form Wigner polynomial (degree 2n <= 64).
pub const FOCK_N_MAX: u32 = 32;

/// Cat-state parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Declarative description of a state, also the JSON schema consumed by the
/// command line (`{"type": "rho_M", "V": 10.0, "d": 1.0}` and friends;
/// complex amplitudes are `[re, im]` pairs, mixtures nest recursively).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum StateSpec {
    #[serde(rename = "coherent")]
    Coherent { beta: [f64; 2] },
    #[serde(rename = "fock")]
    Fock { n: u32 },
    #[serde(rename = "displaced_thermal")]
    DisplacedThermal {
        #[serde(rename = "V")]
        v: f64,
        d: f64,
    },
    #[serde(rename = "sigma_interference")]
    SigmaInterference {
        #[serde(rename = "V")]
        v: f64,
        d: f64,
    },
    #[serde(rename = "rho_M")]
    RhoM {
        #[serde(rename = "V")]
        v: f64,
        d: f64,
    },
    #[serde(rename = "rho_small_m")]
    RhoSmallM {
        p: f64,
        #[serde(rename = "V")]
        v: f64,
    },
    #[serde(rename = "cat")]
    Cat { beta: [f64; 2], parity: Parity },
    #[serde(rename = "mixture")]
    Mixture { components: Vec<(f64, StateSpec)> },
}

impl StateSpec {
    /// Parameter-domain validation, applied before any construction work.
    pub fn validate(&self) -> Result<()> {
        match self {
            StateSpec::Coherent { .. } => Ok(()),
            StateSpec::Fock { n } => {
                if *n > FOCK_N_MAX {
                    Err(Error::DegreeOverflow {
                        degree: 2 * *n as usize,
                        max: crate::poly::D_MAX,
                    })
                } else {
                    Ok(())
                }
            }
            StateSpec::DisplacedThermal { v, .. }
            | StateSpec::SigmaInterference { v, .. }
            | StateSpec::RhoM { v, .. } => check_variance(*v),
            StateSpec::RhoSmallM { p, v } => {
                check_variance(*v)?;
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidSpec(format!(
                        "mixing probability p = {p} outside [0, 1]"
                    )));
                }
                Ok(())
            }
            StateSpec::Cat { beta, parity } => {
                let b = C64::new(beta[0], beta[1]);
                if *parity == Parity::Odd && b.norm() < 1e-6 {
                    return Err(Error::DegenerateState(
                        "odd cat state is undefined at beta ~ 0".into(),
                    ));
                }
                Ok(())
            }
            StateSpec::Mixture { components } => {
                check_weights(components)?;
                for (_, spec) in components {
                    spec.validate()?;
                }
                Ok(())
            }
        }
    }
}

fn check_variance(v: f64) -> Result<()> {
    if !(v >= 1.0) {
        return Err(Error::InvalidVariance(v));
    }
    Ok(())
}

fn check_weights(components: &[(f64, StateSpec)]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::WeightError("mixture with no components".into()));
    }
    let mut sum = 0.0;
    for (w, _) in components {
        if !(*w >= 0.0) {
            return Err(Error::WeightError(format!("negative weight {w}")));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightError(format!(
            "weights sum to {sum}, expected 1 within 1e-12"
        )));
    }
    Ok(())
}

/// Build the Wigner representation of any spec.
pub fn build(spec: &StateSpec) -> Result<WignerRep> {
    spec.validate()?;
    match spec {
        StateSpec::Coherent { beta } => Ok(coherent(C64::new(beta[0], beta[1]))),
        StateSpec::Fock { n } => fock(*n),
        StateSpec::DisplacedThermal { v, d } => displaced_thermal(*v, *d),
        StateSpec::SigmaInterference { v, d } => sigma_interference(*v, *d),
        StateSpec::RhoM { v, d } => thermal_superposition(*v, *d),
        StateSpec::RhoSmallM { p, v } => photon_thermal_mixture(*p, *v),
        StateSpec::Cat { beta, parity } => cat(C64::new(beta[0], beta[1]), *parity),
        StateSpec::Mixture { components } => mixture(components),
    }
}

fn coherent_term(beta: C64) -> GaussTerm {
    // (2/pi) exp(-2|u - beta|^2) expanded around the origin.
    let coeff = C64::new(TWO_OVER_PI * (-2.0 * beta.norm_sqr()).exp(), 0.0);
    let quad = SymMat2::scaled_identity(4.0);
    let lin = CVec2::real(4.0 * beta.re, 4.0 * beta.im);
    make_term(coeff, quad, lin, Poly2::one()).expect("coherent term is always valid")
}

/// Coherent state |beta>: the displaced vacuum Gaussian of unit variance.
pub fn coherent(beta: C64) -> WignerRep {
    WignerRep::from_terms(
        vec![coherent_term(beta)],
        format!("coherent(beta=({},{}))", beta.re, beta.im),
        true,
    )
    .expect("coherent state is always valid")
}

/// Number state |n>: W_n = (2/pi)(-1)^n L_n(4 r^2) exp(-2 r^2) as a single
/// polynomial-times-Gaussian term.
pub fn fock(n: u32) -> Result<WignerRep> {
    if n > FOCK_N_MAX {
        return Err(Error::DegreeOverflow {
            degree: 2 * n as usize,
            max: crate::poly::D_MAX,
        });
    }
    // L_n(t) = sum_k (-1)^k C(n, k) t^k / k!, then t = 4(x^2 + p^2) expanded
    // binomially into x^(2j) p^(2(k-j)).
    let mut monomials = Vec::new();
    let mut lag = 1.0; // (-1)^k C(n,k) 4^k / k!, updated incrementally
    for k in 0..=n {
        if k > 0 {
            let kf = k as f64;
            lag *= -4.0 * ((n - k + 1) as f64) / (kf * kf);
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut binom = 1.0;
        for j in 0..=k {
            if j > 0 {
                binom *= ((k - j + 1) as f64) / (j as f64);
            }
            monomials.push((2 * j, 2 * (k - j), C64::new(sign * lag * binom, 0.0)));
        }
    }
    let poly = Poly2::from_monomials(&monomials)?;
    let term = make_term(
        C64::new(TWO_OVER_PI, 0.0),
        SymMat2::scaled_identity(4.0),
        CVec2::zero(),
        poly,
    )?;
    WignerRep::from_terms(vec![term], format!("fock({n})"), true)
}

fn displaced_thermal_term(v: f64, d: f64) -> GaussTerm {
    // (2/(pi V)) exp(-2 |u - d|^2 / V)
    let coeff = C64::new(TWO_OVER_PI / v * (-2.0 * d * d / v).exp(), 0.0);
    let quad = SymMat2::scaled_identity(4.0 / v);
    let lin = CVec2::real(4.0 * d / v, 0.0);
    make_term(coeff, quad, lin, Poly2::one()).expect("thermal term is always valid")
}

/// Displaced thermal state rho_th(V, d): the closed-form P-integral of
/// coherent projectors. V = 1 is the delta limit and returns the coherent
/// state directly (the P function itself is singular there).
pub fn displaced_thermal(v: f64, d: f64) -> Result<WignerRep> {
    check_variance(v)?;
    let label = format!("displaced_thermal(V={v},d={d})");
    if v == 1.0 {
        let mut rep = coherent(C64::new(d, 0.0));
        rep.label = label;
        return Ok(rep);
    }
    WignerRep::from_terms(vec![displaced_thermal_term(v, d)], label, true)
}

fn dyad_term(alpha: C64, gamma: C64) -> GaussTerm {
    // Weyl symbol of |alpha><gamma| normalized so its plane integral equals
    // Tr |alpha><gamma| = <gamma|alpha>:
    //   (2/pi) exp(-2|u|^2 + 2 alpha beta* + 2 gamma* beta
    //              - (|alpha|^2 + |gamma|^2)/2 - gamma* alpha),  beta = x + i p.
    let gc = gamma.conj();
    let log_const = -0.5 * (alpha.norm_sqr() + gamma.norm_sqr()) - gc * alpha;
    let coeff = TWO_OVER_PI * log_const.exp();
    // 2 alpha beta* + 2 gamma* beta = (2 alpha + 2 gamma*) x + i(2 gamma* - 2 alpha) p
    let lin = CVec2::new(
        2.0 * (alpha + gc),
        C64::new(0.0, 2.0) * (gc - alpha),
    );
    make_term(coeff, SymMat2::scaled_identity(4.0), lin, Poly2::one())
        .expect("dyad term is always valid")
}

/// Weyl symbol of the coherent dyad |alpha><gamma|. Hermitian only when the
/// two amplitudes coincide.
pub fn coherent_dyad(alpha: C64, gamma: C64) -> WignerRep {
    let hermitian = alpha == gamma;
    WignerRep::from_terms(
        vec![dyad_term(alpha, gamma)],
        format!(
            "dyad(alpha=({},{}),gamma=({},{}))",
            alpha.re, alpha.im, gamma.re, gamma.im
        ),
        hermitian,
    )
    .expect("dyad is always valid")
}

fn sigma_term(v: f64, d: f64) -> GaussTerm {
    // sigma(V, d) = integral of P_th(V, d) |alpha><-alpha| d^2 alpha.
    // The dyad symbol at outer point u = (x, p) depends on alpha only through
    // a linear exponent: |alpha><-alpha| has symbol
    //     (2/pi) exp(-2|u|^2) exp(4 i (alpha_y x - alpha_x p)),
    // so the alpha integral is a Gaussian with the P_th quadratic form and a
    // u-dependent linear coefficient, done analytically.
    let a_alpha = SymMat2::scaled_identity(4.0 / (v - 1.0));
    let b0 = CVec2::real(4.0 * d / (v - 1.0), 0.0);
    let coupling = Mat2c::new(
        C64::new(0.0, 0.0),
        C64::new(0.0, -4.0),
        C64::new(0.0, 4.0),
        C64::new(0.0, 0.0),
    );
    let inner = integrate_alpha_gaussian(&a_alpha, &b0, &coupling)
        .expect("P_th Gaussian is integrable for V > 1");
    let p_th_prefactor = 2.0 / (std::f64::consts::PI * (v - 1.0))
        * (-2.0 * d * d / (v - 1.0)).exp();
    let coeff = p_th_prefactor * TWO_OVER_PI * inner.coeff;
    let quad = SymMat2::scaled_identity(4.0).sub(&inner.quad_reduction);
    make_term(coeff, quad, inner.lin, Poly2::one()).expect("sigma term is always valid")
}

/// Thermal-weighted interference operator sigma(V, d). Its trace is
/// exp(-2 d^2 / V) / V; the symbol is not hermitian unless d = 0. V = 1 is
/// the delta limit, the bare dyad |d><-d|.
pub fn sigma_interference(v: f64, d: f64) -> Result<WignerRep> {
    check_variance(v)?;
    let label = format!("sigma_interference(V={v},d={d})");
    let hermitian = d == 0.0;
    if v == 1.0 {
        let mut rep = coherent_dyad(C64::new(d, 0.0), C64::new(-d, 0.0));
        rep.label = label;
        rep.hermitian = hermitian;
        return Ok(rep);
    }
    WignerRep::from_terms(vec![sigma_term(v, d)], label, hermitian)
}

/// Superposition-of-thermal-states family:
/// rho_M proportional to rho_th(V, d) + rho_th(V, -d) + sigma(V, d) + sigma(V, -d),
/// trace-normalized by the engine's own integral of the four-piece sum.
/// Reduces to the even cat state of amplitude d at V = 1.
pub fn thermal_superposition(v: f64, d: f64) -> Result<WignerRep> {
    check_variance(v)?;
    let degenerate = v == 1.0 && d == 0.0;
    let label = if degenerate {
        format!("rho_M(V={v},d={d}) [degenerate: vacuum]")
    } else {
        format!("rho_M(V={v},d={d})")
    };
    let pieces = [
        displaced_thermal(v, d)?,
        displaced_thermal(v, -d)?,
        sigma_interference(v, d)?,
        sigma_interference(v, -d)?,
    ];
    let mut terms = Vec::new();
    for rep in &pieces {
        terms.extend(rep.terms.iter().cloned());
    }
    let unnormalized = WignerRep::from_terms(terms, label.clone(), true)?;
    let (norm, _) = rep_integral_complex(&unnormalized)?;
    if norm.re < 1e-12 {
        return Err(Error::DegenerateState(format!(
            "rho_M normalization integral {:.3e} below 1e-12",
            norm.re
        )));
    }
    Ok(unnormalized.scaled(1.0 / norm.re))
}

/// Single-photon / thermal mixture rho_m = p |1><1| + (1 - p) rho_th(V, 0).
pub fn photon_thermal_mixture(p: f64, v: f64) -> Result<WignerRep> {
    check_variance(v)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidSpec(format!(
            "mixing probability p = {p} outside [0, 1]"
        )));
    }
    let label = format!("rho_small_m(p={p},V={v})");
    let one_photon = fock(1)?;
    let thermal = displaced_thermal(v, 0.0)?;
    WignerRep::combine(&[(p, &one_photon), (1.0 - p, &thermal)], label, true)
}

/// Normalized cat state |beta> +/- |-beta>, built from the two coherent
/// projectors plus the hermitized dyad pair.
pub fn cat(beta: C64, parity: Parity) -> Result<WignerRep> {
    let overlap = (-2.0 * beta.norm_sqr()).exp(); // <-beta|beta> for any complex beta
    let (sign, norm) = match parity {
        Parity::Even => (1.0, 2.0 * (1.0 + overlap)),
        Parity::Odd => (-1.0, 2.0 * (1.0 - overlap)),
    };
    if parity == Parity::Odd && beta.norm() < 1e-6 {
        return Err(Error::DegenerateState(
            "odd cat state is undefined at beta ~ 0".into(),
        ));
    }
    let scale = |t: GaussTerm, s: f64| GaussTerm {
        coeff: t.coeff * (s / norm),
        ..t
    };
    let terms = vec![
        scale(coherent_term(beta), 1.0),
        scale(coherent_term(-beta), 1.0),
        scale(dyad_term(beta, -beta), sign),
        scale(dyad_term(-beta, beta), sign),
    ];
    let parity_name = match parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
    };
    WignerRep::from_terms(
        terms,
        format!("cat(beta=({},{}),{parity_name})", beta.re, beta.im),
        true,
    )
}

/// Convex mixture of library states; weights must be nonnegative and sum to 1.
pub fn mixture(components: &[(f64, StateSpec)]) -> Result<WignerRep> {
    check_weights(components)?;
    let reps: Vec<(f64, WignerRep)> = components
        .iter()
        .map(|(w, spec)| build(spec).map(|r| (*w, r)))
        .collect::<Result<_>>()?;
    let parts: Vec<(f64, &WignerRep)> = reps.iter().map(|(w, r)| (*w, r)).collect();
    WignerRep::combine(&parts, format!("mixture({} components)", components.len()), true)
}
