//! Real-axis line-shape terms, the resulting profile density and the
//! impact-broadening Lorentzian.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// f(omega), Delta E(omega) and Gamma(omega) at one photon energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineShapeTerms {
    pub f: f64,
    pub delta_e: f64,
    pub gamma: f64,
}

/// The real bracket B(omega) shared by f and Delta E.
///
/// For the published parameter sets d^2/omega^2 is ~1e4 and both
/// `ln(d/d0)` and b2/b1 are ~16, so they are subtracted before scaling.
pub fn bracket(omega: f64, params: &ModelParams) -> f64 {
    let r = params.b2_over_b1();
    let ratio = params.d / omega;
    ratio * ratio * ((params.d / params.d0).ln() - r) + (omega / params.d0).ln()
        - PI * 0.5 * ratio
        - r
}

pub fn lineshape_terms(omega: f64, params: &ModelParams) -> Result<LineShapeTerms> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain {
            operation: "lineshape_terms",
            requirement: "finite omega > 0",
        });
    }
    let b = bracket(omega, params);
    let ratio = params.d / omega;
    let f = (ratio * ratio + 1.0) / (4.0 * PI * params.c1_sq * omega * omega) / (PI * PI + b * b);
    let shift = f * omega * omega * b;
    Ok(LineShapeTerms {
        f,
        delta_e: params.lambda_re - shift,
        gamma: 2.0 * (params.lambda_im + PI * omega * omega * f),
    })
}

/// Unnormalized dW21/domega (A = 1).
pub fn profile_density(omega: f64, params: &ModelParams) -> Result<f64> {
    let terms = lineshape_terms(omega, params)?;
    Ok(density_from_terms(omega, params, &terms))
}

pub(crate) fn density_from_terms(omega: f64, params: &ModelParams, terms: &LineShapeTerms) -> f64 {
    let detuning = omega + params.e1 - params.e2 - terms.delta_e;
    terms.f / (2.0 * PI) / (detuning * detuning + 0.25 * terms.gamma * terms.gamma)
}

/// Center and full width of the impact-broadened line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianParams {
    pub center: f64,
    pub width: f64,
}

impl LorentzianParams {
    /// First-order result of the instantaneous (c1 = 0) coupling: shift Re Λ,
    /// width 2|Im Λ|. This is its own code path, not the c1 -> 0 limit of the
    /// general profile (b1 diverges there).
    pub fn impact(params: &ModelParams) -> Result<Self> {
        let lp = Self {
            center: params.transition_energy() + params.lambda_re,
            width: 2.0 * params.lambda_im.abs(),
        };
        if !(lp.width > 0.0) {
            return Err(Error::InvalidParameter {
                field: "lambda_im",
                constraint: "impact width 2|Im Λ| must be > 0".into(),
            });
        }
        Ok(lp)
    }

    pub fn peak_height(&self) -> f64 {
        2.0 / (PI * self.width)
    }
}

/// Unit-area Lorentzian.
pub fn lorentzian_profile(omega: f64, lp: &LorentzianParams) -> f64 {
    let x = omega - lp.center;
    lp.width / (2.0 * PI) / (x * x + 0.25 * lp.width * lp.width)
}
