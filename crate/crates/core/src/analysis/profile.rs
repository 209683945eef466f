use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lineshape::{lorentzian_profile, profile_density, LorentzianParams};
use crate::model::ModelParams;

/// Photon-energy interval (lo, hi) in eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "window",
                constraint: format!("need 0 < lo < hi, got ({lo}, {hi})"),
            });
        }
        Ok(Self { lo, hi })
    }
}

/// E21 +- 5 keV.
pub fn default_window(params: &ModelParams) -> Window {
    let c = params.transition_energy();
    Window {
        lo: c - 5000.0,
        hi: c + 5000.0,
    }
}

/// A sampled line profile and the normalizer applied to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub omegas: Vec<f64>,
    pub densities: Vec<f64>,
    /// Factor A the raw densities were multiplied by (1 until normalized).
    pub norm_a: f64,
    pub params_snapshot: ModelParams,
}

fn grid(window: Window, n: usize) -> Vec<f64> {
    let step = (window.hi - window.lo) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|k| window.lo + step * k as f64).collect();
    g[n - 1] = window.hi;
    g
}

/// Uniform-grid samples of the unnormalized density.
pub fn evaluate_profile(params: &ModelParams, window: Window, n_points: usize) -> Result<ProfileCurve> {
    params.validate()?;
    let window = Window::new(window.lo, window.hi)?;
    if n_points < 64 {
        return Err(Error::InvalidParameter {
            field: "n_points",
            constraint: "must be >= 64".into(),
        });
    }
    let omegas = grid(window, n_points);
    let densities = omegas
        .iter()
        .map(|w| profile_density(*w, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileCurve {
        omegas,
        densities,
        norm_a: 1.0,
        params_snapshot: *params,
    })
}

pub fn trapezoid_area(omegas: &[f64], values: &[f64]) -> f64 {
    omegas
        .windows(2)
        .zip(values.windows(2))
        .map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1]))
        .sum()
}

/// Rescales to unit trapezoid area. A curve already at unit area (to 1e-12)
/// is returned unchanged, which makes the operation idempotent.
pub fn normalize(curve: &ProfileCurve) -> Result<ProfileCurve> {
    let area = trapezoid_area(&curve.omegas, &curve.densities);
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::ZeroArea { area });
    }
    if (area - 1.0).abs() <= 1e-12 {
        return Ok(curve.clone());
    }
    let a = 1.0 / area;
    Ok(ProfileCurve {
        omegas: curve.omegas.clone(),
        densities: curve.densities.iter().map(|d| d * a).collect(),
        norm_a: curve.norm_a * a,
        params_snapshot: curve.params_snapshot,
    })
}

/// The impact Lorentzian on the grid of `like`, unit area on that grid.
pub fn sampled_lorentzian(like: &ProfileCurve, lp: &LorentzianParams) -> Result<ProfileCurve> {
    let curve = ProfileCurve {
        omegas: like.omegas.clone(),
        densities: like.omegas.iter().map(|w| lorentzian_profile(*w, lp)).collect(),
        norm_a: 1.0,
        params_snapshot: like.params_snapshot,
    };
    normalize(&curve)
}

/// sup |curve - reference| / max(reference), both taken at unit area.
pub fn lorentz_deviation_curves(curve: &ProfileCurve, reference: &ProfileCurve) -> Result<f64> {
    if curve.omegas != reference.omegas {
        let detail = match (curve.omegas.first(), curve.omegas.last(), reference.omegas.first(), reference.omegas.last()) {
            (Some(a), Some(b), Some(c), Some(d)) => format!(
                "[{a}, {b}] x {} vs [{c}, {d}] x {}",
                curve.omegas.len(),
                reference.omegas.len()
            ),
            _ => "empty grid".to_string(),
        };
        return Err(Error::WindowMismatch { detail });
    }
    let c = normalize(curve)?;
    let r = normalize(reference)?;
    let height = r.densities.iter().cloned().fold(0.0, f64::max);
    let sup = c
        .densities
        .iter()
        .zip(&r.densities)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(sup / height)
}

/// Deviation of `curve` from the Lorentzian `lp` sampled on the same grid.
pub fn lorentz_deviation(curve: &ProfileCurve, lp: &LorentzianParams) -> Result<f64> {
    let reference = sampled_lorentzian(curve, lp)?;
    lorentz_deviation_curves(curve, &reference)
}
