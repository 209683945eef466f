//! The nonlocality kernel f(τ), the Fourier transform of
//! F(z) = b1/ln(-z/d0) + b2/ln^2(-z/d0).
//!
//! The defining real-axis integral only converges logarithmically, so f is
//! evaluated after closing the contour around the cut z > 0 in the lower
//! half-plane. For τ > 0 this leaves the pole at z = d0 (where ln(-z/d0)
//! vanishes on the lower side) plus a Laplace-type integral across the cut:
//!
//!   f(τ) = -(i/2π) C(τ) - R(τ)
//!   R(τ) = e^{iτ d0} [-b1 d0 - b2 (d0 + iτ d0^2)]
//!   C(τ) = -i \int_0^inf h(-iu) e^{-uτ} du
//!   h(s) = 2πi b1/(L^2 + π^2) + 4πi b2 L/(L^2 + π^2)^2,  L = ln(s/d0)
//!
//! h is the jump of F across the positive real axis, continued to the lower
//! imaginary axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexEnergy, ModelParams};
use crate::quadrature::{integrate, integrate_semi_infinite, QuadratureConfig};

/// Which side of the cut z > 0 the real-axis integral runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchConvention {
    /// ln(-z) = ln|z| - iπ for real z > 0: the boundary value from Im z > 0.
    /// F is then analytic above the axis and the kernel is causal.
    #[default]
    UpperSide,
    /// ln(-z) = ln|z| + iπ: the lower boundary value. F is analytic below
    /// the axis, so f vanishes for every τ > 0.
    LowerSide,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn jump(l: Complex64, b1: f64, b2: f64) -> Complex64 {
    let q = l * l + PI * PI;
    2.0 * PI * I * b1 / q + 4.0 * PI * I * b2 * l / (q * q)
}

/// τ f(τ) at τ = e^{-v}. Finite as τ -> 0, where f itself grows like
/// 1/(τ ln^2 τ).
pub fn scaled_f_tau(v: f64, params: &ModelParams, branch: BranchConvention, q: &QuadratureConfig) -> Result<Complex64> {
    if !v.is_finite() {
        return Err(Error::InvalidParameter {
            field: "v",
            constraint: "must be finite".into(),
        });
    }
    if branch == BranchConvention::LowerSide {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (b1, b2, d0) = (params.b1(), params.b2, params.d0);
    let tau = (-v).exp();
    // ln(-iσ/(τ d0)) = ln σ + v - ln d0 - iπ/2
    let shift = Complex64::new(v - d0.ln(), -0.5 * PI);
    let integrand = |sigma: f64| {
        if sigma == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        jump(shift + sigma.ln(), b1, b2) * (-sigma).exp()
    };
    let cfg = QuadratureConfig {
        abs_tol: q.abs_tol * (b1.abs() + b2.abs()),
        ..*q
    };
    let cut = -I * integrate_semi_infinite("eval_f_tau", integrand, 0.0, 1.0, &[1e-6, 1e-3, 1.0, 10.0], &cfg)?.value;
    let phase = (I * tau * d0).exp();
    let residue = phase * (-b1 * d0 - b2 * (d0 + I * tau * d0 * d0));
    Ok(-I / (2.0 * PI) * cut - tau * residue)
}

/// f(τ) with the default branch convention.
pub fn eval_f_tau(tau: f64, params: &ModelParams, q: &QuadratureConfig) -> Result<Complex64> {
    eval_f_tau_with(tau, params, BranchConvention::default(), q)
}

pub fn eval_f_tau_with(tau: f64, params: &ModelParams, branch: BranchConvention, q: &QuadratureConfig) -> Result<Complex64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "tau",
            constraint: "must be finite and > 0".into(),
        });
    }
    Ok(scaled_f_tau(-tau.ln(), params, branch, q)? / tau)
}

/// b1/ln(-z/d0) + b2/ln^2(-z/d0), principal branch.
pub fn boundary_transform(z: ComplexEnergy, params: &ModelParams) -> Complex64 {
    let l = (-z / params.d0).ln();
    params.b1() / l + params.b2 / (l * l)
}

/// \int_0^eps f(τ) dτ, integrated in v = -ln τ.
pub fn windowed_mass(eps: f64, params: &ModelParams, q: &QuadratureConfig) -> Result<Complex64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "eps",
            constraint: "must be finite and > 0".into(),
        });
    }
    let v0 = -eps.ln();
    mass_beyond(v0, params, q)
}

fn mass_beyond(v0: f64, params: &ModelParams, q: &QuadratureConfig) -> Result<Complex64> {
    let failed = std::cell::Cell::new(None);
    let g = |v: f64| match scaled_f_tau(v, params, BranchConvention::UpperSide, q) {
        Ok(x) => x,
        Err(e) => {
            failed.set(Some(e));
            Complex64::new(0.0, 0.0)
        }
    };
    let scale = v0.abs().max(1.0);
    let cfg = QuadratureConfig {
        abs_tol: q.abs_tol * (params.b1().abs() + params.b2.abs()),
        ..*q
    };
    let r = integrate_semi_infinite("windowed_mass", g, v0, scale, &[], &cfg)?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok(r.value)
}

/// i \int_0^T f(τ) e^{izτ} dτ. Requires Im z > 0; approaches
/// [`boundary_transform`] as T grows.
pub fn round_trip_transform(z: ComplexEnergy, horizon: f64, params: &ModelParams, q: &QuadratureConfig) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::Domain {
            operation: "round_trip_transform",
            requirement: "Im z > 0",
        });
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "horizon",
            constraint: "must be finite and > 0".into(),
        });
    }
    let failed = std::cell::Cell::new(None);
    let record = |r: Result<Complex64>| match r {
        Ok(x) => x,
        Err(e) => {
            failed.set(Some(e));
            Complex64::new(0.0, 0.0)
        }
    };
    let cfg = QuadratureConfig {
        abs_tol: q.abs_tol * (params.b1().abs() + params.b2.abs()),
        ..*q
    };
    let v_start = -horizon.ln().min(0.0);
    // τ in (0, min(T, 1)] as v = -ln τ in [v_start, inf).
    let near = |v: f64| {
        let tau = (-v).exp();
        record(scaled_f_tau(v, params, BranchConvention::UpperSide, q)) * (I * z * tau).exp()
    };
    let mut total = integrate_semi_infinite("round_trip_transform", near, v_start, v_start.max(1.0), &[], &cfg)?.value;
    if horizon > 1.0 {
        let far = |tau: f64| record(eval_f_tau(tau, params, q)) * (I * z * tau).exp();
        let period = 2.0 * PI / (params.d0 + z.re.abs());
        let n = ((horizon - 1.0) / period).ceil().min(1e5) as usize;
        let points: Vec<f64> = (1..n).map(|k| 1.0 + (horizon - 1.0) * k as f64 / n as f64).collect();
        total += integrate("round_trip_transform", far, 1.0, horizon, &points, &cfg)?.value;
    }
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok(I * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Preset;

    #[test]
    fn round_trip_at_ten_i() {
        let p = Preset::A.params();
        let z = Complex64::new(0.0, 10.0);
        let q = QuadratureConfig {
            rel_tol: 1e-8,
            ..QuadratureConfig::default()
        };
        let got = round_trip_transform(z, 5.0, &p, &q).unwrap();
        let want = boundary_transform(z, &p);
        assert!((got - want).norm() < 1e-6 * want.norm(), "{got} vs {want}");
    }

    #[test]
    fn linear_in_b1() {
        let mut p = Preset::B.params();
        p.b2 = 0.0;
        let q = QuadratureConfig::default();
        let f1 = eval_f_tau(0.3, &p, &q).unwrap();
        p.c1_sq *= 0.5; // b1 doubles
        let f2 = eval_f_tau(0.3, &p, &q).unwrap();
        assert!((f2 - 2.0 * f1).norm() < 1e-10 * f1.norm());
    }

    #[test]
    fn lower_side_is_anticausal() {
        let p = Preset::A.params();
        let f = eval_f_tau_with(0.5, &p, BranchConvention::LowerSide, &QuadratureConfig::default()).unwrap();
        assert_eq!(f, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn windowed_mass_shrinks() {
        let p = Preset::A.params();
        let q = QuadratureConfig::default();
        let masses: Vec<f64> = [1e-2, 1e-4, 1e-8, 1e-16]
            .iter()
            .map(|e| windowed_mass(*e, &p, &q).unwrap().norm())
            .collect();
        for w in masses.windows(2) {
            assert!(w[1] < w[0], "{masses:?}");
        }
        let m = windowed_mass(1e-2, &p, &q).unwrap();
        assert!((m - Complex64::new(-0.001687, 0.002582)).norm() < 2e-6, "{m}");
    }

    #[test]
    fn tau_must_be_positive() {
        let p = Preset::A.params();
        assert!(eval_f_tau(0.0, &p, &QuadratureConfig::default()).is_err());
    }
}
