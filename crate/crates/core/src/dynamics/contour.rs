use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expint::exp_integral_e;
use crate::model::ModelParams;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::tmatrix::{form_factor, resolvent, EvalOptions};

/// Integration line z = x + i y and its truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourConfig {
    /// Height y of the line, eV. At time t the line is lowered to
    /// min(y_offset, MAX_GROWTH / t) so that e^{y t} stays small.
    pub y_offset: f64,
    /// Numerical range |x - centre| <= x_halfwidth, eV. The rest is
    /// integrated analytically from a fitted inverse-power tail.
    pub x_halfwidth: f64,
    /// Minimum samples per period of e^{-i x t}.
    pub oscillation_budget: usize,
    /// Largest accepted uncertainty of the analytic tail, in amplitude units.
    pub tail_tolerance: f64,
}

/// Cap on y t.
const MAX_GROWTH: f64 = 4.0;

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            y_offset: 10.0,
            x_halfwidth: 1e5,
            oscillation_budget: 16,
            tail_tolerance: 1e-6,
        }
    }
}

impl ContourConfig {
    /// y = max(10 eV, Γ/10) with Γ = 2 |Im Λ|.
    pub fn for_params(params: &ModelParams) -> Self {
        Self {
            y_offset: 10f64.max(0.2 * params.lambda_im.abs()),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, constraint: &str| {
            Err(Error::InvalidParameter {
                field,
                constraint: constraint.into(),
            })
        };
        if !(self.y_offset > 0.0 && self.y_offset.is_finite()) {
            return bad("y_offset", "must be > 0");
        }
        if !(self.x_halfwidth > 0.0 && self.x_halfwidth.is_finite()) {
            return bad("x_halfwidth", "must be > 0");
        }
        if self.oscillation_budget < 2 {
            return bad("oscillation_budget", "must be >= 2");
        }
        if !(self.tail_tolerance > 0.0) {
            return bad("tail_tolerance", "must be > 0");
        }
        Ok(())
    }

    fn height(&self, t: f64) -> f64 {
        if t > 0.0 {
            self.y_offset.min(MAX_GROWTH / t)
        } else {
            self.y_offset
        }
    }
}

/// A contour amplitude with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourAmplitude {
    pub value: Complex64,
    /// Quadrature error estimate, amplitude units.
    pub quadrature_error: f64,
    /// Contribution of the analytic tails, amplitude units.
    pub tail: Complex64,
    pub tail_uncertainty: f64,
    pub evaluations: usize,
    /// Line height actually used.
    pub y: f64,
}

struct LineIntegral {
    value: Complex64,
    error: f64,
    tail: Complex64,
    tail_uncertainty: f64,
    evaluations: usize,
}

/// Quadratic fit of g(v) v^2 = c2 + c3/v + c4/v^2 through v = X, 2X, 4X.
fn fit_tail(samples: [Complex64; 3], x: f64) -> [Complex64; 3] {
    // Newton form in s = X/v at s = 1, 1/2, 1/4.
    let s = [1.0, 0.5, 0.25];
    let d01 = (samples[0] - samples[1]) / (s[0] - s[1]);
    let d12 = (samples[1] - samples[2]) / (s[1] - s[2]);
    let d012 = (d01 - d12) / (s[0] - s[2]);
    // p(s) = f2 + d12 (s - s2) + d012 (s - s2)(s - s1)
    let a2 = d012;
    let a1 = d12 - d012 * (s[2] + s[1]);
    let a0 = samples[2] - d12 * s[2] + d012 * s[2] * s[1];
    [a0, a1 * x, a2 * x * x]
}

fn tail_integral(coeffs: &[Complex64], x: f64, w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let n = k as u32 + 2;
            c * x.powi(1 - n as i32) * exp_integral_e(n, w)
        })
        .sum()
}

/// \int e^{-i u t} g(u) du over the real line, with numerical range
/// |u| <= X and fitted O(u^-2) tails beyond.
fn oscillatory_line(
    operation: &'static str,
    g: impl Fn(f64) -> Complex64,
    t: f64,
    centres: &[(f64, f64)],
    c: &ContourConfig,
    cfg: &QuadratureConfig,
) -> Result<LineIntegral> {
    let x = c.x_halfwidth;
    let mut points = Vec::new();
    for &(centre, width) in centres {
        let mut r = 0.0;
        let mut k = 0;
        while r < 2.0 * x && k < 40 {
            points.push(centre - r);
            points.push(centre + r);
            r = width * 3f64.powi(k);
            k += 1;
        }
    }
    if t > 0.0 {
        let panel = 21.0 * (2.0 * PI / t) / c.oscillation_budget as f64;
        let n = (2.0 * x / panel).ceil().min(2e5) as usize;
        let step = 2.0 * x / n as f64;
        points.extend((1..n).map(|k| -x + step * k as f64));
    }
    let f = |u: f64| (Complex64::new(0.0, -u * t)).exp() * g(u);
    let inner = integrate(operation, f, -x, x, &points, cfg)?;

    let mut tail = Complex64::new(0.0, 0.0);
    let mut uncertainty = 0.0;
    for side in [1.0, -1.0] {
        let samples = [1.0, 2.0, 4.0].map(|m: f64| {
            let v = m * x;
            g(side * v) * v * v
        });
        let full = fit_tail(samples, x);
        // Two-term fit through X, 2X for the uncertainty estimate.
        let c3 = (samples[0] - samples[1]) * 2.0 * x;
        let c2 = samples[0] - c3 / x;
        let w = Complex64::new(0.0, side * x * t);
        let best = tail_integral(&full, x, w);
        let rough = tail_integral(&[c2, c3], x, w);
        tail += best;
        uncertainty += (best - rough).norm();
    }
    Ok(LineIntegral {
        value: inner.value + tail,
        error: inner.error,
        tail,
        tail_uncertainty: uncertainty,
        evaluations: inner.evaluations + 6,
    })
}

fn require_decaying(params: &ModelParams, operation: &'static str) -> Result<()> {
    if params.lambda_im > 0.0 {
        return Err(Error::Domain {
            operation,
            requirement: "Im Λ <= 0 (decaying convention; see ModelParams::decaying)",
        });
    }
    Ok(())
}

/// <2|U(t,0)|2> = 1 + (i/2π) \int dx e^{-i(z-e2)t} t22(z)/(z-e2)^2, z = x + iy.
pub fn survival_amplitude(t: f64, params: &ModelParams, c: &ContourConfig, q: &QuadratureConfig) -> Result<Complex64> {
    Ok(survival_amplitude_with(t, params, &EvalOptions::default(), c, q)?.value)
}

pub fn survival_amplitude_with(
    t: f64,
    params: &ModelParams,
    opts: &EvalOptions,
    c: &ContourConfig,
    q: &QuadratureConfig,
) -> Result<ContourAmplitude> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "t",
            constraint: "must be finite and >= 0".into(),
        });
    }
    params.validate()?;
    c.validate()?;
    q.validate()?;
    require_decaying(params, "survival_amplitude")?;
    let y = c.height(t);
    let growth = (y * t).exp();
    let scale = growth / (2.0 * PI);
    // Absolute tolerance on the amplitude scale: the integral itself
    // vanishes at t = 0.
    let cfg = QuadratureConfig {
        abs_tol: q.abs_tol.max(q.rel_tol / scale),
        ..*q
    };
    let failed = std::cell::Cell::new(None);
    let g = |u: f64| {
        let detuning = Complex64::new(u, y);
        match resolvent(detuning + params.e2, params, opts) {
            Ok(r) => r.elements.t22 / (detuning * detuning),
            Err(e) => {
                failed.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let width = params.lambda_im.abs().max(y);
    let centres = [(0.0, y), (params.lambda_re, width)];
    let line = oscillatory_line("survival_amplitude", g, t, &centres, c, &cfg)?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    finish(line, scale, y, c, "survival_amplitude", Complex64::new(1.0, 0.0))
}

fn finish(
    line: LineIntegral,
    scale: f64,
    y: f64,
    c: &ContourConfig,
    operation: &'static str,
    offset: Complex64,
) -> Result<ContourAmplitude> {
    let factor = Complex64::new(0.0, scale);
    let tail_uncertainty = line.tail_uncertainty * scale;
    if tail_uncertainty > c.tail_tolerance {
        return Err(Error::TruncationWarning {
            operation,
            uncertainty: tail_uncertainty,
            tolerance: c.tail_tolerance,
        });
    }
    Ok(ContourAmplitude {
        value: offset + factor * line.value,
        quadrature_error: line.error * scale,
        tail: factor * line.tail,
        tail_uncertainty,
        evaluations: line.evaluations,
        y,
    })
}

/// Emission probability density into photon energy `omega` at `t_large`,
/// summed over both polarizations and the photon directions:
/// 8 pi omega^2 |psi(omega) a(t)|^2 with
/// a = (i/2π) \int dx e^{-i(z-e1-omega)t} T1(z)/((z-e1-omega) D(z)).
pub fn photon_amplitude_profile(
    omega: f64,
    t_large: f64,
    params: &ModelParams,
    c: &ContourConfig,
    q: &QuadratureConfig,
) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "omega",
            constraint: "must be finite and > 0".into(),
        });
    }
    if !(t_large > 0.0 && t_large.is_finite()) {
        return Err(Error::InvalidParameter {
            field: "t_large",
            constraint: "must be finite and > 0".into(),
        });
    }
    params.validate()?;
    c.validate()?;
    q.validate()?;
    require_decaying(params, "photon_amplitude_profile")?;
    let y = c.height(t_large);
    let growth = (y * t_large).exp();
    let scale = growth / (2.0 * PI);
    let opts = EvalOptions::default();
    let base = params.e1 + omega;
    let reference = {
        let r = resolvent(Complex64::new(base, y), params, &opts)?;
        (r.t1 / r.denominator).norm()
    };
    let cfg = QuadratureConfig {
        abs_tol: q.abs_tol.max(q.rel_tol * reference / scale),
        ..*q
    };
    let failed = std::cell::Cell::new(None);
    let g = |u: f64| {
        let offset = Complex64::new(u, y);
        match resolvent(offset + base, params, &opts) {
            Ok(r) => r.t1 / (offset * r.denominator),
            Err(e) => {
                failed.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let resonance = params.e2 + params.lambda_re - base;
    let centres = [(0.0, y), (resonance, params.lambda_im.abs().max(y))];
    let line = oscillatory_line("photon_amplitude_profile", g, t_large, &centres, c, &cfg)?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let amp = finish(line, scale, y, c, "photon_amplitude_profile", Complex64::new(0.0, 0.0))?;
    let psi = form_factor(omega, params);
    Ok(8.0 * PI * omega * omega * psi * psi * amp.value.norm_sqr())
}
