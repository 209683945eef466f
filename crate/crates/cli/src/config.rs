//! Run configuration: a TOML file with [model], [window], [quadrature],
//! [contour], [output] and [sweep] sections.
//!
//! Every section and key is optional except the model parameters, which
//! come either from `preset = "table1-x"` or from explicit keys. Explicit
//! keys override a preset.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use lineshape_core::analysis::{default_window, Axis, Window};
use lineshape_core::dynamics::ContourConfig;
use lineshape_core::{LambdaImSign, ModelParams, Preset, QuadratureConfig, Transform, TRANSITION_ENERGY_EV};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_T_POINTS: usize = 101;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    window: RawWindow,
    #[serde(default)]
    quadrature: RawQuadrature,
    #[serde(default)]
    contour: RawContour,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    sweep: RawSweep,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    preset: Option<String>,
    lambda_re: Option<f64>,
    lambda_im: Option<f64>,
    c1_sq: Option<f64>,
    d: Option<f64>,
    b2: Option<f64>,
    e1: Option<f64>,
    e2: Option<f64>,
    d0: Option<f64>,
    lambda_im_sign: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    lo: Option<f64>,
    hi: Option<f64>,
    points: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<i64>,
    transform: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContour {
    y_offset: Option<f64>,
    x_halfwidth: Option<f64>,
    oscillation_budget: Option<i64>,
    tail_tolerance: Option<f64>,
    t_max: Option<f64>,
    t_points: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    plot_script: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    lambda_im: Option<Axis>,
    c1_sq: Option<Axis>,
    d: Option<Axis>,
    b2: Option<Axis>,
}

/// Contour settings as configured. `y_offset = None` picks
/// max(10 eV, Γ/10) from the model; `t_max = None` picks 10/|Im Λ|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSettings {
    pub y_offset: Option<f64>,
    pub x_halfwidth: f64,
    pub oscillation_budget: usize,
    pub tail_tolerance: f64,
    pub t_max: Option<f64>,
    pub t_points: usize,
}

impl Default for ContourSettings {
    fn default() -> Self {
        let c = ContourConfig::default();
        Self {
            y_offset: None,
            x_halfwidth: c.x_halfwidth,
            oscillation_budget: c.oscillation_budget,
            tail_tolerance: c.tail_tolerance,
            t_max: None,
            t_points: DEFAULT_T_POINTS,
        }
    }
}

impl ContourSettings {
    pub fn resolve(&self, params: &ModelParams) -> ContourConfig {
        let auto = ContourConfig::for_params(params);
        ContourConfig {
            y_offset: self.y_offset.unwrap_or(auto.y_offset),
            x_halfwidth: self.x_halfwidth,
            oscillation_budget: self.oscillation_budget,
            tail_tolerance: self.tail_tolerance,
        }
    }

    pub fn t_max(&self, params: &ModelParams) -> f64 {
        self.t_max.unwrap_or(10.0 / params.lambda_im.abs())
    }
}

/// Sweep axes; a missing axis stays at the model value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepAxes {
    pub lambda_im: Option<Axis>,
    pub c1_sq: Option<Axis>,
    pub d: Option<Axis>,
    pub b2: Option<Axis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Parameters as written; `lambda_im_sign` is applied by [`RunConfig::params`].
    pub model: ModelParams,
    pub lambda_im_sign: LambdaImSign,
    pub window: Window,
    pub n_points: usize,
    pub quadrature: QuadratureConfig,
    pub contour: ContourSettings,
    pub output_dir: PathBuf,
    pub emit_plot_script: bool,
    pub sweep: SweepAxes,
}

impl RunConfig {
    /// Defaults around a preset.
    pub fn from_preset(preset: Preset) -> Self {
        let model = preset.params();
        Self {
            model,
            lambda_im_sign: LambdaImSign::AsPrinted,
            window: default_window(&model),
            n_points: DEFAULT_POINTS,
            quadrature: QuadratureConfig::default(),
            contour: ContourSettings::default(),
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            emit_plot_script: false,
            sweep: SweepAxes::default(),
        }
    }

    /// Model parameters with the sign convention applied.
    pub fn params(&self) -> ModelParams {
        self.model.with_lambda_im_sign(self.lambda_im_sign)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate().map_err(CliError::from_core)?;
        Window::new(self.window.lo, self.window.hi).map_err(CliError::from_core)?;
        if self.n_points < 64 {
            return Err(CliError::validation("window.points", "must be >= 64"));
        }
        self.quadrature.validate().map_err(CliError::from_core)?;
        self.contour.resolve(&self.params()).validate().map_err(CliError::from_core)?;
        if let Some(t) = self.contour.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::validation("contour.t_max", "must be > 0"));
            }
        }
        if self.contour.t_points < 2 {
            return Err(CliError::validation("contour.t_points", "must be >= 2"));
        }
        for (name, axis) in [
            ("sweep.lambda_im", self.sweep.lambda_im),
            ("sweep.c1_sq", self.sweep.c1_sq),
            ("sweep.d", self.sweep.d),
            ("sweep.b2", self.sweep.b2),
        ] {
            if let Some(a) = axis {
                if a.count < 1 {
                    return Err(CliError::validation(name, "count must be >= 1"));
                }
                if !(a.min.is_finite() && a.max.is_finite() && a.min <= a.max) {
                    return Err(CliError::validation(name, "need finite min <= max"));
                }
            }
        }
        Ok(())
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn count(field: &'static str, value: Option<i64>, default: usize) -> Result<usize, CliError> {
    match value {
        None => Ok(default),
        Some(v) if v >= 0 => Ok(v as usize),
        Some(_) => Err(CliError::validation(field, "must be >= 0")),
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;

    let m = raw.model;
    let base = match &m.preset {
        Some(name) => Some(
            Preset::from_str(name).map_err(|_| CliError::validation("model.preset", &format!("unknown preset `{name}`")))?,
        ),
        None => None,
    }
    .map(Preset::params);
    let required = [
        ("lambda_im", m.lambda_im),
        ("c1_sq", m.c1_sq),
        ("d", m.d),
        ("b2", m.b2),
    ];
    if base.is_none() {
        let missing: Vec<&str> = required.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();
        if !missing.is_empty() {
            return Err(CliError::Validation {
                field: format!("model.{}", missing.join(", model.")),
                constraint: "required (or set model.preset)".into(),
            });
        }
    }
    let pick = |v: Option<f64>, from_base: fn(&ModelParams) -> f64, default: f64| {
        v.or(base.as_ref().map(from_base)).unwrap_or(default)
    };
    let model = ModelParams {
        lambda_re: pick(m.lambda_re, |p| p.lambda_re, 0.0),
        lambda_im: pick(m.lambda_im, |p| p.lambda_im, f64::NAN),
        c1_sq: pick(m.c1_sq, |p| p.c1_sq, f64::NAN),
        d: pick(m.d, |p| p.d, f64::NAN),
        b2: pick(m.b2, |p| p.b2, f64::NAN),
        e1: pick(m.e1, |p| p.e1, 0.0),
        e2: pick(m.e2, |p| p.e2, m.e1.unwrap_or(0.0) + TRANSITION_ENERGY_EV),
        d0: pick(m.d0, |p| p.d0, 1.0),
    };
    let lambda_im_sign = match m.lambda_im_sign {
        None => LambdaImSign::AsPrinted,
        Some(s) => LambdaImSign::from_str(&s).map_err(|e| CliError::validation("model.lambda_im_sign", &e))?,
    };

    let dw = default_window(&model);
    let window = Window {
        lo: raw.window.lo.unwrap_or(dw.lo),
        hi: raw.window.hi.unwrap_or(dw.hi),
    };
    let n_points = count("window.points", raw.window.points, DEFAULT_POINTS)?;

    let qd = QuadratureConfig::default();
    let transform = match raw.quadrature.transform.as_deref() {
        None => qd.transform,
        Some("none") => Transform::None,
        Some("semi_infinite_rational") => Transform::SemiInfiniteRational,
        Some(other) => {
            return Err(CliError::validation(
                "quadrature.transform",
                &format!("unknown transform `{other}` (expected none or semi_infinite_rational)"),
            ))
        }
    };
    let quadrature = QuadratureConfig {
        rel_tol: raw.quadrature.rel_tol.unwrap_or(qd.rel_tol),
        abs_tol: raw.quadrature.abs_tol.unwrap_or(qd.abs_tol),
        max_subdivisions: count("quadrature.max_subdivisions", raw.quadrature.max_subdivisions, qd.max_subdivisions)?,
        transform,
    };

    let cd = ContourSettings::default();
    let c = raw.contour;
    let contour = ContourSettings {
        y_offset: c.y_offset,
        x_halfwidth: c.x_halfwidth.unwrap_or(cd.x_halfwidth),
        oscillation_budget: count("contour.oscillation_budget", c.oscillation_budget, cd.oscillation_budget)?,
        tail_tolerance: c.tail_tolerance.unwrap_or(cd.tail_tolerance),
        t_max: c.t_max,
        t_points: count("contour.t_points", c.t_points, cd.t_points)?,
    };

    let config = RunConfig {
        model,
        lambda_im_sign,
        window,
        n_points,
        quadrature,
        contour,
        output_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
        emit_plot_script: raw.output.plot_script.unwrap_or(false),
        sweep: SweepAxes {
            lambda_im: raw.sweep.lambda_im,
            c1_sq: raw.sweep.c1_sq,
            d: raw.sweep.d,
            b2: raw.sweep.b2,
        },
    };
    config.validate()?;
    Ok(config)
}

fn float(v: f64) -> String {
    // Debug prints the shortest decimal that reads back to the same f64.
    format!("{v:?}")
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Writes every setting explicitly, so `parse_config(render_config(c)) == c`.
pub fn render_config(c: &RunConfig) -> String {
    let m = &c.model;
    let mut out = String::new();
    let _ = writeln!(out, "[model]");
    for (k, v) in [
        ("lambda_re", m.lambda_re),
        ("lambda_im", m.lambda_im),
        ("c1_sq", m.c1_sq),
        ("d", m.d),
        ("b2", m.b2),
        ("e1", m.e1),
        ("e2", m.e2),
        ("d0", m.d0),
    ] {
        let _ = writeln!(out, "{k} = {}", float(v));
    }
    let _ = writeln!(out, "lambda_im_sign = {}", quoted(c.lambda_im_sign.as_str()));

    let _ = writeln!(out, "\n[window]");
    let _ = writeln!(out, "lo = {}", float(c.window.lo));
    let _ = writeln!(out, "hi = {}", float(c.window.hi));
    let _ = writeln!(out, "points = {}", c.n_points);

    let q = &c.quadrature;
    let _ = writeln!(out, "\n[quadrature]");
    let _ = writeln!(out, "rel_tol = {}", float(q.rel_tol));
    let _ = writeln!(out, "abs_tol = {}", float(q.abs_tol));
    let _ = writeln!(out, "max_subdivisions = {}", q.max_subdivisions);
    let _ = writeln!(out, "transform = {}", quoted(q.transform.as_str()));

    let k = &c.contour;
    let _ = writeln!(out, "\n[contour]");
    if let Some(y) = k.y_offset {
        let _ = writeln!(out, "y_offset = {}", float(y));
    }
    let _ = writeln!(out, "x_halfwidth = {}", float(k.x_halfwidth));
    let _ = writeln!(out, "oscillation_budget = {}", k.oscillation_budget);
    let _ = writeln!(out, "tail_tolerance = {}", float(k.tail_tolerance));
    if let Some(t) = k.t_max {
        let _ = writeln!(out, "t_max = {}", float(t));
    }
    let _ = writeln!(out, "t_points = {}", k.t_points);

    let _ = writeln!(out, "\n[output]");
    let dir = c.output_dir.to_string_lossy();
    let _ = writeln!(out, "dir = {}", quoted(&dir));
    let _ = writeln!(out, "plot_script = {}", c.emit_plot_script);

    let axes = [
        ("lambda_im", c.sweep.lambda_im),
        ("c1_sq", c.sweep.c1_sq),
        ("d", c.sweep.d),
        ("b2", c.sweep.b2),
    ];
    if axes.iter().any(|(_, a)| a.is_some()) {
        let _ = writeln!(out, "\n[sweep]");
        for (name, axis) in axes {
            if let Some(a) = axis {
                let _ = writeln!(
                    out,
                    "{name} = {{ min = {}, max = {}, count = {} }}",
                    float(a.min),
                    float(a.max),
                    a.count
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_row_c() {
        let c = parse_config("[model]\npreset = \"table1-c\"\n").unwrap();
        let p = c.params();
        assert_eq!(p.lambda_im, 300.0);
        assert_eq!(p.lambda_re, 0.0);
        assert_eq!(p.c1_sq, 0.25);
        assert_eq!(p.d, 1.15e7);
        assert_eq!(p.b2, -5.170);
        assert_eq!(p.e2 - p.e1, 102_697.0);
    }

    #[test]
    fn keys_override_preset() {
        let c = parse_config("[model]\npreset = \"table1-c\"\nb2 = -5.170455\n").unwrap();
        assert_eq!(c.model.b2, -5.170455);
        assert_eq!(c.model.c1_sq, 0.25);
    }

    #[test]
    fn empty_model_lists_required_fields() {
        match parse_config("[model]\n") {
            Err(CliError::Validation { field, .. }) => {
                for k in ["lambda_im", "c1_sq", "d", "b2"] {
                    assert!(field.contains(&format!("model.{k}")), "{field}");
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_coupling_rejected() {
        let text = "[model]\nlambda_im = 250.0\nc1_sq = -1\nd = 1e7\nb2 = 0.0\n";
        match parse_config(text) {
            Err(CliError::Validation { field, constraint }) => {
                assert_eq!(field, "c1_sq");
                assert_eq!(constraint, "must be > 0");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = "[model]\npreset = \"table1-a\"\n\n[window]\nwidth = 3\n";
        match parse_config(text) {
            Err(CliError::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("width"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_line() {
        assert!(matches!(
            parse_config("[model]\npreset = \n"),
            Err(CliError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn defaults_applied() {
        let c = parse_config("[model]\npreset = \"table1-a\"\n").unwrap();
        assert_eq!(c.n_points, DEFAULT_POINTS);
        assert_eq!(c.window, default_window(&c.model));
        assert_eq!(c.quadrature, QuadratureConfig::default());
        assert_eq!(c.contour.resolve(&c.params()).y_offset, 50.0);
        assert!(!c.emit_plot_script);
    }

    #[test]
    fn render_round_trips_presets() {
        for p in Preset::ALL {
            let mut c = RunConfig::from_preset(p);
            c.sweep.b2 = Some(Axis { min: -51.7, max: 0.0, count: 11 });
            c.contour.t_max = Some(0.04);
            assert_eq!(parse_config(&render_config(&c)).unwrap(), c);
        }
    }
}
