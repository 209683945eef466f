//! Physical constants of the model.
//!
//! Units are natural (hbar = c = 1) with energies in eV, so `c1_sq` carries eV^-1
//! and times carry eV^-1.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the complex energy plane, in eV.
pub type ComplexEnergy = Complex64;

/// Transition energy E2 - E1 of the 2P1/2 -> 1S1/2 line of hydrogen-like
/// uranium (Z = 92), used by all bundled presets.
pub const TRANSITION_ENERGY_EV: f64 = 102_697.0;

/// Parameters of the atom and of its coupling to the surroundings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Re Λ, eV.
    pub lambda_re: f64,
    /// Im Λ, eV. Stored as printed; see [`LambdaImSign`].
    pub lambda_im: f64,
    /// Square of the form-factor strength, eV^-1.
    pub c1_sq: f64,
    /// Infrared scale of the form factor, eV.
    pub d: f64,
    /// Free parameter of the nonlocality kernel, eV.
    pub b2: f64,
    pub e1: f64,
    pub e2: f64,
    /// Logarithm reference scale, fixed at 1 eV.
    pub d0: f64,
}

impl ModelParams {
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.lambda_re, self.lambda_im)
    }

    /// b1 = -1 / (4 pi c1^2).
    pub fn b1(&self) -> f64 {
        -1.0 / (4.0 * PI * self.c1_sq)
    }

    /// The combination b2 / b1 that enters every bracket.
    pub fn b2_over_b1(&self) -> f64 {
        -4.0 * PI * self.c1_sq * self.b2
    }

    pub fn transition_energy(&self) -> f64 {
        self.e2 - self.e1
    }

    pub fn c1(&self) -> f64 {
        self.c1_sq.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda_re", self.lambda_re),
            ("lambda_im", self.lambda_im),
            ("c1_sq", self.c1_sq),
            ("d", self.d),
            ("b2", self.b2),
            ("e1", self.e1),
            ("e2", self.e2),
            ("d0", self.d0),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(invalid(field, "must be finite"));
            }
        }
        if self.c1_sq <= 0.0 {
            return Err(invalid("c1_sq", "must be > 0"));
        }
        if self.d <= 0.0 {
            return Err(invalid("d", "must be > 0"));
        }
        if self.d0 != 1.0 {
            return Err(invalid("d0", "must be 1 eV"));
        }
        if self.e2 <= self.e1 {
            return Err(invalid("e2", "must be > e1"));
        }
        if !self.b1().is_finite() {
            return Err(invalid("c1_sq", "b1 = -1/(4 pi c1_sq) must be finite"));
        }
        Ok(())
    }

    /// Copy with Im Λ replaced according to `sign`.
    pub fn with_lambda_im_sign(mut self, sign: LambdaImSign) -> Self {
        if sign == LambdaImSign::Flipped {
            self.lambda_im = -self.lambda_im;
        }
        self
    }

    /// Copy whose excited-state pole decays in time (Im Λ <= 0).
    ///
    /// Time-domain routes need this form: with Im Λ > 0 the pole near
    /// `e2 + Λ` sits above every admissible integration line.
    pub fn decaying(mut self) -> Self {
        self.lambda_im = -self.lambda_im.abs();
        self
    }

    /// Bundled parameter sets `table1-a` .. `table1-d`.
    pub fn preset(name: &str) -> Option<Self> {
        Preset::from_str(name).ok().map(Preset::params)
    }
}

fn invalid(field: &'static str, constraint: &str) -> Error {
    Error::InvalidParameter {
        field,
        constraint: constraint.to_string(),
    }
}

/// The four published parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    A,
    B,
    C,
    D,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::A, Preset::B, Preset::C, Preset::D];

    pub fn name(self) -> &'static str {
        match self {
            Preset::A => "table1-a",
            Preset::B => "table1-b",
            Preset::C => "table1-c",
            Preset::D => "table1-d",
        }
    }

    pub fn params(self) -> ModelParams {
        // (Im Λ, c1^2, d, b2)
        let (lambda_im, c1_sq, d, b2) = match self {
            Preset::A => (250.0, 25.0, 1.25e7, -0.052),
            Preset::B => (250.0, 9.0, 1.25e7, -0.144),
            Preset::C => (300.0, 0.25, 1.15e7, -5.170),
            Preset::D => (250.0, 0.09, 1.05e7, -14.281),
        };
        ModelParams {
            lambda_re: 0.0,
            lambda_im,
            c1_sq,
            d,
            b2,
            e1: 0.0,
            e2: TRANSITION_ENERGY_EV,
            d0: 1.0,
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "table1-a" => Ok(Preset::A),
            "table1-b" => Ok(Preset::B),
            "table1-c" => Ok(Preset::C),
            "table1-d" => Ok(Preset::D),
            other => Err(format!(
                "unknown preset `{other}` (expected table1-a, table1-b, table1-c or table1-d)"
            )),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the printed Im Λ is fed into the formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaImSign {
    #[default]
    AsPrinted,
    Flipped,
}

impl LambdaImSign {
    pub fn as_str(self) -> &'static str {
        match self {
            LambdaImSign::AsPrinted => "as_printed",
            LambdaImSign::Flipped => "flipped",
        }
    }
}

impl FromStr for LambdaImSign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "as_printed" => Ok(LambdaImSign::AsPrinted),
            "flipped" => Ok(LambdaImSign::Flipped),
            other => Err(format!(
                "unknown lambda-im-sign `{other}` (expected as_printed or flipped)"
            )),
        }
    }
}
