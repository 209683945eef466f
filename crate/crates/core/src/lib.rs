//! Spectral line shapes of a two-level atom coupled to the electromagnetic
//! field through a nonlocal-in-time interaction.
//!
//! [`tmatrix`] holds the closed-form resolvent, [`lineshape`] the line-shape
//! density built from it, [`dynamics`] independent numerical checks of the
//! closed form and [`analysis`] profile post-processing (normalization,
//! peak finding, sweeps).

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Golden values are pasted at full oracle precision.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod expint;
pub mod lineshape;
pub mod model;
pub mod quadrature;
pub mod tmatrix;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use lineshape::{lineshape_terms, lorentzian_profile, profile_density, LineShapeTerms, LorentzianParams};
pub use model::{ComplexEnergy, LambdaImSign, ModelParams, Preset, TRANSITION_ENERGY_EV};
pub use quadrature::{QuadratureConfig, Transform};
pub use tmatrix::{t1_of_z, t_matrix, BathCoupling, EvalOptions, TMatrixElements};
