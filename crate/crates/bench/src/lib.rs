//! Inputs shared by the criterion benches.

use lineshape_core::analysis::{default_window, Window};
use lineshape_core::{Complex64, ModelParams, Preset};

/// The split-line preset, the most demanding of the four.
pub fn split_row() -> ModelParams {
    Preset::D.params()
}

pub fn window(params: &ModelParams) -> Window {
    default_window(params)
}

/// A point above the resonance, clear of the real axis.
pub fn probe_point(params: &ModelParams) -> Complex64 {
    Complex64::new(params.e2 + 150.0, 500.0)
}
