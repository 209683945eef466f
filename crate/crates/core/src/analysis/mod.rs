//! Grid profiles and what is read off them: the normalizer A, peaks, FWHM,
//! the split/single classification, distance from the impact Lorentzian and
//! parameter sweeps.

mod peaks;
mod profile;
mod sweep;

pub use peaks::{find_peaks, Classification, Peak, PeakReport, DEFAULT_DIP_THRESHOLD, DEFAULT_PROMINENCE_FLOOR};
pub use profile::{
    default_window, evaluate_profile, lorentz_deviation, lorentz_deviation_curves, normalize, sampled_lorentzian,
    trapezoid_area, ProfileCurve, Window,
};
pub use sweep::{sweep, Axis, CellOutcome, SweepCell, SweepResult, SweepSpec};
