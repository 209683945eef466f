use thiserror::Error;

/// Failures of the numerical routines.
///
/// Variants carry enough context to name the failing quantity; the CLI maps
/// every variant to exit status 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {constraint}")]
    InvalidParameter {
        field: &'static str,
        constraint: String,
    },

    #[error("T1 denominator {magnitude:e} is below the floor {floor:e} (resonance pole)")]
    DenominatorNearZero { magnitude: f64, floor: f64 },

    #[error("z - e1 lies within {distance:e} eV of the removable point i*d and limit handling is disabled")]
    RemovableSingularity { distance: f64 },

    #[error("T-matrix denominator {magnitude:e} is below the floor {floor:e}")]
    PoleProximity { magnitude: f64, floor: f64 },

    #[error("integrand pole lies on the integration path (z - e1 = {re} + {im}i)")]
    PoleOnPath { re: f64, im: f64 },

    #[error("{operation}: quadrature did not converge after {subdivisions} subdivisions (error estimate {error:e})")]
    NonConvergent {
        operation: &'static str,
        subdivisions: usize,
        error: f64,
    },

    #[error("{operation}: tail model uncertainty {uncertainty:e} exceeds tolerance {tolerance:e}")]
    TruncationWarning {
        operation: &'static str,
        uncertainty: f64,
        tolerance: f64,
    },

    #[error("finite-difference step {step:e} reached the rounding floor")]
    StepUnderflow { step: f64 },

    #[error("profile area {area:e} is not positive; cannot normalize")]
    ZeroArea { area: f64 },

    #[error("curves are sampled on different grids: {detail}")]
    WindowMismatch { detail: String },

    #[error("{operation} requires {requirement}")]
    Domain {
        operation: &'static str,
        requirement: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
