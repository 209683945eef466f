//! Independent numerical checks of the closed-form solution: the T-matrix
//! differential equation, its large-|z| boundary condition, the contour
//! representation of the evolution operator and the nonlocality kernel.
//!
//! Summing the T-matrix equation over one-photon states reduces it to the
//! radial integral J(z) of [`kernel_integral`]. The prefactor of J is fixed by
//! the closed form itself: d(1/T1)/dz = J(z) requires
//! J = 4 pi c1^2 \int_0^inf w^2 / (d^2 + w^2) (z - e1 - w)^-2 dw.

mod contour;
mod kernel;
mod nonlocality;
mod residual;

pub use contour::{
    photon_amplitude_profile, survival_amplitude, survival_amplitude_with, ContourAmplitude,
    ContourConfig,
};
pub use kernel::kernel_integral;
pub use nonlocality::{
    boundary_transform, eval_f_tau, eval_f_tau_with, round_trip_transform, scaled_f_tau,
    windowed_mass, BranchConvention,
};
pub use residual::{
    boundary_remainder, boundary_residual, default_steps, ode_residual, richardson_derivative,
    BoundaryRemainder, ResidualReport,
};
