//! Energy and momentum moments of any order, each computed by two routes that
//! must agree: weighting the transform and applying derivative operators.

pub mod moments;
pub mod window;

pub use moments::{
    carrier_shift, energy_moment_derivative, energy_moments, k_moment, k_moments,
    momentum_moment_derivative, momentum_moments, omega_moment_derivative, omega_moment_spectral,
    omega_moments, total_energy, MomentTable, Quantity, Route,
};
pub use window::{Alignment, Window, COMMENSURATE_TOL, R_MAX};
