//! Klein-Gordon and Schrodinger propagators and the reduction diagnostics between them.

pub mod dispersion;
pub mod kg;
pub(crate) mod operators;
pub mod potential;
pub mod reduction;
pub mod schrodinger;

pub use dispersion::DispersionBranch;
pub use kg::{
    default_fd_dt, kg_propagate_fd, kg_propagate_spectral, negative_k_fraction, InitialRate,
    KgFdRun, StepConfig,
};
pub use potential::{Boundary, Potential};
pub use reduction::{
    kg_envelope_vs_schrodinger, modulated_stationary_residual, paraxial_residual,
    ReductionReport,
};
pub use schrodinger::{default_split_dt, schrodinger_propagate};
