//! Fourier machinery, analytical signals and complex envelopes.

pub mod analytic;
pub mod axis;
pub mod field;
pub mod format;
pub mod params;
pub mod transform;

pub use analytic::{
    analytic_space, analytic_time, demodulate, envelope_extract, envelope_modulate,
    hilbert_time, modulate,
};
pub use axis::{Axis, AxisKind, BinClass};
pub use field::{Convention, Realness, SampledField, SpectrumField};
pub use params::ParticleParams;
pub use transform::{
    dft_space, dft_space_time, dft_time, inverse_dft, space_derivative, time_derivative,
};
