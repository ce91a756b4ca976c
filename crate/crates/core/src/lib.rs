//! Analytical-signal wave mechanics at desk scale.
//!
//! * [`signal`]: transforms under a fixed kernel pair, pre-envelopes, Hilbert
//!   transforms and carrier demodulation.
//! * [`waves`]: Klein-Gordon and Schrodinger propagators and the paraxial
//!   reduction diagnostics that connect them.
//! * [`observables`]: energy and momentum moments by a spectral route and a
//!   derivative route.
//! * [`eigen`]: bound states of the stationary equation, projections and
//!   directional splitting.
//! * [`probability`]: measurement probabilities recovered from moments.
//!
//! Inner loops over independent rows, columns and states run on Rayon when the
//! `parallel` feature is enabled (the default).

pub mod eigen;
pub mod error;
pub mod observables;
pub mod par;
pub mod probability;
pub mod signal;
pub mod waves;

pub use error::{Error, Result};
pub use signal::{Axis, AxisKind, ParticleParams, Realness, SampledField, SpectrumField};
