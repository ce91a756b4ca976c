//! Measurement probabilities recovered from moments, checked against projections.

mod characteristic;
mod distribution;
mod dynamics;

pub use characteristic::{
    characteristic_from_distribution, characteristic_from_moments, max_usable_s,
    CharacteristicFunction, CharacteristicSource, TAIL_LIMIT,
};
pub use distribution::{
    reconstruct_discrete, DiscreteDistribution, Reconstruction, ReconstructionAudit, CLIP_LIMIT,
    CONDITION_LIMIT,
};
pub use dynamics::{momentum_probabilities, moments_from_dynamics, MomentSummary, ROUTE_TOLERANCE};
