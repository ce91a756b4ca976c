//! Stationary states of the envelope equation and their use as a basis.

mod basis;
mod split;
pub(crate) mod tridiag;

pub use basis::{
    assemble, project, solve_bound_states, solve_bound_states_dense, EigenBasis, Projection,
    DEGENERACY_TOL,
};
pub use split::{directional_split, DirectionalSplit};
