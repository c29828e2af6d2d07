//! Nested extremum seeking (nES) for two-player leader-follower games.
//!
//! The crate simulates the model-free nES closed loop, every averaged and
//! reduced approximation of it, and the reference Nash and Stackelberg
//! equilibria those dynamics should approach. See the `examples/` directory
//! for runnable entry points.

pub mod analysis;
pub mod boundary;
pub mod cli;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod expr;
pub mod game;
pub mod games;
pub mod integrate;
pub mod plot;

pub use boundary::BoundaryPolicy;
pub use dynamics::{NesParams, State2};
pub use error::{NesError, Result};
pub use game::{Game, Partial, ScalarField2};
pub use integrate::{Trajectory, VectorField};
