//! Classical collective phase space of a rotationally symmetry-broken
//! oscillator mean field: cranking, the momentum map and its inversion, the
//! canonical (angle, angular momentum) manifold, symplectic checks, and the
//! isovector scissors excitation operator.

pub mod algebra;
pub mod config;
pub mod cranking;
pub mod error;
pub mod geometry;
pub mod manifold;
pub mod optimize;
pub mod runner;
pub mod scissors;

pub use error::{Error, Result};
