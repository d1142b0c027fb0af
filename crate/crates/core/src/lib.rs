//! Lyapunov-based switching control of a single open qubit in the Bloch
//! representation.

pub mod certificates;
pub mod control;
pub mod error;
pub mod model;
pub mod pauli;
pub mod scenario;
pub mod switching;

pub use error::{Error, Result};
