//! Hopfield networks as content-addressable memory, operated three ways.
//!
//! * [`classical`] runs the usual asynchronous threshold dynamics.
//! * [`inversion`] recovers erased neurons by minimising the network energy
//!   under a clamp constraint, which reduces to one symmetric linear system
//!   solved with an eigenvalue-filtered pseudoinverse.
//! * [`quantum`] simulates the same inversion on a small state vector:
//!   amplitude encoding, Hebbian density-matrix exponentiation, phase
//!   estimation, filtered conditional rotation and post-selection.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and the experiment driver live in `hopfield-cli`.
//!
//! Neuron indices are 1-based wherever they cross the public API.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
pub mod linalg;
pub mod rng;

pub mod classical;
pub mod hebbian;
pub mod inversion;
pub mod patterns;
pub mod quantum;

pub use error::{Error, Result, Warning};
pub use hebbian::{DensityMatrix, WeightMatrix};
pub use linalg::Matrix;
pub use patterns::{ActivationPattern, ClampSet, TrainingSet};
