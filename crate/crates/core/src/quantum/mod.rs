//! State-vector simulation of quantum Hebbian learning and of the quantum
//! inversion recall, modelled at the level of dense matrices.

pub mod cmatrix;
pub mod phase;
pub mod qheb;
pub mod qhop;
pub mod register;
pub mod split;
pub mod swap;

pub use cmatrix::{CMatrix, C64};
pub use phase::{phase_estimate, EigenReadout, Evolution, ExactEvolution, PhaseScale};
pub use qheb::{qheb_evolve, qheb_step, qheb_step_swap, TrotterPlan};
pub use qhop::{qhop_solve, HebbianSource, QhopConfig, QhopReport, Snapshot};
pub use register::{embed, embed_w, QuantumRegister};
pub use split::{EvolutionMode, SplitEvolution};
pub use swap::{swap_test, SwapTest};
