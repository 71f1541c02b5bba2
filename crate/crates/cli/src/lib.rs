//! Command-line harness for `hopfield-core`: file formats, the bundled
//! synthetic fixture, recovery-curve and γ-sweep experiments and the
//! quantum-versus-classical cross-check.

pub mod experiment;
pub mod fixture;
pub mod io;
pub mod qcheck;
