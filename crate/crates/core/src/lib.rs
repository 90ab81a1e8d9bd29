// SPDX-License-Identifier: Apache-2.0

//! Compiler, copy-kernel synthesizer and exact simulator for a
//! one-dimensional ABAB cell array driven only by two global interaction
//! phases.

pub mod array;
pub mod circuit;
pub mod collective;
pub mod compiler;
pub mod error;
pub mod layout;
pub mod linalg;
pub mod program_io;
pub mod scalar;
pub mod synthesizer;
pub mod trace;
pub mod verifier;

pub use error::{Error, Result};

pub type State = array::QuantumState<f64>;
pub type StateF32 = array::QuantumState<f32>;
pub type Step = collective::PulseStep<f64>;
pub type Gate = collective::CollectiveGate<f64>;
pub type Circuit = circuit::CircuitIR<f64>;
pub type Program = compiler::PulseProgram<f64>;
