//! Planted not-all-equal 3-SAT instances, classical baselines, Hamming
//! landscapes, quantum dropout plans, and an exact statevector QAOA engine.
//!
//! The crate is `no_std` and only needs an allocator. Spin configurations and
//! computational basis states share one encoding: bit `b` set means `s_b = -1`,
//! and qubit 0 is the least significant bit of a basis index.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod anneal;
pub mod dropout;
pub mod enumerate;
mod error;
pub mod generate;
pub mod greedy;
pub mod instance;
pub mod landscape;
pub mod qaoa;
pub mod seed;
pub mod spin;

pub use error::{Error, Result};
pub use instance::{Clause, CouplingMatrix, Instance, Label};
pub use spin::SpinConfig;

/// Largest spin count accepted by exhaustive enumeration.
pub const MAX_ENUM_SPINS: usize = 28;

/// Largest qubit count accepted by statevector and energy-table code.
pub const MAX_STATE_QUBITS: usize = 26;
