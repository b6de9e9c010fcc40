//! Exact statevector QAOA with per-layer driving Hamiltonians.

mod circuit;
mod kernel;
mod optimize;
mod state;

pub use circuit::{evolve, gradient, value_and_gradient, Circuit, Evaluation, QaoaParams};
pub use optimize::{optimize, Method, OptimizerConfig, Trajectory, TrajectoryPoint};
pub use state::StateVector;
