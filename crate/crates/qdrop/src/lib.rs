//! File formats, experiment orchestration and statistics on top of
//! `qdrop-core`.

pub mod config;
pub mod digest;
mod error;
pub mod format;
pub mod harness;
pub mod stats;

pub use error::{Error, Result};
pub use qdrop_core as core;
