//! Graph bootstrap percolation for triangles, the activation-process
//! calculus built on it, and seeded threshold experiments.

pub mod bootstrap;
pub mod diagram;
pub mod experiments;
pub mod error;
pub mod graph;
pub mod lm;
pub mod process;
pub mod seed;
pub mod topology;
pub mod tree_builder;
pub mod verify;

pub use bootstrap::{ActivationProcess, ActivationStep, Answer, ClosureResult};
pub use error::{Error, Result};
pub use graph::{Edge, Graph, Triangle, Vertex};
pub use seed::Seed;

/// Versions of the JSON and CSV formats read and written by this crate.
pub const SCHEMA_VERSIONS: &[(&str, u32)] = &[("graph", 1), ("process", 1), ("complex", 1), ("diagram", 1), ("lm", 1), ("census", 1), ("sweep-csv", 1), ("summary", 1)];
