//! Sparsely smooth regression on hypergraphs.

pub mod admm;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod hypergraph;
pub mod learners;
pub mod linsolve;
pub mod operator;
pub mod prox;
pub mod smoothness;

pub use error::{Error, Result};
