//! Finite lattice theory and universal algebra at desk scale.
//!
//! The crate is organised around [`lattice::FiniteLattice`], a table-backed
//! finite lattice that every identity checker and construction works over.

pub mod cap;
pub mod fixtures;
pub mod lattice;
pub mod m3proj;
pub mod partition;
pub mod subspace;
pub mod term;
pub mod ua;
pub mod verify;

use thiserror::Error;

/// Crate-level error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    Term(#[from] term::TermError),
    #[error(transparent)]
    Partition(#[from] partition::PartitionError),
    #[error(transparent)]
    Subspace(#[from] subspace::SubspaceError),
    #[error(transparent)]
    M3(#[from] m3proj::M3Error),
    #[error(transparent)]
    Ua(#[from] ua::UaError),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
