//! Spectral toolkit for Dunkl harmonic oscillators on the line perturbed by
//! inverse-power potentials.
//!
//! The crate evaluates the generalized Hermite basis, computes the matrix
//! elements of the perturbation forms by independent routes (closed forms,
//! recursions, and adaptive quadrature), assembles truncated quadratic forms
//! for the full-line and half-line operators, and checks the eigenvalue
//! sandwiches and admissibility predicates that govern them.

pub mod analysis;
pub mod basis;
pub mod cli;
pub mod coeffs;
pub mod oracle;
pub mod specfun;
pub mod spectra;
pub mod verify;

use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters fall on (or within 1e-9 of) an excluded integer difference
    /// where a closed form has a Gamma pole.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// An iterative scheme failed to reach its tolerance.
    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// Hypotheses of the relevant theorem fail; lists the violated clauses.
    #[error("hypothesis failure ({case}): {}", violated.join("; "))]
    Hypothesis { case: String, violated: Vec<String> },

    /// Too few data points to perform a requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Tuple arity does not match the region being tested.
    #[error("arity error: {0}")]
    Arity(String),

    /// Invalid command-line usage.
    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
