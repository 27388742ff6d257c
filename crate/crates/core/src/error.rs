use thiserror::Error;

use crate::bipartite::Birank;

/// Which side of a product-state subtraction would lose positivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolatedSide {
    /// `rho - lambda P` itself.
    State,
    /// The partial transpose of the difference.
    PartialTranspose,
}

impl std::fmt::Display for ViolatedSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ViolatedSide::State => f.write_str("state"),
            ViolatedSide::PartialTranspose => f.write_str("partial transpose"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("non-generic subspace: {0}")]
    NonGeneric(String),

    #[error("subtraction of lambda = {lambda:e} exceeds the {side} threshold {threshold:e}")]
    WouldBeNpt {
        side: ViolatedSide,
        lambda: f64,
        threshold: f64,
    },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("search stalled at birank ({}, {}): {reason}", .birank.r, .birank.s)]
    Stalled { birank: Birank, reason: String },

    #[error("inconsistent with theory: {0}")]
    Inconsistent(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
