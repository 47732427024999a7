use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the toolkit.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Error {
    /// A vector had the wrong dimension for the operation.
    DimensionMismatch { expected: usize, got: usize },
    /// A coordinate was NaN or infinite where a finite value is required.
    NonFiniteCoordinate { index: usize },
    /// Projection onto an empty set was requested.
    NoProjection,
    /// A grid sweep would enumerate more points than the budget allows.
    BudgetExceeded { points: u64, budget: u64 },
    /// A function value was `±∞` at a point where finiteness is required.
    DomainError(String),
    /// The queried point does not belong to the graph (within tolerance).
    NotOnGraph,
    /// The operation is not available for this representation.
    Unsupported(String),
    /// A documented precondition was violated by the caller.
    ContractViolation(String),
    /// The descent tracker reached its step floor with the displacement
    /// still above tolerance; carries the iteration trace.
    NoSolutionFound { final_psi: f64, trace: Vec<TrackStep> },
}

/// One row of a tracker trace: iteration, displacement, distance from start.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrackStep {
    pub iteration: usize,
    pub psi: f64,
    pub distance: f64,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFiniteCoordinate { index } => {
                write!(f, "non-finite coordinate at index {index}")
            }
            Error::NoProjection => write!(f, "projection onto an empty set"),
            Error::BudgetExceeded { points, budget } => {
                write!(f, "grid budget exceeded: {points} points > budget {budget}")
            }
            Error::DomainError(msg) => write!(f, "domain error: {msg}"),
            Error::NotOnGraph => write!(f, "point is not on the graph"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::ContractViolation(msg) => write!(f, "contract violation: {msg}"),
            Error::NoSolutionFound { final_psi, trace } => write!(
                f,
                "no solution found: displacement {final_psi:.3e} after {} iterations",
                trace.len()
            ),
        }
    }
}

impl core::error::Error for Error {}
