//! Shared error type for the geometric layers.
//!
//! The expression kernel keeps its own [`KernelError`]; everything above it
//! (tensors, curvature, expansions, boundary checks) reports through
//! [`WorkbenchError`], which wraps kernel failures and adds the geometric
//! preconditions.

use crate::expr::KernelError;

#[derive(Clone, Debug, PartialEq)]
pub enum WorkbenchError {
    Kernel(KernelError),
    /// Component counts, ranks, or slot variances do not match.
    Shape(String),
    /// A tensor that must be symmetric is not.
    NotSymmetric(String),
    /// The metric determinant is identically zero.
    DegenerateMetric,
    /// Two half-density weights disagree.
    WeightMismatch { left: i64, right: i64 },
    /// A stated precondition of the operation fails.
    Precondition(String),
    /// The expansion recursion hit its degenerate order.
    DegenerateOrder { order: usize, detail: String },
    /// The input is outside the class the algorithm handles exactly.
    Unsupported(String),
    /// A task file failed to parse.
    TaskFile { line: usize, message: String },
}

impl From<KernelError> for WorkbenchError {
    fn from(e: KernelError) -> Self {
        WorkbenchError::Kernel(e)
    }
}

impl std::fmt::Display for WorkbenchError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WorkbenchError::Kernel(e) => write!(f, "{e}"),
            WorkbenchError::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            WorkbenchError::NotSymmetric(msg) => write!(f, "not symmetric: {msg}"),
            WorkbenchError::DegenerateMetric => write!(f, "metric determinant is identically zero"),
            WorkbenchError::WeightMismatch { left, right } => {
                write!(f, "half-weights differ: {left}/2 vs {right}/2")
            }
            WorkbenchError::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            WorkbenchError::DegenerateOrder { order, detail } => {
                write!(f, "recursion degenerates at order {order}: {detail}")
            }
            WorkbenchError::Unsupported(msg) => write!(f, "unsupported input: {msg}"),
            WorkbenchError::TaskFile { line, message } => {
                write!(f, "task file line {line}: {message}")
            }
        }
    }
}

impl std::error::Error for WorkbenchError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            WorkbenchError::Kernel(e) => Some(e),
            _ => None,
        }
    }
}
