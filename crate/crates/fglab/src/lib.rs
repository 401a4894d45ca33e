//! fglab: an exact-arithmetic workbench for conformally compact Einstein
//! metrics.
//!
//! The crate computes curvature of metrics with exact rational-function
//! components, expands Poincare-Einstein metrics in the Fefferman-Graham
//! normal form, evaluates Bach and ambient obstruction tensors, checks the
//! boundary-value-problem identities that control boundary regularity, and
//! decides Lopatinski-Shapiro complementing conditions for the associated
//! elliptic systems.  All of it runs over exact scalars; a test passes
//! because an expression is identically zero, not because it is small.

pub mod adn;
pub mod bvp;
pub mod cli;
pub mod error;
pub mod expr;
pub mod fg;
pub mod obstruction;
pub mod tensor;

pub use cli::run;
pub use error::WorkbenchError;
pub use expr::{JetScalar, KernelError, ScalarExpr, VarTable};
pub use tensor::{Chart, Geometry, Scalar, Tensor, Variance};
