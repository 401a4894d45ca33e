//! Exact tensor calculus over chart-indexed scalars.

pub mod conformal;
pub mod decomposition;
pub mod dense;
pub mod field;
pub mod geometry;
pub mod hypersurface;

pub use dense::{indices, Tensor, Variance};
pub use field::Scalar;
pub use geometry::{Chart, Geometry};
pub use hypersurface::HalfWeighted;
