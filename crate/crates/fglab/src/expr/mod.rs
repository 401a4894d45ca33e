//! Exact scalar arithmetic: rational constants with optional imaginary
//! quadratic extensions, sparse multivariate polynomials, canonical
//! rational functions, truncated power series, and a parser for the
//! textual form of all of these.
//!
//! Every value has a unique internal representation, so `==` decides
//! mathematical equality and zero testing is exact.  That property is what
//! the tensor and boundary layers lean on; nothing downstream ever
//! compares floating point numbers.

pub mod gcd;
pub mod jet;
pub mod num;
pub mod parse;
pub mod poly;
pub mod scalar;

pub use jet::JetScalar;
pub use num::Constant;
pub use parse::parse_scalar;
pub use poly::{Monomial, Polynomial, VarTable};
pub use scalar::ScalarExpr;

/// Errors from the expression kernel.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelError {
    /// A quadratic extension was requested with a non-positive radicand.
    BadExtension(String),
    /// Two constants live in different quadratic extensions.
    FieldMismatch(String),
    DivisionByZero,
    /// A constant with a nonzero imaginary part was used where a rational
    /// number is required.
    NotRational(String),
    /// An expression still involves variables where a constant is required.
    NotConstant(String),
    /// Operands were built over different variable tables.
    VarMismatch(String),
    /// Exact polynomial division left a remainder.
    NotDivisible,
    /// Evaluation or substitution hit a zero denominator.
    Pole(String),
    Parse {
        message: String,
        position: usize,
    },
    /// A jet needs at least its order-zero coefficient.
    EmptyJet,
    /// Jet coefficients must not involve the series variable.
    JetCoefficientInvolvesVariable {
        var: String,
        index: usize,
    },
    /// An operation needed more coefficients than the jet carries.
    JetOrderTooLow {
        have: usize,
        want: usize,
    },
    /// Two jets expand in different distinguished variables.
    JetVariableMismatch,
    /// Inversion of a jet whose constant term vanishes.
    JetNotInvertible,
    /// Division by the series variable with a nonzero lower coefficient.
    JetNotDivisibleByVariable {
        coefficient: usize,
    },
    /// exp of a jet is exact only when the constant term vanishes.
    JetExpNeedsZeroConstantTerm,
}

impl std::fmt::Display for KernelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelError::BadExtension(msg) => write!(f, "bad quadratic extension: {msg}"),
            KernelError::FieldMismatch(msg) => write!(f, "incompatible extensions: {msg}"),
            KernelError::DivisionByZero => write!(f, "division by zero"),
            KernelError::NotRational(msg) => write!(f, "not a rational number: {msg}"),
            KernelError::NotConstant(msg) => write!(f, "not a constant: {msg}"),
            KernelError::VarMismatch(msg) => write!(f, "variable tables differ: {msg}"),
            KernelError::NotDivisible => write!(f, "polynomial division left a remainder"),
            KernelError::Pole(msg) => write!(f, "denominator vanishes: {msg}"),
            KernelError::Parse { message, position } => {
                write!(f, "parse error at byte {position}: {message}")
            }
            KernelError::EmptyJet => write!(f, "a jet needs at least one coefficient"),
            KernelError::JetCoefficientInvolvesVariable { var, index } => write!(
                f,
                "coefficient {index} involves the series variable {var}"
            ),
            KernelError::JetOrderTooLow { have, want } => {
                write!(f, "jet order {have} is too low (need {want})")
            }
            KernelError::JetVariableMismatch => {
                write!(f, "jets expand in different variables")
            }
            KernelError::JetNotInvertible => {
                write!(f, "jet has zero constant term and no inverse")
            }
            KernelError::JetNotDivisibleByVariable { coefficient } => write!(
                f,
                "not divisible by the series variable: coefficient {coefficient} is nonzero"
            ),
            KernelError::JetExpNeedsZeroConstantTerm => {
                write!(f, "exp of a jet needs a vanishing constant term")
            }
        }
    }
}

impl std::error::Error for KernelError {}
