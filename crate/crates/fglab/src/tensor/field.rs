//! The scalar interface the tensor layer is generic over.
//!
//! Curvature code runs both over exact rational functions on a chart and
//! over truncated power series in a boundary defining variable.  Both
//! carry exact ring arithmetic, exact zero tests, and partial derivatives
//! indexed by chart variables, which is all the tensor layer needs.

use num::rational::BigRational;
use std::fmt;

use crate::expr::{JetScalar, KernelError, ScalarExpr};

pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Result<Self, KernelError>;
    fn sub(&self, other: &Self) -> Result<Self, KernelError>;
    fn mul(&self, other: &Self) -> Result<Self, KernelError>;
    fn neg(&self) -> Self;
    fn mul_rational(&self, k: &BigRational) -> Self;
    fn inv(&self) -> Result<Self, KernelError>;
    /// Partial derivative with respect to a chart variable (an index into
    /// the shared variable table).
    fn diff(&self, var: usize) -> Result<Self, KernelError>;
    fn is_zero(&self) -> bool;

    fn mul_int(&self, k: i64) -> Self {
        self.mul_rational(&BigRational::from_integer(k.into()))
    }

    fn mul_frac(&self, p: i64, q: i64) -> Self {
        self.mul_rational(&BigRational::new(p.into(), q.into()))
    }
}

impl Scalar for ScalarExpr {
    fn zero_like(&self) -> Self {
        ScalarExpr::zero(self.vars())
    }

    fn one_like(&self) -> Self {
        ScalarExpr::one(self.vars())
    }

    fn add(&self, other: &Self) -> Result<Self, KernelError> {
        ScalarExpr::add(self, other)
    }

    fn sub(&self, other: &Self) -> Result<Self, KernelError> {
        ScalarExpr::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Result<Self, KernelError> {
        ScalarExpr::mul(self, other)
    }

    fn neg(&self) -> Self {
        ScalarExpr::neg(self)
    }

    fn mul_rational(&self, k: &BigRational) -> Self {
        ScalarExpr::mul_rational(self, k)
    }

    fn inv(&self) -> Result<Self, KernelError> {
        ScalarExpr::inv(self)
    }

    fn diff(&self, var: usize) -> Result<Self, KernelError> {
        ScalarExpr::diff(self, var)
    }

    fn is_zero(&self) -> bool {
        ScalarExpr::is_zero(self)
    }
}

impl Scalar for JetScalar {
    fn zero_like(&self) -> Self {
        JetScalar::zero(self.vars(), self.distinguished_var(), self.order())
    }

    fn one_like(&self) -> Self {
        JetScalar::one(self.vars(), self.distinguished_var(), self.order())
    }

    fn add(&self, other: &Self) -> Result<Self, KernelError> {
        JetScalar::add(self, other)
    }

    fn sub(&self, other: &Self) -> Result<Self, KernelError> {
        JetScalar::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Result<Self, KernelError> {
        JetScalar::mul(self, other)
    }

    fn neg(&self) -> Self {
        JetScalar::neg(self)
    }

    fn mul_rational(&self, k: &BigRational) -> Self {
        JetScalar::mul_rational(self, k)
    }

    fn inv(&self) -> Result<Self, KernelError> {
        JetScalar::invert(self)
    }

    fn diff(&self, var: usize) -> Result<Self, KernelError> {
        JetScalar::diff(self, var)
    }

    fn is_zero(&self) -> bool {
        JetScalar::is_zero(self)
    }
}
