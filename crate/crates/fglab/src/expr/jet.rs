//! Truncated power series (jets) in one distinguished variable.
//!
//! A [`JetScalar`] of order m in the variable rho stores exact coefficients
//! c_0..c_m, each a [`ScalarExpr`] in the remaining variables, and means
//! c_0 + c_1 rho + ... + c_m rho^m + O(rho^{m+1}).  Arithmetic follows the
//! usual truncation bookkeeping: combining jets of orders m1 and m2 yields
//! order min(m1, m2); differentiating in rho drops the order by one;
//! differentiating in any other variable keeps it.
//!
//! Coefficients live over the full chart variable table for painless
//! interop with tensor components, but must not involve the distinguished
//! variable itself; construction checks this.

use num::rational::BigRational;
use std::fmt;
use std::sync::Arc;

use super::poly::VarTable;
use super::scalar::ScalarExpr;
use super::KernelError;

#[derive(Clone, Debug, PartialEq)]
pub struct JetScalar {
    var: usize,
    coeffs: Vec<ScalarExpr>, // length order + 1
}

impl JetScalar {
    pub fn new(var: usize, coeffs: Vec<ScalarExpr>) -> Result<Self, KernelError> {
        if coeffs.is_empty() {
            return Err(KernelError::EmptyJet);
        }
        for (k, c) in coeffs.iter().enumerate() {
            if c.involves(var) {
                return Err(KernelError::JetCoefficientInvolvesVariable {
                    var: c.vars().name(var).to_string(),
                    index: k,
                });
            }
        }
        Ok(JetScalar { var, coeffs })
    }

    pub fn constant(vars: &Arc<VarTable>, var: usize, value: ScalarExpr, order: usize) -> Result<Self, KernelError> {
        let mut coeffs = vec![ScalarExpr::zero(vars); order + 1];
        coeffs[0] = value;
        Self::new(var, coeffs)
    }

    pub fn zero(vars: &Arc<VarTable>, var: usize, order: usize) -> Self {
        JetScalar { var, coeffs: vec![ScalarExpr::zero(vars); order + 1] }
    }

    pub fn one(vars: &Arc<VarTable>, var: usize, order: usize) -> Self {
        let mut coeffs = vec![ScalarExpr::zero(vars); order + 1];
        coeffs[0] = ScalarExpr::one(vars);
        JetScalar { var, coeffs }
    }

    /// The distinguished variable itself as a jet (order must be >= 1).
    pub fn variable(vars: &Arc<VarTable>, var: usize, order: usize) -> Self {
        assert!(order >= 1, "the distinguished variable needs order >= 1");
        let mut coeffs = vec![ScalarExpr::zero(vars); order + 1];
        coeffs[1] = ScalarExpr::one(vars);
        JetScalar { var, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn distinguished_var(&self) -> usize {
        self.var
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.coeffs[0].vars()
    }

    pub fn coeff(&self, k: usize) -> &ScalarExpr {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[ScalarExpr] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Truncates (or errors when asked to extend, which would fabricate
    /// unknown coefficients).
    pub fn truncate(&self, order: usize) -> Result<Self, KernelError> {
        if order > self.order() {
            return Err(KernelError::JetOrderTooLow {
                have: self.order(),
                want: order,
            });
        }
        Ok(JetScalar {
            var: self.var,
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    fn check_compat(&self, other: &Self) -> Result<(), KernelError> {
        if self.var != other.var {
            return Err(KernelError::JetVariableMismatch);
        }
        super::poly::same_vars(self.vars(), other.vars())?;
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, KernelError> {
        self.check_compat(other)?;
        let m = self.order().min(other.order());
        let coeffs = (0..=m)
            .map(|k| self.coeffs[k].add(&other.coeffs[k]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(JetScalar { var: self.var, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, KernelError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        JetScalar {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, KernelError> {
        self.check_compat(other)?;
        let m = self.order().min(other.order());
        let vars = self.vars().clone();
        let mut coeffs = vec![ScalarExpr::zero(&vars); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(m + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(JetScalar { var: self.var, coeffs })
    }

    pub fn mul_scalar(&self, s: &ScalarExpr) -> Result<Self, KernelError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.mul(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.var, coeffs)
    }

    pub fn mul_rational(&self, k: &BigRational) -> Self {
        JetScalar {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| c.mul_rational(k)).collect(),
        }
    }

    /// Multiplies by rho^k.  The k lowest coefficients of the product are
    /// exactly zero, so the truncation order rises by k.
    pub fn shift_up(&self, k: usize) -> Self {
        let vars = self.vars().clone();
        let mut coeffs = vec![ScalarExpr::zero(&vars); self.coeffs.len() + k];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i + k] = c.clone();
        }
        JetScalar { var: self.var, coeffs }
    }

    /// Inverse of a jet whose constant coefficient is a unit; errors when
    /// c_0 = 0.  Uses the standard recursion b_k = -(1/c_0) sum c_j b_{k-j}.
    pub fn invert(&self) -> Result<Self, KernelError> {
        if self.coeffs[0].is_zero() {
            return Err(KernelError::JetNotInvertible);
        }
        let c0_inv = self.coeffs[0].inv()?;
        let vars = self.vars().clone();
        let m = self.order();
        let mut out = vec![ScalarExpr::zero(&vars); m + 1];
        out[0] = c0_inv.clone();
        for k in 1..=m {
            let mut acc = ScalarExpr::zero(&vars);
            for j in 1..=k {
                if self.coeffs[j].is_zero() || out[k - j].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[j].mul(&out[k - j])?)?;
            }
            out[k] = acc.neg().mul(&c0_inv)?;
        }
        Ok(JetScalar { var: self.var, coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self, KernelError> {
        self.mul(&other.invert()?)
    }

    /// Derivative in the distinguished variable: shifts coefficients down
    /// and drops the order by one.  Errors at order zero, where nothing is
    /// known about the slope.
    pub fn diff_distinguished(&self) -> Result<Self, KernelError> {
        if self.order() == 0 {
            return Err(KernelError::JetOrderTooLow { have: 0, want: 1 });
        }
        let coeffs = (1..self.coeffs.len())
            .map(|k| {
                self.coeffs[k].mul_rational(&BigRational::from_integer((k as i64).into()))
            })
            .collect();
        Ok(JetScalar { var: self.var, coeffs })
    }

    /// Derivative in any variable: the distinguished one shifts, the others
    /// act coefficientwise.
    pub fn diff(&self, var: usize) -> Result<Self, KernelError> {
        if var == self.var {
            self.diff_distinguished()
        } else {
            let coeffs = self
                .coeffs
                .iter()
                .map(|c| c.diff(var))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(JetScalar { var: self.var, coeffs })
        }
    }

    /// Exact division by rho^k; errors when any lower coefficient is
    /// nonzero.  The order drops by k.
    pub fn shift_down(&self, k: usize) -> Result<Self, KernelError> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.coeffs.len() <= k {
            return Err(KernelError::JetOrderTooLow {
                have: self.order(),
                want: k,
            });
        }
        for (i, c) in self.coeffs.iter().take(k).enumerate() {
            if !c.is_zero() {
                return Err(KernelError::JetNotDivisibleByVariable { coefficient: i });
            }
        }
        Ok(JetScalar {
            var: self.var,
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Value at rho = 0.
    pub fn at_zero(&self) -> ScalarExpr {
        self.coeffs[0].clone()
    }

    /// exp of a jet with zero constant term (so the result is exact).
    pub fn exp(&self) -> Result<Self, KernelError> {
        if !self.coeffs[0].is_zero() {
            return Err(KernelError::JetExpNeedsZeroConstantTerm);
        }
        let m = self.order();
        let vars = self.vars().clone();
        let mut out = JetScalar::one(&vars, self.var, m);
        let mut term = JetScalar::one(&vars, self.var, m);
        // nilpotent argument: the series stops after m steps
        for k in 1..=m {
            term = term.mul(self)?;
            let inv_k_fact = BigRational::new(1.into(), factorial(k));
            out = out.add(&term.mul_rational(&inv_k_fact))?;
        }
        Ok(out)
    }
}

fn factorial(k: usize) -> num::BigInt {
    let mut f = num::BigInt::from(1);
    for i in 2..=k {
        f *= num::BigInt::from(i);
    }
    f
}

impl fmt::Display for JetScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.vars().name(self.var);
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*{name}")?,
                _ => write!(f, "({c})*{name}^{k}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", name, self.order() + 1)
    }
}
