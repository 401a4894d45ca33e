//! Rational functions in canonical form.
//!
//! A [`ScalarExpr`] is a quotient num/den of multivariate polynomials with
//! gcd(num, den) = 1 and den monic in graded lex order.  Equality of values
//! is therefore structural equality, which the whole workbench relies on
//! when it asserts that a residual vanishes exactly.
//!
//! Addition and multiplication use the classical content tricks (reduce by
//! gcd of the denominators before cross-multiplying, cancel across the
//! diagonal in products) so that structured denominators such as powers of
//! one irreducible stay small through long tensor contractions.

use num::rational::BigRational;
use num::Zero;
use std::fmt;
use std::sync::Arc;

use super::gcd::poly_gcd;
use super::num::Constant;
use super::poly::{same_vars, Polynomial, VarTable};
use super::KernelError;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarExpr {
    num: Polynomial,
    den: Polynomial,
}

impl ScalarExpr {
    fn make(num: Polynomial, den: Polynomial) -> Result<Self, KernelError> {
        if den.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(ScalarExpr {
                den: Polynomial::one(num.vars()),
                num,
            });
        }
        if den.is_one() {
            return Ok(ScalarExpr { num, den });
        }
        let g = poly_gcd(&num, &den)?;
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        if !den.is_one() {
            let lc = den.leading_coefficient();
            if !lc.is_one() {
                let inv = lc.inv()?;
                num = num.mul_constant(&inv)?;
                den = den.mul_constant(&inv)?;
            }
        }
        Ok(ScalarExpr { num, den })
    }

    pub fn zero(vars: &Arc<VarTable>) -> Self {
        ScalarExpr { num: Polynomial::zero(vars), den: Polynomial::one(vars) }
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        ScalarExpr { num: Polynomial::one(vars), den: Polynomial::one(vars) }
    }

    pub fn constant(vars: &Arc<VarTable>, c: Constant) -> Self {
        ScalarExpr { num: Polynomial::constant(vars, c), den: Polynomial::one(vars) }
    }

    pub fn from_int(vars: &Arc<VarTable>, n: i64) -> Self {
        Self::constant(vars, Constant::from_int(n))
    }

    pub fn from_frac(vars: &Arc<VarTable>, p: i64, q: i64) -> Self {
        Self::constant(vars, Constant::from_frac(p, q))
    }

    pub fn var(vars: &Arc<VarTable>, i: usize) -> Self {
        ScalarExpr { num: Polynomial::var(vars, i), den: Polynomial::one(vars) }
    }

    pub fn from_poly(num: Polynomial) -> Self {
        let den = Polynomial::one(num.vars());
        ScalarExpr { num, den }
    }

    pub fn from_ratio(num: Polynomial, den: Polynomial) -> Result<Self, KernelError> {
        same_vars(num.vars(), den.vars())?;
        Self::make(num, den)
    }

    /// Moves the expression onto another variable table; `positions` maps
    /// each current variable to its slot in the new table, with `None`
    /// allowed only for variables the expression does not use.
    pub fn project(
        &self,
        new_vars: &Arc<VarTable>,
        positions: &[Option<usize>],
    ) -> Result<Self, KernelError> {
        let num = self.num.project(new_vars, positions)?;
        let den = self.den.project(new_vars, positions)?;
        Self::make(num, den)
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    /// The value as a constant, when it is one.
    pub fn to_constant(&self) -> Result<Constant, KernelError> {
        if self.is_constant() {
            Ok(self.num.constant_term())
        } else {
            Err(KernelError::NotConstant(self.to_string()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, KernelError> {
        same_vars(self.vars(), other.vars())?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den.is_one() && other.den.is_one() {
            return Ok(ScalarExpr {
                num: self.num.add(&other.num)?,
                den: self.den.clone(),
            });
        }
        // a/b + c/d with g = gcd(b, d): numerator a*(d/g) + c*(b/g),
        // denominator (b/g)*d; only factors of g can cancel further.
        let g = poly_gcd(&self.den, &other.den)?;
        if g.is_one() {
            let num = self.num.mul(&other.den)?.add(&other.num.mul(&self.den)?)?;
            let den = self.den.mul(&other.den)?;
            // coprime denominators cannot cancel against the numerator
            return Ok(ScalarExpr { num, den });
        }
        let b1 = self.den.exact_div(&g)?;
        let d1 = other.den.exact_div(&g)?;
        let num = self.num.mul(&d1)?.add(&other.num.mul(&b1)?)?;
        let g2 = poly_gcd(&num, &g)?;
        if g2.is_one() {
            let den = b1.mul(&other.den)?;
            let mut out = ScalarExpr { num, den };
            out.normalize_den()?;
            return Ok(out);
        }
        let num = num.exact_div(&g2)?;
        let den = b1.mul(&other.den.exact_div(&g2)?)?;
        let mut out = ScalarExpr { num, den };
        out.normalize_den()?;
        Ok(out)
    }

    fn normalize_den(&mut self) -> Result<(), KernelError> {
        if self.den.is_one() {
            return Ok(());
        }
        let lc = self.den.leading_coefficient();
        if !lc.is_one() {
            let inv = lc.inv()?;
            self.num = self.num.mul_constant(&inv)?;
            self.den = self.den.mul_constant(&inv)?;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, KernelError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ScalarExpr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, KernelError> {
        same_vars(self.vars(), other.vars())?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.vars()));
        }
        if self.is_one() {
            return Ok(other.clone());
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        // cancel across the diagonal before multiplying
        let g1 = poly_gcd(&self.num, &other.den)?;
        let g2 = poly_gcd(&other.num, &self.den)?;
        let a = if g1.is_one() { self.num.clone() } else { self.num.exact_div(&g1)? };
        let d = if g1.is_one() { other.den.clone() } else { other.den.exact_div(&g1)? };
        let c = if g2.is_one() { other.num.clone() } else { other.num.exact_div(&g2)? };
        let b = if g2.is_one() { self.den.clone() } else { self.den.exact_div(&g2)? };
        let mut out = ScalarExpr { num: a.mul(&c)?, den: b.mul(&d)? };
        out.normalize_den()?;
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self, KernelError> {
        if other.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        self.mul(&ScalarExpr::make(other.den.clone(), other.num.clone())?)
    }

    pub fn inv(&self) -> Result<Self, KernelError> {
        if self.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        Self::make(self.den.clone(), self.num.clone())
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn pow(&self, k: i32) -> Result<Self, KernelError> {
        if k == 0 {
            return Ok(Self::one(self.vars()));
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mag = k.unsigned_abs();
        // num and den are coprime, so powers need no re-reduction
        let mut out = ScalarExpr {
            num: base.num.pow(mag)?,
            den: base.den.pow(mag)?,
        };
        out.normalize_den()?;
        Ok(out)
    }

    pub fn mul_rational(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars());
        }
        ScalarExpr { num: self.num.mul_rational(k), den: self.den.clone() }
    }

    pub fn mul_constant(&self, c: &Constant) -> Result<Self, KernelError> {
        if c.is_zero() {
            return Ok(Self::zero(self.vars()));
        }
        Ok(ScalarExpr { num: self.num.mul_constant(c)?, den: self.den.clone() })
    }

    /// Partial derivative by the quotient rule.
    pub fn diff(&self, var: usize) -> Result<Self, KernelError> {
        if self.den.is_one() {
            return Ok(Self::from_poly(self.num.diff(var)));
        }
        if !self.num.involves(var) && !self.den.involves(var) {
            return Ok(Self::zero(self.vars()));
        }
        // (n/d)' = (n'd - nd')/d^2; cancel the gcd of d and d' cheaply by
        // letting make() reduce.
        let n1 = self.num.diff(var).mul(&self.den)?.sub(&self.num.mul(&self.den.diff(var))?)?;
        Self::make(n1, self.den.pow(2)?)
    }

    /// Substitutes a rational expression for one variable.  Errors if the
    /// substitution lands on a pole (denominator becomes zero).
    pub fn substitute(&self, var: usize, value: &ScalarExpr) -> Result<Self, KernelError> {
        same_vars(self.vars(), value.vars())?;
        let sub_poly = |p: &Polynomial| -> Result<ScalarExpr, KernelError> {
            // p(.., value, ..) via Horner in the substituted variable
            let d = p.degree_in(var);
            let mut acc = Self::zero(self.vars());
            for e in (0..=d).rev() {
                let mut coeff = Polynomial::zero(self.vars());
                for (m, c) in p.terms() {
                    if m.0[var] == e {
                        let mut m2 = m.clone();
                        m2.0[var] = 0;
                        coeff = coeff.add(&Polynomial::from_terms(
                            p.vars(),
                            [(m2, c.clone())],
                        )?)?;
                    }
                }
                acc = acc.mul(value)?.add(&Self::from_poly(coeff))?;
            }
            Ok(acc)
        };
        let num = sub_poly(&self.num)?;
        let den = sub_poly(&self.den)?;
        if den.is_zero() {
            return Err(KernelError::Pole(format!(
                "substitution for {} hits a pole",
                self.vars().name(var)
            )));
        }
        num.div(&den)
    }

    /// Evaluates at a point.  Errors on a pole.
    pub fn eval(&self, point: &[Constant]) -> Result<Constant, KernelError> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(KernelError::Pole(
                "denominator vanishes at the evaluation point".to_string(),
            ));
        }
        self.num.eval(point)?.div(&d)
    }

    /// Degree of the numerator in one variable (den checked separately).
    pub fn involves(&self, var: usize) -> bool {
        self.num.involves(var) || self.den.involves(var)
    }
}

impl fmt::Display for ScalarExpr {
    /// `num` when the denominator is one, otherwise `num/den` with each
    /// side parenthesized when it has more than one term.  Reparses to the
    /// same canonical value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let needs_parens = |p: &Polynomial| -> bool {
            p.num_terms() > 1 || {
                // single negative term or rational coefficient with a
                // monomial needs protection inside a quotient
                p.num_terms() == 1 && {
                    let s = p.to_string();
                    s.contains(' ') || (s.contains('-') && !p.is_constant())
                }
            }
        };
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if needs_parens(&self.num) {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/")?;
        if needs_parens(&self.den) || self.den.num_terms() == 1 && self.den.to_string().contains('*') {
            write!(f, "({})", self.den)
        } else {
            write!(f, "{}", self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vt() -> Arc<VarTable> {
        VarTable::new(&["x0", "x1"])
    }

    fn x(v: &Arc<VarTable>, i: usize) -> ScalarExpr {
        ScalarExpr::var(v, i)
    }

    #[test]
    fn difference_of_squares_cancels() {
        let v = vt();
        let num = x(&v, 0).pow(2).unwrap().sub(&x(&v, 1).pow(2).unwrap()).unwrap();
        let den = x(&v, 0).sub(&x(&v, 1)).unwrap();
        let q = num.div(&den).unwrap();
        assert_eq!(q, x(&v, 0).add(&x(&v, 1)).unwrap());
        assert!(q.is_polynomial());
    }

    #[test]
    fn derivative_of_reciprocal() {
        let v = vt();
        let r = ScalarExpr::one(&v).div(&x(&v, 0)).unwrap();
        let d = r.diff(0).unwrap();
        let expect = ScalarExpr::from_int(&v, -1)
            .div(&x(&v, 0).pow(2).unwrap())
            .unwrap();
        assert_eq!(d, expect);
        assert_eq!(d.to_string(), "-1/x0^2");
    }

    #[test]
    fn canonical_form_divides_out_common_factor() {
        let v = vt();
        let p = x(&v, 0).add(&ScalarExpr::one(&v)).unwrap();
        let r = x(&v, 1).mul(&p).unwrap().div(&p.mul(&x(&v, 0)).unwrap()).unwrap();
        assert_eq!(r, x(&v, 1).div(&x(&v, 0)).unwrap());
    }

    #[test]
    fn substitution_catches_poles() {
        let v = vt();
        let r = ScalarExpr::one(&v).div(&x(&v, 0)).unwrap();
        assert!(matches!(
            r.substitute(0, &ScalarExpr::zero(&v)),
            Err(KernelError::Pole(_))
        ));
        let s = r.substitute(0, &x(&v, 1).add(&ScalarExpr::one(&v)).unwrap()).unwrap();
        assert_eq!(
            s,
            ScalarExpr::one(&v)
                .div(&x(&v, 1).add(&ScalarExpr::one(&v)).unwrap())
                .unwrap()
        );
    }

    #[test]
    fn eval_exact() {
        let v = vt();
        // (x0 + x1)/(x0 - x1) at (3, 1) = 2
        let r = x(&v, 0)
            .add(&x(&v, 1))
            .unwrap()
            .div(&x(&v, 0).sub(&x(&v, 1)).unwrap())
            .unwrap();
        let val = r
            .eval(&[Constant::from_int(3), Constant::from_int(1)])
            .unwrap();
        assert_eq!(val, Constant::from_int(2));
    }

    #[test]
    fn monic_denominator_normalization() {
        let v = vt();
        // 1/(2x0) -> (1/2)/x0
        let r = ScalarExpr::one(&v)
            .div(&x(&v, 0).mul_rational(&BigRational::from_integer(2.into())))
            .unwrap();
        assert_eq!(r.den().to_string(), "x0");
        assert_eq!(r.num().to_string(), "1/2");
    }
}
