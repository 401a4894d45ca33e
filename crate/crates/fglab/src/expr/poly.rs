//! Sparse multivariate polynomials over the exact constant field.
//!
//! Terms are kept in a BTreeMap keyed by monomial in graded lexicographic
//! order (total degree first, then exponent vectors compared left to right
//! with the earlier variable stronger).  The map never stores a zero
//! coefficient, so structural equality is canonical equality.

use num::rational::BigRational;
use num::{Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::num::Constant;
use super::KernelError;

/// Ordered list of variable names shared by every expression in a chart.
#[derive(Debug, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new(names: &[&str]) -> Arc<Self> {
        let owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        assert!(
            {
                let mut sorted = owned.clone();
                sorted.sort();
                sorted.dedup();
                sorted.len() == owned.len()
            },
            "variable names must be distinct"
        );
        Arc::new(VarTable { names: owned })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Checks two expressions live over the same variable table.
pub fn same_vars(a: &Arc<VarTable>, b: &Arc<VarTable>) -> Result<(), KernelError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(KernelError::VarMismatch(format!(
            "variable tables differ: [{}] vs [{}]",
            a.names.join(","),
            b.names.join(",")
        )))
    }
}

/// Exponent vector; length always equals the variable table size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise quotient when `other` divides `self`.
    pub fn try_div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => self.0.cmp(&other.0),
            ord => ord,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    vars: Arc<VarTable>,
    terms: BTreeMap<Monomial, Constant>,
}

impl Polynomial {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Arc<VarTable>, c: Constant) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(vars.len()), c);
        }
        Polynomial { vars: vars.clone(), terms }
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::constant(vars, Constant::one())
    }

    pub fn var(vars: &Arc<VarTable>, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(vars.len(), i), Constant::one());
        Polynomial { vars: vars.clone(), terms }
    }

    pub fn from_terms(
        vars: &Arc<VarTable>,
        terms: impl IntoIterator<Item = (Monomial, Constant)>,
    ) -> Result<Self, KernelError> {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "monomial arity mismatch");
            p.add_term(m, c)?;
        }
        Ok(p)
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Constant)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_unit() && c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.leading_monomial().is_unit())
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Constant {
        self.terms
            .get(&Monomial::unit(self.vars.len()))
            .cloned()
            .unwrap_or_else(Constant::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().next_back().map(|m| m.total_degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// Leading monomial in graded lex order; unit monomial for zero.
    pub fn leading_monomial(&self) -> Monomial {
        self.terms
            .keys()
            .next_back()
            .cloned()
            .unwrap_or_else(|| Monomial::unit(self.vars.len()))
    }

    pub fn leading_coefficient(&self) -> Constant {
        self.terms
            .values()
            .next_back()
            .cloned()
            .unwrap_or_else(Constant::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Constant) -> Result<(), KernelError> {
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old.add(&c)?;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, KernelError> {
        same_vars(&self.vars, &other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, KernelError> {
        same_vars(&self.vars, &other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, KernelError> {
        same_vars(&self.vars, &other.vars)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        // Multiply the smaller term list into the larger one.
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::zero(&self.vars);
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                out.add_term(ma.mul(mb), ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn mul_constant(&self, c: &Constant) -> Result<Self, KernelError> {
        if c.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        let mut terms = BTreeMap::new();
        for (m, k) in &self.terms {
            let p = k.mul(c)?;
            if !p.is_zero() {
                terms.insert(m.clone(), p);
            }
        }
        Ok(Polynomial { vars: self.vars.clone(), terms })
    }

    pub fn mul_rational(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(k))).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Constant) -> Result<Self, KernelError> {
        if c.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        let mut terms = BTreeMap::new();
        for (m, k) in &self.terms {
            let p = k.mul(c)?;
            if !p.is_zero() {
                terms.insert(m.mul(mono), p);
            }
        }
        Ok(Polynomial { vars: self.vars.clone(), terms })
    }

    pub fn pow(&self, k: u32) -> Result<Self, KernelError> {
        let mut out = Self::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(out)
    }

    /// Exact division; errors when `other` does not divide `self`.
    pub fn exact_div(&self, other: &Self) -> Result<Self, KernelError> {
        same_vars(&self.vars, &other.vars)?;
        if other.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        let lm_d = other.leading_monomial();
        let lc_d_inv = other.leading_coefficient().inv()?;
        let mut rem = self.clone();
        let mut quo = Self::zero(&self.vars);
        while !rem.is_zero() {
            let lm_r = rem.leading_monomial();
            let Some(m) = lm_r.try_div(&lm_d) else {
                return Err(KernelError::NotDivisible);
            };
            let c = rem.leading_coefficient().mul(&lc_d_inv)?;
            quo.add_term(m.clone(), c.clone())?;
            rem = rem.sub(&other.mul_monomial(&m, &c)?)?;
        }
        Ok(quo)
    }

    /// Whether `self == k * other` for some nonzero constant `k`.
    pub fn proportional_to(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        if self.is_zero() {
            return true;
        }
        let la = self.leading_coefficient();
        let lb = other.leading_coefficient();
        let Ok(k) = la.div(&lb) else { return false };
        self.terms.iter().zip(other.terms.iter()).all(|((ma, ca), (mb, cb))| {
            ma == mb && cb.mul(&k).map(|p| p == *ca).unwrap_or(false)
        })
    }

    /// Partial derivative in the given variable.
    pub fn diff(&self, var: usize) -> Self {
        assert!(var < self.vars.len(), "variable index out of range");
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] = e - 1;
            terms.insert(m2, c.scale(&BigRational::from_integer(e.into())));
        }
        Polynomial { vars: self.vars.clone(), terms }
    }

    /// Substitutes a polynomial for one variable.
    pub fn substitute(&self, var: usize, value: &Polynomial) -> Result<Self, KernelError> {
        same_vars(&self.vars, &value.vars)?;
        let mut out = Self::zero(&self.vars);
        // Group by exponent of the substituted variable, then Horner.
        let max_e = self.degree_in(var);
        let mut by_exp: Vec<Polynomial> = vec![Self::zero(&self.vars); (max_e + 1) as usize];
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            by_exp[e as usize].add_term(m2, c.clone())?;
        }
        for coeff in by_exp.into_iter().rev() {
            out = out.mul(value)?.add(&coeff)?;
        }
        Ok(out)
    }

    /// Evaluates at a full point, one constant per variable.
    pub fn eval(&self, point: &[Constant]) -> Result<Constant, KernelError> {
        assert_eq!(point.len(), self.vars.len(), "evaluation point arity mismatch");
        let mut acc = Constant::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&point[i])?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Rebuilds the polynomial over another variable table.  `positions[v]`
    /// names the slot of this polynomial's variable `v` in the new table;
    /// `None` drops the variable, which is only legal when no term uses it.
    /// Distinct source variables must map to distinct slots.
    pub fn project(
        &self,
        new_vars: &Arc<VarTable>,
        positions: &[Option<usize>],
    ) -> Result<Self, KernelError> {
        if positions.len() != self.vars.len() {
            return Err(KernelError::VarMismatch(format!(
                "projection map covers {} variables, table has {}",
                positions.len(),
                self.vars.len()
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut image = Monomial::unit(new_vars.len());
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match positions[v] {
                    Some(slot) => {
                        assert!(slot < new_vars.len(), "projection slot out of range");
                        image.0[slot] = e;
                    }
                    None => {
                        return Err(KernelError::VarMismatch(format!(
                            "variable {} is dropped by the projection but still occurs",
                            self.vars.name(v)
                        )))
                    }
                }
            }
            terms.push((image, c.clone()));
        }
        Self::from_terms(new_vars, terms)
    }

    /// All monomials have even exponent in every variable listed.
    pub fn even_in(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|m| vars.iter().all(|&v| m.0[v] % 2 == 0))
    }

    /// Scales so the leading coefficient is one; zero stays zero.
    pub fn monic(&self) -> Result<Self, KernelError> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        self.mul_constant(&self.leading_coefficient().inv()?)
    }
}

impl fmt::Display for Polynomial {
    /// Terms in descending graded lex order; reparses to the same value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let (lead_neg, mag) = if c.is_rational() && c.re().is_negative() {
                (true, c.neg())
            } else {
                (false, c.clone())
            };
            if first {
                if lead_neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if lead_neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_str = if !mag.is_rational() {
                // Extension constants print parenthesized inside sums.
                format!("({mag})")
            } else {
                mag.to_string()
            };
            let mut pieces: Vec<String> = Vec::new();
            if m.is_unit() || coeff_str != "1" {
                pieces.push(coeff_str.clone());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => pieces.push(self.vars.name(i).to_string()),
                    _ => pieces.push(format!("{}^{}", self.vars.name(i), e)),
                }
            }
            if pieces.is_empty() {
                pieces.push("1".to_string());
            }
            write!(f, "{}", pieces.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vt() -> Arc<VarTable> {
        VarTable::new(&["x0", "x1", "x2"])
    }

    fn x(v: &Arc<VarTable>, i: usize) -> Polynomial {
        Polynomial::var(v, i)
    }

    #[test]
    fn graded_lex_ordering() {
        // x0^2 > x0*x1 > x1^2 > x0 > x1 with degrees graded first
        let v = vt();
        let p = x(&v, 0)
            .pow(2)
            .unwrap()
            .add(&x(&v, 1).pow(2).unwrap())
            .unwrap()
            .add(&x(&v, 0).mul(&x(&v, 1)).unwrap())
            .unwrap()
            .add(&x(&v, 1))
            .unwrap()
            .add(&x(&v, 0))
            .unwrap();
        assert_eq!(p.to_string(), "x0^2 + x0*x1 + x1^2 + x0 + x1");
        assert_eq!(p.leading_monomial(), Monomial(vec![2, 0, 0]));
    }

    #[test]
    fn exact_division_recovers_factor() {
        let v = vt();
        // (x0 + x1)(x0 - x1) = x0^2 - x1^2
        let a = x(&v, 0).add(&x(&v, 1)).unwrap();
        let b = x(&v, 0).sub(&x(&v, 1)).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.exact_div(&a).unwrap(), b);
        assert_eq!(p.exact_div(&b).unwrap(), a);
        assert!(matches!(
            p.exact_div(&x(&v, 2)),
            Err(KernelError::NotDivisible)
        ));
    }

    #[test]
    fn substitution_is_exact() {
        let v = vt();
        // p = x0^2 + x1; substitute x0 := x1 + 1 -> x1^2 + 3x1 + 1... check
        let p = x(&v, 0).pow(2).unwrap().add(&x(&v, 1)).unwrap();
        let val = x(&v, 1).add(&Polynomial::one(&v)).unwrap();
        let s = p.substitute(0, &val).unwrap();
        let expect = x(&v, 1)
            .pow(2)
            .unwrap()
            .add(&x(&v, 1).mul_rational(&BigRational::from_integer(3.into())))
            .unwrap()
            .add(&Polynomial::one(&v))
            .unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn derivative_basic() {
        let v = vt();
        let p = x(&v, 0).pow(3).unwrap();
        let d = p.diff(0);
        assert_eq!(d.to_string(), "3*x0^2");
    }
}
