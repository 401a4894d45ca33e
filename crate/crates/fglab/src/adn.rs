//! Weighted elliptic boundary systems and the complementing condition.
//!
//! A system of interior operators `L` and boundary operators `B` acting on
//! `N` unknowns is graded by integer weights: `w(u^t)` for the unknowns,
//! `w(L_s)` for the interior rows, and `w(B_r)` for the boundary rows.
//! Entry `(s, t)` of `L` may have order at most `w(L_s) + w(u^t)`, and its
//! principal part keeps the terms of exactly that order, or vanishes when
//! no such term is present.  The interior weights are normalized so that
//! every `w(L_s) <= 0` with equality somewhere.
//!
//! Symbols are polynomials in the cotangent variables `xi0 .. xi{n-1}` at
//! a boundary point, with `xi0` dual to the inward normal.  Splitting
//! `xi = tau nu + xi_tan` turns each principal entry into a polynomial in
//! `tau` whose coefficients depend on the tangential covector, and the
//! checks in this module ask three questions about those polynomials.
//!
//! Uniform ellipticity asks that `det L'(xi)` be a nonzero constant times
//! `|xi|^{2m}`, where `m` is half the total degree.  The root split asks
//! that for fixed tangential `xi != 0` the polynomial
//! `tau -> det L'(xi_tan + tau nu)` have no real roots; the roots in the
//! upper half plane define the factor `M+(tau)` of degree `m`.  The
//! supported class consists of powers of a single quadratic
//! `a tau^2 + c` with `a, c > 0`, whose upper root is
//! `tau+ = i sqrt(c/a)`; characteristic polynomials outside this class
//! are reported as unsupported rather than approximated.  The
//! complementing condition asks that the rows of
//! `B'(xi_tan + tau nu) adj L'(xi_tan + tau nu)` stay linearly
//! independent modulo `M+(tau)`.  A failure is certified by an explicit
//! kernel vector, and every certificate is rechecked by exact divisibility
//! before it is returned.
//!
//! Two reductions keep the computation exact and small.  When the
//! principal interior symbol is a scalar matrix `ell(tau) I`, the adjugate
//! is `ell^{N-1} I`; the factor `ell^{N-1}` shares the root `tau+` with
//! `M+` to order `(N-1) m / N` and its remaining cofactor is invertible
//! modulo the reduced modulus, so the rank question descends to the rows
//! of `B'` modulo `(tau - tau+)^{m/N}`.  Independently, a power of
//! `(tau - tau+)` common to every row is divided out and the modulus is
//! lowered by the same amount.  Common factors supported away from `tau+`
//! multiply the rows by units modulo `M+` and never change the rank.
//!
//! Numeric tangential samples keep every coefficient in a single
//! quadratic extension of the rationals; the radicand is `1` when
//! `|xi_tan|^2` is a perfect square, so those samples stay inside the
//! Gaussian rationals.  The symbolic mode adjoins a square root of
//! `-|xi_tan|^2` to the field of rational functions in the tangential
//! variables.  It needs at least two tangential directions, since with
//! one the radicand is itself a square and the extension degenerates.
//!
//! The gauged Einstein compactification system in even bulk dimension
//! `n >= 4` has one unknown per metric component `g_{alpha beta}`,
//! `0 <= alpha <= beta <= n-1`, ordered with the tangential pairs first
//! (lexicographically), then `(0,1) .. (0,n-1)`, then `(0,0)` last, for
//! `N = n(n+1)/2` unknowns of weight `n`.  The interior symbol is
//! `|xi|^n I`.  The boundary rows come in blocks, with `D = |xi|^2`:
//!
//! ```text
//! block        rows     tangential pair columns   (0,1)..(0,n-1), (0,0)
//! order 0      N - n    identity                  0
//! order 2      N - n    D identity                0
//! order 2'     n        coupled in xi0 xi_i       trailing n x n minor
//! order 3      n        xi_j D pattern            xi0 D pattern
//! order 2l     N        D^l identity on every column,  2 <= l <= n/2-1
//! ```
//!
//! The order `2'` block records the normal derivative of the harmonic
//! gauge constraint after the once differentiated first order relations
//! are substituted; its trailing minor at `tau = tau+` is what makes the
//! complementing condition hold, and `normal_minor_check` verifies that
//! invertibility together with the rank one structure of the tangential
//! part.  Boundary weights are `s - n` for a block of order `s`, so the
//! boundary row count `M = nN/2` matches the root count `m`.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

use crate::error::WorkbenchError;
use crate::expr::{Constant, KernelError, Polynomial, ScalarExpr, VarTable};
use crate::tensor::Scalar;

fn rat_pow(q: &BigRational, e: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out = out * q.clone();
    }
    out
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let ns = q.numer().sqrt();
    let ds = q.denom().sqrt();
    if &(&ns * &ns) == q.numer() && &(&ds * &ds) == q.denom() {
        Some(BigRational::new(ns, ds))
    } else {
        None
    }
}

/// Element `a + b sqrt(t)` of a quadratic extension of the rational
/// function field, with a fixed radicand `t` carried alongside.
///
/// The arithmetic assumes `t` is not a square in the base field; for the
/// radicands used here, minus a sum of at least two tangential squares,
/// that holds even after the base constants pick up an imaginary unit,
/// so the extension is a field and `inv` can only fail on zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadExt {
    base: ScalarExpr,
    coeff: ScalarExpr,
    radicand: ScalarExpr,
}

impl QuadExt {
    pub fn from_base(x: ScalarExpr, radicand: &ScalarExpr) -> Self {
        let zero = ScalarExpr::zero(x.vars());
        QuadExt { base: x, coeff: zero, radicand: radicand.clone() }
    }

    /// The adjoined square root itself.
    pub fn root(radicand: &ScalarExpr) -> Self {
        QuadExt {
            base: ScalarExpr::zero(radicand.vars()),
            coeff: ScalarExpr::one(radicand.vars()),
            radicand: radicand.clone(),
        }
    }

    pub fn parts(&self) -> (&ScalarExpr, &ScalarExpr) {
        (&self.base, &self.coeff)
    }

    pub fn radicand(&self) -> &ScalarExpr {
        &self.radicand
    }

    fn same_field(&self, other: &Self) -> Result<(), KernelError> {
        if self.radicand == other.radicand {
            Ok(())
        } else {
            Err(KernelError::FieldMismatch(format!(
                "radicands {} and {} define different extensions",
                self.radicand, other.radicand
            )))
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            write!(f, "{}", self.base)
        } else if self.base.is_zero() {
            write!(f, "({})*sqrt({})", self.coeff, self.radicand)
        } else {
            write!(f, "{} + ({})*sqrt({})", self.base, self.coeff, self.radicand)
        }
    }
}

impl Scalar for QuadExt {
    fn zero_like(&self) -> Self {
        QuadExt {
            base: ScalarExpr::zero(self.base.vars()),
            coeff: ScalarExpr::zero(self.base.vars()),
            radicand: self.radicand.clone(),
        }
    }

    fn one_like(&self) -> Self {
        QuadExt {
            base: ScalarExpr::one(self.base.vars()),
            coeff: ScalarExpr::zero(self.base.vars()),
            radicand: self.radicand.clone(),
        }
    }

    fn add(&self, other: &Self) -> Result<Self, KernelError> {
        self.same_field(other)?;
        Ok(QuadExt {
            base: self.base.add(&other.base)?,
            coeff: self.coeff.add(&other.coeff)?,
            radicand: self.radicand.clone(),
        })
    }

    fn sub(&self, other: &Self) -> Result<Self, KernelError> {
        self.same_field(other)?;
        Ok(QuadExt {
            base: self.base.sub(&other.base)?,
            coeff: self.coeff.sub(&other.coeff)?,
            radicand: self.radicand.clone(),
        })
    }

    fn mul(&self, other: &Self) -> Result<Self, KernelError> {
        self.same_field(other)?;
        let cross = self.coeff.mul(&other.coeff)?.mul(&self.radicand)?;
        Ok(QuadExt {
            base: self.base.mul(&other.base)?.add(&cross)?,
            coeff: self.base.mul(&other.coeff)?.add(&self.coeff.mul(&other.base)?)?,
            radicand: self.radicand.clone(),
        })
    }

    fn neg(&self) -> Self {
        QuadExt {
            base: self.base.neg(),
            coeff: self.coeff.neg(),
            radicand: self.radicand.clone(),
        }
    }

    fn mul_rational(&self, k: &BigRational) -> Self {
        QuadExt {
            base: self.base.mul_rational(k),
            coeff: self.coeff.mul_rational(k),
            radicand: self.radicand.clone(),
        }
    }

    fn inv(&self) -> Result<Self, KernelError> {
        let norm = self
            .base
            .mul(&self.base)?
            .sub(&self.coeff.mul(&self.coeff)?.mul(&self.radicand)?)?;
        let ninv = norm.inv()?;
        Ok(QuadExt {
            base: self.base.mul(&ninv)?,
            coeff: self.coeff.neg().mul(&ninv)?,
            radicand: self.radicand.clone(),
        })
    }

    fn diff(&self, var: usize) -> Result<Self, KernelError> {
        // d sqrt(t) = t' sqrt(t) / (2t), so the radicand must be nonzero.
        let correction = self
            .coeff
            .mul(&self.radicand.diff(var)?)?
            .mul(&self.radicand.inv()?)?
            .mul_rational(&BigRational::new(BigInt::from(1), BigInt::from(2)));
        Ok(QuadExt {
            base: self.base.diff(var)?,
            coeff: self.coeff.diff(var)?.add(&correction)?,
            radicand: self.radicand.clone(),
        })
    }

    fn is_zero(&self) -> bool {
        self.base.is_zero() && self.coeff.is_zero()
    }
}

/// Dense polynomial in the normal symbol variable `tau`, with
/// coefficients in any exact scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct TauPolynomial<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TauPolynomial<S> {
    fn trimmed(mut coeffs: Vec<S>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(S::is_zero) == Some(true) {
            coeffs.pop();
        }
        TauPolynomial { coeffs }
    }

    /// Coefficients in increasing degree; at least one is required.
    pub fn from_coefficients(coeffs: Vec<S>) -> Result<Self, WorkbenchError> {
        if coeffs.is_empty() {
            return Err(WorkbenchError::Precondition(
                "a tau polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(Self::trimmed(coeffs))
    }

    pub fn zero(proto: &S) -> Self {
        TauPolynomial { coeffs: vec![proto.zero_like()] }
    }

    pub fn constant(c: S) -> Self {
        Self::trimmed(vec![c])
    }

    fn proto(&self) -> S {
        self.coeffs[0].zero_like()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(S::is_zero)
    }

    pub fn coefficients(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.proto())
    }

    pub fn leading(&self) -> &S {
        self.coeffs.last().expect("coefficient list is never empty")
    }

    pub fn add(&self, other: &Self) -> Result<Self, WorkbenchError> {
        let mut out = if self.coeffs.len() >= other.coeffs.len() {
            self.coeffs.clone()
        } else {
            other.coeffs.clone()
        };
        let short = if self.coeffs.len() >= other.coeffs.len() { other } else { self };
        for (k, c) in short.coeffs.iter().enumerate() {
            out[k] = out[k].add(c)?;
        }
        Ok(Self::trimmed(out))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WorkbenchError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TauPolynomial { coeffs: self.coeffs.iter().map(S::neg).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, WorkbenchError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.proto()));
        }
        let mut out = vec![self.proto(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(Self::trimmed(out))
    }

    pub fn mul_coeff(&self, c: &S) -> Result<Self, WorkbenchError> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.mul(c)?);
        }
        Ok(Self::trimmed(out))
    }

    pub fn pow(&self, k: usize) -> Result<Self, WorkbenchError> {
        let mut out = Self::constant(self.coeffs[0].one_like());
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Horner evaluation at a scalar.
    pub fn eval(&self, x: &S) -> Result<S, WorkbenchError> {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    /// Synthetic division by `tau - root`; returns the quotient and the
    /// remainder, which equals the value at `root`.
    pub fn deflate(&self, root: &S) -> Result<(Self, S), WorkbenchError> {
        let d = self.degree();
        if d == 0 {
            return Ok((Self::zero(&self.proto()), self.coeffs[0].clone()));
        }
        let mut q = vec![self.proto(); d];
        let mut acc = self.coeffs[d].clone();
        for k in (0..d).rev() {
            q[k] = acc.clone();
            acc = acc.mul(root)?.add(&self.coeffs[k])?;
        }
        Ok((Self::trimmed(q), acc))
    }

    /// The first `count` coefficients of the expansion in powers of
    /// `tau - root`.
    pub fn taylor_at(&self, root: &S, count: usize) -> Result<Vec<S>, WorkbenchError> {
        let mut rest = self.clone();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            if rest.is_zero() {
                out.push(self.proto());
                continue;
            }
            let (q, r) = rest.deflate(root)?;
            out.push(r);
            rest = q;
        }
        Ok(out)
    }

    /// Long division; the divisor's leading coefficient must be
    /// invertible, which holds for any nonzero divisor over a field.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), WorkbenchError> {
        if divisor.is_zero() {
            return Err(WorkbenchError::Kernel(KernelError::DivisionByZero));
        }
        let dd = divisor.degree();
        if self.is_zero() || self.degree() < dd {
            return Ok((Self::zero(&self.proto()), self.clone()));
        }
        let dinv = divisor.leading().inv()?;
        let mut rem = self.coeffs.clone();
        let qlen = self.degree() - dd + 1;
        let mut q = vec![self.proto(); qlen];
        for k in (0..qlen).rev() {
            let lead = rem[k + dd].clone();
            if lead.is_zero() {
                continue;
            }
            let f = lead.mul(&dinv)?;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].sub(&f.mul(dc)?)?;
            }
            q[k] = f;
        }
        rem.truncate(dd.max(1));
        Ok((Self::trimmed(q), Self::trimmed(rem)))
    }

    pub fn exact_div(&self, divisor: &Self) -> Result<Self, WorkbenchError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(WorkbenchError::Kernel(KernelError::NotDivisible))
        }
    }
}

impl<S: Scalar> fmt::Display for TauPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*tau")?,
                _ => write!(f, "({c})*tau^{k}")?,
            }
        }
        Ok(())
    }
}

/// Where the boundary symbols are frozen in the tangential directions:
/// at an explicit rational covector, or kept symbolic.
#[derive(Clone, Debug, PartialEq)]
pub enum TangentialCovector {
    Numeric(Vec<BigRational>),
    Symbolic,
}

impl TangentialCovector {
    pub fn from_ints(values: &[i64]) -> Self {
        TangentialCovector::Numeric(
            values.iter().map(|v| BigRational::from_integer(BigInt::from(*v))).collect(),
        )
    }

    fn describe(&self) -> String {
        match self {
            TangentialCovector::Numeric(q) => {
                let parts: Vec<String> = q.iter().map(|v| v.to_string()).collect();
                format!("({})", parts.join(", "))
            }
            TangentialCovector::Symbolic => "symbolic".into(),
        }
    }
}

/// A weighted interior and boundary symbol system.
///
/// Entries are polynomials in the cotangent variables `xi0 .. xi{n-1}`
/// over a shared table, `interior` is `N x N`, `boundary` is `M x N`,
/// and the three weight vectors grade the unknowns, the interior rows,
/// and the boundary rows.
#[derive(Clone, Debug)]
pub struct SymbolSystem {
    vars: Arc<VarTable>,
    dim: usize,
    interior: Vec<Vec<ScalarExpr>>,
    boundary: Vec<Vec<ScalarExpr>>,
    unknown_weights: Vec<i64>,
    interior_weights: Vec<i64>,
    boundary_weights: Vec<i64>,
}

impl SymbolSystem {
    pub fn new(
        interior: Vec<Vec<ScalarExpr>>,
        boundary: Vec<Vec<ScalarExpr>>,
        unknown_weights: Vec<i64>,
        interior_weights: Vec<i64>,
        boundary_weights: Vec<i64>,
    ) -> Result<Self, WorkbenchError> {
        let n_unknowns = interior.len();
        if n_unknowns == 0 {
            return Err(WorkbenchError::Shape("the interior system is empty".into()));
        }
        let vars = interior[0][0].vars().clone();
        let dim = vars.len();
        if dim < 2 {
            return Err(WorkbenchError::Precondition(
                "a boundary symbol system needs a normal and at least one tangential variable"
                    .into(),
            ));
        }
        for i in 0..dim {
            if vars.name(i) != format!("xi{i}") {
                return Err(WorkbenchError::Precondition(format!(
                    "symbol variables must be named xi0 .. xi{}, found {}",
                    dim - 1,
                    vars.name(i)
                )));
            }
        }
        for (s, row) in interior.iter().enumerate() {
            if row.len() != n_unknowns {
                return Err(WorkbenchError::Shape(format!(
                    "interior row {s} has {} entries for {n_unknowns} unknowns",
                    row.len()
                )));
            }
        }
        for (r, row) in boundary.iter().enumerate() {
            if row.len() != n_unknowns {
                return Err(WorkbenchError::Shape(format!(
                    "boundary row {r} has {} entries for {n_unknowns} unknowns",
                    row.len()
                )));
            }
        }
        if unknown_weights.len() != n_unknowns
            || interior_weights.len() != n_unknowns
            || boundary_weights.len() != boundary.len()
        {
            return Err(WorkbenchError::Shape(
                "weight vectors must match the unknown and row counts".into(),
            ));
        }
        if interior_weights.iter().any(|w| *w > 0) {
            return Err(WorkbenchError::Precondition(
                "interior weights must be nonpositive".into(),
            ));
        }
        if interior_weights.iter().all(|w| *w < 0) {
            return Err(WorkbenchError::Precondition(
                "at least one interior weight must be zero".into(),
            ));
        }
        let sys = SymbolSystem {
            vars,
            dim,
            interior,
            boundary,
            unknown_weights,
            interior_weights,
            boundary_weights,
        };
        sys.check_entries(&sys.interior, &sys.interior_weights, "interior")?;
        sys.check_entries(&sys.boundary, &sys.boundary_weights, "boundary")?;
        Ok(sys)
    }

    fn check_entries(
        &self,
        rows: &[Vec<ScalarExpr>],
        row_weights: &[i64],
        label: &str,
    ) -> Result<(), WorkbenchError> {
        for (r, row) in rows.iter().enumerate() {
            for (t, entry) in row.iter().enumerate() {
                if entry.vars().names() != self.vars.names() {
                    return Err(WorkbenchError::Shape(format!(
                        "{label} entry ({r}, {t}) is built over a different variable table"
                    )));
                }
                if entry.is_zero() {
                    continue;
                }
                if !entry.is_polynomial() {
                    return Err(WorkbenchError::Precondition(format!(
                        "{label} entry ({r}, {t}) is not polynomial in the symbol variables"
                    )));
                }
                let bound = row_weights[r] + self.unknown_weights[t];
                if bound < 0 || i64::from(entry.num().total_degree()) > bound {
                    return Err(WorkbenchError::Precondition(format!(
                        "{label} entry ({r}, {t}) has degree {} above the weight bound {}",
                        entry.num().total_degree(),
                        bound
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unknowns(&self) -> usize {
        self.interior.len()
    }

    pub fn boundary_rows(&self) -> usize {
        self.boundary.len()
    }

    pub fn interior(&self) -> &[Vec<ScalarExpr>] {
        &self.interior
    }

    pub fn boundary(&self) -> &[Vec<ScalarExpr>] {
        &self.boundary
    }

    pub fn unknown_weights(&self) -> &[i64] {
        &self.unknown_weights
    }

    pub fn interior_weights(&self) -> &[i64] {
        &self.interior_weights
    }

    pub fn boundary_weights(&self) -> &[i64] {
        &self.boundary_weights
    }

    /// Exact order extraction: entry `(s, t)` keeps the terms of total
    /// degree `w(row_s) + w(u^t)` and drops everything of lower order.
    pub fn principal_parts(&self) -> Result<PrincipalParts, WorkbenchError> {
        let interior = self.principal_grid(&self.interior, &self.interior_weights)?;
        let boundary = self.principal_grid(&self.boundary, &self.boundary_weights)?;
        Ok(PrincipalParts { interior, boundary })
    }

    fn principal_grid(
        &self,
        rows: &[Vec<ScalarExpr>],
        row_weights: &[i64],
    ) -> Result<Vec<Vec<ScalarExpr>>, WorkbenchError> {
        let mut out = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let mut prow = Vec::with_capacity(row.len());
            for (t, entry) in row.iter().enumerate() {
                prow.push(homogeneous_part(entry, row_weights[r] + self.unknown_weights[t])?);
            }
            out.push(prow);
        }
        Ok(out)
    }
}

/// Principal interior and boundary symbols of a weighted system.
#[derive(Clone, Debug)]
pub struct PrincipalParts {
    pub interior: Vec<Vec<ScalarExpr>>,
    pub boundary: Vec<Vec<ScalarExpr>>,
}

fn homogeneous_part(entry: &ScalarExpr, degree: i64) -> Result<ScalarExpr, WorkbenchError> {
    if degree < 0 || entry.is_zero() {
        return Ok(ScalarExpr::zero(entry.vars()));
    }
    if !entry.is_polynomial() {
        return Err(WorkbenchError::Precondition(
            "principal parts are defined for polynomial entries".into(),
        ));
    }
    let kept = entry
        .num()
        .terms()
        .filter(|(m, _)| i64::from(m.total_degree()) == degree)
        .map(|(m, c)| (m.clone(), c.clone()));
    let poly = Polynomial::from_terms(entry.vars(), kept)?;
    Ok(ScalarExpr::from_poly(poly))
}

fn validate_sample_shape(dim: usize, sample: &TangentialCovector) -> Result<(), WorkbenchError> {
    match sample {
        TangentialCovector::Numeric(q) => {
            if q.len() != dim - 1 {
                return Err(WorkbenchError::Shape(format!(
                    "the tangential covector has {} components for {} tangential directions",
                    q.len(),
                    dim - 1
                )));
            }
            if q.iter().all(Zero::is_zero) {
                return Err(WorkbenchError::Precondition(
                    "the tangential covector must be nonzero".into(),
                ));
            }
            Ok(())
        }
        TangentialCovector::Symbolic => Ok(()),
    }
}

/// Replaces `xi0` by `tau` and freezes or keeps the tangential variables,
/// producing a polynomial in `tau` over the same variable table.
fn substitute_normal(
    entry: &ScalarExpr,
    sample: &TangentialCovector,
) -> Result<TauPolynomial<ScalarExpr>, WorkbenchError> {
    if !entry.is_polynomial() {
        return Err(WorkbenchError::Precondition(
            "symbol entries must be polynomial in the symbol variables".into(),
        ));
    }
    let vars = entry.vars();
    let deg0 = entry.num().degree_in(0) as usize;
    match sample {
        TangentialCovector::Numeric(q) => {
            let mut acc = vec![Constant::zero(); deg0 + 1];
            for (mono, c) in entry.num().terms() {
                let k = mono.0[0] as usize;
                let mut val = c.clone();
                for (i, qi) in q.iter().enumerate() {
                    val = val.scale(&rat_pow(qi, mono.0[i + 1]));
                }
                acc[k] = acc[k].add(&val)?;
            }
            let coeffs = acc.into_iter().map(|c| ScalarExpr::constant(vars, c)).collect();
            TauPolynomial::from_coefficients(coeffs)
        }
        TangentialCovector::Symbolic => {
            let mut acc = vec![Polynomial::zero(vars); deg0 + 1];
            for (mono, c) in entry.num().terms() {
                let k = mono.0[0] as usize;
                let mut rest = mono.clone();
                rest.0[0] = 0;
                acc[k] = acc[k].add(&Polynomial::one(vars).mul_monomial(&rest, c)?)?;
            }
            let coeffs = acc.into_iter().map(ScalarExpr::from_poly).collect();
            TauPolynomial::from_coefficients(coeffs)
        }
    }
}

fn substitute_grid(
    rows: &[Vec<ScalarExpr>],
    sample: &TangentialCovector,
) -> Result<Vec<Vec<TauPolynomial<ScalarExpr>>>, WorkbenchError> {
    rows.iter()
        .map(|row| row.iter().map(|e| substitute_normal(e, sample)).collect())
        .collect()
}

fn is_diagonal<S: Scalar>(mat: &[Vec<TauPolynomial<S>>]) -> bool {
    mat.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, e)| i == j || e.is_zero()))
}

fn is_scalar_matrix<S: Scalar>(mat: &[Vec<TauPolynomial<S>>]) -> bool {
    is_diagonal(mat) && mat.iter().enumerate().all(|(i, row)| row[i] == mat[0][0])
}

/// Fraction free elimination; exact over any integral domain of
/// coefficients because every division in the recurrence is exact.
fn det_tau<S: Scalar>(
    mat: &[Vec<TauPolynomial<S>>],
) -> Result<TauPolynomial<S>, WorkbenchError> {
    let n = mat.len();
    if n == 0 || mat.iter().any(|row| row.len() != n) {
        return Err(WorkbenchError::Shape("determinant of a non square matrix".into()));
    }
    if is_diagonal(mat) {
        let mut out = TauPolynomial::constant(mat[0][0].proto().one_like());
        for (i, row) in mat.iter().enumerate() {
            out = out.mul(&row[i])?;
        }
        return Ok(out);
    }
    let mut a = mat.to_vec();
    let mut negated = false;
    let mut prev: Option<TauPolynomial<S>> = None;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(TauPolynomial::zero(&mat[0][0].proto()));
            };
            a.swap(p, k);
            negated = !negated;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let mut v = a[i][j].mul(&a[k][k])?.sub(&a[i][k].mul(&a[k][j])?)?;
                if let Some(p) = &prev {
                    v = v.exact_div(p)?;
                }
                a[i][j] = v;
            }
        }
        prev = Some(a[k][k].clone());
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negated { d.neg() } else { d })
}

/// Gaussian determinant over a field of scalars.
fn det_field<S: Scalar>(mat: &[Vec<S>]) -> Result<S, WorkbenchError> {
    let n = mat.len();
    if n == 0 || mat.iter().any(|row| row.len() != n) {
        return Err(WorkbenchError::Shape("determinant of a non square matrix".into()));
    }
    let mut a = mat.to_vec();
    let mut det = a[0][0].one_like();
    let mut negated = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Ok(a[0][0].zero_like());
        };
        if p != k {
            a.swap(p, k);
            negated = !negated;
        }
        let pivot = a[k][k].clone();
        det = det.mul(&pivot)?;
        let pinv = pivot.inv()?;
        for r in k + 1..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].mul(&pinv)?;
            for c in k..n {
                let s = f.mul(&a[k][c])?;
                a[r][c] = a[r][c].sub(&s)?;
            }
        }
    }
    Ok(if negated { det.neg() } else { det })
}

/// Adjugate of a substituted interior symbol.  Scalar and diagonal
/// matrices have closed forms; beyond that the cofactor expansion is
/// materialized only for small sizes, since the products grow quickly.
fn adjugate_matrix<S: Scalar>(
    mat: &[Vec<TauPolynomial<S>>],
) -> Result<Vec<Vec<TauPolynomial<S>>>, WorkbenchError> {
    let n = mat.len();
    if n == 0 || mat.iter().any(|row| row.len() != n) {
        return Err(WorkbenchError::Shape("adjugate of a non square matrix".into()));
    }
    let proto = mat[0][0].proto();
    if n == 1 {
        return Ok(vec![vec![TauPolynomial::constant(proto.one_like())]]);
    }
    if is_diagonal(mat) {
        let one = TauPolynomial::constant(proto.one_like());
        let mut prefix = vec![one.clone(); n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i].mul(&mat[i][i])?;
        }
        let mut suffix = vec![one.clone(); n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1].mul(&mat[i][i])?;
        }
        let mut out = vec![vec![TauPolynomial::zero(&proto); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = prefix[i].mul(&suffix[i + 1])?;
        }
        return Ok(out);
    }
    if n > 6 {
        return Err(WorkbenchError::Unsupported(
            "the adjugate is materialized only for diagonal interiors or size at most six"
                .into(),
        ));
    }
    let mut out = vec![vec![TauPolynomial::zero(&proto); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<TauPolynomial<S>>> = (0..n)
                .filter(|r| *r != i)
                .map(|r| (0..n).filter(|c| *c != j).map(|c| mat[r][c].clone()).collect())
                .collect();
            let cof = det_tau(&minor)?;
            out[j][i] = if (i + j) % 2 == 0 { cof } else { cof.neg() };
        }
    }
    Ok(out)
}

/// Adjugate of the principal interior symbol at a tangential covector,
/// satisfying `L' adj L' = det L' I` exactly.
pub fn adjugate_symbol(
    sys: &SymbolSystem,
    sample: &TangentialCovector,
) -> Result<Vec<Vec<TauPolynomial<ScalarExpr>>>, WorkbenchError> {
    validate_sample_shape(sys.dim(), sample)?;
    let pp = sys.principal_parts()?;
    let l_sub = substitute_grid(&pp.interior, sample)?;
    adjugate_matrix(&l_sub)
}

/// `det L'(xi_tan + tau nu)` as a polynomial in `tau`.
///
/// The determinant is materialized, so for large diagonal systems with
/// symbolic tangential data prefer [`complementing_check`], which avoids
/// forming it.
pub fn char_poly(
    sys: &SymbolSystem,
    sample: &TangentialCovector,
) -> Result<TauPolynomial<ScalarExpr>, WorkbenchError> {
    validate_sample_shape(sys.dim(), sample)?;
    let pp = sys.principal_parts()?;
    let l_sub = substitute_grid(&pp.interior, sample)?;
    det_tau(&l_sub)
}

/// Verified factorization `cp = leading (tau^2 - tau_plus_squared)^m`
/// with the upper root `tau+ = sqrt(tau_plus_squared)` purely imaginary.
#[derive(Clone, Debug)]
pub struct RootSplit {
    pub multiplicity: usize,
    pub leading: ScalarExpr,
    pub tau_plus_squared: ScalarExpr,
}

fn root_split(cp: &TauPolynomial<ScalarExpr>) -> Result<RootSplit, WorkbenchError> {
    if cp.is_zero() {
        return Err(WorkbenchError::Precondition(
            "the characteristic polynomial vanishes; the interior symbol is not elliptic at this covector"
                .into(),
        ));
    }
    let deg = cp.degree();
    if deg == 0 {
        return Err(WorkbenchError::Unsupported(
            "the characteristic polynomial is constant and carries no boundary roots".into(),
        ));
    }
    if deg % 2 == 1 {
        return Err(WorkbenchError::Unsupported(
            "an odd degree characteristic polynomial has a real root".into(),
        ));
    }
    let m = deg / 2;
    for k in (1..deg).step_by(2) {
        if !cp.coeff(k).is_zero() {
            return Err(WorkbenchError::Unsupported(format!(
                "the characteristic polynomial has a tau^{k} term; only powers of a single quadratic are in the supported class"
            )));
        }
    }
    let leading = cp.leading().clone();
    let linv = leading.inv()?;
    let c = cp.coeff(deg - 2).mul(&linv)?.mul_frac(1, m as i64);
    let quad = TauPolynomial::from_coefficients(vec![
        c.clone(),
        ScalarExpr::zero(c.vars()),
        ScalarExpr::one(c.vars()),
    ])?;
    let rebuilt = quad.pow(m)?.mul_coeff(&leading)?;
    if rebuilt != *cp {
        return Err(WorkbenchError::Unsupported(
            "the characteristic polynomial is not a power of a single quadratic; its irreducible factors are outside the supported class"
                .into(),
        ));
    }
    if c.is_constant() {
        let cc = c.to_constant()?;
        if !cc.is_rational() {
            return Err(WorkbenchError::Unsupported(
                "the quadratic coefficient lies in an extension field".into(),
            ));
        }
        if !cc.re().is_positive() {
            return Err(WorkbenchError::Unsupported(
                "the quadratic factor has real roots; the interior symbol is not elliptic at this covector"
                    .into(),
            ));
        }
    } else if !positive_even_form(&c) {
        return Err(WorkbenchError::Unsupported(
            "positivity of the symbolic quadratic coefficient cannot be certified; it is not a positive combination of even monomials"
                .into(),
        ));
    }
    Ok(RootSplit { multiplicity: m, leading, tau_plus_squared: c.neg() })
}

fn positive_even_form(p: &ScalarExpr) -> bool {
    p.is_polynomial()
        && !p.is_zero()
        && p
            .num()
            .terms()
            .all(|(m, c)| {
                c.is_rational() && c.re().is_positive() && m.0.iter().all(|e| e % 2 == 0)
            })
}

/// The upper root as a base field constant `i sqrt(c)`; the radicand
/// collapses to the Gaussian unit when `c` is a perfect square.
fn tau_plus_in_base(tau_plus_squared: &ScalarExpr) -> Result<ScalarExpr, WorkbenchError> {
    let cc = tau_plus_squared.to_constant().map_err(|_| {
        WorkbenchError::Unsupported(
            "the root field depends on the tangential covector; only numeric samples stay in the base field"
                .into(),
        )
    })?;
    let c = -cc.to_rational()?;
    let tau = match rational_sqrt(&c) {
        Some(s) => Constant::with_extension(BigRational::zero(), s, BigRational::one())?,
        None => Constant::with_extension(BigRational::zero(), BigRational::one(), c)?,
    };
    Ok(ScalarExpr::constant(tau_plus_squared.vars(), tau))
}

/// `M+(tau) = (tau - tau+)^m` for a characteristic polynomial in the
/// supported class at a numeric sample.  Multiplying by the mirrored
/// factor `(tau + tau+)^m` and the leading coefficient recovers the
/// characteristic polynomial exactly.
pub fn m_plus(
    cp: &TauPolynomial<ScalarExpr>,
) -> Result<TauPolynomial<ScalarExpr>, WorkbenchError> {
    let split = root_split(cp)?;
    let tau_plus = tau_plus_in_base(&split.tau_plus_squared)?;
    let lin = TauPolynomial::from_coefficients(vec![tau_plus.neg(), tau_plus.one_like()])?;
    lin.pow(split.multiplicity)
}

/// Outcome of the uniform ellipticity test on the principal interior
/// symbol.
#[derive(Clone, Debug)]
pub struct EllipticityReport {
    pub pass: bool,
    /// Half the degree of the determinant, the number of boundary
    /// conditions the complementing condition will require.
    pub order: usize,
    pub leading: Option<Constant>,
    pub detail: String,
}

/// Checks symbolically that `det L'(xi)` is a nonzero constant multiple
/// of `|xi|^{2m}`, which gives the two sided bound of uniform
/// ellipticity with constant `max(|c|, 1/|c|)`.
pub fn uniform_ellipticity_check(sys: &SymbolSystem) -> Result<EllipticityReport, WorkbenchError> {
    let pp = sys.principal_parts()?;
    let n = sys.unknowns();
    let vars = sys.vars();
    let mut norm2 = ScalarExpr::zero(vars);
    for i in 0..sys.dim() {
        let xi = ScalarExpr::var(vars, i);
        norm2 = norm2.add(&xi.mul(&xi)?)?;
    }
    let diagonal = pp
        .interior
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, e)| i == j || e.is_zero()));
    if diagonal {
        let mut order = 0usize;
        let mut leading = Constant::one();
        let mut proportional = true;
        for (i, row) in pp.interior.iter().enumerate() {
            let entry = &row[i];
            if entry.is_zero() {
                return Ok(EllipticityReport {
                    pass: false,
                    order: 0,
                    leading: None,
                    detail: "the principal interior determinant vanishes identically".into(),
                });
            }
            let d = entry.num().total_degree() as usize;
            if d % 2 == 1 {
                proportional = false;
                break;
            }
            let ratio = entry.mul(&norm2.pow(-((d / 2) as i32))?)?;
            if !ratio.is_constant() {
                proportional = false;
                break;
            }
            leading = leading.mul(&ratio.to_constant()?)?;
            order += d / 2;
        }
        if proportional {
            return Ok(EllipticityReport {
                pass: true,
                order,
                leading: Some(leading.clone()),
                detail: format!("det L'(xi) = ({leading}) * |xi|^{}", 2 * order),
            });
        }
    }
    if n > 8 && !diagonal {
        return Err(WorkbenchError::Unsupported(
            "the symbolic determinant is materialized only for diagonal interiors or at most eight unknowns"
                .into(),
        ));
    }
    let det = det_field(&pp.interior)?;
    if det.is_zero() {
        return Ok(EllipticityReport {
            pass: false,
            order: 0,
            leading: None,
            detail: "the principal interior determinant vanishes identically".into(),
        });
    }
    let deg = i64::from(det.num().total_degree()) - i64::from(det.den().total_degree());
    if deg < 0 || deg % 2 == 1 {
        return Ok(EllipticityReport {
            pass: false,
            order: 0,
            leading: None,
            detail: format!(
                "the determinant has total degree {deg}, which is not an even power of |xi|"
            ),
        });
    }
    let m = (deg / 2) as usize;
    let ratio = det.mul(&norm2.pow(-(m as i32))?)?;
    if ratio.is_constant() {
        let c = ratio.to_constant()?;
        Ok(EllipticityReport {
            pass: true,
            order: m,
            leading: Some(c.clone()),
            detail: format!("det L'(xi) = ({c}) * |xi|^{}", 2 * m),
        })
    } else {
        Ok(EllipticityReport {
            pass: false,
            order: m,
            leading: None,
            detail: "the determinant is not proportional to a power of |xi|^2, so the ellipticity constant degenerates along some ray"
                .into(),
        })
    }
}

/// A vector in the left kernel of the stacked boundary rows, in the
/// scalar field the reduction ran over.
#[derive(Clone, Debug)]
pub enum KernelCertificate {
    Base(Vec<ScalarExpr>),
    Extension(Vec<QuadExt>),
}

impl fmt::Display for KernelCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = match self {
            KernelCertificate::Base(v) => v.iter().map(|c| c.to_string()).collect(),
            KernelCertificate::Extension(v) => v.iter().map(|c| c.to_string()).collect(),
        };
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Outcome of the complementing condition at one tangential covector.
#[derive(Clone, Debug)]
pub struct ComplementingReport {
    pub boundary_rows: usize,
    pub required_rank: usize,
    pub rank: usize,
    /// Total order of `(tau - tau+)` factors removed before the rank
    /// computation, by the scalar adjugate reduction and by factors
    /// common to every row.
    pub factored_out: usize,
    /// Degree of the modulus the rank was computed against.
    pub modulus_degree: usize,
    pub root_description: String,
    pub pass: bool,
    /// On failure, a verified left kernel vector of the boundary rows
    /// modulo the reduced modulus.
    pub certificate: Option<KernelCertificate>,
}

struct ReduceOutcome<S: Scalar> {
    rank: usize,
    shared: usize,
    certificate: Option<Vec<S>>,
}

/// Taylor expands the rows at the root, divides out the largest shared
/// power of `(tau - tau+)`, stacks the remaining coefficients, and row
/// reduces with an augmented identity so that a rank defect hands back
/// an exact kernel vector.  Any certificate is verified against the
/// original rows by divisibility before it is accepted.
fn reduce_and_rank<S: Scalar>(
    rows: &[Vec<TauPolynomial<S>>],
    tau_plus: &S,
    modulus: usize,
) -> Result<ReduceOutcome<S>, WorkbenchError> {
    let m_rows = rows.len();
    let n_cols = rows[0].len();
    let mut taylor: Vec<Vec<Vec<S>>> = Vec::with_capacity(m_rows);
    for row in rows {
        let mut trow = Vec::with_capacity(n_cols);
        for entry in row {
            trow.push(entry.taylor_at(tau_plus, modulus)?);
        }
        taylor.push(trow);
    }
    let mut shared = modulus;
    for trow in &taylor {
        for entry in trow {
            let first = entry.iter().position(|c| !c.is_zero()).unwrap_or(modulus);
            shared = shared.min(first);
        }
    }
    let reduced = modulus - shared;
    let width = n_cols * reduced;
    let mut mat: Vec<Vec<S>> = taylor
        .iter()
        .map(|trow| {
            let mut flat = Vec::with_capacity(width);
            for entry in trow {
                for c in &entry[shared..modulus] {
                    flat.push(c.clone());
                }
            }
            flat
        })
        .collect();
    let mut aug: Vec<Vec<S>> = (0..m_rows)
        .map(|r| {
            (0..m_rows)
                .map(|c| if r == c { tau_plus.one_like() } else { tau_plus.zero_like() })
                .collect()
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..width {
        let Some(p) = (rank..m_rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(p, rank);
        aug.swap(p, rank);
        let pinv = mat[rank][col].inv()?;
        for r in rank + 1..m_rows {
            if mat[r][col].is_zero() {
                continue;
            }
            let f = mat[r][col].mul(&pinv)?;
            for c in col..width {
                let s = f.mul(&mat[rank][c])?;
                mat[r][c] = mat[r][c].sub(&s)?;
            }
            for c in 0..m_rows {
                let s = f.mul(&aug[rank][c])?;
                aug[r][c] = aug[r][c].sub(&s)?;
            }
        }
        rank += 1;
        if rank == m_rows {
            break;
        }
    }
    let certificate = if rank < m_rows {
        let cert = aug[rank].clone();
        for q in 0..n_cols {
            let mut combo = TauPolynomial::zero(&tau_plus.zero_like());
            for (r, row) in rows.iter().enumerate() {
                combo = combo.add(&row[q].mul_coeff(&cert[r])?)?;
            }
            let head = combo.taylor_at(tau_plus, modulus)?;
            if head.iter().any(|c| !c.is_zero()) {
                return Err(WorkbenchError::Precondition(
                    "the kernel certificate failed divisibility verification; the reduction is inconsistent"
                        .into(),
                ));
            }
        }
        Some(cert)
    } else {
        None
    };
    Ok(ReduceOutcome { rank, shared, certificate })
}

fn unique_extension(sys: &SymbolSystem) -> Result<Option<BigRational>, WorkbenchError> {
    let mut found: Option<BigRational> = None;
    let grids = [&sys.interior, &sys.boundary];
    for grid in grids {
        for row in grid.iter() {
            for entry in row {
                for poly in [entry.num(), entry.den()] {
                    for (_, c) in poly.terms() {
                        if let Some(d) = c.extension() {
                            match &found {
                                None => found = Some(d.clone()),
                                Some(e) if e == d => {}
                                Some(e) => {
                                    return Err(WorkbenchError::Unsupported(format!(
                                        "system coefficients mix the extensions i sqrt({e}) and i sqrt({d})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(found)
}

/// Decides the complementing condition for a weighted elliptic system at
/// one tangential covector, or symbolically in the tangential variables.
///
/// The boundary row count must equal the root count `m`.  For a scalar
/// interior symbol the adjugate factor is split off analytically and the
/// rank is computed modulo `(tau - tau+)^{m/N}`; otherwise the rows of
/// `B' adj L'` are reduced modulo the full `M+`.  Failures carry a
/// kernel certificate that has already been verified by divisibility.
pub fn complementing_check(
    sys: &SymbolSystem,
    sample: &TangentialCovector,
) -> Result<ComplementingReport, WorkbenchError> {
    complementing_impl(sys, sample, false)
}

fn complementing_impl(
    sys: &SymbolSystem,
    sample: &TangentialCovector,
    force_general: bool,
) -> Result<ComplementingReport, WorkbenchError> {
    validate_sample_shape(sys.dim(), sample)?;
    if matches!(sample, TangentialCovector::Symbolic) && sys.dim() < 3 {
        return Err(WorkbenchError::Unsupported(
            "symbolic tangential covectors need at least two tangential directions; with one the root extension degenerates"
                .into(),
        ));
    }
    let pp = sys.principal_parts()?;
    let n_unknowns = sys.unknowns();
    let m_rows = sys.boundary_rows();
    let l_sub = substitute_grid(&pp.interior, sample)?;
    let b_sub = substitute_grid(&pp.boundary, sample)?;

    let (rows, split, modulus, m_total, pre_factored) =
        if is_scalar_matrix(&l_sub) && !force_general {
            let split = root_split(&l_sub[0][0])?;
            let mult = split.multiplicity;
            (b_sub, split, mult, n_unknowns * mult, (n_unknowns - 1) * mult)
        } else {
            let cp = det_tau(&l_sub)?;
            let split = root_split(&cp)?;
            let adj = adjugate_matrix(&l_sub)?;
            let mut scaled = Vec::with_capacity(m_rows);
            for brow in &b_sub {
                let mut row = Vec::with_capacity(n_unknowns);
                for j in 0..n_unknowns {
                    let mut acc = TauPolynomial::zero(&brow[0].proto());
                    for (k, bk) in brow.iter().enumerate() {
                        acc = acc.add(&bk.mul(&adj[k][j])?)?;
                    }
                    row.push(acc);
                }
                scaled.push(row);
            }
            let mult = split.multiplicity;
            (scaled, split, mult, mult, 0)
        };

    if m_rows != m_total {
        return Err(WorkbenchError::Precondition(format!(
            "the complementing condition needs as many boundary rows as upper roots: M = {m_rows}, m = {m_total}"
        )));
    }

    match sample {
        TangentialCovector::Numeric(_) => {
            if let (Some(ds), Some(dt)) = (unique_extension(sys)?, {
                let probe = tau_plus_in_base(&split.tau_plus_squared)?;
                probe.to_constant()?.extension().cloned()
            }) {
                if ds != dt {
                    return Err(WorkbenchError::Unsupported(format!(
                        "the sample root lies in Q(i sqrt({dt})) but the system coefficients lie in Q(i sqrt({ds})); choose a tangential covector whose squared norm is {ds} times a perfect square"
                    )));
                }
            }
            let tau_plus = tau_plus_in_base(&split.tau_plus_squared)?;
            let out = reduce_and_rank(&rows, &tau_plus, modulus)?;
            Ok(ComplementingReport {
                boundary_rows: m_rows,
                required_rank: m_rows,
                rank: out.rank,
                factored_out: pre_factored + out.shared,
                modulus_degree: modulus - out.shared,
                root_description: format!("tau+ = {tau_plus}"),
                pass: out.rank == m_rows,
                certificate: out.certificate.map(KernelCertificate::Base),
            })
        }
        TangentialCovector::Symbolic => {
            let radicand = split.tau_plus_squared.clone();
            let lifted: Vec<Vec<TauPolynomial<QuadExt>>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| {
                            let coeffs = p
                                .coefficients()
                                .iter()
                                .map(|c| QuadExt::from_base(c.clone(), &radicand))
                                .collect();
                            TauPolynomial::from_coefficients(coeffs)
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let tau_plus = QuadExt::root(&radicand);
            let out = reduce_and_rank(&lifted, &tau_plus, modulus)?;
            Ok(ComplementingReport {
                boundary_rows: m_rows,
                required_rank: m_rows,
                rank: out.rank,
                factored_out: pre_factored + out.shared,
                modulus_degree: modulus - out.shared,
                root_description: format!("tau+ = sqrt({radicand})"),
                pass: out.rank == m_rows,
                certificate: out.certificate.map(KernelCertificate::Extension),
            })
        }
    }
}

/// Unknown ordering for the gauged Einstein compactification system:
/// tangential pairs `(i, j)` with `1 <= i <= j <= n-1` first, in
/// lexicographic order, then `(0, 1) .. (0, n-1)`, then `(0, 0)`.
pub fn metric_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
    for i in 1..n {
        for j in i..n {
            pairs.push((i, j));
        }
    }
    for k in 1..n {
        pairs.push((0, k));
    }
    pairs.push((0, 0));
    pairs
}

/// Assembles the interior and boundary symbols of the gauged Einstein
/// compactification system in even bulk dimension `n >= 4`, at the
/// Euclidean background metric.
///
/// Unknowns carry weight `n`, the interior rows weight `0`, and a
/// boundary block of order `s` weight `s - n`.  The interior symbol is
/// `|xi|^n` times the identity and the boundary blocks follow the table
/// in the module documentation, so `M = nN/2` rows face `m = nN/2`
/// upper roots.
pub fn build_gauge_system(n: usize) -> Result<SymbolSystem, WorkbenchError> {
    if n < 4 || n % 2 != 0 {
        return Err(WorkbenchError::Precondition(format!(
            "the gauge system is formed in even dimension at least four, got {n}"
        )));
    }
    let names: Vec<String> = (0..n).map(|i| format!("xi{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let vars = VarTable::new(&name_refs);
    let xi: Vec<ScalarExpr> = (0..n).map(|i| ScalarExpr::var(&vars, i)).collect();
    let zero = ScalarExpr::zero(&vars);
    let mut norm2 = zero.clone();
    for x in &xi {
        norm2 = norm2.add(&x.mul(x)?)?;
    }
    let mut tan2 = zero.clone();
    for x in xi.iter().skip(1) {
        tan2 = tan2.add(&x.mul(x)?)?;
    }
    let pairs = metric_pairs(n);
    let cap_n = pairs.len();
    let col = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        pairs.iter().position(|p| *p == key).expect("pair outside the unknown list")
    };

    let interior_op = norm2.pow((n / 2) as i32)?;
    let mut interior = vec![vec![zero.clone(); cap_n]; cap_n];
    for (s, row) in interior.iter_mut().enumerate() {
        row[s] = interior_op.clone();
    }

    let half = ScalarExpr::from_frac(&vars, 1, 2);
    let ni = n as i64;
    // Coefficients from the once differentiated gauge constraint with the
    // first order relations substituted, at the identity metric.
    let mixed = ScalarExpr::from_frac(&vars, 2 * (2 - ni), ni - 1);
    let pure = ScalarExpr::from_frac(&vars, ni - 2, ni - 1);

    let mut boundary: Vec<Vec<ScalarExpr>> = Vec::new();
    let mut boundary_weights: Vec<i64> = Vec::new();

    for t in 0..cap_n - n {
        let mut row = vec![zero.clone(); cap_n];
        row[t] = ScalarExpr::one(&vars);
        boundary.push(row);
        boundary_weights.push(-ni);
    }
    for t in 0..cap_n - n {
        let mut row = vec![zero.clone(); cap_n];
        row[t] = norm2.clone();
        boundary.push(row);
        boundary_weights.push(2 - ni);
    }
    for i in 1..n {
        let mut row = vec![zero.clone(); cap_n];
        for k in 1..n {
            if k == i {
                row[col(0, i)] = mixed.mul(&xi[i])?.mul(&xi[i])?.sub(&tan2)?;
            } else {
                row[col(0, k)] = mixed.mul(&xi[i])?.mul(&xi[k])?;
            }
        }
        row[col(0, 0)] = half.neg().mul(&xi[0])?.mul(&xi[i])?;
        for j in 1..n {
            if j == i {
                row[col(i, i)] = pure.add(&half)?.mul(&xi[0])?.mul(&xi[i])?;
            } else {
                row[col(j, j)] = pure.sub(&half)?.mul(&xi[0])?.mul(&xi[i])?;
                row[col(i, j)] = xi[0].mul(&xi[j])?;
            }
        }
        boundary.push(row);
        boundary_weights.push(2 - ni);
    }
    {
        let mut row = vec![zero.clone(); cap_n];
        row[col(0, 0)] = half.mul(&xi[0])?.mul(&xi[0])?;
        for j in 1..n {
            row[col(0, j)] = xi[0].mul(&xi[j])?;
            row[col(j, j)] = half.neg().mul(&xi[0])?.mul(&xi[0])?;
        }
        boundary.push(row);
        boundary_weights.push(2 - ni);
    }
    for i in 1..n {
        let mut row = vec![zero.clone(); cap_n];
        row[col(0, i)] = xi[0].mul(&norm2)?;
        for j in 1..n {
            row[col(i, j)] = xi[j].mul(&norm2)?;
        }
        boundary.push(row);
        boundary_weights.push(3 - ni);
    }
    {
        let mut row = vec![zero.clone(); cap_n];
        row[col(0, 0)] = xi[0].mul(&norm2)?;
        for j in 1..n {
            row[col(0, j)] = xi[j].mul(&norm2)?;
        }
        boundary.push(row);
        boundary_weights.push(3 - ni);
    }
    for l in 2..n / 2 {
        let power = norm2.pow(l as i32)?;
        for t in 0..cap_n {
            let mut row = vec![zero.clone(); cap_n];
            row[t] = power.clone();
            boundary.push(row);
            boundary_weights.push(2 * (l as i64) - ni);
        }
    }

    SymbolSystem::new(
        interior,
        boundary,
        vec![ni; cap_n],
        vec![0; cap_n],
        boundary_weights,
    )
}

/// Outcome of the trailing minor test on the once differentiated first
/// order boundary block.
#[derive(Clone, Debug)]
pub struct NormalMinorReport {
    pub size: usize,
    /// The minor is invertible at `tau = tau+` for this covector.
    pub determinant_nonzero: bool,
    /// The tangential part has the expected rank one spectrum, checked
    /// by exact characteristic polynomial.
    pub eigenvalues_confirmed: bool,
    pub pass: bool,
}

/// Extracts the trailing `n x n` minor of the once differentiated first
/// order block at `tau = tau+` and certifies its invertibility, together
/// with the spectrum of the rank one tangential matrix
/// `kappa xi xi^T`, `kappa = (3-n)/(n-1)`, whose eigenvalues are
/// `kappa |xi|^2` once and `0` with multiplicity `n - 2`.
pub fn normal_minor_check(
    n: usize,
    sample: &TangentialCovector,
) -> Result<NormalMinorReport, WorkbenchError> {
    let sys = build_gauge_system(n)?;
    validate_sample_shape(sys.dim(), sample)?;
    let pp = sys.principal_parts()?;
    let cap_n = sys.unknowns();
    let start = 2 * (cap_n - n);
    let minor_rows: Vec<Vec<ScalarExpr>> = (start..start + n)
        .map(|r| (cap_n - n..cap_n).map(|c| pp.boundary[r][c].clone()).collect())
        .collect();
    let minor_tau = substitute_grid(&minor_rows, sample)?;

    let determinant_nonzero = match sample {
        TangentialCovector::Numeric(q) => {
            let mut c = BigRational::zero();
            for v in q {
                c = c + v * v;
            }
            let tau2 = ScalarExpr::constant(sys.vars(), Constant::from_rational(-c));
            let tau_plus = tau_plus_in_base(&tau2)?;
            let mut frozen = Vec::with_capacity(n);
            for row in &minor_tau {
                let mut out = Vec::with_capacity(n);
                for e in row {
                    out.push(e.eval(&tau_plus)?);
                }
                frozen.push(out);
            }
            !det_field(&frozen)?.is_zero()
        }
        TangentialCovector::Symbolic => {
            let mut tan2 = ScalarExpr::zero(sys.vars());
            for i in 1..n {
                let x = ScalarExpr::var(sys.vars(), i);
                tan2 = tan2.add(&x.mul(&x)?)?;
            }
            let radicand = tan2.neg();
            let tau_plus = QuadExt::root(&radicand);
            let mut frozen = Vec::with_capacity(n);
            for row in &minor_tau {
                let mut out = Vec::with_capacity(n);
                for e in row {
                    let coeffs = e
                        .coefficients()
                        .iter()
                        .map(|c| QuadExt::from_base(c.clone(), &radicand))
                        .collect();
                    let lifted = TauPolynomial::from_coefficients(coeffs)?;
                    out.push(lifted.eval(&tau_plus)?);
                }
                frozen.push(out);
            }
            !det_field(&frozen)?.is_zero()
        }
    };

    // The spectrum statement is independent of the covector, so it is
    // checked once over the tangential variables and a fresh eigenvalue
    // variable.
    let mut names: Vec<String> = (1..n).map(|i| format!("xi{i}")).collect();
    names.push("lambda".into());
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let evars = VarTable::new(&name_refs);
    let lam = ScalarExpr::var(&evars, n - 1);
    let kappa = ScalarExpr::from_frac(&evars, 3 - n as i64, n as i64 - 1);
    let mut q2 = ScalarExpr::zero(&evars);
    for i in 0..n - 1 {
        let x = ScalarExpr::var(&evars, i);
        q2 = q2.add(&x.mul(&x)?)?;
    }
    let mut shifted = Vec::with_capacity(n - 1);
    let mut rank_one = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let xi_i = ScalarExpr::var(&evars, i);
        let mut srow = Vec::with_capacity(n - 1);
        let mut krow = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            let xi_j = ScalarExpr::var(&evars, j);
            let k_entry = kappa.mul(&xi_i)?.mul(&xi_j)?;
            srow.push(if i == j { lam.sub(&k_entry)? } else { k_entry.neg() });
            krow.push(if i == j { k_entry.sub(&q2)? } else { k_entry });
        }
        shifted.push(srow);
        rank_one.push(krow);
    }
    let charpoly = det_field(&shifted)?;
    let expected = lam.pow((n - 2) as i32)?.mul(&lam.sub(&kappa.mul(&q2)?)?)?;
    let spectrum_ok = charpoly == expected;
    let det_shift = det_field(&rank_one)?;
    let kappa_minus_one = kappa.sub(&ScalarExpr::one(&evars))?;
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let expected_det = kappa_minus_one
        .mul(&q2.pow((n - 1) as i32)?)?
        .mul_rational(&BigRational::from_integer(BigInt::from(sign)));
    let eigenvalues_confirmed = spectrum_ok && det_shift == expected_det;

    Ok(NormalMinorReport {
        size: n,
        determinant_nonzero,
        eigenvalues_confirmed,
        pass: determinant_nonzero && eigenvalues_confirmed,
    })
}

/// Scalar Dirichlet problem for the Laplacian in dimension `n`, the
/// standard example satisfying the complementing condition.
pub fn dirichlet_laplacian(n: usize) -> Result<SymbolSystem, WorkbenchError> {
    if n < 2 {
        return Err(WorkbenchError::Precondition(
            "the Dirichlet comparison problem needs dimension at least two".into(),
        ));
    }
    let names: Vec<String> = (0..n).map(|i| format!("xi{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let vars = VarTable::new(&name_refs);
    let mut norm2 = ScalarExpr::zero(&vars);
    for i in 0..n {
        let x = ScalarExpr::var(&vars, i);
        norm2 = norm2.add(&x.mul(&x)?)?;
    }
    SymbolSystem::new(
        vec![vec![norm2]],
        vec![vec![ScalarExpr::one(&vars)]],
        vec![2],
        vec![0],
        vec![-2],
    )
}

/// Laplacian in the half plane with the oblique boundary operator
/// `xi0 + i xi1`, the standard example violating the complementing
/// condition: at `xi1 = -1` the boundary symbol vanishes at the upper
/// root.
pub fn oblique_control() -> Result<SymbolSystem, WorkbenchError> {
    let vars = VarTable::new(&["xi0", "xi1"]);
    let x0 = ScalarExpr::var(&vars, 0);
    let x1 = ScalarExpr::var(&vars, 1);
    let norm2 = x0.mul(&x0)?.add(&x1.mul(&x1)?)?;
    let i_unit = ScalarExpr::constant(&vars, Constant::imaginary_unit());
    let oblique = x0.add(&i_unit.mul(&x1)?)?;
    SymbolSystem::new(vec![vec![norm2]], vec![vec![oblique]], vec![2], vec![0], vec![-1])
}

/// Tangential covectors whose squared norms are perfect squares, so the
/// upper roots stay inside the Gaussian rationals.  Tabulated with three
/// leading components and padded with zeros.
pub fn default_samples(dim: usize) -> Result<Vec<Vec<BigRational>>, WorkbenchError> {
    if dim < 4 {
        return Err(WorkbenchError::Precondition(
            "default samples are tabulated for dimension at least four".into(),
        ));
    }
    let base: [[i64; 3]; 5] = [[3, 4, 0], [0, 3, 4], [1, 2, 2], [2, 3, 6], [1, 4, 8]];
    Ok(base
        .iter()
        .map(|row| {
            let mut out: Vec<BigRational> =
                row.iter().map(|v| BigRational::from_integer(BigInt::from(*v))).collect();
            out.resize(dim - 1, BigRational::zero());
            out
        })
        .collect())
}

/// One named verdict in the boundary condition battery.
#[derive(Clone, Debug)]
pub struct AdnCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Battery of ellipticity and complementing verdicts over the gauge
/// systems and the two comparison problems.
#[derive(Clone, Debug)]
pub struct AdnReport {
    pub checks: Vec<AdnCheck>,
}

impl AdnReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn describe_complementing(r: &ComplementingReport) -> String {
    format!(
        "rank {} of {} required, modulus degree {}, {} root orders factored out, {}",
        r.rank, r.required_rank, r.modulus_degree, r.factored_out, r.root_description
    )
}

/// Runs the standard battery: sizes and uniform ellipticity in
/// dimensions four and six, the complementing condition at every sample
/// (and symbolically when requested), the trailing minor checks, the
/// Dirichlet and oblique comparison problems, and the degeneracy
/// regression with the differentiated first order block removed.
///
/// Samples override the built in list for the dimension four checks and
/// must have three components each; dimension six always uses the first
/// built in sample padded with zeros.
pub fn standard_report(
    samples: Option<&[Vec<BigRational>]>,
    symbolic: bool,
) -> Result<AdnReport, WorkbenchError> {
    let defaults = default_samples(4)?;
    let sam4: Vec<Vec<BigRational>> = match samples {
        Some(list) => {
            if list.is_empty() {
                return Err(WorkbenchError::Precondition(
                    "at least one tangential sample is required".into(),
                ));
            }
            for s in list {
                if s.len() != 3 {
                    return Err(WorkbenchError::Precondition(
                        "samples drive the dimension four checks and need three tangential components"
                            .into(),
                    ));
                }
            }
            list.to_vec()
        }
        None => defaults,
    };
    let mut checks = Vec::new();

    let sys4 = build_gauge_system(4)?;
    checks.push(AdnCheck {
        name: "gauge system, dimension four: unknown and boundary row counts".into(),
        pass: sys4.unknowns() == 10 && sys4.boundary_rows() == 20,
        detail: format!("N = {}, M = {}", sys4.unknowns(), sys4.boundary_rows()),
    });
    let ell4 = uniform_ellipticity_check(&sys4)?;
    checks.push(AdnCheck {
        name: "gauge system, dimension four: uniform interior ellipticity".into(),
        pass: ell4.pass && ell4.order == 20,
        detail: ell4.detail.clone(),
    });
    for s in &sam4 {
        let sample = TangentialCovector::Numeric(s.clone());
        let rep = complementing_check(&sys4, &sample)?;
        checks.push(AdnCheck {
            name: format!(
                "gauge system, dimension four: complementing condition at xi = {}",
                sample.describe()
            ),
            pass: rep.pass,
            detail: describe_complementing(&rep),
        });
        let minor = normal_minor_check(4, &sample)?;
        checks.push(AdnCheck {
            name: format!(
                "gauge system, dimension four: differentiated first order minor at xi = {}",
                sample.describe()
            ),
            pass: minor.pass,
            detail: format!(
                "determinant nonzero: {}, spectrum confirmed: {}",
                minor.determinant_nonzero, minor.eigenvalues_confirmed
            ),
        });
    }
    if symbolic {
        let rep = complementing_check(&sys4, &TangentialCovector::Symbolic)?;
        checks.push(AdnCheck {
            name: "gauge system, dimension four: complementing condition, symbolic covector"
                .into(),
            pass: rep.pass,
            detail: describe_complementing(&rep),
        });
        let minor = normal_minor_check(4, &TangentialCovector::Symbolic)?;
        checks.push(AdnCheck {
            name: "gauge system, dimension four: differentiated first order minor, symbolic covector"
                .into(),
            pass: minor.pass,
            detail: format!(
                "determinant nonzero: {}, spectrum confirmed: {}",
                minor.determinant_nonzero, minor.eigenvalues_confirmed
            ),
        });
    }

    let sys6 = build_gauge_system(6)?;
    checks.push(AdnCheck {
        name: "gauge system, dimension six: unknown and boundary row counts".into(),
        pass: sys6.unknowns() == 21 && sys6.boundary_rows() == 63,
        detail: format!("N = {}, M = {}", sys6.unknowns(), sys6.boundary_rows()),
    });
    let ell6 = uniform_ellipticity_check(&sys6)?;
    checks.push(AdnCheck {
        name: "gauge system, dimension six: uniform interior ellipticity".into(),
        pass: ell6.pass && ell6.order == 63,
        detail: ell6.detail.clone(),
    });
    {
        let padded = default_samples(6)?;
        let sample = TangentialCovector::Numeric(padded[0].clone());
        let rep = complementing_check(&sys6, &sample)?;
        checks.push(AdnCheck {
            name: format!(
                "gauge system, dimension six: complementing condition at xi = {}",
                sample.describe()
            ),
            pass: rep.pass,
            detail: describe_complementing(&rep),
        });
    }

    {
        let dir = dirichlet_laplacian(3)?;
        let sample = TangentialCovector::from_ints(&[3, 4]);
        let rep = complementing_check(&dir, &sample)?;
        checks.push(AdnCheck {
            name: "Dirichlet comparison problem: complementing condition holds".into(),
            pass: rep.pass,
            detail: describe_complementing(&rep),
        });
    }
    {
        let ob = oblique_control()?;
        let sample = TangentialCovector::from_ints(&[-1]);
        let rep = complementing_check(&ob, &sample)?;
        let certified = !rep.pass && rep.certificate.is_some();
        let detail = match &rep.certificate {
            Some(c) => format!("{}, kernel vector {}", describe_complementing(&rep), c),
            None => describe_complementing(&rep),
        };
        checks.push(AdnCheck {
            name: "oblique comparison problem: failure detected with a verified certificate"
                .into(),
            pass: certified,
            detail,
        });
    }
    {
        let degenerate = zero_mixed_block(&sys4)?;
        let sample = TangentialCovector::Numeric(sam4[0].clone());
        let rep = complementing_check(&degenerate, &sample)?;
        let certified = !rep.pass && rep.certificate.is_some();
        checks.push(AdnCheck {
            name: "gauge system, dimension four: zeroed mixed block is detected".into(),
            pass: certified,
            detail: describe_complementing(&rep),
        });
    }

    Ok(AdnReport { checks })
}

/// Copy of a gauge system with the once differentiated first order block
/// replaced by zero rows, a deliberately broken input for regression
/// tests.
pub fn zero_mixed_block(sys: &SymbolSystem) -> Result<SymbolSystem, WorkbenchError> {
    let n = sys.dim();
    let cap_n = sys.unknowns();
    let start = 2 * (cap_n - n);
    let zero = ScalarExpr::zero(sys.vars());
    let mut boundary = sys.boundary().to_vec();
    for row in boundary.iter_mut().skip(start).take(n) {
        for e in row.iter_mut() {
            *e = zero.clone();
        }
    }
    SymbolSystem::new(
        sys.interior().to_vec(),
        boundary,
        sys.unknown_weights().to_vec(),
        sys.interior_weights().to_vec(),
        sys.boundary_weights().to_vec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_vars() -> Arc<VarTable> {
        VarTable::new(&["xi0", "xi1"])
    }

    fn int_poly(vars: &Arc<VarTable>, coeffs: &[i64]) -> TauPolynomial<ScalarExpr> {
        TauPolynomial::from_coefficients(
            coeffs.iter().map(|c| ScalarExpr::from_int(vars, *c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn tau_polynomial_division_round_trip() {
        let vars = two_vars();
        let a = int_poly(&vars, &[1, 0, 1]);
        let b = int_poly(&vars, &[-2, 1]);
        let product = a.mul(&b).unwrap();
        assert_eq!(product.degree(), 3);
        let (q, r) = product.div_rem(&a).unwrap();
        assert_eq!(q, b);
        assert!(r.is_zero());
        let (q2, r2) = product.div_rem(&b).unwrap();
        assert_eq!(q2, a);
        assert!(r2.is_zero());
        let shifted = product.add(&int_poly(&vars, &[5])).unwrap();
        let (_, r3) = shifted.div_rem(&b).unwrap();
        assert!(!r3.is_zero());
        assert!(shifted.exact_div(&b).is_err());
    }

    #[test]
    fn tau_polynomial_taylor_reconstructs() {
        let vars = two_vars();
        let p = int_poly(&vars, &[7, -3, 0, 2]);
        let root = ScalarExpr::from_int(&vars, 2);
        let coeffs = p.taylor_at(&root, 4).unwrap();
        let lin =
            TauPolynomial::from_coefficients(vec![root.neg(), ScalarExpr::one(&vars)]).unwrap();
        let mut rebuilt = TauPolynomial::zero(&ScalarExpr::zero(&vars));
        for (k, c) in coeffs.iter().enumerate() {
            let term = lin.pow(k).unwrap().mul_coeff(c).unwrap();
            rebuilt = rebuilt.add(&term).unwrap();
        }
        assert_eq!(rebuilt, p);
    }

    #[test]
    fn quadratic_extension_is_a_field() {
        let vars = two_vars();
        let x1 = ScalarExpr::var(&vars, 1);
        let radicand = x1.mul(&x1).unwrap().add(&ScalarExpr::one(&vars)).unwrap().neg();
        let a = QuadExt::from_base(x1.clone(), &radicand);
        let s = QuadExt::root(&radicand);
        let elem = a.add(&s).unwrap();
        let product = elem.mul(&elem.inv().unwrap()).unwrap();
        assert!(product.sub(&elem.one_like()).unwrap().is_zero());
        // The square of the adjoined root is the radicand.
        let squared = s.mul(&s).unwrap();
        let (base, coeff) = squared.parts();
        assert_eq!(base, &radicand);
        assert!(coeff.is_zero());
    }

    #[test]
    fn quadratic_extension_derivative_follows_the_chain_rule() {
        let vars = two_vars();
        let x1 = ScalarExpr::var(&vars, 1);
        let radicand = x1.mul(&x1).unwrap().add(&ScalarExpr::one(&vars)).unwrap().neg();
        let s = QuadExt::root(&radicand);
        // 2 s s' must equal t'.
        let ds = s.diff(1).unwrap();
        let lhs = s.mul(&ds).unwrap().mul_rational(&BigRational::from_integer(2.into()));
        let (base, coeff) = lhs.parts();
        assert_eq!(base, &radicand.diff(1).unwrap());
        assert!(coeff.is_zero());
    }

    #[test]
    fn symbol_system_validates_weights_and_entries() {
        let vars = two_vars();
        let x0 = ScalarExpr::var(&vars, 0);
        let x1 = ScalarExpr::var(&vars, 1);
        let lap = x0.mul(&x0).unwrap().add(&x1.mul(&x1).unwrap()).unwrap();
        let one = ScalarExpr::one(&vars);

        let positive_weight = SymbolSystem::new(
            vec![vec![lap.clone()]],
            vec![vec![one.clone()]],
            vec![2],
            vec![1],
            vec![-2],
        );
        assert!(matches!(positive_weight, Err(WorkbenchError::Precondition(_))));

        let degree_overflow = SymbolSystem::new(
            vec![vec![lap.clone()]],
            vec![vec![lap.clone()]],
            vec![2],
            vec![0],
            vec![-1],
        );
        assert!(matches!(degree_overflow, Err(WorkbenchError::Precondition(_))));

        let rational_entry = SymbolSystem::new(
            vec![vec![lap.inv().unwrap()]],
            vec![vec![one]],
            vec![2],
            vec![0],
            vec![-2],
        );
        assert!(matches!(rational_entry, Err(WorkbenchError::Precondition(_))));
    }

    #[test]
    fn principal_parts_keep_exact_order_only() {
        let vars = two_vars();
        let x0 = ScalarExpr::var(&vars, 0);
        let x1 = ScalarExpr::var(&vars, 1);
        let lap = x0.mul(&x0).unwrap().add(&x1.mul(&x1).unwrap()).unwrap();
        let one = ScalarExpr::one(&vars);
        let interior = lap.add(&one).unwrap();
        let boundary = x0.add(&one).unwrap();
        let sys = SymbolSystem::new(
            vec![vec![interior]],
            vec![vec![boundary]],
            vec![2],
            vec![0],
            vec![-1],
        )
        .unwrap();
        let pp = sys.principal_parts().unwrap();
        assert_eq!(pp.interior[0][0], lap);
        assert_eq!(pp.boundary[0][0], x0);
    }

    #[test]
    fn char_poly_and_m_plus_for_the_dirichlet_problem() {
        let sys = dirichlet_laplacian(3).unwrap();
        let sample = TangentialCovector::from_ints(&[3, 4]);
        let cp = char_poly(&sys, &sample).unwrap();
        assert_eq!(cp.degree(), 2);
        assert_eq!(cp.coeff(0), ScalarExpr::from_int(sys.vars(), 25));
        assert!(cp.coeff(1).is_zero());

        let mp = m_plus(&cp).unwrap();
        assert_eq!(mp.degree(), 1);
        let five_i = ScalarExpr::constant(
            sys.vars(),
            Constant::with_extension(
                BigRational::zero(),
                BigRational::from_integer(5.into()),
                BigRational::one(),
            )
            .unwrap(),
        );
        assert!(mp.eval(&five_i).unwrap().is_zero());
        // The mirrored factor times the leading coefficient recovers the
        // characteristic polynomial.
        let m_minus =
            TauPolynomial::from_coefficients(vec![five_i, ScalarExpr::one(sys.vars())]).unwrap();
        let product = mp.mul(&m_minus).unwrap();
        assert_eq!(product, cp);
    }

    #[test]
    fn char_poly_keeps_symbolic_tangential_data() {
        let sys = dirichlet_laplacian(3).unwrap();
        let cp = char_poly(&sys, &TangentialCovector::Symbolic).unwrap();
        let expected = parse_scalar(sys.vars(), "xi1^2 + xi2^2").unwrap();
        assert_eq!(cp.coeff(0), expected);
        assert_eq!(cp.coeff(2), ScalarExpr::one(sys.vars()));
    }

    #[test]
    fn char_poly_rejects_the_zero_covector() {
        let sys = dirichlet_laplacian(2).unwrap();
        let err = char_poly(&sys, &TangentialCovector::from_ints(&[0])).unwrap_err();
        assert!(matches!(err, WorkbenchError::Precondition(_)));
    }

    #[test]
    fn root_split_rejects_unsupported_factors() {
        let vars = two_vars();
        // Real roots: tau^2 - 1.
        let real_roots = int_poly(&vars, &[-1, 0, 1]);
        assert!(matches!(
            root_split(&real_roots),
            Err(WorkbenchError::Unsupported(_))
        ));
        // Odd degree.
        let odd = int_poly(&vars, &[0, 1]);
        assert!(matches!(root_split(&odd), Err(WorkbenchError::Unsupported(_))));
        // Two distinct quadratics: (tau^2 + 1)(tau^2 + 4).
        let mixed = int_poly(&vars, &[4, 0, 5, 0, 1]);
        assert!(matches!(root_split(&mixed), Err(WorkbenchError::Unsupported(_))));
        // An odd power spoils the even structure.
        let skew = int_poly(&vars, &[1, 1, 1]);
        assert!(matches!(root_split(&skew), Err(WorkbenchError::Unsupported(_))));
    }

    #[test]
    fn adjugate_identity_for_random_small_matrices() {
        let vars = two_vars();
        let mut rng = ChaCha8Rng::seed_from_u64(20260816);
        for _ in 0..4 {
            let mat: Vec<Vec<TauPolynomial<ScalarExpr>>> = (0..2)
                .map(|_| {
                    (0..2)
                        .map(|_| {
                            let coeffs: Vec<i64> =
                                (0..3).map(|_| rng.gen_range(-3..=3)).collect();
                            int_poly(&vars, &coeffs)
                        })
                        .collect()
                })
                .collect();
            let adj = adjugate_matrix(&mat).unwrap();
            let det = det_tau(&mat).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = TauPolynomial::zero(&ScalarExpr::zero(&vars));
                    for (k, arow) in adj.iter().enumerate() {
                        acc = acc.add(&mat[i][k].mul(&arow[j]).unwrap()).unwrap();
                    }
                    if i == j {
                        assert_eq!(acc, det);
                    } else {
                        assert!(acc.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn adjugate_diagonal_fast_path_matches_cofactors() {
        let vars = two_vars();
        let ell = int_poly(&vars, &[1, 0, 1]);
        let other = int_poly(&vars, &[4, 0, 1]);
        let zero = TauPolynomial::zero(&ScalarExpr::zero(&vars));
        let diag = vec![
            vec![ell.clone(), zero.clone(), zero.clone()],
            vec![zero.clone(), other.clone(), zero.clone()],
            vec![zero.clone(), zero.clone(), ell.clone()],
        ];
        let fast = adjugate_matrix(&diag).unwrap();
        assert_eq!(fast[0][0], other.mul(&ell).unwrap());
        assert_eq!(fast[1][1], ell.mul(&ell).unwrap());
        assert_eq!(fast[2][2], ell.mul(&other).unwrap());
        assert!(fast[0][1].is_zero());
        // Perturb one off diagonal entry so the cofactor route runs, then
        // confirm the defining identity directly.
        let mut dense = diag;
        dense[0][1] = int_poly(&vars, &[0, 1]);
        let adj = adjugate_matrix(&dense).unwrap();
        let det = det_tau(&dense).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = TauPolynomial::zero(&ScalarExpr::zero(&vars));
                for (k, arow) in adj.iter().enumerate() {
                    acc = acc.add(&dense[i][k].mul(&arow[j]).unwrap()).unwrap();
                }
                if i == j {
                    assert_eq!(acc, det);
                } else {
                    assert!(acc.is_zero());
                }
            }
        }
    }

    #[test]
    fn uniform_ellipticity_accepts_the_gauge_systems() {
        for (n, order) in [(4usize, 20usize), (6, 63)] {
            let sys = build_gauge_system(n).unwrap();
            let rep = uniform_ellipticity_check(&sys).unwrap();
            assert!(rep.pass, "dimension {n}: {}", rep.detail);
            assert_eq!(rep.order, order);
            assert!(rep.leading.unwrap().is_one());
        }
    }

    #[test]
    fn uniform_ellipticity_rejects_odd_and_anisotropic_symbols() {
        let vars = two_vars();
        let x0 = ScalarExpr::var(&vars, 0);
        let x1 = ScalarExpr::var(&vars, 1);
        let one = ScalarExpr::one(&vars);
        let odd = SymbolSystem::new(
            vec![vec![x0.clone()]],
            vec![vec![one.clone()]],
            vec![1],
            vec![0],
            vec![-1],
        )
        .unwrap();
        let rep = uniform_ellipticity_check(&odd).unwrap();
        assert!(!rep.pass);

        let skew = x0
            .mul(&x0)
            .unwrap()
            .add(&x1.mul(&x1).unwrap().mul_rational(&BigRational::from_integer(2.into())))
            .unwrap();
        let anisotropic =
            SymbolSystem::new(vec![vec![skew]], vec![vec![one]], vec![2], vec![0], vec![-2])
                .unwrap();
        let rep = uniform_ellipticity_check(&anisotropic).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn complementing_holds_for_dirichlet_and_flags_oblique() {
        let dir = dirichlet_laplacian(2).unwrap();
        let rep = complementing_check(&dir, &TangentialCovector::from_ints(&[1])).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.rank, 1);
        assert!(rep.certificate.is_none());

        let ob = oblique_control().unwrap();
        let good = complementing_check(&ob, &TangentialCovector::from_ints(&[1])).unwrap();
        assert!(good.pass, "the oblique operator only degenerates at xi1 < 0");
        let bad = complementing_check(&ob, &TangentialCovector::from_ints(&[-1])).unwrap();
        assert!(!bad.pass);
        assert_eq!(bad.rank, 0);
        match bad.certificate {
            Some(KernelCertificate::Base(v)) => {
                assert_eq!(v.len(), 1);
                assert!(!v[0].is_zero());
            }
            other => panic!("expected a base field certificate, got {other:?}"),
        }
    }

    #[test]
    fn complementing_rejects_row_count_mismatch() {
        let vars = two_vars();
        let x0 = ScalarExpr::var(&vars, 0);
        let x1 = ScalarExpr::var(&vars, 1);
        let lap = x0.mul(&x0).unwrap().add(&x1.mul(&x1).unwrap()).unwrap();
        let sys = SymbolSystem::new(
            vec![vec![lap]],
            vec![vec![ScalarExpr::one(&vars)], vec![x0]],
            vec![2],
            vec![0],
            vec![-2, -1],
        )
        .unwrap();
        let err =
            complementing_check(&sys, &TangentialCovector::from_ints(&[1])).unwrap_err();
        assert!(matches!(err, WorkbenchError::Precondition(_)));
    }

    #[test]
    fn complementing_reports_incompatible_extensions() {
        // Oblique type boundary data in dimension three, where the
        // tangential norm need not be a perfect square.
        let vars = VarTable::new(&["xi0", "xi1", "xi2"]);
        let x0 = ScalarExpr::var(&vars, 0);
        let x1 = ScalarExpr::var(&vars, 1);
        let x2 = ScalarExpr::var(&vars, 2);
        let lap = x0
            .mul(&x0)
            .unwrap()
            .add(&x1.mul(&x1).unwrap())
            .unwrap()
            .add(&x2.mul(&x2).unwrap())
            .unwrap();
        let i_unit = ScalarExpr::constant(&vars, Constant::imaginary_unit());
        let oblique = x0.add(&i_unit.mul(&x1).unwrap()).unwrap();
        let sys =
            SymbolSystem::new(vec![vec![lap]], vec![vec![oblique]], vec![2], vec![0], vec![-1])
                .unwrap();

        let square_norm = complementing_check(&sys, &TangentialCovector::from_ints(&[3, 4]));
        assert!(square_norm.unwrap().pass);

        let err =
            complementing_check(&sys, &TangentialCovector::from_ints(&[1, 1])).unwrap_err();
        assert!(matches!(err, WorkbenchError::Unsupported(_)));
    }

    #[test]
    fn symbolic_mode_needs_two_tangential_directions() {
        let ob = oblique_control().unwrap();
        let err = complementing_check(&ob, &TangentialCovector::Symbolic).unwrap_err();
        assert!(matches!(err, WorkbenchError::Unsupported(_)));
    }

    #[test]
    fn gauge_system_shapes_and_selected_entries() {
        let sys = build_gauge_system(4).unwrap();
        assert_eq!(sys.unknowns(), 10);
        assert_eq!(sys.boundary_rows(), 20);
        assert_eq!(sys.dim(), 4);
        let pairs = metric_pairs(4);
        assert_eq!(pairs[0], (1, 1));
        assert_eq!(pairs[6], (0, 1));
        assert_eq!(pairs[9], (0, 0));

        let vars = sys.vars();
        // First order zero row pins the first tangential pair.
        assert_eq!(sys.boundary()[0][0], ScalarExpr::one(vars));
        assert!(sys.boundary()[0][9].is_zero());
        // First differentiated first order row, normal pair column.
        let expected = parse_scalar(vars, "-1/2*xi0*xi1").unwrap();
        assert_eq!(sys.boundary()[12][9], expected);
        // Same row, coupled tangential diagonal.
        let pure_coupling = parse_scalar(vars, "(2/3 + 1/2)*xi0*xi1").unwrap();
        assert_eq!(sys.boundary()[12][0], pure_coupling);
        // Third order row for the first tangential direction.
        let third = parse_scalar(vars, "xi0*(xi0^2 + xi1^2 + xi2^2 + xi3^2)").unwrap();
        assert_eq!(sys.boundary()[16][6], third);
        // Weights follow the block orders.
        assert_eq!(sys.boundary_weights()[0], -4);
        assert_eq!(sys.boundary_weights()[6], -2);
        assert_eq!(sys.boundary_weights()[12], -2);
        assert_eq!(sys.boundary_weights()[16], -1);

        let sys6 = build_gauge_system(6).unwrap();
        assert_eq!(sys6.unknowns(), 21);
        assert_eq!(sys6.boundary_rows(), 63);
        // The order four block covers every unknown once.
        assert_eq!(sys6.boundary_weights()[42..63], vec![-2; 21][..]);
    }

    #[test]
    fn gauge_system_rejects_odd_or_low_dimension() {
        for n in [2usize, 3, 5, 7] {
            assert!(matches!(
                build_gauge_system(n),
                Err(WorkbenchError::Precondition(_))
            ));
        }
    }

    #[test]
    fn complementing_holds_for_the_gauge_system_at_all_default_samples() {
        let sys = build_gauge_system(4).unwrap();
        for s in default_samples(4).unwrap() {
            let sample = TangentialCovector::Numeric(s);
            let rep = complementing_check(&sys, &sample).unwrap();
            assert!(rep.pass, "failed at {}", sample.describe());
            assert_eq!(rep.rank, 20);
            assert_eq!(rep.modulus_degree, 2);
            assert_eq!(rep.factored_out, 18);
        }
    }

    #[test]
    fn complementing_holds_for_the_gauge_system_symbolically() {
        let sys = build_gauge_system(4).unwrap();
        let rep = complementing_check(&sys, &TangentialCovector::Symbolic).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.rank, 20);
        assert_eq!(rep.required_rank, 20);
    }

    #[test]
    fn complementing_holds_in_dimension_six() {
        let sys = build_gauge_system(6).unwrap();
        let padded = default_samples(6).unwrap();
        let sample = TangentialCovector::Numeric(padded[0].clone());
        let rep = complementing_check(&sys, &sample).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.rank, 63);
        assert_eq!(rep.modulus_degree, 3);
    }

    #[test]
    fn scaled_and_adjugate_routes_agree_on_the_gauge_system() {
        // The scalar interior shortcut and the literal adjugate product
        // must reduce to the same rank question.
        let sys = build_gauge_system(4).unwrap();
        let sample = TangentialCovector::from_ints(&[3, 4, 0]);
        let fast = complementing_impl(&sys, &sample, false).unwrap();
        let general = complementing_impl(&sys, &sample, true).unwrap();
        assert!(fast.pass && general.pass);
        assert_eq!(fast.rank, general.rank);
        assert_eq!(fast.modulus_degree, general.modulus_degree);
        assert_eq!(fast.factored_out, general.factored_out);
    }

    #[test]
    fn zeroing_the_mixed_block_breaks_the_condition() {
        let sys = build_gauge_system(4).unwrap();
        let broken = zero_mixed_block(&sys).unwrap();
        let sample = TangentialCovector::from_ints(&[3, 4, 0]);
        let rep = complementing_check(&broken, &sample).unwrap();
        assert!(!rep.pass);
        assert!(rep.rank <= 16);
        match rep.certificate {
            Some(KernelCertificate::Base(v)) => {
                assert_eq!(v.len(), 20);
                assert!(v.iter().any(|c| !c.is_zero()));
            }
            other => panic!("expected a base field certificate, got {other:?}"),
        }
    }

    #[test]
    fn normal_minor_is_invertible_at_every_default_sample() {
        for s in default_samples(4).unwrap() {
            let rep = normal_minor_check(4, &TangentialCovector::Numeric(s)).unwrap();
            assert!(rep.determinant_nonzero);
            assert!(rep.eigenvalues_confirmed);
        }
        let symbolic = normal_minor_check(4, &TangentialCovector::Symbolic).unwrap();
        assert!(symbolic.pass);
        let padded = default_samples(6).unwrap();
        let six = normal_minor_check(6, &TangentialCovector::Numeric(padded[0].clone())).unwrap();
        assert!(six.pass);
    }

    #[test]
    fn default_samples_have_perfect_square_norms() {
        let samples = default_samples(4).unwrap();
        assert_eq!(samples.len(), 5);
        for s in &samples {
            let norm: BigRational = s.iter().map(|v| v * v).sum();
            assert!(rational_sqrt(&norm).is_some(), "norm {norm} is not a perfect square");
        }
        for i in 0..samples.len() {
            for j in i + 1..samples.len() {
                assert_ne!(samples[i], samples[j]);
            }
        }
    }

    #[test]
    fn standard_battery_passes() {
        let report = standard_report(None, true).unwrap();
        for check in &report.checks {
            assert!(check.pass, "{}: {}", check.name, check.detail);
        }
        assert!(report.all_pass());
    }
}
