//! Exact constants: rational numbers, optionally extended by the imaginary
//! quadratic element i*sqrt(d) for a positive rational d.
//!
//! A [`Constant`] holds `re + im * i*sqrt(d)`.  Values with `im == 0` are
//! canonicalized to carry no extension tag at all, so equality of constants
//! is plain structural equality and purely rational arithmetic never pays
//! for the extension.  Mixing two distinct extensions (say i*sqrt(2) and
//! i*sqrt(3)) is an error rather than a silent widening: every value this
//! crate produces lives in a single quadratic extension at a time.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;

use super::KernelError;

/// `re + im * i*sqrt(d)`.  Invariant: `im == 0` implies `d == None`,
/// and `d`, when present, is a positive rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constant {
    re: BigRational,
    im: BigRational,
    d: Option<BigRational>,
}

impl Constant {
    pub fn zero() -> Self {
        Constant { re: BigRational::zero(), im: BigRational::zero(), d: None }
    }

    pub fn one() -> Self {
        Constant { re: BigRational::one(), im: BigRational::zero(), d: None }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Constant { re, im: BigRational::zero(), d: None }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` as an exact rational; `q` must be nonzero.
    pub fn from_frac(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator in rational constant");
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `re + im * i*sqrt(d)`; requires `d > 0` when `im != 0`.
    pub fn with_extension(
        re: BigRational,
        im: BigRational,
        d: BigRational,
    ) -> Result<Self, KernelError> {
        if im.is_zero() {
            return Ok(Self::from_rational(re));
        }
        if !d.is_positive() {
            return Err(KernelError::BadExtension(format!(
                "extension radicand must be positive, got {d}"
            )));
        }
        Ok(Constant { re, im, d: Some(d) })
    }

    /// The pure imaginary unit i (the d = 1 extension).
    pub fn imaginary_unit() -> Self {
        Constant {
            re: BigRational::zero(),
            im: BigRational::one(),
            d: Some(BigRational::one()),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    /// Extension radicand when the value has a nonzero imaginary part.
    pub fn extension(&self) -> Option<&BigRational> {
        self.d.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    /// Rational value, or an error if an imaginary part is present.
    pub fn to_rational(&self) -> Result<BigRational, KernelError> {
        if self.is_rational() {
            Ok(self.re.clone())
        } else {
            Err(KernelError::NotRational(self.to_string()))
        }
    }

    fn canonical(re: BigRational, im: BigRational, d: Option<BigRational>) -> Self {
        if im.is_zero() {
            Constant { re, im, d: None }
        } else {
            Constant { re, im, d }
        }
    }

    /// Shared radicand of two operands, or an error if both carry
    /// distinct extensions.
    fn join_fields(&self, other: &Self) -> Result<Option<BigRational>, KernelError> {
        match (&self.d, &other.d) {
            (None, None) => Ok(None),
            (Some(d), None) => Ok(Some(d.clone())),
            (None, Some(d)) => Ok(Some(d.clone())),
            (Some(a), Some(b)) if a == b => Ok(Some(a.clone())),
            (Some(a), Some(b)) => Err(KernelError::FieldMismatch(format!(
                "cannot combine i*sqrt({a}) with i*sqrt({b})"
            ))),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, KernelError> {
        let d = self.join_fields(other)?;
        Ok(Self::canonical(&self.re + &other.re, &self.im + &other.im, d))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, KernelError> {
        let d = self.join_fields(other)?;
        Ok(Self::canonical(&self.re - &other.re, &self.im - &other.im, d))
    }

    pub fn neg(&self) -> Self {
        Constant {
            re: -self.re.clone(),
            im: -self.im.clone(),
            d: self.d.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, KernelError> {
        let d = self.join_fields(other)?;
        // (a + b s)(c + e s) with s^2 = -d
        let (a, b, c, e) = (&self.re, &self.im, &other.re, &other.im);
        let cross = b * e;
        let re = if cross.is_zero() {
            a * c
        } else {
            a * c - cross * d.as_ref().expect("nonzero imaginary parts carry a radicand")
        };
        let im = a * e + b * c;
        Ok(Self::canonical(re, im, d))
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self, KernelError> {
        if self.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        match &self.d {
            None => Ok(Self::from_rational(self.re.recip())),
            Some(d) => {
                // |a + b s|^2 = a^2 + d b^2 > 0 since d > 0
                let norm = &self.re * &self.re + d * &self.im * &self.im;
                Ok(Self::canonical(
                    &self.re / &norm,
                    -(&self.im / &norm),
                    Some(d.clone()),
                ))
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, KernelError> {
        self.mul(&other.inv()?)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::canonical(&self.re * k, &self.im * k, self.d.clone())
    }

    /// Complex conjugate (negates the i*sqrt(d) part).
    pub fn conj(&self) -> Self {
        Self::canonical(self.re.clone(), -self.im.clone(), self.d.clone())
    }
}

fn fmt_rational(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

struct Rat<'a>(&'a BigRational);
impl fmt::Display for Rat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(self.0, f)
    }
}

impl fmt::Display for Constant {
    /// Prints `p`, `p/q`, or `a + b*I*sqrt(d)` (with `*sqrt(1)` elided),
    /// matching exactly what the expression parser accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.d {
            None => fmt_rational(&self.re, f),
            Some(d) => {
                let unit = if d.is_one() {
                    "I".to_string()
                } else {
                    format!("I*sqrt({})", Rat(d))
                };
                if self.re.is_zero() {
                    if self.im.is_one() {
                        return write!(f, "{unit}");
                    }
                    if (-self.im.clone()).is_one() {
                        return write!(f, "-{unit}");
                    }
                    return write!(f, "{}*{unit}", Rat(&self.im));
                }
                write!(f, "{}", Rat(&self.re))?;
                if self.im.is_positive() {
                    if self.im.is_one() {
                        write!(f, " + {unit}")
                    } else {
                        write!(f, " + {}*{unit}", Rat(&self.im))
                    }
                } else {
                    let m = -self.im.clone();
                    if m.is_one() {
                        write!(f, " - {unit}")
                    } else {
                        write!(f, " - {}*{unit}", Rat(&m))
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let i = Constant::imaginary_unit();
        let ii = i.mul(&i).unwrap();
        assert_eq!(ii, Constant::from_int(-1));
        assert!(ii.is_rational());
    }

    #[test]
    fn gaussian_inverse() {
        // (3 + 4i)^-1 = (3 - 4i)/25
        let z = Constant::with_extension(q(3, 1), q(4, 1), q(1, 1)).unwrap();
        let w = z.inv().unwrap();
        assert_eq!(w, Constant::with_extension(q(3, 25), q(-4, 25), q(1, 1)).unwrap());
        assert!(z.mul(&w).unwrap().is_one());
    }

    #[test]
    fn sqrt_d_squares_back() {
        // (i*sqrt(5))^2 = -5
        let s = Constant::with_extension(q(0, 1), q(1, 1), q(5, 1)).unwrap();
        assert_eq!(s.mul(&s).unwrap(), Constant::from_int(-5));
    }

    #[test]
    fn distinct_extensions_refuse_to_mix() {
        let a = Constant::with_extension(q(0, 1), q(1, 1), q(2, 1)).unwrap();
        let b = Constant::with_extension(q(0, 1), q(1, 1), q(3, 1)).unwrap();
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn display_round_trip_shapes() {
        assert_eq!(Constant::from_frac(-3, 7).to_string(), "-3/7");
        let z = Constant::with_extension(q(1, 2), q(-2, 3), q(5, 1)).unwrap();
        assert_eq!(z.to_string(), "1/2 - 2/3*I*sqrt(5)");
        assert_eq!(Constant::imaginary_unit().to_string(), "I");
    }
}
