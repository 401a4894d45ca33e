//! Parser for the textual expression format.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' uint)?
//! atom   := uint | ident | '(' expr ')' | 'I' | 'I' '*' 'sqrt' '(' rat ')'
//! rat    := uint ('/' uint)?
//! ```
//!
//! Identifiers match `[A-Za-z][A-Za-z0-9_]*` and must name chart variables;
//! `I` and `sqrt` are reserved.  `I` is the imaginary unit and the atomic
//! form `I*sqrt(q)` denotes i times the square root of the positive
//! rational q.  Exponents are non-negative integer literals.
//!
//! Everything the kernel prints reparses to the same value, and printing
//! the reparse reproduces the string.  Tests pin this round trip.

use num::rational::BigRational;
use num::BigInt;
use std::sync::Arc;

use super::num::Constant;
use super::poly::VarTable;
use super::scalar::ScalarExpr;
use super::KernelError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>, KernelError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let b = self.src[self.pos];
            match b {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'+' => {
                    self.pos += 1;
                    out.push((Tok::Plus, start));
                }
                b'-' => {
                    self.pos += 1;
                    out.push((Tok::Minus, start));
                }
                b'*' => {
                    self.pos += 1;
                    out.push((Tok::Star, start));
                }
                b'/' => {
                    self.pos += 1;
                    out.push((Tok::Slash, start));
                }
                b'^' => {
                    self.pos += 1;
                    out.push((Tok::Caret, start));
                }
                b'(' => {
                    self.pos += 1;
                    out.push((Tok::LParen, start));
                }
                b')' => {
                    self.pos += 1;
                    out.push((Tok::RParen, start));
                }
                b'0'..=b'9' => {
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let n = BigInt::parse_bytes(digits.as_bytes(), 10).unwrap();
                    out.push((Tok::Int(n), start));
                }
                b'A'..=b'Z' | b'a'..=b'z' => {
                    self.pos += 1;
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    out.push((Tok::Ident(name.to_string()), start));
                }
                other => {
                    return Err(KernelError::Parse {
                        message: format!("unexpected byte '{}'", other as char),
                        position: start,
                    });
                }
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    vars: &'a Arc<VarTable>,
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.idx + ahead).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), KernelError> {
        let pos = self.pos();
        match self.bump() {
            Some(ref t) if t == want => Ok(()),
            _ => Err(KernelError::Parse {
                message: format!("expected {what}"),
                position: pos,
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<ScalarExpr, KernelError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.parse_term()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.parse_term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<ScalarExpr, KernelError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.parse_factor()?)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let pos = self.pos();
                    let rhs = self.parse_factor()?;
                    acc = acc.div(&rhs).map_err(|e| match e {
                        KernelError::DivisionByZero => KernelError::Parse {
                            message: "division by zero".to_string(),
                            position: pos,
                        },
                        other => other,
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<ScalarExpr, KernelError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.parse_factor()?.neg());
        }
        let base = self.parse_atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let k = u32::try_from(&n).map_err(|_| KernelError::Parse {
                        message: "exponent too large".to_string(),
                        position: pos,
                    })?;
                    return base.pow(k as i32);
                }
                _ => {
                    return Err(KernelError::Parse {
                        message: "expected a non-negative integer exponent".to_string(),
                        position: pos,
                    });
                }
            }
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<ScalarExpr, KernelError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(ScalarExpr::constant(
                self.vars,
                Constant::from_rational(BigRational::from_integer(n)),
            )),
            Some(Tok::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) if name == "I" => {
                // lookahead for the atomic radical form I*sqrt(q)
                if matches!(self.peek(), Some(Tok::Star))
                    && matches!(self.peek_at(1), Some(Tok::Ident(s)) if s == "sqrt")
                {
                    self.bump();
                    self.bump();
                    self.expect(&Tok::LParen, "'(' after sqrt")?;
                    let d = self.parse_positive_rational()?;
                    self.expect(&Tok::RParen, "')' after the radicand")?;
                    let c = Constant::with_extension(
                        BigRational::from_integer(0.into()),
                        BigRational::from_integer(1.into()),
                        d,
                    )?;
                    Ok(ScalarExpr::constant(self.vars, c))
                } else {
                    Ok(ScalarExpr::constant(self.vars, Constant::imaginary_unit()))
                }
            }
            Some(Tok::Ident(name)) if name == "sqrt" => Err(KernelError::Parse {
                message: "sqrt is only allowed in the atomic form I*sqrt(q)".to_string(),
                position: pos,
            }),
            Some(Tok::Ident(name)) => match self.vars.index_of(&name) {
                Some(i) => Ok(ScalarExpr::var(self.vars, i)),
                None => Err(KernelError::Parse {
                    message: format!("unknown variable '{name}'"),
                    position: pos,
                }),
            },
            _ => Err(KernelError::Parse {
                message: "expected a number, variable, or '('".to_string(),
                position: pos,
            }),
        }
    }

    fn parse_positive_rational(&mut self) -> Result<BigRational, KernelError> {
        let pos = self.pos();
        let p = match self.bump() {
            Some(Tok::Int(n)) => n,
            _ => {
                return Err(KernelError::Parse {
                    message: "expected a positive integer radicand".to_string(),
                    position: pos,
                });
            }
        };
        if matches!(self.peek(), Some(Tok::Slash)) {
            self.bump();
            let qpos = self.pos();
            match self.bump() {
                Some(Tok::Int(q)) if q != BigInt::from(0) => Ok(BigRational::new(p, q)),
                _ => Err(KernelError::Parse {
                    message: "expected a nonzero integer denominator".to_string(),
                    position: qpos,
                }),
            }
        } else {
            Ok(BigRational::from_integer(p))
        }
    }
}

/// Parses an expression over the given chart variables.
pub fn parse_scalar(vars: &Arc<VarTable>, input: &str) -> Result<ScalarExpr, KernelError> {
    let toks = Lexer::new(input).tokens()?;
    let mut p = Parser { vars, toks, idx: 0, end: input.len() };
    let e = p.parse_expr()?;
    if p.idx != p.toks.len() {
        return Err(KernelError::Parse {
            message: "trailing input after expression".to_string(),
            position: p.pos(),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Arc<VarTable> {
        VarTable::new(&["x0", "x1", "x2"])
    }

    fn roundtrip(v: &Arc<VarTable>, s: &str) {
        let once = parse_scalar(v, s).unwrap();
        let printed = once.to_string();
        let twice = parse_scalar(v, &printed).unwrap();
        assert_eq!(once, twice, "value changed on reparse of {printed:?}");
        assert_eq!(printed, twice.to_string(), "print not a fixed point for {s:?}");
    }

    #[test]
    fn parses_polynomial_arithmetic() {
        let v = vars();
        let e = parse_scalar(&v, "(x0 + x1)^2 - x0^2 - x1^2").unwrap();
        let expect = ScalarExpr::var(&v, 0)
            .mul(&ScalarExpr::var(&v, 1))
            .unwrap()
            .mul_rational(&BigRational::from_integer(2.into()));
        assert_eq!(e, expect);
    }

    #[test]
    fn parses_rational_functions_and_cancels() {
        let v = vars();
        let e = parse_scalar(&v, "(x0^2 - x1^2)/(x0 - x1)").unwrap();
        assert!(e.is_polynomial());
        assert_eq!(e.to_string(), "x0 + x1");
    }

    #[test]
    fn imaginary_unit_and_radicals() {
        let v = vars();
        let e = parse_scalar(&v, "I*I").unwrap();
        assert_eq!(e.to_string(), "-1");
        let r = parse_scalar(&v, "I*sqrt(5)*I*sqrt(5)").unwrap();
        assert_eq!(r.to_string(), "-5");
        let half = parse_scalar(&v, "I*sqrt(1/2)").unwrap();
        let sq = half.mul(&half).unwrap();
        assert_eq!(sq.to_string(), "-1/2");
    }

    #[test]
    fn unary_minus_and_precedence() {
        let v = vars();
        let e = parse_scalar(&v, "-x0^2").unwrap();
        assert_eq!(e, ScalarExpr::var(&v, 0).pow(2).unwrap().neg());
        let f = parse_scalar(&v, "1 - -x1").unwrap();
        assert_eq!(f.to_string(), "x1 + 1");
        let g = parse_scalar(&v, "2*x0 + 3*x1*x2").unwrap();
        assert_eq!(g.to_string(), "3*x1*x2 + 2*x0");
    }

    #[test]
    fn printed_forms_are_fixed_points() {
        let v = vars();
        for s in [
            "x0^2 + x0*x1 + x1^2 + x0 + x1",
            "-1/x0^2",
            "(x0 + 1)/(x1 - 2)",
            "1/2 - 2/3*I*sqrt(5)",
            "I",
            "-3/7",
            "(x0^2 - 1/4)*x1 / (x2 + 7)",
            "x0/x1/x2",
        ] {
            roundtrip(&v, s);
        }
    }

    #[test]
    fn errors_carry_positions() {
        let v = vars();
        match parse_scalar(&v, "x0 + zz") {
            Err(KernelError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("expected a parse error, got {other:?}"),
        }
        match parse_scalar(&v, "x0 + ") {
            Err(KernelError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("expected a parse error, got {other:?}"),
        }
        match parse_scalar(&v, "x0 @ x1") {
            Err(KernelError::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected a parse error, got {other:?}"),
        }
        assert!(parse_scalar(&v, "1/0").is_err());
        assert!(parse_scalar(&v, "sqrt(2)").is_err());
        assert!(parse_scalar(&v, "x0 x1").is_err());
    }
}
