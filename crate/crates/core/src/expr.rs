//! Expression parser for rational functions in one variable.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary | <implicit> unary)*
//! unary   := ("-" | "+") unary | power
//! power   := atom ("^" exponent)?
//! exponent:= ("-" | "+")? INT | "(" ("-" | "+")? INT ")"
//! atom    := INT | VAR | "(" expr ")"
//! ```
//!
//! Implicit multiplication applies when a variable or `(` follows a factor,
//! so `2x^2`, `3t` and `x(x+1)` parse as products. Rational literals are
//! written as quotients, `1/2`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::places_qt::FFElement;
use crate::poly::{Field, Poly};

/// Largest absolute exponent accepted after `^`.
pub const MAX_EXPONENT: i64 = 4096;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Int(BigInt::from_str(&digits).unwrap())));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Var(name)));
                continue;
            }
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(Error::Parse {
                    pos,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

/// Coefficient field an expression can be evaluated into.
pub trait ExprField: Field {
    fn from_bigint(n: BigInt) -> Self;
    /// The transcendental parameter `t`, when the field has one.
    fn parameter() -> Option<Self>;
}

impl ExprField for BigRational {
    fn from_bigint(n: BigInt) -> Self {
        BigRational::from_integer(n)
    }
    fn parameter() -> Option<Self> {
        None
    }
}

impl ExprField for FFElement {
    fn from_bigint(n: BigInt) -> Self {
        FFElement::from_rational(BigRational::from_integer(n))
    }
    fn parameter() -> Option<Self> {
        Some(FFElement::t())
    }
}

/// A quotient of polynomials kept in lowest terms.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn<K: Field> {
    pub numer: Poly<K>,
    pub denom: Poly<K>,
}

impl<K: Field> RatFn<K> {
    pub fn constant(c: K) -> Self {
        RatFn {
            numer: Poly::constant(c),
            denom: Poly::one(),
        }
    }

    pub fn var() -> Self {
        RatFn {
            numer: Poly::x(),
            denom: Poly::one(),
        }
    }

    fn reduce(numer: Poly<K>, denom: Poly<K>) -> (Self, usize) {
        if numer.is_zero() {
            return (
                RatFn {
                    numer,
                    denom: Poly::one(),
                },
                0,
            );
        }
        let g = numer.gcd(&denom);
        let common = g.deg0();
        let numer = numer.checked_div(&g).unwrap();
        let denom = denom.checked_div(&g).unwrap();
        let lead = Poly::constant(denom.lc().expect("nonzero denominator").clone());
        let numer = numer.checked_div(&lead).unwrap();
        let denom = denom.checked_div(&lead).unwrap();
        (RatFn { numer, denom }, common)
    }

    pub fn degree(&self) -> usize {
        self.numer.deg0().max(self.denom.deg0())
    }

    fn add(&self, o: &Self) -> Self {
        let n = &(&self.numer * &o.denom) + &(&o.numer * &self.denom);
        Self::reduce(n, &self.denom * &o.denom).0
    }

    fn neg(&self) -> Self {
        RatFn {
            numer: -&self.numer,
            denom: self.denom.clone(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        Self::reduce(&self.numer * &o.numer, &self.denom * &o.denom).0
    }

    fn recip(&self) -> Option<Self> {
        (!self.numer.is_zero()).then(|| RatFn {
            numer: self.denom.clone(),
            denom: self.numer.clone(),
        })
    }

    fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Some(RatFn {
            numer: base.numer.pow(e),
            denom: base.denom.pow(e),
        })
    }
}

struct Parser<'a, K: ExprField> {
    toks: &'a [(usize, Tok)],
    at: usize,
    var: &'a str,
    end: usize,
    _k: std::marker::PhantomData<K>,
}

impl<'a, K: ExprField> Parser<'a, K> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|&(p, _)| p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFn<K>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFn<K>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.unary()?;
                    let Some(inv) = d.recip() else {
                        return Err(Error::Parse {
                            pos,
                            msg: "division by zero".into(),
                        });
                    };
                    let (q, common) = RatFn::reduce(&acc.numer * &inv.numer, &acc.denom * &inv.denom);
                    if common > 0 {
                        return Err(Error::CommonFactor {
                            common_degree: common,
                            reduced_degree: q.degree(),
                        });
                    }
                    acc = q;
                }
                Some(Tok::Var(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFn<K>> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFn<K>> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let e = self.exponent()?;
        if e.abs() > MAX_EXPONENT {
            return Err(Error::Parse {
                pos,
                msg: format!("exponent {e} exceeds the limit {MAX_EXPONENT}"),
            });
        }
        base.pow(e).ok_or(Error::Parse {
            pos,
            msg: "zero raised to a negative power".into(),
        })
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some(&Tok::LParen);
        if paren {
            self.bump();
        }
        let neg = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        let e = match self.bump() {
            Some(Tok::Int(n)) => match n.to_i64() {
                Some(v) => v,
                None => {
                    self.at -= 1;
                    return self.err("exponent too large");
                }
            },
            _ => {
                self.at -= 1;
                return self.err("expected an integer exponent");
            }
        };
        if paren && self.bump() != Some(Tok::RParen) {
            self.at -= 1;
            return self.err("expected ')'");
        }
        Ok(if neg { -e } else { e })
    }

    fn atom(&mut self) -> Result<RatFn<K>> {
        match self.bump() {
            Some(Tok::Int(n)) => Ok(RatFn::constant(K::from_bigint(n))),
            Some(Tok::Var(name)) => {
                if name == self.var {
                    return Ok(RatFn::var());
                }
                if name == "t" {
                    if let Some(t) = K::parameter() {
                        return Ok(RatFn::constant(t));
                    }
                }
                self.at -= 1;
                self.err(format!("unknown variable {name:?}"))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    self.at -= 1;
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(_) => {
                self.at -= 1;
                self.err("expected a number, variable or '('")
            }
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `s` as a rational function of `var` with coefficients in `K`.
/// When `K` has a parameter, the name `t` denotes it.
pub fn parse_ratfn<K: ExprField>(s: &str, var: &str) -> Result<RatFn<K>> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser::<K> {
        toks: &toks,
        at: 0,
        var,
        end: s.len(),
        _k: std::marker::PhantomData,
    };
    let r = p.expr()?;
    if p.at < toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(r)
}

/// Parses an element of ℚ(t).
pub fn parse_ff_element(s: &str) -> Result<FFElement> {
    let r = parse_ratfn::<BigRational>(s, "t")?;
    FFElement::new(r.numer, r.denom)
}

/// Parses a polynomial in `var` with rational coefficients.
pub fn parse_qpoly(s: &str, var: &str) -> Result<Poly<BigRational>> {
    let r = parse_ratfn::<BigRational>(s, var)?;
    if !r.denom.is_constant() {
        return Err(Error::invalid(format!("{s:?} is not a polynomial")));
    }
    Ok(r.numer.scale(&(BigRational::one() / r.denom.coeff(0))))
}

/// Parses a polynomial in `var` and clears it to integer coefficients
/// without changing its value (denominators must be absent).
pub fn parse_zpoly(s: &str, var: &str) -> Result<Vec<BigInt>> {
    let p = parse_qpoly(s, var)?;
    if p.coeffs().iter().any(|c| !c.is_integer()) {
        return Err(Error::invalid(format!("{s:?} must have integer coefficients")));
    }
    Ok(p.coeffs().iter().map(|c| c.to_integer()).collect())
}

/// Parses a rational constant written as an expression (`-3/4`, `2^10`).
pub fn parse_constant(s: &str) -> Result<BigRational> {
    let r = parse_ratfn::<BigRational>(s, "x")?;
    if r.degree() > 0 {
        return Err(Error::invalid(format!("{s:?} is not a constant")));
    }
    Ok(r.numer.coeff(0) / r.denom.coeff(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qpoly_from_ints as q;

    fn qr(s: &str) -> RatFn<BigRational> {
        parse_ratfn(s, "x").unwrap()
    }

    #[test]
    fn precedence_and_implicit_products() {
        assert_eq!(qr("x^2+1").numer, q(&[1, 0, 1]));
        assert_eq!(qr("2x^2-3x").numer, q(&[0, -3, 2]));
        assert_eq!(qr("-x^2").numer, q(&[0, 0, -1]));
        assert_eq!(qr("x(x+1)").numer, q(&[0, 1, 1]));
        assert_eq!(qr("(x-1)^2").numer, q(&[1, -2, 1]));
        assert_eq!(qr("2^3").numer, q(&[8]));
        let r = qr("1/x^2");
        assert_eq!((r.numer, r.denom), (q(&[1]), q(&[0, 0, 1])));
        let r = qr("x^-2");
        assert_eq!((r.numer, r.denom), (q(&[1]), q(&[0, 0, 1])));
        let r = qr("1/2*x^2");
        assert_eq!(r.numer.coeff(2), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn cancelling_division_is_rejected() {
        match parse_ratfn::<BigRational>("(x^2-1)/(x-1)", "x") {
            Err(Error::CommonFactor {
                common_degree: 1,
                reduced_degree: 1,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_report_positions() {
        match parse_ratfn::<BigRational>("x^2 + * 1", "x") {
            Err(Error::Parse { pos: 6, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_ratfn::<BigRational>("(x+1", "x"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_ratfn::<BigRational>("x^2+t", "x"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_ratfn::<BigRational>("x^y", "x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_ratfn::<BigRational>("1/0", "x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_ratfn::<BigRational>("", "x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn function_field_coefficients() {
        let r: RatFn<FFElement> = parse_ratfn("x^2+t", "x").unwrap();
        assert_eq!(r.numer.coeff(0), FFElement::t());
        let e = parse_ff_element("t^2+2t").unwrap();
        assert_eq!(e.numer(), &q(&[0, 2, 1]));
        let e = parse_ff_element("(t^2+1)/t^3").unwrap();
        assert_eq!(e.denom(), &q(&[0, 0, 0, 1]));
    }

    #[test]
    fn constants_and_integer_polys() {
        assert_eq!(parse_constant("-3/4").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert!(parse_constant("x").is_err());
        assert_eq!(parse_zpoly("x^3+2", "x").unwrap(), vec![2.into(), 0.into(), 0.into(), 1.into()]);
        assert!(parse_zpoly("x/2", "x").is_err());
    }
}
