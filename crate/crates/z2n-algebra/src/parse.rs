//! Expression parser for the series text format.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! series   := term ('+' term)*
//! term     := ['-'] factor ('*' factor)*
//! factor   := rational | var ['^' nat] | '(' series ')'
//! rational := int | int '/' int
//! ```
//!
//! Base variables are named `x1..xp`, formal variables `t1..tq`; any other
//! identifier resolves against an environment of named series (session
//! definitions). Expressions are evaluated directly into normalized
//! series, so `t2*t1` comes back sign-resolved and `t1*t1` collapses to
//! zero for odd `t1`. A literal exponent above 1 on an odd variable is a
//! syntax error rather than a silent zero.

use std::collections::BTreeMap;

use num::{BigInt, Zero};

use crate::error::ParseError;
use crate::series::{FormalSignature, Series};
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '+' => {
                bump(&mut chars);
                Tok::Plus
            }
            '-' => {
                bump(&mut chars);
                Tok::Minus
            }
            '*' => {
                bump(&mut chars);
                Tok::Star
            }
            '^' => {
                bump(&mut chars);
                Tok::Caret
            }
            '/' => {
                bump(&mut chars);
                Tok::Slash
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            d if d.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_digit() {
                        digits.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                Tok::Int(digits.parse().expect("ascii digits"))
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut name = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' {
                        name.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                Tok::Ident(name)
            }
            other => {
                return Err(ParseError::new(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    signature: &'a FormalSignature,
    env: &'a BTreeMap<String, Series>,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|s| (s.line, s.col)).unwrap_or(self.end)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|s| &s.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, message)
    }

    fn series(&mut self) -> Result<Series, ParseError> {
        let mut acc = self.term()?;
        while self.eat(&Tok::Plus) {
            let next = self.term()?;
            acc = acc
                .add(&next)
                .expect("parsed series share the session signature");
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Series, ParseError> {
        let negated = self.eat(&Tok::Minus);
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            let next = self.factor()?;
            acc = acc
                .mul(&next)
                .expect("parsed series share the session signature");
        }
        Ok(if negated { acc.neg() } else { acc })
    }

    fn factor(&mut self) -> Result<Series, ParseError> {
        let spanned = match self.peek() {
            Some(s) => s.clone(),
            None => return Err(self.error("expected a factor, found end of input")),
        };
        match spanned.tok {
            Tok::Int(n) => {
                self.pos += 1;
                if self.eat(&Tok::Slash) {
                    let den_span = self.here();
                    match self.peek().map(|s| s.tok.clone()) {
                        Some(Tok::Int(d)) => {
                            self.pos += 1;
                            if d.is_zero() {
                                return Err(ParseError::new(
                                    den_span.0,
                                    den_span.1,
                                    "zero denominator",
                                ));
                            }
                            Ok(Series::constant(self.signature, Rational::new(n, d)))
                        }
                        _ => Err(self.error("expected an integer denominator after `/`")),
                    }
                } else {
                    Ok(Series::constant(self.signature, Rational::from_integer(n)))
                }
            }
            Tok::Ident(name) => {
                self.pos += 1;
                let base = self.resolve(&name, spanned.line, spanned.col)?;
                if self.eat(&Tok::Caret) {
                    let exp_span = self.here();
                    match self.peek().map(|s| s.tok.clone()) {
                        Some(Tok::Int(k)) => {
                            self.pos += 1;
                            let k: u32 = k.try_into().map_err(|_| {
                                ParseError::new(exp_span.0, exp_span.1, "exponent too large")
                            })?;
                            if k > 1 {
                                if let Some(a) = formal_index(&name, self.signature) {
                                    if self.signature.degrees()[a - 1].is_odd() {
                                        return Err(ParseError::new(
                                            spanned.line,
                                            spanned.col,
                                            format!("odd variable {name} cannot carry exponent {k}"),
                                        ));
                                    }
                                }
                            }
                            Ok(power(&base, k))
                        }
                        _ => Err(self.error("expected an integer exponent after `^`")),
                    }
                } else {
                    Ok(base)
                }
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.series()?;
                if self.eat(&Tok::RParen) {
                    Ok(inner)
                } else {
                    Err(self.error("expected `)`"))
                }
            }
            other => Err(ParseError::new(
                spanned.line,
                spanned.col,
                format!("expected a factor, found `{other:?}`"),
            )),
        }
    }

    fn resolve(&self, name: &str, line: usize, col: usize) -> Result<Series, ParseError> {
        if let Some(i) = var_index(name, 'x') {
            let p = self.signature.base_vars();
            if i >= 1 && i <= p {
                return Ok(Series::base_variable(self.signature, i)
                    .expect("index checked against the signature"));
            }
            if !self.env.contains_key(name) {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("unknown variable {name} (session has {p} base variables)"),
                ));
            }
        }
        if let Some(a) = var_index(name, 't') {
            let q = self.signature.formal_vars();
            if a >= 1 && a <= q {
                return Ok(Series::formal_variable(self.signature, a)
                    .expect("index checked against the signature"));
            }
            if !self.env.contains_key(name) {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("unknown variable {name} (session has {q} formal variables)"),
                ));
            }
        }
        match self.env.get(name) {
            Some(series) => Ok(series.clone()),
            None => Err(ParseError::new(
                line,
                col,
                format!("unknown variable {name}"),
            )),
        }
    }
}

fn var_index(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn formal_index(name: &str, sig: &FormalSignature) -> Option<usize> {
    let a = var_index(name, 't')?;
    (a >= 1 && a <= sig.formal_vars()).then_some(a)
}

/// Binary exponentiation with early exit on zero.
fn power(base: &Series, k: u32) -> Series {
    let mut acc = Series::one(base.signature());
    let mut b = base.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&b).expect("powers share one signature");
        }
        k >>= 1;
        if k > 0 {
            if b.is_zero() || acc.is_zero() {
                return Series::zero(base.signature());
            }
            b = b.mul(&b).expect("powers share one signature");
        }
    }
    acc
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    (line, col)
}

/// Parses an expression into a normalized series over the signature,
/// resolving free identifiers against `env`.
pub fn parse_series_with_env(
    signature: &FormalSignature,
    env: &BTreeMap<String, Series>,
    text: &str,
) -> Result<Series, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        signature,
        env,
        end: end_position(text),
    };
    let series = p.series()?;
    if let Some(s) = p.peek() {
        return Err(ParseError::new(
            s.line,
            s.col,
            format!("unexpected trailing input `{:?}`", s.tok),
        ));
    }
    Ok(series)
}

/// Parses an expression with no named environment.
pub fn parse_series(signature: &FormalSignature, text: &str) -> Result<Series, ParseError> {
    parse_series_with_env(signature, &BTreeMap::new(), text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::DegreeVector;
    use crate::jet::Jet;
    use crate::series::Monomial;
    use crate::{frac, rat};

    fn dv(bits: &[u8]) -> DegreeVector {
        DegreeVector::new(bits.iter().copied())
    }

    fn block_sig(order: usize) -> FormalSignature {
        FormalSignature::new(2, 1, vec![dv(&[0, 1]), dv(&[1, 0]), dv(&[1, 1])], order).unwrap()
    }

    #[test]
    fn parses_the_reference_expression() {
        let sig = block_sig(4);
        let s = parse_series(&sig, "(1 + 2*x1) * t1 + 3 * t3^2").unwrap();
        assert_eq!(s.num_terms(), 2);
        let jet = s.coefficient(&Monomial::variable(3, 1).unwrap());
        assert_eq!(
            jet,
            Jet::from_terms(1, 4, [(vec![0], rat(1)), (vec![1], rat(2))]).unwrap()
        );
        // round trip through the canonical printer
        assert_eq!(parse_series(&sig, &s.to_string()).unwrap(), s);
    }

    #[test]
    fn odd_square_in_a_product_normalizes_to_zero() {
        let sig = block_sig(4);
        assert!(parse_series(&sig, "t1*t1").unwrap().is_zero());
        // but a literal exponent on an odd variable is a syntax error
        let err = parse_series(&sig, "t1^2").unwrap_err();
        assert!(err.message.contains("odd variable"));
        assert_eq!((err.line, err.col), (1, 1));
        // even formal variables take powers
        assert!(!parse_series(&sig, "t3^3").unwrap().is_zero());
    }

    #[test]
    fn sign_resolution_during_parsing() {
        let sig = block_sig(4);
        // <(0,1),(1,0)> = 0: xi and eta commute despite both being odd
        let resolved = parse_series(&sig, "t2*t1").unwrap();
        assert_eq!(resolved, parse_series(&sig, "t1*t2").unwrap());
        // <(0,1),(1,1)> = 1: xi and theta anticommute
        let resolved = parse_series(&sig, "t3*t1").unwrap();
        assert_eq!(resolved, parse_series(&sig, "-t1*t3").unwrap());
    }

    #[test]
    fn rationals_and_negation() {
        let sig = block_sig(3);
        assert_eq!(
            parse_series(&sig, "2/3"),
            Ok(Series::constant(&sig, frac(2, 3)))
        );
        assert_eq!(
            parse_series(&sig, "-1/2 * t1 + 1/2*t1"),
            Ok(Series::zero(&sig))
        );
        let err = parse_series(&sig, "1/0").unwrap_err();
        assert!(err.message.contains("zero denominator"));
    }

    #[test]
    fn error_positions() {
        let sig = block_sig(3);
        let err = parse_series(&sig, "t1 + ").unwrap_err();
        assert_eq!((err.line, err.col), (1, 6));
        let err = parse_series(&sig, "t9").unwrap_err();
        assert!(err.message.contains("unknown variable t9"));
        let err = parse_series(&sig, "x1 x2").unwrap_err();
        assert!(err.message.contains("trailing"));
        let err = parse_series(&sig, "1 + $").unwrap_err();
        assert!(err.message.contains("unexpected character"));
        let err = parse_series(&sig, "(1 + t1").unwrap_err();
        assert!(err.message.contains("expected `)`"));
    }

    #[test]
    fn environment_lookup() {
        let sig = block_sig(3);
        let mut env = BTreeMap::new();
        env.insert("f".to_string(), parse_series(&sig, "1 + t1*t2").unwrap());
        let s = parse_series_with_env(&sig, &env, "f * f").unwrap();
        let expected = parse_series(&sig, "1 + 2*t1*t2").unwrap();
        assert_eq!(s, expected);
        assert!(parse_series(&sig, "f").is_err());
    }

    #[test]
    fn power_of_named_series_uses_square_and_multiply() {
        let sig = block_sig(4);
        let mut env = BTreeMap::new();
        env.insert("g".to_string(), parse_series(&sig, "1 + x1").unwrap());
        let s = parse_series_with_env(&sig, &env, "g^3").unwrap();
        assert_eq!(s, parse_series(&sig, "1 + 3*x1 + 3*x1^2 + x1^3").unwrap());
        // large exponents on nilpotents collapse quickly
        let z = parse_series(&sig, "x1^250").unwrap();
        assert!(z.is_zero());
    }
}
