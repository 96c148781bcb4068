//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | 'x' | 'y' | '(' expr ')'
//! ```

use crate::error::{Error, ParseError, ParseErrorKind, Result};
use crate::scalar::Scalar;

use super::Polynomial;

const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    X,
    Y,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn starts_atom(&self) -> bool {
        matches!(self, Tok::Int(_) | Tok::X | Tok::Y | Tok::LParen)
    }
}

fn err(pos: usize, kind: ParseErrorKind) -> Error {
    Error::Parse(ParseError { pos, kind })
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    digits.push(d);
                    chars.next();
                }
                out.push((pos, Tok::Int(digits)));
                continue;
            }
            'x' => Tok::X,
            'y' => Tok::Y,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '/' => return Err(err(pos, ParseErrorKind::NonPolynomial("division"))),
            other => return Err(err(pos, ParseErrorKind::UnexpectedChar(other))),
        };
        chars.next();
        out.push((pos, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expr<T: Scalar>(&mut self) -> Result<Polynomial<T>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.try_add(&self.term()?)?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.try_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<T: Scalar>(&mut self) -> Result<Polynomial<T>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc.try_mul(&self.unary()?)?;
                }
                t if t.starts_atom() => {
                    return Err(err(self.pos(), ParseErrorKind::ImplicitMultiplication))
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary<T: Scalar>(&mut self) -> Result<Polynomial<T>> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                self.unary::<T>()?.try_neg()
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power<T: Scalar>(&mut self) -> Result<Polynomial<T>> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Int(digits) => {
                let e = digits
                    .parse::<u32>()
                    .ok()
                    .filter(|e| *e <= MAX_EXPONENT)
                    .ok_or_else(|| err(pos, ParseErrorKind::ExponentOverflow(digits)))?;
                base.try_pow(e)
            }
            Tok::X | Tok::Y => Err(err(
                pos,
                ParseErrorKind::NonPolynomial("variable in exponent"),
            )),
            Tok::Minus => Err(err(pos, ParseErrorKind::NonPolynomial("negative exponent"))),
            Tok::LParen => Err(err(
                pos,
                ParseErrorKind::NonPolynomial("exponent must be an integer literal"),
            )),
            Tok::End => Err(err(pos, ParseErrorKind::UnexpectedEnd)),
            _ => Err(err(pos, ParseErrorKind::Expected("integer exponent"))),
        }
    }

    fn atom<T: Scalar>(&mut self) -> Result<Polynomial<T>> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(digits) => {
                let c = T::from_str_radix(&digits, 10)
                    .map_err(|_| err(pos, ParseErrorKind::LiteralOverflow))?;
                Ok(Polynomial::constant(c))
            }
            Tok::X => Ok(Polynomial::x()),
            Tok::Y => Ok(Polynomial::y()),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.pos();
                match self.bump() {
                    Tok::RParen => Ok(inner),
                    Tok::End => Err(err(close, ParseErrorKind::UnexpectedEnd)),
                    _ => Err(err(close, ParseErrorKind::Expected("`)`"))),
                }
            }
            Tok::End => Err(err(pos, ParseErrorKind::UnexpectedEnd)),
            _ => Err(err(
                pos,
                ParseErrorKind::Expected("integer, `x`, `y` or `(`"),
            )),
        }
    }
}

/// Parses and expands a polynomial expression into canonical form.
pub fn parse<T: Scalar>(text: &str) -> Result<Polynomial<T>> {
    let mut parser = Parser {
        toks: tokenize(text)?,
        at: 0,
    };
    let poly = parser.expr()?;
    match parser.peek() {
        Tok::End => Ok(poly),
        Tok::RParen => Err(err(parser.pos(), ParseErrorKind::UnexpectedChar(')'))),
        _ => Err(err(
            parser.pos(),
            ParseErrorKind::Expected("operator or end of input"),
        )),
    }
}
