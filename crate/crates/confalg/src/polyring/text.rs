//! Text syntax for polynomials.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := ('-')* atom ('^' natural)?
//! atom    := rational | identifier | '(' expr ')'
//! rational:= integer ('/' positive-integer)?
//! ```
//!
//! There is no implicit multiplication (`2 lm` is an error; write `2*lm`) and
//! `/` is only division of integer literals, so every well-formed string
//! denotes a polynomial with rational coefficients.  Identifiers must be
//! registered variables.

use super::{Poly, Rat, VarRegistry};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::str::FromStr;
use std::sync::Arc;

/// Parse a polynomial in the registry's variables.
pub fn parse_poly(reg: &Arc<VarRegistry>, input: &str) -> Result<Poly> {
    let tokens = tokenize(input)?;
    let mut parser = Parser { reg, tokens, pos: 0 };
    let poly = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!(
            "unexpected `{}` after a complete expression",
            parser.tokens[parser.pos]
        )));
    }
    Ok(poly)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Number(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Number(n) => write!(f, "{n}"),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Plus => write!(f, "+"),
            Token::Minus => write!(f, "-"),
            Token::Star => write!(f, "*"),
            Token::Slash => write!(f, "/"),
            Token::Caret => write!(f, "^"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let text = &input[start..i];
                let n = BigInt::from_str(text)
                    .map_err(|_| Error::Parse(format!("bad integer `{text}`")))?;
                tokens.push(Token::Number(n));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_ascii_alphanumeric() || c == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Ident(input[start..i].to_string()));
            }
            other => {
                return Err(Error::Parse(format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    reg: &'a Arc<VarRegistry>,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.bump() {
            Some(found) if found == t => Ok(()),
            Some(found) => Err(Error::Parse(format!("expected `{t}`, found `{found}`"))),
            None => Err(Error::Parse(format!("expected `{t}`, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let mut negate = false;
        while self.peek() == Some(&Token::Minus) {
            self.bump();
            negate = !negate;
        }
        let mut base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            let e = match self.bump() {
                Some(Token::Number(n)) => u16::try_from(n.clone())
                    .map_err(|_| Error::Parse(format!("exponent `{n}` out of range")))?,
                other => {
                    return Err(Error::Parse(format!(
                        "expected an exponent after `^`, found {}",
                        describe(other)
                    )))
                }
            };
            base = base.pow(e);
        }
        Ok(if negate { base.neg() } else { base })
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.bump() {
            Some(Token::Number(n)) => {
                // Optional `/ denominator` for a rational literal.
                if self.peek() == Some(&Token::Slash) {
                    self.bump();
                    match self.bump() {
                        Some(Token::Number(den)) => {
                            if den.is_zero() {
                                return Err(Error::Parse("division by zero".into()));
                            }
                            Ok(Poly::constant(self.reg, Rat::new(n, den)))
                        }
                        other => Err(Error::Parse(format!(
                            "`/` must be followed by an integer, found {}",
                            describe(other)
                        ))),
                    }
                } else {
                    Ok(Poly::constant(self.reg, Rat::from(n)))
                }
            }
            Some(Token::Ident(name)) => {
                let v = self.reg.lookup(&name)?;
                Ok(Poly::var(self.reg, v))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            other => Err(Error::Parse(format!(
                "expected a number, variable, or `(`, found {}",
                describe(other)
            ))),
        }
    }
}

fn describe(t: Option<Token>) -> String {
    match t {
        Some(t) => format!("`{t}`"),
        None => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rat, VarRegistry, VAR_D, VAR_LM};
    use super::*;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::new(&["a", "c"]).unwrap()
    }

    #[test]
    fn parses_rationals_and_signs() {
        let r = reg();
        assert_eq!(parse_poly(&r, "3/4").unwrap(), Poly::constant(&r, rat(3, 4)));
        assert_eq!(parse_poly(&r, "-3/4").unwrap(), Poly::constant(&r, rat(-3, 4)));
        assert_eq!(parse_poly(&r, "--5").unwrap(), Poly::constant(&r, rat(5, 1)));
        assert_eq!(parse_poly(&r, "(1/2)*lm").unwrap(), Poly::var(&r, VAR_LM).scale(&rat(1, 2)));
    }

    #[test]
    fn respects_precedence() {
        let r = reg();
        let q = parse_poly(&r, "1 + 2*d^2 - d*lm").unwrap();
        let manual = Poly::one(&r)
            .add(&Poly::var(&r, VAR_D).pow(2).scale(&rat(2, 1)))
            .sub(&Poly::var(&r, VAR_D).mul(&Poly::var(&r, VAR_LM)));
        assert_eq!(q, manual);
    }

    #[test]
    fn unary_minus_binds_tighter_than_caret_base() {
        let r = reg();
        // -d^2 parses as -(d^2), matching the printer.
        let q = parse_poly(&r, "-d^2").unwrap();
        assert_eq!(q, Poly::var(&r, VAR_D).pow(2).neg());
    }

    #[test]
    fn rejects_malformed_input() {
        let r = reg();
        for bad in [
            "2 lm",      // implicit multiplication
            "lm / 2",    // division of a variable
            "1/0",       // zero denominator
            "d^-1",      // negative exponent
            "d^(2)",     // exponent must be a bare natural
            "unknown_x", // unregistered identifier
            "1 +",       // dangling operator
            "(lm",       // unbalanced paren
            "lm )",      // trailing garbage
            "",          // empty input
        ] {
            assert!(parse_poly(&r, bad).is_err(), "expected parse failure for `{bad}`");
        }
    }

    #[test]
    fn accepts_registered_parameters_only() {
        let r = reg();
        assert!(parse_poly(&r, "a*c").is_ok());
        let err = parse_poly(&r, "b*lm").unwrap_err();
        assert!(matches!(err, Error::UnknownVariable(ref n) if n == "b"));
    }
}
