//! Recursive-descent parser for the plain-text expression grammar.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | "+" unary | power ;
//! power   = atom [ "^" unary ] ;
//! atom    = number | ident | ident "(" expr { "," expr } ")" | "(" expr ")" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ident   = letter { letter | digit | "_" } ;
//! ```
//!
//! Exponents must reduce to rational constants.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Pow, Zero};
use thiserror::Error;

use super::{Expr, Func, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function `{name}` at position {pos}")]
    UnknownFunction { pos: usize, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            let start = lx.pos;
            let Some(&c) = lx.src.get(lx.pos) else {
                out.push((start, Tok::End));
                return Ok(out);
            };
            let tok = if c.is_ascii_digit() || c == b'.' {
                lx.number()?
            } else if c.is_ascii_alphabetic() || c == b'_' {
                while lx.src.get(lx.pos).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
                    lx.pos += 1;
                }
                Tok::Ident(String::from_utf8_lossy(&lx.src[start..lx.pos]).into_owned())
            } else if b"+-*/^(),".contains(&c) {
                lx.pos += 1;
                Tok::Op(c as char)
            } else {
                return Err(ParseError::Syntax { pos: start, msg: format!("unexpected character `{}`", c as char) });
            };
            out.push((start, tok));
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> String {
        let s = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[s..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let int = self.digits();
        let mut frac = String::new();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if int.is_empty() && frac.is_empty() {
            return Err(ParseError::Syntax { pos: start, msg: "malformed number".into() });
        }
        let mut exp10: i64 = 0;
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            let sign = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                _ => 1,
            };
            let d = self.digits();
            if d.is_empty() {
                // an identifier such as `e` directly after a number is not an exponent
                self.pos = save;
            } else {
                exp10 = sign * d.parse::<i64>().map_err(|_| ParseError::Syntax { pos: start, msg: "exponent overflow".into() })?;
            }
        }
        let mantissa: BigInt = format!("{int}{frac}").parse().unwrap_or_else(|_| BigInt::zero());
        let scale = exp10 - frac.len() as i64;
        let ten = Ratio::from_integer(BigInt::from(10));
        let factor: Rational = Pow::pow(&ten, scale as i32);
        Ok(Tok::Num(Ratio::from_integer(mantissa) * factor))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].1
    }

    fn pos(&self) -> usize {
        self.toks[self.i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].1.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError::Syntax { pos: self.pos(), msg }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    terms.push(-self.term()?);
                }
                _ => return Ok(Expr::add(terms)),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = acc * self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    acc = acc / self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let pos = self.pos();
            let ex = self.unary()?;
            let Some(r) = ex.as_num() else {
                return Err(ParseError::Syntax { pos, msg: "exponent must be a rational constant".into() });
            };
            return Ok(Expr::pow(&base, r.clone()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(r) => Ok(Expr::num(r)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() != Tok::Op('(') {
                    return Ok(Expr::sym(&name));
                }
                self.bump();
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Op(',') {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                call(&name, args, pos)
            }
            Tok::End => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Op(c) => Err(ParseError::Syntax { pos, msg: format!("unexpected `{c}`") }),
        }
    }
}

fn call(name: &str, mut args: Vec<Expr>, pos: usize) -> Result<Expr, ParseError> {
    let unary = |f: Func, args: &mut Vec<Expr>| -> Result<Expr, ParseError> {
        if args.len() != 1 {
            return Err(ParseError::Syntax { pos, msg: format!("`{name}` takes one argument") });
        }
        Ok(Expr::func(f, &args[0]))
    };
    match name {
        "sin" => unary(Func::Sin, &mut args),
        "cos" => unary(Func::Cos, &mut args),
        "exp" => unary(Func::Exp, &mut args),
        "ln" | "log" => unary(Func::Ln, &mut args),
        "arctan" | "atan" => unary(Func::Atan, &mut args),
        "sqrt" => {
            if args.len() != 1 {
                return Err(ParseError::Syntax { pos, msg: "`sqrt` takes one argument".into() });
            }
            Ok(args[0].sqrt())
        }
        "arctan2" | "atan2" => {
            if args.len() != 2 {
                return Err(ParseError::Syntax { pos, msg: format!("`{name}` takes two arguments") });
            }
            let den = args.pop().unwrap();
            let num = args.pop().unwrap();
            Ok(Expr::atan2(&num, &den))
        }
        _ => Err(ParseError::UnknownFunction { pos, name: name.to_string() }),
    }
}

/// Parses text into a canonical expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("trailing input".into()));
    }
    Ok(e)
}
