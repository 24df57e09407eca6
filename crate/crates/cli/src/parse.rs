//! Recursive-descent parser for rational expressions on a chart.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | name | '(' expr ')'
//! ```
//!
//! Juxtaposition is an error: `2x` or `x y` could mean a product or a
//! multi-character name, and the chart has both.

use cartan::expr::{Chart, Expression};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};
use thiserror::Error;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 1000;

/// A parse failure; `pos` is the 1-based character column.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("column {pos}: unknown name `{name}`")]
    UnknownName { pos: usize, name: String },
    #[error("column {pos}: division by zero")]
    DivisionByZero { pos: usize },
}

impl ParseError {
    pub fn pos(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::UnknownName { pos, .. } | ParseError::DivisionByZero { pos } => {
                *pos
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Name(String),
    Op(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Name(n) => format!("name `{n}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self, Tok::Num(_) | Tok::Name(_) | Tok::Op('('))
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int: String = chars[start..i].iter().collect();
            let mut value = BigRational::from_integer(int.parse().unwrap_or_default());
            if chars.get(i) == Some(&'.') {
                i += 1;
                let f0 = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if f0 < i {
                    let frac: String = chars[f0..i].iter().collect();
                    let scale = BigInt::from(10).pow((i - f0) as u32);
                    value += BigRational::new(frac.parse().expect("digits"), scale);
                }
            }
            out.push((pos, Tok::Num(value)));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((pos, Tok::Name(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(syntax(pos, format!("unexpected character `{c}`")));
        }
    }
    out.push((chars.len() + 1, Tok::End));
    Ok(out)
}

struct Parser<'a> {
    chart: &'a Chart,
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut acc = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            acc = if c == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match *self.peek() {
                Tok::Op(c @ ('*' | '/')) => {
                    self.bump();
                    let pos = self.pos();
                    let rhs = self.unary()?;
                    acc = if c == '*' {
                        acc * rhs
                    } else {
                        acc.checked_div(&rhs).map_err(|_| ParseError::DivisionByZero { pos })?
                    };
                }
                ref t if t.starts_atom() => {
                    return Err(syntax(self.pos(), "implicit multiplication; write `*` explicitly"));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
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

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let (pos, tok) = self.bump();
        let e = match tok {
            Tok::Num(n) if n.is_integer() => n.to_integer().to_u32().filter(|&e| e <= MAX_EXPONENT),
            _ => None,
        };
        let e = e.ok_or_else(|| syntax(pos, format!("exponent must be an integer in 0..={MAX_EXPONENT}")))?;
        // `0^0 = 1`, as in the library's own power.
        Ok(if e == 0 { Expression::one() } else { base.pow(e) })
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        let (pos, tok) = self.bump();
        match tok {
            Tok::Num(n) => Ok(Expression::rational(n)),
            Tok::Name(name) => match self.chart.resolve(&name) {
                Ok(v) => Ok(Expression::var(v)),
                Err(_) => Err(ParseError::UnknownName { pos, name }),
            },
            Tok::Op('(') => {
                let inner = self.expr()?;
                match self.bump() {
                    (_, Tok::Op(')')) => Ok(inner),
                    (p, t) => Err(syntax(p, format!("expected `)`, found {}", t.describe()))),
                }
            }
            t => Err(syntax(pos, format!("expected a number, name or `(`, found {}", t.describe()))),
        }
    }
}

/// Parses `text` into a canonical expression on `chart`.
pub fn parse_expression(text: &str, chart: &Chart) -> Result<Expression, ParseError> {
    let mut p = Parser {
        chart,
        toks: tokenize(text)?,
        at: 0,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::Op(')') => Err(syntax(p.pos(), "unmatched `)`")),
        t => Err(syntax(p.pos(), format!("unexpected {}", t.describe()))),
    }
}
