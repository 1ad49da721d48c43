//! Integrand expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' factor)?
//! atom   := number | 't' | '(' expr ')'
//! number := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```
//!
//! `^` is right-associative and unary minus covers the whole factor, so
//! `-t^2` is `-(t^2)`. The only variable is `t`; there are no function calls.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Variable,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct EvalError(pub String);

/// Fully parenthesized canonical form; parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Variable => write!(f, "t"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Number(f64),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b't' => Token::Var,
            b'0'..=b'9' | b'.' => {
                let digits = |mut j: usize| {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    j
                };
                let mut j = digits(i);
                let int_len = j - i;
                let mut frac_len = 0;
                if j < bytes.len() && bytes[j] == b'.' {
                    let k = digits(j + 1);
                    frac_len = k - j - 1;
                    j = k;
                }
                if int_len == 0 && frac_len == 0 {
                    return err(start, "malformed number");
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    let end = digits(k);
                    if end == k {
                        return err(j, "exponent needs digits");
                    }
                    j = end;
                }
                let lexeme = &text[i..j];
                let v: f64 = lexeme
                    .parse()
                    .map_err(|_| ParseError { position: start, message: format!("invalid number '{lexeme}'") })?;
                if !v.is_finite() {
                    return err(start, format!("number '{lexeme}' is out of range"));
                }
                out.push((Token::Number(v), start));
                i = j;
                continue;
            }
            _ if !c.is_ascii() => return err(start, "non-ASCII input"),
            _ => return err(start, format!("unexpected character '{}'", c as char)),
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Token::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Token {
        self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.peek();
        if t != Token::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Token::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Token::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.peek() == Token::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Token::Number(v) => Ok(Expr::Number(v)),
            Token::Var => Ok(Expr::Variable),
            Token::LParen => {
                let inner = self.expr()?;
                if self.peek() != Token::RParen {
                    return err(self.offset(), "expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Token::End => err(at, "unexpected end of input"),
            other => err(at, format!("unexpected token {}", describe(other))),
        }
    }
}

fn describe(t: Token) -> &'static str {
    match t {
        Token::Number(_) => "number",
        Token::Var => "'t'",
        Token::Plus => "'+'",
        Token::Minus => "'-'",
        Token::Star => "'*'",
        Token::Slash => "'/'",
        Token::Caret => "'^'",
        Token::LParen => "'('",
        Token::RParen => "')'",
        Token::End => "end of input",
    }
}

/// Parses an integrand expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    if parser.peek() == Token::End {
        return err(0, "empty expression");
    }
    let e = parser.expr()?;
    if parser.peek() != Token::End {
        let t = parser.peek();
        return err(parser.offset(), format!("unexpected token {}", describe(t)));
    }
    Ok(e)
}

/// Evaluates `e` at `t`. Division by zero and NaN results are errors.
pub fn evaluate(e: &Expr, t: f64) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Number(v) => *v,
        Expr::Variable => t,
        Expr::Neg(a) => -evaluate(a, t)?,
        Expr::Add(a, b) => evaluate(a, t)? + evaluate(b, t)?,
        Expr::Sub(a, b) => evaluate(a, t)? - evaluate(b, t)?,
        Expr::Mul(a, b) => evaluate(a, t)? * evaluate(b, t)?,
        Expr::Div(a, b) => {
            let d = evaluate(b, t)?;
            if d == 0.0 {
                return Err(EvalError(format!("division by zero in {e}")));
            }
            evaluate(a, t)? / d
        }
        Expr::Pow(a, b) => {
            let base = evaluate(a, t)?;
            let exponent = evaluate(b, t)?;
            if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
                if base == 0.0 && exponent < 0.0 {
                    return Err(EvalError(format!("zero raised to a negative power in {e}")));
                }
                base.powi(exponent as i32)
            } else if base > 0.0 {
                (exponent * base.ln()).exp()
            } else if base == 0.0 && exponent > 0.0 {
                0.0
            } else {
                return Err(EvalError(format!(
                    "non-positive base {base} raised to non-integer power {exponent}"
                )));
            }
        }
    };
    if v.is_nan() {
        return Err(EvalError(format!("NaN while evaluating {e}")));
    }
    Ok(v)
}
