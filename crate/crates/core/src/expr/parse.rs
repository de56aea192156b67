//! Text grammar for holomorphic expressions.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = ("-" | "+") unary | power ;
//! power    = primary [ "^" exponent ] ;
//! exponent = integer | "(" [ "-" | "+" ] integer ")" | ("-" | "+") integer ;
//! primary  = number | "z" | "i" | "pi" | param
//!          | func "(" expr ")" | "(" expr ")" ;
//! func     = "exp" | "ln" | "sin" | "cos" | "sinh" | "cosh" | "sqrt" ;
//! number   = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! param    = letter { letter | digit | "_" } ;   (* must be declared *)
//! ```
//!
//! Power binds tighter than unary minus, so `-z^2` is `-(z^2)`.

use std::collections::BTreeSet;

use thiserror::Error;

use super::ast::{Expr, Func};
use crate::Complex;

/// Identifiers with a fixed meaning; they cannot be used as parameter names.
pub const RESERVED: [&str; 3] = ["z", "i", "pi"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("invalid parameter name `{0}`")]
    InvalidParameterName(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Integer(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, start));
            pos += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut is_integer = true;
            while pos < bytes.len() && (bytes[pos] as char).is_ascii_digit() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'.' {
                is_integer = false;
                pos += 1;
                while pos < bytes.len() && (bytes[pos] as char).is_ascii_digit() {
                    pos += 1;
                }
            }
            if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                let mut look = pos + 1;
                if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                    look += 1;
                }
                if look < bytes.len() && (bytes[look] as char).is_ascii_digit() {
                    is_integer = false;
                    pos = look;
                    while pos < bytes.len() && (bytes[pos] as char).is_ascii_digit() {
                        pos += 1;
                    }
                }
            }
            let text = &src[start..pos];
            let token = if is_integer {
                text.parse::<i64>().map(Token::Integer).ok()
            } else {
                None
            };
            let token = match token {
                Some(t) => t,
                None => Token::Number(text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    pos: start,
                    message: format!("malformed number `{text}`"),
                })?),
            };
            out.push((token, start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while pos < bytes.len() && ((bytes[pos] as char).is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push((Token::Ident(src[start..pos].to_string()), start));
            continue;
        }
        return Err(ParseError::Syntax {
            pos: start,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    index: usize,
    end: usize,
    allowed: &'a BTreeSet<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.index).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.index).map(|(t, _)| t.clone());
        self.index += 1;
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.index += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.index += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.index += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.index += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.index += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.index += 1;
                Ok(match self.unary()? {
                    Expr::Const(c) => Expr::Const(-c),
                    e => Expr::Neg(Box::new(e)),
                })
            }
            Some(Token::Plus) => {
                self.index += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.index += 1;
        let parenthesized = self.peek() == Some(&Token::LParen);
        if parenthesized {
            self.index += 1;
        }
        let sign = match self.peek() {
            Some(Token::Minus) => {
                self.index += 1;
                -1
            }
            Some(Token::Plus) => {
                self.index += 1;
                1
            }
            _ => 1,
        };
        let n = match self.bump() {
            Some(Token::Integer(n)) => n,
            _ => {
                self.index -= 1;
                return self.error("exponent must be an integer literal; write exp(a*ln(w)) for general powers");
            }
        };
        if parenthesized {
            self.expect(Token::RParen, "`)` after exponent")?;
        }
        let n = i32::try_from(sign * n).or_else(|_| self.error("exponent out of range"))?;
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Token::Number(v)) => Ok(Expr::constant(v)),
            Some(Token::Integer(n)) => Ok(Expr::constant(n as f64)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Token::LParen, &format!("`(` after `{name}`"))?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match name.as_str() {
                    "z" => Ok(Expr::Z),
                    "i" => Ok(Expr::Const(Complex::i())),
                    "pi" => Ok(Expr::constant(std::f64::consts::PI)),
                    _ if self.allowed.contains(&name) => Ok(Expr::Param(name)),
                    _ => Err(ParseError::UnknownIdentifier { name, pos }),
                }
            }
            Some(_) => {
                self.index -= 1;
                self.error("expected a number, identifier, or `(`")
            }
            None => self.error("unexpected end of input"),
        }
    }
}

/// Checks that `name` can be used as a parameter.
pub fn validate_param_name(name: &str) -> Result<(), ParseError> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&name)
        && Func::from_name(name).is_none();
    if ok {
        Ok(())
    } else {
        Err(ParseError::InvalidParameterName(name.to_string()))
    }
}

/// Parses `src`; identifiers other than `z`, `i`, `pi` and function names must
/// appear in `allowed_params`.
pub fn parse_expr<S: AsRef<str>>(src: &str, allowed_params: &[S]) -> Result<Expr, ParseError> {
    let mut allowed = BTreeSet::new();
    for name in allowed_params {
        validate_param_name(name.as_ref())?;
        allowed.insert(name.as_ref().to_string());
    }
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser {
        tokens,
        index: 0,
        end: src.len(),
        allowed: &allowed,
    };
    let expr = parser.expr()?;
    if parser.index < parser.tokens.len() {
        return parser.error("unexpected trailing input");
    }
    Ok(expr)
}
