//! Expression language for component functions.
//!
//! Coordinates are `xp`, `xm` (the two even light-cone variables; in
//! classical mode they read as z, zbar), odd symbols are `thp`, `thm` and
//! `xi1..xiK`, `i` is the imaginary unit, and any other identifier is a
//! named parameter bound at evaluation time. Operators `+ - * / ^` have
//! standard precedence (`^` above unary minus above `*`/`/` above `+`/`-`),
//! all left-associative except `^`; calls are `exp(e)` and `pow(e, r)`.
//! The `^`/`pow` exponent must evaluate to a real constant.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    ImaginaryUnit,
    Param(String),
    CoordPlus,
    CoordMinus,
    ThetaPlus,
    ThetaMinus,
    Xi(u8),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    /// `pow(base, exponent)`; the exponent expression must be real-valued.
    PowCall(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col,
            message: message.to_string(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied();
        if let Some(c) = c {
            self.pos += 1;
            if c == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<(Token, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let c = match self.peek() {
                None => break,
                Some(c) => c,
            };
            let tok = match c {
                b'+' => {
                    self.bump();
                    Token::Plus
                }
                b'-' => {
                    self.bump();
                    Token::Minus
                }
                b'*' => {
                    self.bump();
                    Token::Star
                }
                b'/' => {
                    self.bump();
                    Token::Slash
                }
                b'^' => {
                    self.bump();
                    Token::Caret
                }
                b'(' => {
                    self.bump();
                    Token::LParen
                }
                b')' => {
                    self.bump();
                    Token::RParen
                }
                b',' => {
                    self.bump();
                    Token::Comma
                }
                b'0'..=b'9' | b'.' => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
                        self.bump();
                    }
                    // exponent suffix like 1e-3
                    if matches!(self.peek(), Some(b'e') | Some(b'E')) {
                        let save = self.pos;
                        self.bump();
                        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                            self.bump();
                        }
                        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                                self.bump();
                            }
                        } else {
                            self.pos = save;
                        }
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let value: f64 = text
                        .parse()
                        .map_err(|_| self.error(&format!("bad number literal {text}")))?;
                    Token::Number(value)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_')
                    {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    Token::Ident(text.to_string())
                }
                other => {
                    return Err(self.error(&format!("unexpected character {:?}", other as char)))
                }
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn error(&self, message: &str) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            message: message.to_string(),
        }
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.bump();
            let inner = self.parse_unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            // exponent binds tighter than unary minus, but allow a leading
            // sign on the exponent literal
            let neg = if self.peek() == Some(&Token::Minus) {
                self.bump();
                true
            } else {
                false
            };
            let exp = self.parse_atom()?;
            let exp = if neg { Expr::Neg(Box::new(exp)) } else { exp };
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some(Token::Number(v)) => Ok(Expr::Number(v)),
            Some(Token::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Token::RParen, "closing parenthesis")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                if self.peek() == Some(&Token::LParen) {
                    self.bump();
                    match name.as_str() {
                        "exp" => {
                            let arg = self.parse_expr()?;
                            self.expect(Token::RParen, "closing parenthesis")?;
                            Ok(Expr::Exp(Box::new(arg)))
                        }
                        "pow" => {
                            let base = self.parse_expr()?;
                            self.expect(Token::Comma, "comma between pow arguments")?;
                            let exponent = self.parse_expr()?;
                            self.expect(Token::RParen, "closing parenthesis")?;
                            Ok(Expr::PowCall(Box::new(base), Box::new(exponent)))
                        }
                        other => Err(self.error(&format!("unknown function {other}"))),
                    }
                } else {
                    Ok(classify_ident(&name))
                }
            }
            Some(_) => Err(self.error("unexpected token")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn classify_ident(name: &str) -> Expr {
    match name {
        "i" => Expr::ImaginaryUnit,
        "xp" => Expr::CoordPlus,
        "xm" => Expr::CoordMinus,
        "thp" => Expr::ThetaPlus,
        "thm" => Expr::ThetaMinus,
        _ => {
            if let Some(rest) = name.strip_prefix("xi") {
                if let Ok(n) = rest.parse::<u8>() {
                    if n >= 1 {
                        return Expr::Xi(n);
                    }
                }
            }
            Expr::Param(name.to_string())
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let lexer = Lexer::new(src);
    let end_line = src.lines().count().max(1);
    let end_col = src.lines().last().map(|l| l.len() + 1).unwrap_or(1);
    let tokens = lexer.tokens()?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_line,
        end_col,
    };
    let expr = parser.parse_expr()?;
    if parser.peek().is_some() {
        return Err(parser.error("trailing input"));
    }
    Ok(expr)
}

/// Canonical rendering; `parse(print(e))` reproduces `e`.
pub fn print(expr: &Expr) -> String {
    fn prec(e: &Expr) -> u8 {
        match e {
            Expr::Bin(BinOp::Add | BinOp::Sub, _, _) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, _, _) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, _, _) => 4,
            _ => 5,
        }
    }
    fn go(e: &Expr, parent: u8, right_of_same: bool) -> String {
        let p = prec(e);
        let body = match e {
            Expr::Number(v) => {
                if *v == v.trunc() && v.abs() < 1e15 {
                    format!("{}", *v as i64)
                } else {
                    format!("{v}")
                }
            }
            Expr::ImaginaryUnit => "i".to_string(),
            Expr::Param(name) => name.clone(),
            Expr::CoordPlus => "xp".to_string(),
            Expr::CoordMinus => "xm".to_string(),
            Expr::ThetaPlus => "thp".to_string(),
            Expr::ThetaMinus => "thm".to_string(),
            Expr::Xi(n) => format!("xi{n}"),
            Expr::Neg(inner) => format!("-{}", go(inner, 3, false)),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                format!("{} {} {}", go(a, p, false), sym, go(b, p, true))
            }
            Expr::Exp(a) => format!("exp({})", go(a, 0, false)),
            Expr::PowCall(a, b) => format!("pow({}, {})", go(a, 0, false), go(b, 0, false)),
        };
        // parenthesize when weaker than the parent, or equally strong on
        // the right of a left-associative operator
        if p < parent || (p == parent && right_of_same && p != 4 && p != 5) {
            format!("({body})")
        } else {
            body
        }
    }
    go(expr, 0, false)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print(self))
    }
}
