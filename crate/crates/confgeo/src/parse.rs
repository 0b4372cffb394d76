//! Recursive-descent parser and printer for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' factor)?
//! base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! Builtin functions: `abs sign sin cos tan cot ln exp`. The identifier
//! `alpha` is reserved for the deformation parameter; every other
//! identifier must be a chart coordinate or a caller-supplied binding.
//!
//! Printing then re-parsing yields a structurally identical tree; the
//! parser folds constant subexpressions exactly the way the smart
//! constructors do, so `3/4` and `-2` land on rational constants.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::chart::Chart;
use crate::expr::{Expr, Num};

#[derive(Debug, Clone, Error, PartialEq)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Num),
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
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let (line, col) = (self.line, self.col);
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'+' => {
                    self.bump();
                    out.push((Tok::Plus, line, col));
                }
                b'-' => {
                    self.bump();
                    out.push((Tok::Minus, line, col));
                }
                b'*' => {
                    self.bump();
                    out.push((Tok::Star, line, col));
                }
                b'/' => {
                    self.bump();
                    out.push((Tok::Slash, line, col));
                }
                b'^' => {
                    self.bump();
                    out.push((Tok::Caret, line, col));
                }
                b'(' => {
                    self.bump();
                    out.push((Tok::LParen, line, col));
                }
                b')' => {
                    self.bump();
                    out.push((Tok::RParen, line, col));
                }
                b'0'..=b'9' | b'.' => {
                    let start = self.pos;
                    let mut is_float = false;
                    while self.pos < self.src.len() {
                        match self.src[self.pos] {
                            b'0'..=b'9' => {
                                self.bump();
                            }
                            b'.' => {
                                is_float = true;
                                self.bump();
                            }
                            b'e' | b'E' => {
                                // scientific notation, optionally signed
                                let save = (self.pos, self.line, self.col);
                                self.bump();
                                if self.pos < self.src.len()
                                    && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                                {
                                    self.bump();
                                }
                                if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                                    is_float = true;
                                    while self.pos < self.src.len()
                                        && self.src[self.pos].is_ascii_digit()
                                    {
                                        self.bump();
                                    }
                                } else {
                                    (self.pos, self.line, self.col) = save;
                                    break;
                                }
                            }
                            _ => break,
                        }
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let num = if is_float {
                        Num::Real(
                            text.parse::<f64>()
                                .map_err(|e| self.error(format!("bad number `{text}`: {e}")))?,
                        )
                    } else {
                        Num::int(
                            text.parse::<i64>()
                                .map_err(|e| self.error(format!("bad integer `{text}`: {e}")))?,
                        )
                    };
                    out.push((Tok::Num(num), line, col));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let start = self.pos;
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                    {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    out.push((Tok::Ident(text.to_string()), line, col));
                }
                other => {
                    return Err(self.error(format!("unexpected character `{}`", other as char)));
                }
            }
        }
        Ok(out)
    }
}

const FUNCTIONS: [&str; 8] = ["abs", "sign", "sin", "cos", "tan", "cot", "ln", "exp"];

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    chart: &'a Chart,
    bindings: &'a BTreeMap<String, Expr>,
}

impl<'a> Parser<'a> {
    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .or_else(|| self.toks.last().map(|(_, l, c)| (*l, *c + 1)))
            .unwrap_or((1, 1))
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, msg: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error(format!("expected {what}")))
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    acc = Expr::add(acc, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.next();
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = Expr::mul(acc, self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.next();
                    acc = Expr::div(acc, self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.next();
            let exponent = self.factor()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(Expr::Const(n)),
            Some(Tok::Minus) => Ok(Expr::neg(self.base()?)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "closing `)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(Tok::LParen) = self.peek() {
                    if FUNCTIONS.contains(&name.as_str()) {
                        self.next();
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "closing `)` after function argument")?;
                        return Ok(match name.as_str() {
                            "abs" => Expr::abs(arg),
                            "sign" => Expr::sign(arg),
                            "sin" => Expr::sin(arg),
                            "cos" => Expr::cos(arg),
                            "tan" => Expr::tan(arg),
                            "cot" => Expr::cot(arg),
                            "ln" => Expr::ln(arg),
                            "exp" => Expr::exp(arg),
                            _ => unreachable!(),
                        });
                    }
                    self.pos -= 1;
                    return Err(self.error(format!(
                        "unknown function `{name}` (builtins: {})",
                        FUNCTIONS.join(", ")
                    )));
                }
                if name == "alpha" {
                    return Ok(Expr::Alpha);
                }
                if let Some(i) = self.chart.index_of(&name) {
                    return Ok(Expr::coord(i));
                }
                if let Some(e) = self.bindings.get(&name) {
                    return Ok(e.clone());
                }
                self.pos -= 1;
                Err(self.error(format!(
                    "unknown identifier `{name}` (coordinates: {})",
                    self.chart.names().join(", ")
                )))
            }
            _ => Err(self.error("expected a number, identifier, or `(`")),
        }
    }
}

/// Parse `text` over the coordinates of `chart`.
pub fn parse(text: &str, chart: &Chart) -> Result<Expr, ParseError> {
    parse_with_bindings(text, chart, &BTreeMap::new())
}

/// Parse with extra identifier bindings (parameters and named
/// subexpressions substituted in place).
pub fn parse_with_bindings(
    text: &str,
    chart: &Chart,
    bindings: &BTreeMap<String, Expr>,
) -> Result<Expr, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0, chart, bindings };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.error("trailing input after expression"));
    }
    Ok(e)
}

// precedence levels used when printing
const P_ADD: u8 = 0;
const P_MUL: u8 = 1;
const P_POW: u8 = 2;
const P_ATOM: u8 = 3;

fn print_prec(e: &Expr, chart: &Chart, out: &mut String, min: u8) {
    let prec = match e {
        Expr::Add(..) | Expr::Sub(..) => P_ADD,
        Expr::Mul(..) | Expr::Div(..) => P_MUL,
        Expr::Pow(..) => P_POW,
        Expr::Const(Num::Rat(n, d)) if *n < 0 || *d != 1 => P_MUL,
        Expr::Const(Num::Real(x)) if *x < 0.0 => P_MUL,
        _ => P_ATOM,
    };
    let parens = prec < min;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Const(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Coord(i) => out.push_str(chart.name(*i)),
        Expr::Alpha => out.push_str("alpha"),
        Expr::Add(a, b) => {
            print_prec(a, chart, out, P_ADD);
            out.push_str(" + ");
            print_prec(b, chart, out, P_MUL);
        }
        Expr::Sub(a, b) => {
            print_prec(a, chart, out, P_ADD);
            out.push_str(" - ");
            print_prec(b, chart, out, P_MUL);
        }
        Expr::Mul(a, b) => {
            // `-1 * e` round-trips through the unary-minus production
            if matches!(**a, Expr::Const(n) if n == Num::int(-1)) {
                out.push('-');
                print_prec(b, chart, out, P_POW);
            } else {
                print_prec(a, chart, out, P_MUL);
                out.push('*');
                print_prec(b, chart, out, P_POW);
            }
        }
        Expr::Div(a, b) => {
            print_prec(a, chart, out, P_MUL);
            out.push('/');
            print_prec(b, chart, out, P_POW);
        }
        Expr::Pow(b, e2) => {
            print_prec(b, chart, out, P_ATOM);
            out.push('^');
            print_prec(e2, chart, out, P_POW);
        }
        Expr::Abs(a) => print_call("abs", a, chart, out),
        Expr::Sign(a) => print_call("sign", a, chart, out),
        Expr::Sin(a) => print_call("sin", a, chart, out),
        Expr::Cos(a) => print_call("cos", a, chart, out),
        Expr::Tan(a) => print_call("tan", a, chart, out),
        Expr::Cot(a) => print_call("cot", a, chart, out),
        Expr::Ln(a) => print_call("ln", a, chart, out),
        Expr::Exp(a) => print_call("exp", a, chart, out),
    }
    if parens {
        out.push(')');
    }
}

fn print_call(name: &str, arg: &Expr, chart: &Chart, out: &mut String) {
    out.push_str(name);
    out.push('(');
    print_prec(arg, chart, out, P_ADD);
    out.push(')');
}

impl Expr {
    /// Render over the named chart; `parse(print(e))` is structurally `e`.
    pub fn print(&self, chart: &Chart) -> String {
        let mut s = String::new();
        print_prec(self, chart, &mut s, P_ADD);
        s
    }

    /// Render with anonymous coordinate names `x1..xN` (used in error
    /// messages where no chart is in scope).
    pub fn print_default(&self) -> String {
        let n = self.max_coord().map(|m| m + 1).unwrap_or(0);
        let chart = Chart::new((0..n.max(1)).map(|i| format!("x{}", i + 1)));
        self.print(&chart)
    }
}
