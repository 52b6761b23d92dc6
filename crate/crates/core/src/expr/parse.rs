use super::{BinaryOp, Expr, UnaryOp, Var};

/// Syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at offset {offset}: {message} (expected {expected})")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

pub(super) struct Parser<'a> {
    src: &'a str,
    n: usize,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str, n: usize) -> Self {
        Parser {
            src,
            n,
            toks: Vec::new(),
            pos: 0,
        }
    }

    fn error(&self, offset: usize, message: impl Into<String>, expected: &str) -> ParseError {
        let offset = offset.min(self.src.len().saturating_sub(1));
        ParseError {
            offset,
            message: message.into(),
            expected: expected.to_string(),
        }
    }

    fn lex(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            let tok = match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'0'..=b'9' | b'.' => {
                    while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                        i += 1;
                    }
                    // Exponent only when a digit follows, so `2e` stays `2` then `e`.
                    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                        let mut j = i + 1;
                        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                            j += 1;
                        }
                        if j < bytes.len() && bytes[j].is_ascii_digit() {
                            i = j;
                            while i < bytes.len() && bytes[i].is_ascii_digit() {
                                i += 1;
                            }
                        }
                    }
                    let text = &self.src[start..i];
                    let value: f64 = text
                        .parse()
                        .map_err(|_| self.error(start, format!("malformed number `{text}`"), "a number"))?;
                    if !value.is_finite() {
                        return Err(self.error(start, format!("number `{text}` overflows"), "a finite number"));
                    }
                    self.toks.push((Tok::Num(value), start));
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    self.toks.push((Tok::Ident(self.src[start..i].to_string()), start));
                    continue;
                }
                _ => {
                    let ch = self.src[start..].chars().next().unwrap_or('?');
                    return Err(self.error(
                        start,
                        format!("unexpected character `{ch}`"),
                        "a number, identifier, operator or parenthesis",
                    ));
                }
            };
            self.toks.push((tok, start));
            i += 1;
        }
        self.toks.push((Tok::End, self.src.len()));
        Ok(())
    }

    pub(super) fn parse(mut self) -> Result<Expr, ParseError> {
        self.lex()?;
        let e = self.expr()?;
        let (tok, off) = self.peek();
        if *tok != Tok::End {
            let msg = format!("unexpected {}", tok.describe());
            return Err(self.error(*off, msg, "an operator or end of input"));
        }
        Ok(e)
    }

    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().0 {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().0 {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            let arg = self.unary()?;
            return Ok(Expr::unary(UnaryOp::Neg, arg));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        let (tok, off) = self.bump();
        if tok != Tok::RParen {
            let msg = format!("unclosed `(` opened at offset {open}, found {}", tok.describe());
            return Err(self.error(off, msg, "`)`"));
        }
        Ok(())
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, off) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen(off)?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(&name, off),
            other => Err(self.error(
                off,
                format!("unexpected {}", other.describe()),
                "a number, identifier or `(`",
            )),
        }
    }

    fn identifier(&mut self, name: &str, off: usize) -> Result<Expr, ParseError> {
        if let Some(op) = UnaryOp::from_name(name) {
            let (tok, paren) = self.bump();
            if tok != Tok::LParen {
                return Err(self.error(paren, format!("function `{name}` needs an argument"), "`(`"));
            }
            let arg = self.expr()?;
            self.expect_rparen(paren)?;
            return Ok(Expr::unary(op, arg));
        }
        let leaf = match name {
            "t" => Expr::Var(Var::Time),
            "pi" => Expr::Const(std::f64::consts::PI),
            "e" => Expr::Const(std::f64::consts::E),
            _ => match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                Some(k) if k >= 1 && k <= self.n => Expr::Var(Var::Space(k - 1)),
                Some(k) => {
                    let expected = if self.n == 0 {
                        "`t` (no spatial variables are declared)".to_string()
                    } else {
                        format!("x1..x{}", self.n)
                    };
                    return Err(self.error(
                        off,
                        format!("variable x{k} is out of range for dimension {}", self.n),
                        &expected,
                    ));
                }
                None => {
                    return Err(self.error(
                        off,
                        format!("unknown identifier `{name}`"),
                        "t, x1..xn, pi, e, sin, cos, exp, log, sqrt, abs",
                    ))
                }
            },
        };
        if self.peek().0 == Tok::LParen {
            let at = self.peek().1;
            return Err(self.error(at, format!("`{name}` is not a function"), "an operator"));
        }
        Ok(leaf)
    }
}
