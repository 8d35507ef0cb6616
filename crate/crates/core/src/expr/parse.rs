//! Recursive-descent parser.
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" unary)?
//! atom  := number | ident | ident "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` binds tighter than unary minus (`-x^2` is `-(x^2)`) and is
//! right-associative. Implicit multiplication is not accepted.

use std::fmt;

use super::{BinOp, Constant, Expr, Func, Mode, Node, Var};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedToken(String),
    UnexpectedEnd,
    InvalidCharacter(String),
    NumberOutOfRange(String),
    UndeclaredVariable(String),
    UnknownFunction(String),
    MissingArgument(String),
    InvalidUtf8,
    TooDeep,
}

/// Syntax error with the byte offset at which it was detected and the set
/// of tokens that would have been accepted there.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected `{t}`")?,
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input")?,
            ParseErrorKind::InvalidCharacter(c) => write!(f, "invalid character `{c}`")?,
            ParseErrorKind::NumberOutOfRange(n) => write!(f, "number `{n}` is out of range")?,
            ParseErrorKind::UndeclaredVariable(v) => write!(f, "undeclared variable `{v}`")?,
            ParseErrorKind::UnknownFunction(n) => write!(f, "unknown function `{n}`")?,
            ParseErrorKind::MissingArgument(n) => {
                write!(f, "function `{n}` requires a parenthesized argument")?
            }
            ParseErrorKind::InvalidUtf8 => write!(f, "input is not valid UTF-8")?,
            ParseErrorKind::TooDeep => {
                write!(f, "expression nests deeper than {MAX_DEPTH} levels")?
            }
        }
        write!(f, " at offset {}", self.offset)?;
        if !self.expected.is_empty() {
            write!(f, "; expected one of: {}", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Maximum tree depth accepted by the parser; keeps evaluation recursion bounded.
pub const MAX_DEPTH: usize = 200;

const EXPECT_OPERAND: &[&str] = &["number", "identifier", "(", "-"];

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
            Tok::Num(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
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
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let mut digits = j > i;
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    let frac = j;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    digits |= j > frac;
                }
                if !digits {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::InvalidCharacter(".".into()),
                        expected: EXPECT_OPERAND.to_vec(),
                    });
                }
                // exponent only when digits follow, so `2e` stays `2` `e`
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text = &src[i..j];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::InvalidCharacter(text.into()),
                    expected: EXPECT_OPERAND.to_vec(),
                })?;
                if !value.is_finite() {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::NumberOutOfRange(text.into()),
                        expected: vec![],
                    });
                }
                i = j;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((Tok::Ident(src[i..j].to_string()), start));
                i = j;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().map(String::from).unwrap_or_default();
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::InvalidCharacter(ch),
                    expected: vec![],
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, bytes.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    /// Open parentheses; decides whether `)` is acceptable.
    depth: usize,
    /// Recursion depth of the descent itself.
    nesting: usize,
    mode: Mode,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            t => ParseErrorKind::UnexpectedToken(t.describe()),
        };
        ParseError {
            offset: self.offset(),
            kind,
            expected,
        }
    }

    fn after_operand_expected(&self) -> Vec<&'static str> {
        let mut v = vec!["+", "-", "*", "/", "^"];
        v.push(if self.depth > 0 { ")" } else { "end of input" });
        v
    }

    fn check_depth(&self, depth: usize, offset: usize) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError {
                offset,
                kind: ParseErrorKind::TooDeep,
                expected: vec![],
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<(Node, usize), ParseError> {
        let (mut lhs, mut depth) = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok((lhs, depth)),
            };
            let offset = self.offset();
            self.bump();
            let (rhs, d) = self.term()?;
            depth = 1 + depth.max(d);
            self.check_depth(depth, offset)?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<(Node, usize), ParseError> {
        let (mut lhs, mut depth) = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok((lhs, depth)),
            };
            let offset = self.offset();
            self.bump();
            let (rhs, d) = self.unary()?;
            depth = 1 + depth.max(d);
            self.check_depth(depth, offset)?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<(Node, usize), ParseError> {
        if *self.peek() == Tok::Minus {
            let offset = self.offset();
            self.nesting += 1;
            self.check_depth(self.nesting, offset)?;
            self.bump();
            let (inner, d) = self.unary()?;
            self.nesting -= 1;
            return Ok((Node::Neg(Box::new(inner)), d + 1));
        }
        self.power()
    }

    fn power(&mut self) -> Result<(Node, usize), ParseError> {
        let (base, d) = self.atom()?;
        if *self.peek() == Tok::Caret {
            let offset = self.offset();
            self.nesting += 1;
            self.check_depth(self.nesting, offset)?;
            self.bump();
            let (exponent, e) = self.unary()?;
            self.nesting -= 1;
            let depth = 1 + d.max(e);
            self.check_depth(depth, offset)?;
            return Ok((
                Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
                depth,
            ));
        }
        Ok((base, d))
    }

    fn atom(&mut self) -> Result<(Node, usize), ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok((Node::Num(v), 1))
            }
            Tok::LParen => {
                self.nesting += 1;
                self.check_depth(self.nesting, offset)?;
                self.bump();
                self.depth += 1;
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(self.after_operand_expected()));
                }
                self.depth -= 1;
                self.nesting -= 1;
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let func = match Func::from_name(&name) {
                        Some(Func::Abs) if self.mode == Mode::Complex1 => None,
                        other => other,
                    };
                    let Some(func) = func else {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::UnknownFunction(name),
                            expected: vec![],
                        });
                    };
                    self.nesting += 1;
                    self.check_depth(self.nesting, offset)?;
                    self.bump();
                    self.depth += 1;
                    let (arg, d) = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return Err(self.unexpected(self.after_operand_expected()));
                    }
                    self.depth -= 1;
                    self.nesting -= 1;
                    self.bump();
                    self.check_depth(d + 1, offset)?;
                    return Ok((Node::Call(func, Box::new(arg)), d + 1));
                }
                Ok((self.identifier(name, offset)?, 1))
            }
            _ => Err(self.unexpected(EXPECT_OPERAND.to_vec())),
        }
    }

    fn identifier(&self, name: String, offset: usize) -> Result<Node, ParseError> {
        match name.as_str() {
            "pi" => return Ok(Node::Const(Constant::Pi)),
            "e" => return Ok(Node::Const(Constant::E)),
            "i" if self.mode == Mode::Complex1 => return Ok(Node::Const(Constant::I)),
            _ => {}
        }
        if let Some(var) = Var::from_name(&name) {
            if self.mode.declares(var) {
                return Ok(Node::Var(var));
            }
        }
        let kind = if Func::from_name(&name).is_some() {
            ParseErrorKind::MissingArgument(name)
        } else {
            ParseErrorKind::UndeclaredVariable(name)
        };
        Err(ParseError {
            offset,
            kind,
            expected: vec![],
        })
    }
}

pub(super) fn parse(source: &str, mode: Mode) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        nesting: 0,
        mode,
    };
    let (root, _) = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(p.after_operand_expected()));
    }
    Ok(Expr { mode, root })
}

/// Parse raw bytes; invalid UTF-8 is reported at the first bad byte.
pub fn parse_bytes(source: &[u8], mode: Mode) -> Result<Expr, ParseError> {
    match std::str::from_utf8(source) {
        Ok(s) => parse(s, mode),
        Err(e) => Err(ParseError {
            offset: e.valid_up_to(),
            kind: ParseErrorKind::InvalidUtf8,
            expected: vec![],
        }),
    }
}
