//! Term DSL: lexer, recursive-descent parser, and canonical printer.
//!
//! The grammar (binary `+ - * / ^`, unary minus, `ln`/`exp`/`sqrt`, the
//! index variable `n`, the factorial atom `n!`, and decimal number literals)
//! is deliberately tiny and total: every accepted string maps to one AST and
//! [`ExprAst::to_canonical_string`] prints a fully parenthesized form that
//! parses back to the identical AST.
//!
//! Notes on shape:
//! * number literals are `INT` or `INT.FRAC` (no exponent part) and become
//!   exact rationals, so `0.1` is one tenth, not a binary float;
//! * unary minus is sugar for subtraction from zero: `-x` parses as
//!   `(0 - x)` — there is no dedicated negation node;
//! * `^` does not associate: `2^3^4` is a syntax error, write `2^(3^4)`.

use num::{BigInt, BigRational, One, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Expression tree for sequence terms in the index variable `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprAst {
    /// Exact rational constant.
    Const(BigRational),
    /// The index variable `n`.
    Var,
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    /// `Pow(base, exponent)`; the parser only produces atom-shaped operands.
    Pow(Box<ExprAst>, Box<ExprAst>),
    Ln(Box<ExprAst>),
    Exp(Box<ExprAst>),
    Sqrt(Box<ExprAst>),
    /// Factorial; the parser only produces `Factorial(Var)` (the `n!` atom).
    Factorial(Box<ExprAst>),
}

impl ExprAst {
    pub fn constant_u64(v: u64) -> Self {
        ExprAst::Const(BigRational::from_integer(BigInt::from(v)))
    }

    /// True if the tree contains `ln`, `exp`, or `sqrt` (operations with no
    /// exact rational meaning).
    pub fn uses_transcendental(&self) -> bool {
        match self {
            ExprAst::Const(_) | ExprAst::Var => false,
            ExprAst::Ln(_) | ExprAst::Exp(_) | ExprAst::Sqrt(_) => true,
            ExprAst::Add(a, b)
            | ExprAst::Sub(a, b)
            | ExprAst::Mul(a, b)
            | ExprAst::Div(a, b)
            | ExprAst::Pow(a, b) => a.uses_transcendental() || b.uses_transcendental(),
            ExprAst::Factorial(x) => x.uses_transcendental(),
        }
    }

    /// Canonical fully parenthesized rendering; `parse(to_canonical_string())`
    /// is the identity on parser-producible ASTs.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        self.write_canonical(&mut out);
        out
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            ExprAst::Const(r) => write_const(r, out),
            ExprAst::Var => out.push('n'),
            ExprAst::Add(a, b) => write_binary(out, a, '+', b),
            ExprAst::Sub(a, b) => write_binary(out, a, '-', b),
            ExprAst::Mul(a, b) => write_binary(out, a, '*', b),
            ExprAst::Div(a, b) => write_binary(out, a, '/', b),
            ExprAst::Pow(a, b) => write_binary(out, a, '^', b),
            ExprAst::Ln(x) => write_call(out, "ln", x),
            ExprAst::Exp(x) => write_call(out, "exp", x),
            ExprAst::Sqrt(x) => write_call(out, "sqrt", x),
            ExprAst::Factorial(x) => {
                out.push('(');
                x.write_canonical(out);
                out.push_str("!)");
            }
        }
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

fn write_binary(out: &mut String, a: &ExprAst, op: char, b: &ExprAst) {
    out.push('(');
    a.write_canonical(out);
    out.push(op);
    b.write_canonical(out);
    out.push(')');
}

fn write_call(out: &mut String, name: &str, x: &ExprAst) {
    out.push_str(name);
    out.push('(');
    x.write_canonical(out);
    out.push(')');
}

/// Renders a nonnegative rational with a 2^a·5^b denominator as a finite
/// decimal, other rationals as `(p/q)`, and negatives as `(0-...)` so the
/// output stays inside the grammar.
fn write_const(r: &BigRational, out: &mut String) {
    if r.is_negative_const() {
        out.push_str("(0-");
        write_const(&-r.clone(), out);
        out.push(')');
        return;
    }
    if r.is_integer() {
        out.push_str(&r.numer().to_string());
        return;
    }
    if let Some((scale, digits)) = decimal_expansion(r) {
        let s = digits.to_string();
        let s = if s.len() <= scale {
            format!("{}{}", "0".repeat(scale + 1 - s.len()), s)
        } else {
            s
        };
        let (int_part, frac_part) = s.split_at(s.len() - scale);
        let frac_part = frac_part.trim_end_matches('0');
        out.push_str(int_part);
        out.push('.');
        out.push_str(if frac_part.is_empty() { "0" } else { frac_part });
        return;
    }
    out.push('(');
    out.push_str(&r.numer().to_string());
    out.push('/');
    out.push_str(&r.denom().to_string());
    out.push(')');
}

trait RationalSign {
    fn is_negative_const(&self) -> bool;
}
impl RationalSign for BigRational {
    fn is_negative_const(&self) -> bool {
        self < &BigRational::zero()
    }
}

/// If the reduced denominator is 2^a·5^b, returns `(scale, numer·10^scale/denom)`
/// with `scale = max(a, b)`, i.e. the exact decimal digits.
fn decimal_expansion(r: &BigRational) -> Option<(usize, BigInt)> {
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut a = 0usize;
    let mut b = 0usize;
    while (&d % &two).is_zero() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return None;
    }
    let scale = a.max(b);
    let mut digits = r.numer().clone();
    for _ in a..scale {
        digits *= &two;
    }
    for _ in b..scale {
        digits *= &five;
    }
    Some((scale, digits))
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Bang,
    LParen,
    RParen,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(_) => "number".into(),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::Bang => "`!`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

struct Lexer;

impl Lexer {
    fn run(src: &str) -> Result<Vec<(Token, usize)>> {
        let bytes = src.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0usize;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => i += 1,
                b'+' => {
                    tokens.push((Token::Plus, i));
                    i += 1;
                }
                b'-' => {
                    tokens.push((Token::Minus, i));
                    i += 1;
                }
                b'*' => {
                    tokens.push((Token::Star, i));
                    i += 1;
                }
                b'/' => {
                    tokens.push((Token::Slash, i));
                    i += 1;
                }
                b'^' => {
                    tokens.push((Token::Caret, i));
                    i += 1;
                }
                b'!' => {
                    tokens.push((Token::Bang, i));
                    i += 1;
                }
                b'(' => {
                    tokens.push((Token::LParen, i));
                    i += 1;
                }
                b')' => {
                    tokens.push((Token::RParen, i));
                    i += 1;
                }
                b'0'..=b'9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let mut scale = 0usize;
                    if i < bytes.len() && bytes[i] == b'.' {
                        i += 1;
                        let frac_start = i;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                        if i == frac_start {
                            return Err(Error::Syntax {
                                offset: i,
                                message: "expected digits after decimal point".into(),
                            });
                        }
                        scale = i - frac_start;
                    }
                    let text: String = src[start..i].chars().filter(|c| *c != '.').collect();
                    let numer: BigInt = text.parse().map_err(|_| Error::Syntax {
                        offset: start,
                        message: "invalid number literal".into(),
                    })?;
                    let denom = BigInt::from(10u32).pow(scale as u32);
                    tokens.push((Token::Number(BigRational::new(numer, denom)), start));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    tokens.push((Token::Ident(src[start..i].to_string()), start));
                }
                _ => {
                    return Err(Error::Syntax {
                        offset: i,
                        message: format!("unexpected character `{}`", src[i..].chars().next().unwrap()),
                    });
                }
            }
        }
        tokens.push((Token::Eof, src.len()));
        Ok(tokens)
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<()> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.offset(),
                message: format!("expected {what}, found {}", self.peek().describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Token::Slash => {
                    self.bump();
                    lhs = ExprAst::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst> {
        if *self.peek() == Token::Minus {
            self.bump();
            let inner = self.factor()?;
            return Ok(ExprAst::Sub(
                Box::new(ExprAst::Const(BigRational::zero())),
                Box::new(inner),
            ));
        }
        let base = self.atom()?;
        if *self.peek() == Token::Caret {
            self.bump();
            let exponent = self.atom()?;
            return Ok(ExprAst::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst> {
        let offset = self.offset();
        match self.bump() {
            Token::Number(r) => Ok(ExprAst::Const(r)),
            Token::Ident(name) => match name.as_str() {
                "n" => {
                    if *self.peek() == Token::Bang {
                        self.bump();
                        Ok(ExprAst::Factorial(Box::new(ExprAst::Var)))
                    } else {
                        Ok(ExprAst::Var)
                    }
                }
                "ln" | "exp" | "sqrt" => {
                    self.expect(&Token::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(&Token::RParen, "`)`")?;
                    let arg = Box::new(arg);
                    Ok(match name.as_str() {
                        "ln" => ExprAst::Ln(arg),
                        "exp" => ExprAst::Exp(arg),
                        _ => ExprAst::Sqrt(arg),
                    })
                }
                _ => Err(Error::Syntax {
                    offset,
                    message: format!(
                        "unknown identifier `{name}` (expected `n`, `ln`, `exp`, or `sqrt`)"
                    ),
                }),
            },
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(&Token::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(Error::Syntax {
                offset,
                message: format!("expected an operand, found {}", other.describe()),
            }),
        }
    }
}

/// Parses DSL source text into an [`ExprAst`].
pub fn parse(src: &str) -> Result<ExprAst> {
    let tokens = Lexer::run(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let ast = parser.expr()?;
    if *parser.peek() != Token::Eof {
        return Err(Error::Syntax {
            offset: parser.offset(),
            message: format!("unexpected trailing {}", parser.peek().describe()),
        });
    }
    Ok(ast)
}
