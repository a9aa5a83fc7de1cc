//! Projector expressions: sums and products of named channel projectors.
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := IDENT | '(' expr ')'
//! IDENT  := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! Whitespace is insignificant. Both operators are left-associative and `*`
//! binds tighter than `+`. Subtraction and scalars are deliberately absent:
//! every expression reads as a formula of OR (`+`) and AND (`*`).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::linalg::{Operator, Projector};

/// Named channel projectors, ordered by name.
pub type ChannelTable = BTreeMap<String, Projector>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Name(String),
    Sum(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Group(Box<Expr>),
}

impl Expr {
    pub fn name(s: &str) -> Expr {
        Expr::Name(s.to_string())
    }

    pub fn sum(a: Expr, b: Expr) -> Expr {
        Expr::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: Expr, b: Expr) -> Expr {
        Expr::Product(Box::new(a), Box::new(b))
    }

    pub fn group(e: Expr) -> Expr {
        Expr::Group(Box::new(e))
    }

    /// Every name referenced, in order of appearance.
    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Name(n) => out.push(n),
            Expr::Sum(a, b) | Expr::Product(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Expr::Group(e) => e.collect_names(out),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Name(n) => f.write_str(n),
            Expr::Sum(a, b) => write!(f, "{a} + {b}"),
            Expr::Product(a, b) => write!(f, "{a}*{b}"),
            Expr::Group(e) => write!(f, "({e})"),
        }
    }
}

/// Syntax error with the byte offset where parsing failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Plus,
    Star,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Plus => f.write_str("`+`"),
            Token::Star => f.write_str("`*`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '+' => {
                chars.next();
                tokens.push((pos, Token::Plus));
            }
            '*' => {
                chars.next();
                tokens.push((pos, Token::Star));
            }
            '(' => {
                chars.next();
                tokens.push((pos, Token::LParen));
            }
            ')' => {
                chars.next();
                tokens.push((pos, Token::RParen));
            }
            c if c.is_ascii_alphabetic() => {
                let mut ident = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((pos, Token::Ident(ident)));
            }
            other => {
                return Err(ParseError {
                    position: pos,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    tokens.push((text.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &(usize, Token) {
        &self.tokens[self.cursor]
    }

    fn bump(&mut self) -> (usize, Token) {
        let t = self.tokens[self.cursor].clone();
        if t.1 != Token::End {
            self.cursor += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while self.peek().1 == Token::Plus {
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::sum(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek().1 == Token::Star {
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::product(lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            (_, Token::Ident(name)) => Ok(Expr::Name(name)),
            (open, Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    (_, Token::RParen) => Ok(Expr::group(inner)),
                    (pos, tok) => Err(ParseError {
                        position: pos,
                        message: format!("expected `)` to close `(` at {open}, found {tok}"),
                    }),
                }
            }
            (pos, tok) => Err(ParseError {
                position: pos,
                message: format!("expected a channel name or `(`, found {tok}"),
            }),
        }
    }
}

/// Parse a projector expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.len() == 1 {
        return Err(ParseError {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser { tokens, cursor: 0 };
    let e = parser.expr()?;
    match parser.peek() {
        (_, Token::End) => Ok(e),
        (pos, tok) => Err(ParseError {
            position: *pos,
            message: format!("unexpected {tok} after complete expression"),
        }),
    }
}

/// Evaluate `e` against `channels`: sums become `add`, products `compose`.
///
/// The result need not be a projector; callers that need one must check.
pub fn evaluate(e: &Expr, channels: &ChannelTable) -> Result<Operator> {
    match e {
        Expr::Name(n) => channels
            .get(n)
            .map(|p| p.operator().clone())
            .ok_or_else(|| Error::UnboundName(n.clone())),
        Expr::Sum(a, b) => evaluate(a, channels)?.add(&evaluate(b, channels)?),
        Expr::Product(a, b) => evaluate(a, channels)?.compose(&evaluate(b, channels)?),
        Expr::Group(inner) => evaluate(inner, channels),
    }
}

/// Parse and evaluate in one step.
pub fn evaluate_str(text: &str, channels: &ChannelTable) -> Result<Operator> {
    evaluate(&parse(text)?, channels)
}

/// Parse, evaluate, and require the result to be a projector.
pub fn evaluate_projector(text: &str, channels: &ChannelTable) -> Result<Projector> {
    let op = evaluate_str(text, channels)?;
    Projector::new(op).ok_or_else(|| Error::ExprNotProjector(text.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Operator, SCALAR_TOL};

    #[test]
    fn sum_of_products() {
        let e = parse("L1*L2 + R1*R2").unwrap();
        let want = Expr::sum(
            Expr::product(Expr::name("L1"), Expr::name("L2")),
            Expr::product(Expr::name("R1"), Expr::name("R2")),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn single_name() {
        assert_eq!(parse("A").unwrap(), Expr::name("A"));
        assert_eq!(parse("  x_1 ").unwrap(), Expr::name("x_1"));
    }

    #[test]
    fn dangling_plus_reports_position() {
        let err = parse("A + ").unwrap_err();
        assert_eq!(err.position, 4);
    }

    #[test]
    fn other_syntax_errors() {
        assert_eq!(parse("").unwrap_err().message, "empty expression");
        assert_eq!(parse("   ").unwrap_err().position, 0);
        assert_eq!(parse("(A + B").unwrap_err().position, 6);
        assert_eq!(parse("A B").unwrap_err().position, 2);
        assert_eq!(parse("A - B").unwrap_err().position, 2);
        assert_eq!(parse("1A").unwrap_err().position, 0);
        assert_eq!(parse("A*)").unwrap_err().position, 2);
    }

    #[test]
    fn left_associativity_and_precedence() {
        let e = parse("a + b + c*d*e").unwrap();
        let want = Expr::sum(
            Expr::sum(Expr::name("a"), Expr::name("b")),
            Expr::product(
                Expr::product(Expr::name("c"), Expr::name("d")),
                Expr::name("e"),
            ),
        );
        assert_eq!(e, want);
        let g = parse("(a + b)*c").unwrap();
        assert_eq!(
            g,
            Expr::product(
                Expr::group(Expr::sum(Expr::name("a"), Expr::name("b"))),
                Expr::name("c")
            )
        );
        assert_eq!(g.to_string(), "(a + b)*c");
    }

    fn table() -> ChannelTable {
        let mut t = ChannelTable::new();
        t.insert("a".into(), Projector::basis(3, &[0]).unwrap());
        t.insert("b".into(), Projector::basis(3, &[0, 1]).unwrap());
        t.insert("c".into(), Projector::basis(3, &[1, 2]).unwrap());
        t
    }

    #[test]
    fn evaluate_respects_precedence() {
        let t = table();
        let got = evaluate_str("a + b*c", &t).unwrap();
        let a = t["a"].operator();
        let bc = t["b"].operator().compose(t["c"].operator()).unwrap();
        assert!(got.approx_eq(&a.add(&bc).unwrap(), SCALAR_TOL));
    }

    #[test]
    fn unbound_names() {
        let empty = ChannelTable::new();
        assert_eq!(evaluate_str("X", &empty), Err(Error::UnboundName("X".into())));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mut t = table();
        t.insert("d".into(), Projector::identity(2));
        assert!(matches!(evaluate_str("a*d", &t), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn non_projector_results_are_flagged_by_evaluate_projector() {
        let t = table();
        // a + b has eigenvalue 2 on |0⟩
        assert!(evaluate_str("a + b", &t).is_ok());
        assert!(matches!(evaluate_projector("a + b", &t), Err(Error::ExprNotProjector(_))));
        let id = evaluate_projector("a + c", &t).unwrap();
        assert!(id.operator().approx_eq(&Operator::identity(3), SCALAR_TOL));
    }
}
