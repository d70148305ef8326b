//! The `.pv` surface language: lexer, parser, printer and elaboration.

pub mod ast;
pub mod elab;
pub mod lexer;
pub mod parser;
pub mod print;

use std::fmt;

pub use ast::{Command, CommandKind, Expr, ExprKind, Pos, Span};
pub use parser::{parse, parse_expr};

/// A syntax error at the furthest position the parser reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: expected ", self.line, self.column)?;
        match self.expected.as_slice() {
            [] => f.write_str("nothing")?,
            [one] => f.write_str(one)?,
            [init @ .., last] => write!(f, "{} or {last}", init.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

impl std::error::Error for ParseError {}
