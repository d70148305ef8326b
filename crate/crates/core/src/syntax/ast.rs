//! Surface syntax. Equality on these types ignores source spans.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start.line, self.start.column)
    }
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Ident(String),
    Prop,
    Type,
    App(Box<Expr>, Box<Expr>),
    /// `A -> B`, a non-dependent product.
    Arrow(Box<Expr>, Box<Expr>),
    /// `a = b`, propositional equality at the type of `a`.
    Equals(Box<Expr>, Box<Expr>),
    Fun(Vec<BinderGroup>, Box<Expr>),
    Forall(Vec<BinderGroup>, Box<Expr>),
}

/// `(x y : T)`
#[derive(Clone, Debug)]
pub struct BinderGroup {
    pub names: Vec<String>,
    pub ty: Expr,
    pub span: Span,
}

impl PartialEq for BinderGroup {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.ty == other.ty
    }
}

#[derive(Clone, Debug)]
pub struct Command {
    pub kind: CommandKind,
    pub span: Span,
}

impl PartialEq for Command {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constructor {
    pub name: String,
    pub ty: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InductiveDecl {
    pub name: String,
    pub params: Vec<BinderGroup>,
    pub sort: Expr,
    pub ctors: Vec<Constructor>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub name: String,
    pub ty: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecordDecl {
    pub name: String,
    pub params: Vec<BinderGroup>,
    pub sort: Expr,
    /// Explicit constructor name; defaults to `Build_<name>`.
    pub ctor: Option<String>,
    pub fields: Vec<Field>,
}

impl RecordDecl {
    pub fn ctor_name(&self) -> String {
        self.ctor.clone().unwrap_or_else(|| format!("Build_{}", self.name))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommandKind {
    Parameter { name: String, ty: Expr },
    Axiom { name: String, ty: Expr },
    Definition { name: String, ty: Option<Expr>, body: Expr },
    Theorem { name: String, ty: Expr, body: Expr },
    Inductive(InductiveDecl),
    Record(RecordDecl),
    Require(String),
    Check(Expr),
    Eval(Expr),
}

impl CommandKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            CommandKind::Parameter { .. } => "Parameter",
            CommandKind::Axiom { .. } => "Axiom",
            CommandKind::Definition { .. } => "Definition",
            CommandKind::Theorem { .. } => "Theorem",
            CommandKind::Inductive(_) => "Inductive",
            CommandKind::Record(_) => "Record",
            CommandKind::Require(_) => "Require",
            CommandKind::Check(_) => "Check",
            CommandKind::Eval(_) => "Eval",
        }
    }

    /// The declared (or required) name, when there is one.
    pub fn name(&self) -> Option<&str> {
        match self {
            CommandKind::Parameter { name, .. }
            | CommandKind::Axiom { name, .. }
            | CommandKind::Definition { name, .. }
            | CommandKind::Theorem { name, .. }
            | CommandKind::Require(name) => Some(name),
            CommandKind::Inductive(d) => Some(&d.name),
            CommandKind::Record(d) => Some(&d.name),
            CommandKind::Check(_) | CommandKind::Eval(_) => None,
        }
    }
}
