//! Recursive-descent parser for `.pv` files.
//!
//! ```text
//! term    := fun binders => term | forall binders , term | eqterm [-> term]
//! eqterm  := appterm [= appterm]
//! appterm := atom+
//! atom    := ident | Prop | Type | ( term )
//! binders := (( ident+ : term ))+ | ident+ : term
//! ```

use super::ast::*;
use super::lexer::{tokenize, Keyword, Symbol, Token};
use super::ParseError;

pub fn parse(text: &str) -> Result<Vec<Command>, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut commands = Vec::new();
    while parser.peek() != &Token::Eof {
        commands.push(parser.command()?);
    }
    Ok(commands)
}

/// Parses a single term (no trailing `.`).
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let e = parser.term()?;
    parser.expect_eof()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<(Token, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].1
    }

    fn advance(&mut self) -> (Token, Span) {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let span = self.span();
        Err(ParseError {
            line: span.start.line,
            column: span.start.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn at_sym(&self, sym: Symbol) -> bool {
        self.peek() == &Token::Sym(sym)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek() == &Token::Kw(kw)
    }

    fn eat_sym(&mut self, sym: Symbol) -> bool {
        if self.at_sym(sym) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: Symbol) -> Result<Span, ParseError> {
        if self.at_sym(sym) {
            Ok(self.advance().1)
        } else {
            self.error(&[&format!("`{}`", sym.as_str())])
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek() == &Token::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Token::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn command(&mut self) -> Result<Command, ParseError> {
        let start = self.span();
        let kind = match self.peek() {
            Token::Kw(Keyword::Parameter) | Token::Kw(Keyword::Axiom) => {
                let axiom = self.at_kw(Keyword::Axiom);
                self.advance();
                let name = self.ident()?;
                self.expect_sym(Symbol::Colon)?;
                let ty = self.term()?;
                if axiom {
                    CommandKind::Axiom { name, ty }
                } else {
                    CommandKind::Parameter { name, ty }
                }
            }
            Token::Kw(Keyword::Definition) => {
                self.advance();
                let name = self.ident()?;
                let ty = if self.eat_sym(Symbol::Colon) { Some(self.term()?) } else { None };
                if !self.at_sym(Symbol::ColonEq) {
                    return self.error(if ty.is_some() { &["`:=`"] } else { &["`:`", "`:=`"] });
                }
                self.advance();
                let body = self.term()?;
                CommandKind::Definition { name, ty, body }
            }
            Token::Kw(Keyword::Theorem) => {
                self.advance();
                let name = self.ident()?;
                self.expect_sym(Symbol::Colon)?;
                let ty = self.term()?;
                self.expect_sym(Symbol::ColonEq)?;
                let body = self.term()?;
                CommandKind::Theorem { name, ty, body }
            }
            Token::Kw(Keyword::Inductive) => {
                self.advance();
                CommandKind::Inductive(self.inductive()?)
            }
            Token::Kw(Keyword::Record) => {
                self.advance();
                CommandKind::Record(self.record()?)
            }
            Token::Kw(Keyword::Require) => {
                self.advance();
                CommandKind::Require(self.ident()?)
            }
            Token::Kw(Keyword::Check) => {
                self.advance();
                CommandKind::Check(self.term()?)
            }
            Token::Kw(Keyword::Eval) => {
                self.advance();
                CommandKind::Eval(self.term()?)
            }
            _ => {
                return self.error(&[
                    "Parameter", "Axiom", "Definition", "Theorem", "Inductive", "Record",
                    "Require", "Check", "Eval",
                ])
            }
        };
        let end = self.expect_sym(Symbol::Dot)?;
        Ok(Command { kind, span: start.to(end) })
    }

    fn inductive(&mut self) -> Result<InductiveDecl, ParseError> {
        let name = self.ident()?;
        let params = self.param_groups()?;
        self.expect_sym(Symbol::Colon)?;
        let sort = self.term()?;
        self.expect_sym(Symbol::ColonEq)?;
        let mut ctors = Vec::new();
        if !self.at_sym(Symbol::Dot) {
            self.eat_sym(Symbol::Bar);
            loop {
                let cname = self.ident()?;
                self.expect_sym(Symbol::Colon)?;
                let ty = self.term()?;
                ctors.push(Constructor { name: cname, ty });
                if !self.eat_sym(Symbol::Bar) {
                    break;
                }
            }
        }
        Ok(InductiveDecl { name, params, sort, ctors })
    }

    fn record(&mut self) -> Result<RecordDecl, ParseError> {
        let name = self.ident()?;
        let params = self.param_groups()?;
        self.expect_sym(Symbol::Colon)?;
        let sort = self.term()?;
        self.expect_sym(Symbol::ColonEq)?;
        let ctor = match self.peek() {
            Token::Ident(_) => Some(self.ident()?),
            _ => None,
        };
        if !self.at_sym(Symbol::LBrace) {
            return self.error(if ctor.is_some() { &["`{`"] } else { &["identifier", "`{`"] });
        }
        self.advance();
        let mut fields = Vec::new();
        while !self.at_sym(Symbol::RBrace) {
            let fname = self.ident()?;
            self.expect_sym(Symbol::Colon)?;
            let ty = self.term()?;
            fields.push(Field { name: fname, ty });
            if !self.eat_sym(Symbol::Semi) && !self.at_sym(Symbol::RBrace) {
                return self.error(&["`;`", "`}`"]);
            }
        }
        self.advance();
        Ok(RecordDecl { name, params, sort, ctor, fields })
    }

    fn param_groups(&mut self) -> Result<Vec<BinderGroup>, ParseError> {
        let mut groups = Vec::new();
        while self.at_sym(Symbol::LParen) {
            groups.push(self.paren_group()?);
        }
        Ok(groups)
    }

    fn paren_group(&mut self) -> Result<BinderGroup, ParseError> {
        let start = self.expect_sym(Symbol::LParen)?;
        let mut names = vec![self.ident()?];
        while let Token::Ident(_) = self.peek() {
            names.push(self.ident()?);
        }
        if !self.at_sym(Symbol::Colon) {
            return self.error(&["identifier", "`:`"]);
        }
        self.advance();
        let ty = self.term()?;
        let end = self.expect_sym(Symbol::RParen)?;
        Ok(BinderGroup { names, ty, span: start.to(end) })
    }

    fn binders(&mut self) -> Result<Vec<BinderGroup>, ParseError> {
        match self.peek() {
            Token::Sym(Symbol::LParen) => self.param_groups(),
            Token::Ident(_) => {
                let start = self.span();
                let mut names = vec![self.ident()?];
                while let Token::Ident(_) = self.peek() {
                    names.push(self.ident()?);
                }
                if !self.at_sym(Symbol::Colon) {
                    return self.error(&["identifier", "`:`"]);
                }
                self.advance();
                let ty = self.term()?;
                Ok(vec![BinderGroup { names, span: start.to(ty.span), ty }])
            }
            _ => self.error(&["`(`", "identifier"]),
        }
    }

    pub(crate) fn term(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        if self.at_kw(Keyword::Fun) {
            self.advance();
            let groups = self.binders()?;
            self.expect_sym(Symbol::FatArrow)?;
            let body = self.term()?;
            let span = start.to(body.span);
            return Ok(Expr { kind: ExprKind::Fun(groups, Box::new(body)), span });
        }
        if self.at_kw(Keyword::Forall) {
            self.advance();
            let groups = self.binders()?;
            self.expect_sym(Symbol::Comma)?;
            let body = self.term()?;
            let span = start.to(body.span);
            return Ok(Expr { kind: ExprKind::Forall(groups, Box::new(body)), span });
        }
        let lhs = self.eq_term()?;
        if self.eat_sym(Symbol::Arrow) {
            let rhs = self.term()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Expr { kind: ExprKind::Arrow(Box::new(lhs), Box::new(rhs)), span });
        }
        Ok(lhs)
    }

    fn eq_term(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.app_term()?;
        if self.eat_sym(Symbol::Equals) {
            let rhs = self.app_term()?;
            let span = lhs.span.to(rhs.span);
            return Ok(Expr { kind: ExprKind::Equals(Box::new(lhs), Box::new(rhs)), span });
        }
        Ok(lhs)
    }

    fn at_atom_start(&self) -> bool {
        matches!(
            self.peek(),
            Token::Ident(_)
                | Token::Kw(Keyword::Prop)
                | Token::Kw(Keyword::Type)
                | Token::Sym(Symbol::LParen)
        )
    }

    fn app_term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.atom()?;
        while self.at_atom_start() {
            let arg = self.atom()?;
            let span = acc.span.to(arg.span);
            acc = Expr { kind: ExprKind::App(Box::new(acc), Box::new(arg)), span };
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        let kind = match self.peek() {
            Token::Ident(s) => ExprKind::Ident(s.clone()),
            Token::Kw(Keyword::Prop) => ExprKind::Prop,
            Token::Kw(Keyword::Type) => ExprKind::Type,
            Token::Sym(Symbol::LParen) => {
                self.advance();
                let inner = self.term()?;
                self.expect_sym(Symbol::RParen)?;
                return Ok(Expr { kind: inner.kind, span: span.to(self.prev_span()) });
            }
            _ => return self.error(&["identifier", "`Prop`", "`Type`", "`(`"]),
        };
        self.advance();
        Ok(Expr { kind, span })
    }
}
