use super::ast::{Pos, Span};
use super::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Parameter,
    Axiom,
    Definition,
    Theorem,
    Inductive,
    Record,
    Require,
    Check,
    Eval,
    Fun,
    Forall,
    Prop,
    Type,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "Parameter" => Keyword::Parameter,
            "Axiom" => Keyword::Axiom,
            "Definition" => Keyword::Definition,
            "Theorem" => Keyword::Theorem,
            "Inductive" => Keyword::Inductive,
            "Record" => Keyword::Record,
            "Require" => Keyword::Require,
            "Check" => Keyword::Check,
            "Eval" => Keyword::Eval,
            "fun" => Keyword::Fun,
            "forall" => Keyword::Forall,
            "Prop" => Keyword::Prop,
            "Type" => Keyword::Type,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Parameter => "Parameter",
            Keyword::Axiom => "Axiom",
            Keyword::Definition => "Definition",
            Keyword::Theorem => "Theorem",
            Keyword::Inductive => "Inductive",
            Keyword::Record => "Record",
            Keyword::Require => "Require",
            Keyword::Check => "Check",
            Keyword::Eval => "Eval",
            Keyword::Fun => "fun",
            Keyword::Forall => "forall",
            Keyword::Prop => "Prop",
            Keyword::Type => "Type",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    ColonEq,
    FatArrow,
    Arrow,
    Comma,
    Bar,
    Semi,
    Equals,
    Dot,
}

impl Symbol {
    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::LParen => "(",
            Symbol::RParen => ")",
            Symbol::LBrace => "{",
            Symbol::RBrace => "}",
            Symbol::Colon => ":",
            Symbol::ColonEq => ":=",
            Symbol::FatArrow => "=>",
            Symbol::Arrow => "->",
            Symbol::Comma => ",",
            Symbol::Bar => "|",
            Symbol::Semi => ";",
            Symbol::Equals => "=",
            Symbol::Dot => ".",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Kw(Keyword),
    Sym(Symbol),
    Eof,
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Kw(k) => format!("`{}`", k.as_str()),
            Token::Sym(s) => format!("`{}`", s.as_str()),
            Token::Eof => "end of input".to_string(),
        }
    }
}

struct Cursor<'s> {
    chars: std::iter::Peekable<std::str::Chars<'s>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, column: self.column }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits source text into tokens. Comments `(* ... *)` nest.
pub fn tokenize(text: &str) -> Result<Vec<(Token, Span)>, ParseError> {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, column: 1 };
    let mut out = Vec::new();
    loop {
        while cur.peek().is_some_and(char::is_whitespace) {
            cur.bump();
        }
        let start = cur.pos();
        let Some(c) = cur.bump() else {
            out.push((Token::Eof, Span { start, end: start }));
            return Ok(out);
        };
        let token = match c {
            '(' if cur.peek() == Some('*') => {
                cur.bump();
                skip_comment(&mut cur, start)?;
                continue;
            }
            '(' => Token::Sym(Symbol::LParen),
            ')' => Token::Sym(Symbol::RParen),
            '{' => Token::Sym(Symbol::LBrace),
            '}' => Token::Sym(Symbol::RBrace),
            ',' => Token::Sym(Symbol::Comma),
            '|' => Token::Sym(Symbol::Bar),
            ';' => Token::Sym(Symbol::Semi),
            '.' => Token::Sym(Symbol::Dot),
            ':' if cur.peek() == Some('=') => {
                cur.bump();
                Token::Sym(Symbol::ColonEq)
            }
            ':' => Token::Sym(Symbol::Colon),
            '=' if cur.peek() == Some('>') => {
                cur.bump();
                Token::Sym(Symbol::FatArrow)
            }
            '=' => Token::Sym(Symbol::Equals),
            '-' if cur.peek() == Some('>') => {
                cur.bump();
                Token::Sym(Symbol::Arrow)
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::from(c);
                while let Some(n) = cur.peek().filter(|n| n.is_ascii_alphanumeric() || *n == '_') {
                    s.push(n);
                    cur.bump();
                }
                match Keyword::from_ident(&s) {
                    Some(k) => Token::Kw(k),
                    None => Token::Ident(s),
                }
            }
            other => {
                return Err(ParseError {
                    line: start.line,
                    column: start.column,
                    expected: vec!["a token".to_string()],
                    found: format!("character `{other}`"),
                })
            }
        };
        out.push((token, Span { start, end: cur.pos() }));
    }
}

fn skip_comment(cur: &mut Cursor<'_>, start: Pos) -> Result<(), ParseError> {
    let mut depth = 1;
    while depth > 0 {
        match cur.bump() {
            Some('(') if cur.peek() == Some('*') => {
                cur.bump();
                depth += 1;
            }
            Some('*') if cur.peek() == Some(')') => {
                cur.bump();
                depth -= 1;
            }
            Some(_) => {}
            None => {
                return Err(ParseError {
                    line: start.line,
                    column: start.column,
                    expected: vec!["`*)`".to_string()],
                    found: "end of input inside comment".to_string(),
                })
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Token> {
        tokenize(text).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn symbols_and_keywords() {
        assert_eq!(
            kinds("fun (x : A) => x := -> = ."),
            vec![
                Token::Kw(Keyword::Fun),
                Token::Sym(Symbol::LParen),
                Token::Ident("x".into()),
                Token::Sym(Symbol::Colon),
                Token::Ident("A".into()),
                Token::Sym(Symbol::RParen),
                Token::Sym(Symbol::FatArrow),
                Token::Ident("x".into()),
                Token::Sym(Symbol::ColonEq),
                Token::Sym(Symbol::Arrow),
                Token::Sym(Symbol::Equals),
                Token::Sym(Symbol::Dot),
                Token::Eof,
            ]
        );
    }

    #[test]
    fn nested_comments_are_skipped() {
        assert_eq!(kinds("a (* b (* c *) d *) e"), vec![
            Token::Ident("a".into()),
            Token::Ident("e".into()),
            Token::Eof
        ]);
    }

    #[test]
    fn unterminated_comment_is_an_error() {
        let err = tokenize("x (* (* *)").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("a\n  bc").unwrap();
        assert_eq!(toks[1].1.start, Pos { line: 2, column: 3 });
        assert_eq!(toks[1].1.end, Pos { line: 2, column: 5 });
    }

    #[test]
    fn identifiers_start_with_a_letter() {
        assert!(tokenize("_x").is_err());
        assert_eq!(kinds("nat_rect2"), vec![Token::Ident("nat_rect2".into()), Token::Eof]);
    }
}
