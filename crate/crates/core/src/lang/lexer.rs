use num_bigint::BigInt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// `@name`
    Label(String),
    Int(BigInt),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Colon,
    Dot,
    Bar,
    Arrow,
    EqEq,
    Eq,
    Plus,
    AndAnd,
    Bang,
    At,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '%'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '%' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let err = |msg: String| ParseError { line: l0, col: c0, msg };
        let peek = chars.get(i + 1).copied();
        let tok = if ident_start(c) {
            let mut s = String::new();
            while i < chars.len() && ident_char(chars[i]) {
                s.push(chars[i]);
                bump!();
            }
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        } else if c.is_ascii_digit() || (c == '-' && peek.is_some_and(|d| d.is_ascii_digit())) {
            let mut s = String::new();
            s.push(c);
            bump!();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                bump!();
            }
            let n: BigInt = s.parse().map_err(|_| err(format!("bad integer `{s}`")))?;
            out.push(Token { tok: Tok::Int(n), line: l0, col: c0 });
            continue;
        } else if c == '@' && peek.is_some_and(ident_start) {
            bump!();
            let mut s = String::new();
            while i < chars.len() && ident_char(chars[i]) {
                s.push(chars[i]);
                bump!();
            }
            out.push(Token { tok: Tok::Label(s), line: l0, col: c0 });
            continue;
        } else {
            match (c, peek) {
                ('<', Some('-')) => {
                    bump!();
                    Tok::Arrow
                }
                ('=', Some('=')) => {
                    bump!();
                    Tok::EqEq
                }
                ('&', Some('&')) => {
                    bump!();
                    Tok::AndAnd
                }
                ('(', _) => Tok::LParen,
                (')', _) => Tok::RParen,
                ('{', _) => Tok::LBrace,
                ('}', _) => Tok::RBrace,
                ('[', _) => Tok::LBrack,
                (']', _) => Tok::RBrack,
                (',', _) => Tok::Comma,
                (';', _) => Tok::Semi,
                (':', _) => Tok::Colon,
                ('.', _) => Tok::Dot,
                ('|', _) => Tok::Bar,
                ('=', _) => Tok::Eq,
                ('+', _) => Tok::Plus,
                ('!', _) => Tok::Bang,
                ('@', _) => Tok::At,
                _ => return Err(err(format!("unexpected character `{c}`"))),
            }
        };
        bump!();
        out.push(Token { tok, line: l0, col: c0 });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Cursor over a token stream shared by the expression and trace parsers.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Cursor, ParseError> {
        Ok(Cursor { toks: lex(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError { line: t.line, col: t.col, msg: msg.into() }
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", show(t), show(self.peek()))))
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", show(self.peek()))))
        }
    }

    pub fn expect_eof(&mut self) -> Result<(), ParseError> {
        self.expect(&Tok::Eof)
    }
}

pub fn show(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Label(s) => format!("`@{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Arrow => "`<-`".into(),
        Tok::EqEq => "`==`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Plus => "`+`".into(),
        Tok::AndAnd => "`&&`".into(),
        Tok::Bang => "`!`".into(),
        Tok::At => "`@`".into(),
        Tok::Eof => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_trace_and_expression_tokens() {
        let toks: Vec<Tok> = lex("l12' <- proj_C(r1,r13); @%3 == -4").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("l12'".into()),
                Tok::Arrow,
                Tok::Ident("proj_C".into()),
                Tok::LParen,
                Tok::Ident("r1".into()),
                Tok::Comma,
                Tok::Ident("r13".into()),
                Tok::RParen,
                Tok::Semi,
                Tok::Label("%3".into()),
                Tok::EqEq,
                Tok::Int((-4).into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn reports_position() {
        let e = lex("x +\n  $").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }
}
