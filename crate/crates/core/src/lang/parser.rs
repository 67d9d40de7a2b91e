use std::collections::BTreeMap;

use num_traits::Signed;

use super::lexer::{show, Cursor, ParseError, Tok};
use super::surface::Expr;
use super::Type;
use crate::store::Label;

pub const KEYWORDS: &[&str] =
    &["let", "in", "if", "then", "else", "true", "false", "union", "for", "sum", "empty", "int", "bool"];

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut c = Cursor::new(src)?;
    let e = expr(&mut c)?;
    c.expect_eof()?;
    Ok(e)
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut c = Cursor::new(src)?;
    let t = ty(&mut c)?;
    c.expect_eof()?;
    Ok(t)
}

pub(crate) fn ty(c: &mut Cursor) -> Result<Type, ParseError> {
    if c.eat_keyword("int") {
        return Ok(Type::Int);
    }
    if c.eat_keyword("bool") {
        return Ok(Type::Bool);
    }
    if c.eat(&Tok::LBrace) {
        let t = ty(c)?;
        c.expect(&Tok::RBrace)?;
        return Ok(Type::coll(t));
    }
    if c.eat(&Tok::LParen) {
        let mut fields = BTreeMap::new();
        loop {
            let name = field_name(c)?;
            c.expect(&Tok::Colon)?;
            let t = ty(c)?;
            if fields.insert(name.clone(), t).is_some() {
                return Err(c.error(format!("duplicate field `{name}`")));
            }
            if !c.eat(&Tok::Comma) {
                break;
            }
        }
        c.expect(&Tok::RParen)?;
        return Ok(Type::Record(fields));
    }
    Err(c.error(format!("expected a type, found {}", show(c.peek()))))
}

fn field_name(c: &mut Cursor) -> Result<String, ParseError> {
    match c.peek().clone() {
        Tok::Ident(s) => {
            c.next();
            Ok(s)
        }
        Tok::Int(n) if !n.is_negative() => {
            c.next();
            Ok(n.to_string())
        }
        t => Err(c.error(format!("expected a field name, found {}", show(&t)))),
    }
}

fn var(c: &mut Cursor) -> Result<String, ParseError> {
    match c.peek().clone() {
        Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
            c.next();
            Ok(s)
        }
        t => Err(c.error(format!("expected a variable, found {}", show(&t)))),
    }
}

fn starts_field(c: &Cursor) -> bool {
    matches!(c.peek_at(1), Tok::Ident(_) | Tok::Int(_)) && matches!(c.peek_at(2), Tok::Colon)
}

pub(crate) fn expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    if c.eat_keyword("let") {
        let x = var(c)?;
        c.expect(&Tok::Eq)?;
        let e1 = expr(c)?;
        c.expect_keyword("in")?;
        let e2 = expr(c)?;
        return Ok(Expr::Let(x, Box::new(e1), Box::new(e2)));
    }
    if c.eat_keyword("if") {
        let b = expr(c)?;
        c.expect_keyword("then")?;
        let t = expr(c)?;
        c.expect_keyword("else")?;
        let f = expr(c)?;
        return Ok(Expr::If(Box::new(b), Box::new(t), Box::new(f)));
    }
    for kw in ["for", "sum"] {
        if c.eat_keyword(kw) {
            c.expect(&Tok::LParen)?;
            let x = var(c)?;
            c.expect_keyword("in")?;
            let e0 = expr(c)?;
            c.expect(&Tok::RParen)?;
            let e = expr(c)?;
            return Ok(if kw == "for" {
                Expr::For(x, Box::new(e0), Box::new(e))
            } else {
                Expr::Sum(x, Box::new(e0), Box::new(e))
            });
        }
    }
    union(c)
}

fn union(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = and(c)?;
    while c.eat_keyword("union") {
        e = Expr::Union(Box::new(e), Box::new(and(c)?));
    }
    Ok(e)
}

fn and(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = eq(c)?;
    while c.eat(&Tok::AndAnd) {
        e = Expr::And(Box::new(e), Box::new(eq(c)?));
    }
    Ok(e)
}

fn eq(c: &mut Cursor) -> Result<Expr, ParseError> {
    let e = plus(c)?;
    if c.eat(&Tok::EqEq) {
        let r = plus(c)?;
        if matches!(c.peek(), Tok::EqEq) {
            return Err(c.error("`==` does not associate; add parentheses"));
        }
        return Ok(Expr::Eq(Box::new(e), Box::new(r)));
    }
    Ok(e)
}

fn plus(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = not(c)?;
    while c.eat(&Tok::Plus) {
        e = Expr::Plus(Box::new(e), Box::new(not(c)?));
    }
    Ok(e)
}

fn not(c: &mut Cursor) -> Result<Expr, ParseError> {
    if c.eat(&Tok::Bang) {
        return Ok(Expr::Not(Box::new(not(c)?)));
    }
    postfix(c)
}

fn postfix(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut e = atom(c)?;
    while c.eat(&Tok::Dot) {
        e = Expr::Field(Box::new(e), field_name(c)?);
    }
    Ok(e)
}

fn record_fields(c: &mut Cursor, close: &Tok) -> Result<Vec<(String, Expr)>, ParseError> {
    let mut fields: Vec<(String, Expr)> = Vec::new();
    loop {
        let name = field_name(c)?;
        if fields.iter().any(|(n, _)| *n == name) {
            return Err(c.error(format!("duplicate field `{name}`")));
        }
        c.expect(&Tok::Colon)?;
        fields.push((name, expr(c)?));
        if !c.eat(&Tok::Comma) {
            break;
        }
    }
    c.expect(close)?;
    Ok(fields)
}

fn atom(c: &mut Cursor) -> Result<Expr, ParseError> {
    // a binder form in operand position extends as far right as possible
    if ["let", "if", "for", "sum"].iter().any(|kw| c.is_keyword(kw)) {
        return expr(c);
    }
    match c.peek().clone() {
        Tok::Int(n) => {
            c.next();
            Ok(Expr::Int(n))
        }
        Tok::Label(l) => {
            c.next();
            if !Label::is_valid_name(&l) {
                return Err(c.error(format!("`{l}` is not a valid label")));
            }
            Ok(Expr::Lab(Label::new(l)))
        }
        Tok::Ident(s) if s == "true" || s == "false" => {
            c.next();
            Ok(Expr::Bool(s == "true"))
        }
        Tok::Ident(s) if s == "empty" => {
            c.next();
            c.expect(&Tok::LParen)?;
            let e = expr(c)?;
            c.expect(&Tok::RParen)?;
            Ok(Expr::IsEmpty(Box::new(e)))
        }
        Tok::Ident(_) => Ok(Expr::Var(var(c)?)),
        Tok::LParen => {
            if starts_field(c) {
                c.next();
                return Ok(Expr::Record(record_fields(c, &Tok::RParen)?));
            }
            c.next();
            let e = expr(c)?;
            if c.eat(&Tok::Colon) {
                if e != Expr::Empty(None) {
                    return Err(c.error("only `{}` takes a type annotation"));
                }
                let t = ty(c)?;
                let Type::Coll(elem) = t else {
                    return Err(c.error("`{}` must be annotated with a collection type"));
                };
                c.expect(&Tok::RParen)?;
                return Ok(Expr::Empty(Some(*elem)));
            }
            c.expect(&Tok::RParen)?;
            Ok(e)
        }
        Tok::LBrace => {
            if starts_field(c) {
                c.next();
                return Ok(Expr::Record(record_fields(c, &Tok::RBrace)?));
            }
            c.next();
            if c.eat(&Tok::RBrace) {
                return Ok(Expr::Empty(None));
            }
            let e = expr(c)?;
            if c.eat(&Tok::Bar) {
                let x = var(c)?;
                c.expect_keyword("in")?;
                let e0 = expr(c)?;
                c.expect(&Tok::RBrace)?;
                return Ok(Expr::Comprehension(Box::new(e), x, Box::new(e0)));
            }
            c.expect(&Tok::RBrace)?;
            Ok(Expr::Singleton(Box::new(e)))
        }
        t => Err(c.error(format!("expected an expression, found {}", show(&t)))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn conditional_from_the_introduction() {
        let e = parse("if x == 5 then y + 42 else x").unwrap();
        assert_eq!(
            e,
            Expr::If(
                b(Expr::Eq(b(Expr::var("x")), b(Expr::int(5)))),
                b(Expr::Plus(b(Expr::var("y")), b(Expr::int(42)))),
                b(Expr::var("x"))
            )
        );
    }

    #[test]
    fn braces() {
        assert_eq!(parse("{}").unwrap(), Expr::Empty(None));
        assert_eq!(parse("({} : {int})").unwrap(), Expr::Empty(Some(Type::Int)));
        assert_eq!(parse("{1}").unwrap(), Expr::Singleton(b(Expr::int(1))));
        assert_eq!(parse("{A: 1}").unwrap(), Expr::Record(vec![("A".into(), Expr::int(1))]));
        assert_eq!(parse("(A: 1)").unwrap(), Expr::Record(vec![("A".into(), Expr::int(1))]));
        assert_eq!(
            parse("{x.B | x in R}").unwrap(),
            Expr::Comprehension(b(Expr::Field(b(Expr::var("x")), "B".into())), "x".into(), b(Expr::var("R")))
        );
        assert!(matches!(parse("{{A: 1}}").unwrap(), Expr::Singleton(r) if matches!(*r, Expr::Record(_))));
    }

    #[test]
    fn precedence() {
        let e = parse("a union b && c == d + e.A").unwrap();
        assert_eq!(e.to_string(), "a union b && c == d + e.A");
        let Expr::Union(_, r) = e else { panic!() };
        assert!(matches!(*r, Expr::And(..)));
        assert_eq!(parse("!a.B").unwrap(), Expr::Not(b(Expr::Field(b(Expr::var("a")), "B".into()))));
        assert_eq!(parse("(1 + 2) + 3").unwrap().to_string(), "1 + 2 + 3");
        assert_eq!(parse("1 + (2 + 3)").unwrap().to_string(), "1 + (2 + 3)");
        assert_eq!(parse("x + (let y = 1 in y)").unwrap().to_string(), "x + (let y = 1 in y)");
        assert_eq!(parse("x + let y = 1 in y + 2").unwrap().to_string(), "x + (let y = 1 in y + 2)");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("let x = 1 in\n  x +").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse("a == b == c").is_err());
        assert!(parse("{A: 1, A: 2}").is_err());
        assert!(parse("(1 : {int})").is_err());
        assert!(parse("let in = 1 in 2").is_err());
    }

    #[test]
    fn query_one_parses() {
        let q1 = "for (r in R) for (s in S) if r.C == s.C then {{A: r.A, B: r.B, D: s.D}} else {}";
        let e = parse(q1).unwrap();
        assert_eq!(e.to_string(), q1);
        assert_eq!(e.free_vars().into_iter().collect::<Vec<_>>(), vec!["R", "S"]);
    }

    #[test]
    fn types() {
        assert_eq!(parse_type("{(A: int, B: {bool})}").unwrap().to_string(), "{(A: int, B: {bool})}");
        assert!(parse_type("(A: int, A: int)").is_err());
    }
}
