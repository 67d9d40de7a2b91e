use std::collections::BTreeMap;
use std::fmt::{self, Write};

use num_traits::{Signed, ToPrimitive};

use super::model::{IterKind, Theta, Trace};
use crate::lang::lexer::{show, Cursor, ParseError, Tok};
use crate::lang::parser::{expr, ty};
use crate::lang::CoreExpr;
use crate::store::{Label, Term};

/// Textual form of a trace term.
pub fn term_text(t: &Term<Label>, annotations: bool) -> String {
    match t {
        Term::Int(i) => i.to_string(),
        Term::Bool(b) => if *b { "t" } else { "f" }.to_string(),
        Term::Plus(a, b) => format!("{a} + {b}"),
        Term::Eq(a, b) => format!("{a} = {b}"),
        Term::And(a, b) => format!("{a} && {b}"),
        Term::Not(a) => format!("!{a}"),
        Term::Record(fs) => {
            let parts: Vec<String> = fs.iter().map(|(n, l)| format!("{n}:{l}")).collect();
            format!("({})", parts.join(","))
        }
        Term::Copy(l) => l.to_string(),
        Term::Empty(Some(ty)) if annotations => format!("({{}} : {{{ty}}})"),
        Term::Empty(_) => "{}".to_string(),
        Term::Singleton(l) => format!("{{{l}}}"),
        Term::Union(a, b) => format!("{a} U {b}"),
        Term::IsEmpty(l) => format!("empty({l})"),
    }
}

struct Printer {
    out: String,
    annotations: bool,
}

impl Printer {
    fn newline(&mut self, indent: usize) {
        self.out.push('\n');
        self.out.extend(std::iter::repeat(' ').take(indent));
    }

    /// Right-nested sequences print as flat step lists; a sequence in
    /// first position is parenthesized so that parsing restores it.
    fn trace(&mut self, t: &Trace, indent: usize) {
        match t {
            Trace::Seq { first, second } => {
                if let Trace::Seq { .. } = first.as_ref() {
                    self.out.push('(');
                    self.trace(first, indent + 1);
                    self.out.push(')');
                } else {
                    self.step(first, indent);
                }
                self.out.push(';');
                self.newline(indent);
                self.trace(second, indent);
            }
            _ => self.step(t, indent),
        }
    }

    fn step(&mut self, t: &Trace, indent: usize) {
        match t {
            Trace::Assign { out, term } => {
                let _ = write!(self.out, "{out} <- {}", term_text(term, self.annotations));
            }
            Trace::Proj { out, field, rec, src } => {
                let _ = write!(self.out, "{out} <- proj_{field}({rec},{src})");
            }
            Trace::Seq { .. } => unreachable!("sequences are printed by `trace`"),
            Trace::Cond { out, test, branch, body, then_e, else_e } => {
                let _ = write!(self.out, "cond({test},{},", if *branch { "t" } else { "f" });
                let inner = indent + 2;
                if body.steps().len() > 1 {
                    self.newline(inner);
                } else {
                    self.out.push(' ');
                }
                self.trace(body, inner);
                if self.annotations {
                    if let (Some(et), Some(ef)) = (then_e, else_e) {
                        let _ = write!(self.out, " | {et} | {ef}");
                    }
                    let _ = write!(self.out, ") @ {out}");
                } else {
                    self.out.push(')');
                }
            }
            Trace::Iter { iter, out, src, theta, binder } => {
                let _ = write!(self.out, "{out} <- {}({src},{{", iter.keyword());
                for (i, (l, (t, m))) in theta.iter().enumerate() {
                    if i > 0 {
                        self.out.push(',');
                    }
                    self.newline(indent + 2);
                    let _ = write!(self.out, "[{l}] ");
                    self.trace(t, indent + 4);
                    if *m != 1 {
                        let _ = write!(self.out, " : {m}");
                    }
                }
                if !theta.is_empty() {
                    self.newline(indent);
                }
                self.out.push('}');
                if self.annotations {
                    if let Some((x, e)) = binder {
                        let _ = write!(self.out, ", {x}. {e}");
                    }
                }
                self.out.push(')');
            }
        }
    }
}

/// Multi-line rendering. Without annotations the output follows the
/// compact style of hand-written traces (no branch or body expressions,
/// no element types on empty collections).
pub fn print_trace(t: &Trace, annotations: bool) -> String {
    let mut p = Printer { out: String::new(), annotations };
    p.trace(t, 0);
    p.out
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_trace(self, true))
    }
}

pub fn parse_trace(src: &str) -> Result<Trace, ParseError> {
    let mut c = Cursor::new(src)?;
    let t = trace(&mut c)?;
    c.expect_eof()?;
    Ok(t)
}

fn trace(c: &mut Cursor) -> Result<Trace, ParseError> {
    let first = step(c)?;
    if c.eat(&Tok::Semi) {
        let rest = trace(c)?;
        return Ok(Trace::seq(first, rest));
    }
    Ok(first)
}

fn label(c: &mut Cursor) -> Result<Label, ParseError> {
    match c.peek().clone() {
        Tok::Ident(s) | Tok::Label(s) if Label::is_valid_name(&s) => {
            c.next();
            Ok(Label::new(s))
        }
        t => Err(c.error(format!("expected a label, found {}", show(&t)))),
    }
}

fn boolean(c: &mut Cursor) -> Result<bool, ParseError> {
    match c.peek().clone() {
        Tok::Ident(s) if s == "t" || s == "true" => {
            c.next();
            Ok(true)
        }
        Tok::Ident(s) if s == "f" || s == "false" => {
            c.next();
            Ok(false)
        }
        t => Err(c.error(format!("expected `t` or `f`, found {}", show(&t)))),
    }
}

fn core_expr(c: &mut Cursor) -> Result<CoreExpr, ParseError> {
    let e = expr(c)?;
    CoreExpr::from_surface_exact(&e).ok_or_else(|| c.error(format!("annotation `{e}` is not in A-normal form")))
}

fn step(c: &mut Cursor) -> Result<Trace, ParseError> {
    if c.eat(&Tok::LParen) {
        let t = trace(c)?;
        c.expect(&Tok::RParen)?;
        return Ok(t);
    }
    if c.is_keyword("cond") && matches!(c.peek_at(1), Tok::LParen) {
        c.next();
        c.next();
        let test = label(c)?;
        c.expect(&Tok::Comma)?;
        let branch = boolean(c)?;
        c.expect(&Tok::Comma)?;
        let body = trace(c)?;
        let (mut then_e, mut else_e) = (None, None);
        if c.eat(&Tok::Bar) {
            then_e = Some(core_expr(c)?);
            c.expect(&Tok::Bar)?;
            else_e = Some(core_expr(c)?);
        }
        c.expect(&Tok::RParen)?;
        let out = if c.eat(&Tok::At) {
            label(c)?
        } else if let Tok::Label(_) = c.peek() {
            label(c)?
        } else {
            body.out().clone()
        };
        return Ok(Trace::Cond { out, test, branch, body: Box::new(body), then_e, else_e });
    }
    let out = label(c)?;
    c.expect(&Tok::Arrow)?;
    if let Tok::Ident(s) = c.peek().clone() {
        if let Some(field) = s.strip_prefix("proj_") {
            c.next();
            c.expect(&Tok::LParen)?;
            let rec = label(c)?;
            c.expect(&Tok::Comma)?;
            let src = label(c)?;
            c.expect(&Tok::RParen)?;
            return Ok(Trace::Proj { out, field: field.to_string(), rec, src });
        }
        let iter = match s.as_str() {
            "comp" => Some(IterKind::Comp),
            "sum" => Some(IterKind::Sum),
            _ => None,
        };
        if let (Some(iter), Tok::LParen) = (iter, c.peek_at(1)) {
            c.next();
            c.next();
            let src = label(c)?;
            c.expect(&Tok::Comma)?;
            let theta = entries(c)?;
            let binder = if c.eat(&Tok::Comma) {
                let x = match c.next() {
                    Tok::Ident(x) => x,
                    t => return Err(c.error(format!("expected a variable, found {}", show(&t)))),
                };
                c.expect(&Tok::Dot)?;
                Some((x, core_expr(c)?))
            } else {
                None
            };
            c.expect(&Tok::RParen)?;
            return Ok(Trace::Iter { iter, out, src, theta, binder });
        }
    }
    Ok(Trace::Assign { out, term: term(c)? })
}

fn entries(c: &mut Cursor) -> Result<Theta, ParseError> {
    c.expect(&Tok::LBrace)?;
    let mut theta = Theta::new();
    if c.eat(&Tok::RBrace) {
        return Ok(theta);
    }
    loop {
        c.expect(&Tok::LBrack)?;
        let l = label(c)?;
        c.expect(&Tok::RBrack)?;
        let t = trace(c)?;
        let m = if c.eat(&Tok::Colon) {
            match c.next() {
                Tok::Int(n) if n.is_positive() => n.to_u64().ok_or_else(|| c.error("multiplicity too large"))?,
                t => return Err(c.error(format!("expected a positive multiplicity, found {}", show(&t)))),
            }
        } else {
            1
        };
        if theta.insert(l.clone(), (t, m)).is_some() {
            return Err(c.error(format!("input label `{l}` occurs twice")));
        }
        if !c.eat(&Tok::Comma) {
            break;
        }
    }
    c.expect(&Tok::RBrace)?;
    Ok(theta)
}

fn term(c: &mut Cursor) -> Result<Term<Label>, ParseError> {
    match c.peek().clone() {
        Tok::Int(n) => {
            c.next();
            return Ok(Term::Int(n));
        }
        Tok::Ident(s) if matches!(s.as_str(), "t" | "f" | "true" | "false") => {
            return Ok(Term::Bool(boolean(c)?));
        }
        Tok::Bang => {
            c.next();
            return Ok(Term::Not(label(c)?));
        }
        Tok::Ident(s) if s == "empty" => {
            c.next();
            c.expect(&Tok::LParen)?;
            let l = label(c)?;
            c.expect(&Tok::RParen)?;
            return Ok(Term::IsEmpty(l));
        }
        Tok::LBrace => {
            c.next();
            if c.eat(&Tok::RBrace) {
                return Ok(Term::Empty(None));
            }
            let l = label(c)?;
            c.expect(&Tok::RBrace)?;
            return Ok(Term::Singleton(l));
        }
        Tok::LParen => {
            c.next();
            if c.eat(&Tok::LBrace) {
                c.expect(&Tok::RBrace)?;
                c.expect(&Tok::Colon)?;
                let t = ty(c)?;
                c.expect(&Tok::RParen)?;
                return match t {
                    crate::lang::Type::Coll(elem) => Ok(Term::Empty(Some(*elem))),
                    other => Err(c.error(format!("`{{}}` annotated with non-collection type {other}"))),
                };
            }
            let mut fields = BTreeMap::new();
            loop {
                let name = match c.next() {
                    Tok::Ident(s) => s,
                    Tok::Int(n) if !n.is_negative() => n.to_string(),
                    t => return Err(c.error(format!("expected a field name, found {}", show(&t)))),
                };
                c.expect(&Tok::Colon)?;
                let l = label(c)?;
                if fields.insert(name.clone(), l).is_some() {
                    return Err(c.error(format!("duplicate field `{name}`")));
                }
                if !c.eat(&Tok::Comma) {
                    break;
                }
            }
            c.expect(&Tok::RParen)?;
            return Ok(Term::Record(fields));
        }
        _ => {}
    }
    let a = label(c)?;
    let op = match c.peek() {
        Tok::Plus => 0,
        Tok::Eq | Tok::EqEq => 1,
        Tok::AndAnd => 2,
        Tok::Ident(s) if s == "U" || s == "union" => 3,
        _ => return Ok(Term::Copy(a)),
    };
    c.next();
    let b = label(c)?;
    Ok(match op {
        0 => Term::Plus(a, b),
        1 => Term::Eq(a, b),
        2 => Term::And(a, b),
        _ => Term::Union(a, b),
    })
}
