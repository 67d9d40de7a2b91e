use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use super::Type;
use crate::store::Label;

/// Surface expressions, including comprehension sugar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Lab(Label),
    Int(BigInt),
    Bool(bool),
    Let(String, Box<Expr>, Box<Expr>),
    /// Fields in source order; names are distinct.
    Record(Vec<(String, Expr)>),
    Field(Box<Expr>, String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Plus(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Empty(Option<Type>),
    Singleton(Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    IsEmpty(Box<Expr>),
    /// `for (x in e0) e`: the big union.
    For(String, Box<Expr>, Box<Expr>),
    Sum(String, Box<Expr>, Box<Expr>),
    /// `{e | x in e0}`.
    Comprehension(Box<Expr>, String, Box<Expr>),
}

impl Expr {
    pub fn var(x: &str) -> Expr {
        Expr::Var(x.to_string())
    }

    pub fn lab(l: &str) -> Expr {
        Expr::Lab(Label::new(l))
    }

    pub fn int(i: i64) -> Expr {
        Expr::Int(i.into())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let under = |x: &String, body: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>| {
            bound.push(x.clone());
            body.collect_free(bound, out);
            bound.pop();
        };
        match self {
            Expr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Expr::Lab(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Empty(_) => {}
            Expr::Let(x, e1, e2) => {
                e1.collect_free(bound, out);
                under(x, e2, bound, out);
            }
            Expr::For(x, e0, e) | Expr::Sum(x, e0, e) | Expr::Comprehension(e, x, e0) => {
                e0.collect_free(bound, out);
                under(x, e, bound, out);
            }
            _ => self.children().into_iter().for_each(|c| c.collect_free(bound, out)),
        }
    }

    /// Immediate subexpressions, in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Var(_) | Expr::Lab(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Empty(_) => vec![],
            Expr::Let(_, a, b)
            | Expr::And(a, b)
            | Expr::Plus(a, b)
            | Expr::Eq(a, b)
            | Expr::Union(a, b)
            | Expr::For(_, a, b)
            | Expr::Sum(_, a, b) => vec![a, b],
            Expr::Comprehension(e, _, e0) => vec![e0, e],
            Expr::Record(fs) => fs.iter().map(|(_, e)| e).collect(),
            Expr::Field(e, _) | Expr::Not(e) | Expr::Singleton(e) | Expr::IsEmpty(e) => vec![e],
            Expr::If(c, t, f) => vec![c, t, f],
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_all_vars(&mut out);
        out
    }

    fn collect_all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Let(x, ..) | Expr::For(x, ..) | Expr::Sum(x, ..) | Expr::Comprehension(_, x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_all_vars(out);
        }
    }

    /// Replaces free occurrences of variables by labels. Labels cannot be
    /// captured, so no renaming is needed.
    pub fn subst_labels(&self, env: &dyn Fn(&str) -> Option<Label>) -> Expr {
        self.subst_under(env, &mut Vec::new())
    }

    fn subst_under(&self, env: &dyn Fn(&str) -> Option<Label>, bound: &mut Vec<String>) -> Expr {
        let go = |e: &Expr, bound: &mut Vec<String>| Box::new(e.subst_under(env, bound));
        let go_under = |x: &String, e: &Expr, bound: &mut Vec<String>| {
            bound.push(x.clone());
            let r = Box::new(e.subst_under(env, bound));
            bound.pop();
            r
        };
        match self {
            Expr::Var(x) if !bound.contains(x) => match env(x) {
                Some(l) => Expr::Lab(l),
                None => self.clone(),
            },
            Expr::Var(_) | Expr::Lab(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Empty(_) => self.clone(),
            Expr::Let(x, a, b) => Expr::Let(x.clone(), go(a, bound), go_under(x, b, bound)),
            Expr::For(x, a, b) => Expr::For(x.clone(), go(a, bound), go_under(x, b, bound)),
            Expr::Sum(x, a, b) => Expr::Sum(x.clone(), go(a, bound), go_under(x, b, bound)),
            Expr::Comprehension(e, x, e0) => Expr::Comprehension(go_under(x, e, bound), x.clone(), go(e0, bound)),
            Expr::Record(fs) => Expr::Record(fs.iter().map(|(f, e)| (f.clone(), *go(e, bound))).collect()),
            Expr::Field(e, f) => Expr::Field(go(e, bound), f.clone()),
            Expr::Not(e) => Expr::Not(go(e, bound)),
            Expr::Singleton(e) => Expr::Singleton(go(e, bound)),
            Expr::IsEmpty(e) => Expr::IsEmpty(go(e, bound)),
            Expr::And(a, b) => Expr::And(go(a, bound), go(b, bound)),
            Expr::Plus(a, b) => Expr::Plus(go(a, bound), go(b, bound)),
            Expr::Eq(a, b) => Expr::Eq(go(a, bound), go(b, bound)),
            Expr::Union(a, b) => Expr::Union(go(a, bound), go(b, bound)),
            Expr::If(c, t, f) => Expr::If(go(c, bound), go(t, bound), go(f, bound)),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

// Precedence levels, loosest first.
const TOP: u8 = 0;
const UNION: u8 = 1;
const AND: u8 = 2;
const EQ: u8 = 3;
const PLUS: u8 = 4;
const NOT: u8 = 5;
const POSTFIX: u8 = 6;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Let(..) | Expr::If(..) | Expr::For(..) | Expr::Sum(..) => TOP,
        Expr::Union(..) => UNION,
        Expr::And(..) => AND,
        Expr::Eq(..) => EQ,
        Expr::Plus(..) => PLUS,
        Expr::Not(..) => NOT,
        Expr::Field(..) => POSTFIX,
        _ => POSTFIX + 1,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if level(e) < min {
        f.write_str("(")?;
        write_at(f, e, TOP)?;
        return f.write_str(")");
    }
    let bin = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, lvl: u8, right: u8| {
        write_at(f, a, lvl)?;
        write!(f, " {op} ")?;
        write_at(f, b, right)
    };
    match e {
        Expr::Var(x) => f.write_str(x),
        Expr::Lab(l) => write!(f, "@{l}"),
        Expr::Int(i) => write!(f, "{i}"),
        Expr::Bool(b) => write!(f, "{b}"),
        Expr::Let(x, a, b) => {
            write!(f, "let {x} = ")?;
            write_at(f, a, TOP)?;
            f.write_str(" in ")?;
            write_at(f, b, TOP)
        }
        Expr::Record(fs) => {
            f.write_str("{")?;
            for (i, (n, e)) in fs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{n}: ")?;
                write_at(f, e, TOP)?;
            }
            f.write_str("}")
        }
        Expr::Field(e, n) => {
            write_at(f, e, POSTFIX)?;
            write!(f, ".{n}")
        }
        Expr::Not(e) => {
            f.write_str("!")?;
            write_at(f, e, NOT)
        }
        Expr::And(a, b) => bin(f, a, "&&", b, AND, AND + 1),
        Expr::Plus(a, b) => bin(f, a, "+", b, PLUS, PLUS + 1),
        Expr::Eq(a, b) => bin(f, a, "==", b, EQ + 1, EQ + 1),
        Expr::Union(a, b) => bin(f, a, "union", b, UNION, UNION + 1),
        Expr::If(c, t, e) => {
            f.write_str("if ")?;
            write_at(f, c, TOP)?;
            f.write_str(" then ")?;
            write_at(f, t, TOP)?;
            f.write_str(" else ")?;
            write_at(f, e, TOP)
        }
        Expr::Empty(None) => f.write_str("{}"),
        Expr::Empty(Some(t)) => write!(f, "({{}} : {{{t}}})"),
        Expr::Singleton(e) => {
            f.write_str("{")?;
            write_at(f, e, TOP)?;
            f.write_str("}")
        }
        Expr::IsEmpty(e) => {
            f.write_str("empty(")?;
            write_at(f, e, TOP)?;
            f.write_str(")")
        }
        Expr::For(x, e0, e) => binder(f, "for", x, e0, e),
        Expr::Sum(x, e0, e) => binder(f, "sum", x, e0, e),
        Expr::Comprehension(e, x, e0) => {
            f.write_str("{")?;
            write_at(f, e, TOP)?;
            write!(f, " | {x} in ")?;
            write_at(f, e0, TOP)?;
            f.write_str("}")
        }
    }
}

fn binder(f: &mut fmt::Formatter<'_>, kw: &str, x: &str, e0: &Expr, e: &Expr) -> fmt::Result {
    write!(f, "{kw} ({x} in ")?;
    write_at(f, e0, TOP)?;
    f.write_str(") ")?;
    write_at(f, e, TOP)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, TOP)
    }
}
