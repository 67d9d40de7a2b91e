use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::surface::Expr;
use crate::store::{Label, Term};

/// Operand of an A-normal expression.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Atom {
    Var(String),
    Lab(Label),
}

impl Atom {
    pub fn var(x: &str) -> Atom {
        Atom::Var(x.to_string())
    }

    pub fn lab(l: &str) -> Atom {
        Atom::Lab(Label::new(l))
    }

    pub fn as_label(&self) -> Option<&Label> {
        match self {
            Atom::Lab(l) => Some(l),
            Atom::Var(_) => None,
        }
    }

    fn subst(&self, x: &str, l: &Label) -> Atom {
        match self {
            Atom::Var(y) if y == x => Atom::Lab(l.clone()),
            a => a.clone(),
        }
    }

    fn to_surface(&self) -> Expr {
        match self {
            Atom::Var(x) => Expr::Var(x.clone()),
            Atom::Lab(l) => Expr::Lab(l.clone()),
        }
    }

    fn from_surface(e: &Expr) -> Option<Atom> {
        match e {
            Expr::Var(x) => Some(Atom::Var(x.clone())),
            Expr::Lab(l) => Some(Atom::Lab(l.clone())),
            _ => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(x) => f.write_str(x),
            Atom::Lab(l) => write!(f, "@{l}"),
        }
    }
}

/// A-normal expressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoreExpr {
    Term(Term<Atom>),
    Let(String, Box<CoreExpr>, Box<CoreExpr>),
    If(Atom, Box<CoreExpr>, Box<CoreExpr>),
    Proj(String, Atom),
    Comp(String, Atom, Box<CoreExpr>),
    Sum(String, Atom, Box<CoreExpr>),
}

impl CoreExpr {
    /// `e[l/x]`.
    pub fn subst(&self, x: &str, l: &Label) -> CoreExpr {
        let a = |w: &Atom| w.subst(x, l);
        match self {
            CoreExpr::Term(t) => CoreExpr::Term(t.map(a)),
            CoreExpr::Let(y, e1, e2) => {
                let e2 = if y == x { e2.clone() } else { Box::new(e2.subst(x, l)) };
                CoreExpr::Let(y.clone(), Box::new(e1.subst(x, l)), e2)
            }
            CoreExpr::If(w, t, f) => CoreExpr::If(a(w), Box::new(t.subst(x, l)), Box::new(f.subst(x, l))),
            CoreExpr::Proj(field, w) => CoreExpr::Proj(field.clone(), a(w)),
            CoreExpr::Comp(y, w, e) | CoreExpr::Sum(y, w, e) => {
                let body = if y == x { e.clone() } else { Box::new(e.subst(x, l)) };
                match self {
                    CoreExpr::Comp(..) => CoreExpr::Comp(y.clone(), a(w), body),
                    _ => CoreExpr::Sum(y.clone(), a(w), body),
                }
            }
        }
    }

    /// Renames every label occurring in the expression.
    pub fn map_labels(&self, f: &dyn Fn(&Label) -> Label) -> CoreExpr {
        let a = |w: &Atom| match w {
            Atom::Lab(l) => Atom::Lab(f(l)),
            w => w.clone(),
        };
        let go = |e: &CoreExpr| Box::new(e.map_labels(f));
        match self {
            CoreExpr::Term(t) => CoreExpr::Term(t.map(a)),
            CoreExpr::Let(y, e1, e2) => CoreExpr::Let(y.clone(), go(e1), go(e2)),
            CoreExpr::If(w, t, e) => CoreExpr::If(a(w), go(t), go(e)),
            CoreExpr::Proj(field, w) => CoreExpr::Proj(field.clone(), a(w)),
            CoreExpr::Comp(y, w, e) => CoreExpr::Comp(y.clone(), a(w), go(e)),
            CoreExpr::Sum(y, w, e) => CoreExpr::Sum(y.clone(), a(w), go(e)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut Vec::new(), &mut out, &mut BTreeSet::new());
        out
    }

    /// Labels mentioned anywhere in the expression.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect(&mut Vec::new(), &mut BTreeSet::new(), &mut out);
        out
    }

    fn collect(&self, bound: &mut Vec<String>, vars: &mut BTreeSet<String>, labs: &mut BTreeSet<Label>) {
        let mut atom = |w: &Atom, bound: &Vec<String>| match w {
            Atom::Var(x) if !bound.contains(x) => {
                vars.insert(x.clone());
            }
            Atom::Var(_) => {}
            Atom::Lab(l) => {
                labs.insert(l.clone());
            }
        };
        match self {
            CoreExpr::Term(t) => t.args().into_iter().for_each(|w| atom(w, bound)),
            CoreExpr::Proj(_, w) => atom(w, bound),
            CoreExpr::If(w, t, f) => {
                atom(w, bound);
                t.collect(bound, vars, labs);
                f.collect(bound, vars, labs);
            }
            CoreExpr::Let(x, e1, e2) => {
                e1.collect(bound, vars, labs);
                bound.push(x.clone());
                e2.collect(bound, vars, labs);
                bound.pop();
            }
            CoreExpr::Comp(x, w, e) | CoreExpr::Sum(x, w, e) => {
                atom(w, bound);
                bound.push(x.clone());
                e.collect(bound, vars, labs);
                bound.pop();
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            CoreExpr::Term(_) | CoreExpr::Proj(..) => 1,
            CoreExpr::Let(_, a, b) | CoreExpr::If(_, a, b) => 1 + a.size() + b.size(),
            CoreExpr::Comp(_, _, e) | CoreExpr::Sum(_, _, e) => 1 + e.size(),
        }
    }

    pub fn to_surface(&self) -> Expr {
        let b = |e: &CoreExpr| Box::new(e.to_surface());
        let w = |a: &Atom| Box::new(a.to_surface());
        match self {
            CoreExpr::Term(t) => match t {
                Term::Int(i) => Expr::Int(i.clone()),
                Term::Bool(v) => Expr::Bool(*v),
                Term::Plus(x, y) => Expr::Plus(w(x), w(y)),
                Term::Eq(x, y) => Expr::Eq(w(x), w(y)),
                Term::And(x, y) => Expr::And(w(x), w(y)),
                Term::Not(x) => Expr::Not(w(x)),
                Term::Record(fs) => Expr::Record(fs.iter().map(|(n, a)| (n.clone(), a.to_surface())).collect()),
                Term::Copy(x) => x.to_surface(),
                Term::Empty(ty) => Expr::Empty(ty.clone()),
                Term::Singleton(x) => Expr::Singleton(w(x)),
                Term::Union(x, y) => Expr::Union(w(x), w(y)),
                Term::IsEmpty(x) => Expr::IsEmpty(w(x)),
            },
            CoreExpr::Let(x, e1, e2) => Expr::Let(x.clone(), b(e1), b(e2)),
            CoreExpr::If(c, t, f) => Expr::If(w(c), b(t), b(f)),
            CoreExpr::Proj(n, a) => Expr::Field(w(a), n.clone()),
            CoreExpr::Comp(x, a, e) => Expr::For(x.clone(), w(a), b(e)),
            CoreExpr::Sum(x, a, e) => Expr::Sum(x.clone(), w(a), b(e)),
        }
    }

    /// Inverse of [`CoreExpr::to_surface`]: succeeds only when `e` is
    /// already A-normal. Record fields are reordered by name.
    pub fn from_surface_exact(e: &Expr) -> Option<CoreExpr> {
        let w = |e: &Expr| Atom::from_surface(e);
        let b = |e: &Expr| CoreExpr::from_surface_exact(e).map(Box::new);
        Some(match e {
            Expr::Var(_) | Expr::Lab(_) => CoreExpr::Term(Term::Copy(w(e)?)),
            Expr::Int(i) => CoreExpr::Term(Term::Int(i.clone())),
            Expr::Bool(v) => CoreExpr::Term(Term::Bool(*v)),
            Expr::Plus(x, y) => CoreExpr::Term(Term::Plus(w(x)?, w(y)?)),
            Expr::Eq(x, y) => CoreExpr::Term(Term::Eq(w(x)?, w(y)?)),
            Expr::And(x, y) => CoreExpr::Term(Term::And(w(x)?, w(y)?)),
            Expr::Not(x) => CoreExpr::Term(Term::Not(w(x)?)),
            Expr::Record(fs) => {
                CoreExpr::Term(Term::Record(fs.iter().map(|(n, e)| Some((n.clone(), w(e)?))).collect::<Option<_>>()?))
            }
            Expr::Empty(ty) => CoreExpr::Term(Term::Empty(ty.clone())),
            Expr::Singleton(x) => CoreExpr::Term(Term::Singleton(w(x)?)),
            Expr::Union(x, y) => CoreExpr::Term(Term::Union(w(x)?, w(y)?)),
            Expr::IsEmpty(x) => CoreExpr::Term(Term::IsEmpty(w(x)?)),
            Expr::Let(x, e1, e2) => CoreExpr::Let(x.clone(), b(e1)?, b(e2)?),
            Expr::If(c, t, f) => CoreExpr::If(w(c)?, b(t)?, b(f)?),
            Expr::Field(a, n) => CoreExpr::Proj(n.clone(), w(a)?),
            Expr::For(x, a, e) => CoreExpr::Comp(x.clone(), w(a)?, b(e)?),
            Expr::Sum(x, a, e) => CoreExpr::Sum(x.clone(), w(a)?, b(e)?),
            Expr::Comprehension(..) => return None,
        })
    }
}

impl fmt::Display for CoreExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_surface())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn subst_respects_shadowing() {
        let e = CoreExpr::from_surface_exact(&parse("let y = x + x in for (x in y) {x}").unwrap()).unwrap();
        let s = e.subst("x", &Label::new("l"));
        assert_eq!(s.to_string(), "let y = @l + @l in for (x in y) {x}");
        assert_eq!(s.labels(), [Label::new("l")].into_iter().collect());
        assert!(s.free_vars().is_empty());
    }

    #[test]
    fn exact_conversion_rejects_nested_operands() {
        assert!(CoreExpr::from_surface_exact(&parse("1 + 2").unwrap()).is_none());
        assert!(CoreExpr::from_surface_exact(&parse("{x | x in R}").unwrap()).is_none());
        let e = parse("if b then {B: x, A: y} else z.A").unwrap();
        let c = CoreExpr::from_surface_exact(&e).unwrap();
        assert_eq!(c.to_string(), "if b then {A: y, B: x} else z.A");
    }
}
