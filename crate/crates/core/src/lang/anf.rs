use std::collections::BTreeSet;

use super::core::{Atom, CoreExpr};
use super::desugar::desugar;
use super::surface::Expr;
use crate::store::Term;

type Bindings = Vec<(String, CoreExpr)>;

/// A-normalizes a surface expression. Every binder is renamed from a
/// deterministic supply (`_1`, `_2`, ...) avoiding the names already used
/// in `e`; nested lets are flattened, and bindings of a comprehension or
/// sum body that do not depend on the bound variable are floated out in
/// front of it.
pub fn anormalize(e: &Expr) -> CoreExpr {
    let e = desugar(e);
    let mut n = Normalizer { next: 0, avoid: e.all_vars(), scope: Vec::new() };
    let (b, t) = n.norm(&e);
    wrap(b, t)
}

fn wrap(bindings: Bindings, tail: CoreExpr) -> CoreExpr {
    bindings.into_iter().rev().fold(tail, |body, (x, e1)| CoreExpr::Let(x, Box::new(e1), Box::new(body)))
}

struct Normalizer {
    next: usize,
    avoid: BTreeSet<String>,
    scope: Vec<(String, String)>,
}

impl Normalizer {
    fn fresh(&mut self) -> String {
        loop {
            self.next += 1;
            let x = format!("_{}", self.next);
            if !self.avoid.contains(&x) {
                return x;
            }
        }
    }

    fn rename(&self, x: &str) -> String {
        self.scope.iter().rev().find(|(from, _)| from == x).map_or_else(|| x.to_string(), |(_, to)| to.clone())
    }

    fn atom(&mut self, e: &Expr, out: &mut Bindings) -> Atom {
        match e {
            Expr::Var(x) => Atom::Var(self.rename(x)),
            Expr::Lab(l) => Atom::Lab(l.clone()),
            _ => {
                let (b, t) = self.norm(e);
                out.extend(b);
                let v = self.fresh();
                out.push((v.clone(), t));
                Atom::Var(v)
            }
        }
    }

    fn term(&mut self, out: Bindings, t: Term<Atom>) -> (Bindings, CoreExpr) {
        (out, CoreExpr::Term(t))
    }

    fn norm(&mut self, e: &Expr) -> (Bindings, CoreExpr) {
        let mut out = Bindings::new();
        match e {
            Expr::Var(_) | Expr::Lab(_) => {
                let a = self.atom(e, &mut out);
                self.term(out, Term::Copy(a))
            }
            Expr::Int(i) => self.term(out, Term::Int(i.clone())),
            Expr::Bool(b) => self.term(out, Term::Bool(*b)),
            Expr::Empty(t) => self.term(out, Term::Empty(t.clone())),
            Expr::Let(x, e1, e2) => {
                let (b1, t1) = self.norm(e1);
                out.extend(b1);
                let v = self.fresh();
                out.push((v.clone(), t1));
                self.scope.push((x.clone(), v));
                let (b2, t2) = self.norm(e2);
                self.scope.pop();
                out.extend(b2);
                (out, t2)
            }
            Expr::Record(fs) => {
                let fields = fs.iter().map(|(n, e)| (n.clone(), self.atom(e, &mut out))).collect();
                self.term(out, Term::Record(fields))
            }
            Expr::Field(r, n) => {
                let w = self.atom(r, &mut out);
                (out, CoreExpr::Proj(n.clone(), w))
            }
            Expr::Not(a) => {
                let w = self.atom(a, &mut out);
                self.term(out, Term::Not(w))
            }
            Expr::Singleton(a) => {
                let w = self.atom(a, &mut out);
                self.term(out, Term::Singleton(w))
            }
            Expr::IsEmpty(a) => {
                let w = self.atom(a, &mut out);
                self.term(out, Term::IsEmpty(w))
            }
            Expr::And(a, b) | Expr::Plus(a, b) | Expr::Eq(a, b) | Expr::Union(a, b) => {
                let x = self.atom(a, &mut out);
                let y = self.atom(b, &mut out);
                let t = match e {
                    Expr::And(..) => Term::And(x, y),
                    Expr::Plus(..) => Term::Plus(x, y),
                    Expr::Eq(..) => Term::Eq(x, y),
                    _ => Term::Union(x, y),
                };
                self.term(out, t)
            }
            Expr::If(c, t, f) => {
                let w = self.atom(c, &mut out);
                let (bt, tt) = self.norm(t);
                let (bf, tf) = self.norm(f);
                (out, CoreExpr::If(w, Box::new(wrap(bt, tt)), Box::new(wrap(bf, tf))))
            }
            Expr::For(x, e0, body) | Expr::Sum(x, e0, body) => {
                let w = self.atom(e0, &mut out);
                let v = self.fresh();
                self.scope.push((x.clone(), v.clone()));
                let (bb, tb) = self.norm(body);
                self.scope.pop();
                let mut dependent: BTreeSet<String> = [v.clone()].into_iter().collect();
                let mut kept = Bindings::new();
                for (y, rhs) in bb {
                    if rhs.free_vars().iter().any(|z| dependent.contains(z)) {
                        dependent.insert(y.clone());
                        kept.push((y, rhs));
                    } else {
                        out.push((y, rhs));
                    }
                }
                let body = Box::new(wrap(kept, tb));
                let tail = match e {
                    Expr::For(..) => CoreExpr::Comp(v, w, body),
                    _ => CoreExpr::Sum(v, w, body),
                };
                (out, tail)
            }
            Expr::Comprehension(..) => self.norm(&desugar(e)),
        }
    }
}

/// Whether every operand position holds a variable or label.
pub fn is_anormal(e: &Expr) -> bool {
    CoreExpr::from_surface_exact(e).is_some()
}
