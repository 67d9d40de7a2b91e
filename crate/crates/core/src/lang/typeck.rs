use std::collections::BTreeMap;

use thiserror::Error;

use super::core::{Atom, CoreExpr};
use super::types::{Ty, Unifier};
use super::Type;
use crate::store::{Label, StoreType, Term};

/// `Ω = Ψ, Γ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    pub psi: StoreType,
    pub gamma: BTreeMap<String, Type>,
}

impl Context {
    pub fn with_store(psi: StoreType) -> Context {
        Context { psi, gamma: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("unbound label `{0}`")]
    UnboundLabel(Label),
    #[error("in `{expr}`: expected {expected}, found {found}")]
    Mismatch { expr: String, expected: String, found: String },
    #[error("in `{expr}`: no field `{field}` in {found}")]
    NoField { expr: String, field: String, found: String },
    #[error("in `{0}`: cannot infer the element type of an empty collection; write `({{}} : {{τ}})`")]
    EmptyNeedsAnnotation(String),
}

struct Checker<'a> {
    psi: &'a dyn Fn(&Label) -> Option<Type>,
    u: Unifier,
    scope: Vec<(String, Ty)>,
    empties: Vec<Ty>,
}

impl Checker<'_> {
    fn atom(&self, w: &Atom) -> Result<Ty, TypeError> {
        match w {
            Atom::Var(x) => self
                .scope
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| TypeError::UnboundVar(x.clone())),
            Atom::Lab(l) => (self.psi)(l).as_ref().map(Ty::from).ok_or_else(|| TypeError::UnboundLabel(l.clone())),
        }
    }

    fn expect(&mut self, e: &dyn std::fmt::Display, expected: &Ty, found: &Ty) -> Result<(), TypeError> {
        if self.u.unify(expected, found) {
            Ok(())
        } else {
            Err(TypeError::Mismatch { expr: e.to_string(), expected: self.u.show(expected), found: self.u.show(found) })
        }
    }

    fn coll_elem(&mut self, e: &dyn std::fmt::Display, t: &Ty) -> Result<Ty, TypeError> {
        let elem = self.u.fresh();
        self.expect(e, &Ty::Coll(Box::new(elem.clone())), t)?;
        Ok(elem)
    }

    fn term(&mut self, e: &CoreExpr, t: &Term<Atom>) -> Result<Ty, TypeError> {
        Ok(match t {
            Term::Int(_) => Ty::Int,
            Term::Bool(_) => Ty::Bool,
            Term::Plus(a, b) | Term::Eq(a, b) => {
                for w in [a, b] {
                    let tw = self.atom(w)?;
                    self.expect(e, &Ty::Int, &tw)?;
                }
                if matches!(t, Term::Plus(..)) { Ty::Int } else { Ty::Bool }
            }
            Term::And(a, b) => {
                for w in [a, b] {
                    let tw = self.atom(w)?;
                    self.expect(e, &Ty::Bool, &tw)?;
                }
                Ty::Bool
            }
            Term::Not(a) => {
                let ta = self.atom(a)?;
                self.expect(e, &Ty::Bool, &ta)?;
                Ty::Bool
            }
            Term::Record(fs) => Ty::Record(fs.iter().map(|(n, w)| Ok((n.clone(), self.atom(w)?))).collect::<Result<_, TypeError>>()?),
            Term::Copy(a) => self.atom(a)?,
            Term::Empty(ann) => {
                let m = self.u.fresh();
                if let Some(ty) = ann {
                    let ty = Ty::from(ty);
                    self.expect(e, &m, &ty)?;
                }
                self.empties.push(m.clone());
                Ty::Coll(Box::new(m))
            }
            Term::Singleton(a) => Ty::Coll(Box::new(self.atom(a)?)),
            Term::Union(a, b) => {
                let ta = self.atom(a)?;
                let tb = self.atom(b)?;
                self.coll_elem(e, &ta)?;
                self.expect(e, &ta, &tb)?;
                ta
            }
            Term::IsEmpty(a) => {
                let ta = self.atom(a)?;
                self.coll_elem(e, &ta)?;
                Ty::Bool
            }
        })
    }

    fn infer(&mut self, e: &CoreExpr) -> Result<Ty, TypeError> {
        match e {
            CoreExpr::Term(t) => self.term(e, t),
            CoreExpr::Let(x, e1, e2) => {
                let t1 = self.infer(e1)?;
                self.scope.push((x.clone(), t1));
                let t2 = self.infer(e2);
                self.scope.pop();
                t2
            }
            CoreExpr::If(w, et, ef) => {
                let tw = self.atom(w)?;
                self.expect(e, &Ty::Bool, &tw)?;
                let tt = self.infer(et)?;
                let tf = self.infer(ef)?;
                self.expect(e, &tt, &tf)?;
                Ok(tt)
            }
            CoreExpr::Proj(field, w) => {
                let tw = self.atom(w)?;
                match self.u.shallow(&tw) {
                    Ty::Record(fs) => fs.get(field).cloned().ok_or_else(|| TypeError::NoField {
                        expr: e.to_string(),
                        field: field.clone(),
                        found: self.u.show(&tw),
                    }),
                    Ty::Meta(_) => Err(TypeError::EmptyNeedsAnnotation(e.to_string())),
                    _ => Err(TypeError::NoField { expr: e.to_string(), field: field.clone(), found: self.u.show(&tw) }),
                }
            }
            CoreExpr::Comp(x, w, body) | CoreExpr::Sum(x, w, body) => {
                let tw = self.atom(w)?;
                let elem = self.coll_elem(e, &tw)?;
                self.scope.push((x.clone(), elem));
                let tb = self.infer(body);
                self.scope.pop();
                let tb = tb?;
                if let CoreExpr::Comp(..) = e {
                    self.coll_elem(body.as_ref(), &tb)?;
                    Ok(tb)
                } else {
                    self.expect(body.as_ref(), &Ty::Int, &tb)?;
                    Ok(Ty::Int)
                }
            }
        }
    }
}

fn fill_empties(e: &CoreExpr, anns: &mut std::vec::IntoIter<Type>) -> CoreExpr {
    match e {
        CoreExpr::Term(Term::Empty(_)) => CoreExpr::Term(Term::Empty(anns.next())),
        CoreExpr::Term(_) | CoreExpr::Proj(..) => e.clone(),
        CoreExpr::Let(x, a, b) => {
            let a = fill_empties(a, anns);
            CoreExpr::Let(x.clone(), Box::new(a), Box::new(fill_empties(b, anns)))
        }
        CoreExpr::If(w, a, b) => {
            let a = fill_empties(a, anns);
            CoreExpr::If(w.clone(), Box::new(a), Box::new(fill_empties(b, anns)))
        }
        CoreExpr::Comp(x, w, b) => CoreExpr::Comp(x.clone(), w.clone(), Box::new(fill_empties(b, anns))),
        CoreExpr::Sum(x, w, b) => CoreExpr::Sum(x.clone(), w.clone(), Box::new(fill_empties(b, anns))),
    }
}

/// Type-checks `e` and annotates every empty collection with its element
/// type. Element types left unconstrained inside the expression default to
/// `int`; an unconstrained type in the result is an error.
pub fn elaborate(ctx: &Context, e: &CoreExpr) -> Result<(CoreExpr, Type), TypeError> {
    elaborate_with(&|l| ctx.psi.get(l).cloned(), &ctx.gamma, e)
}

/// [`elaborate`] with the store type given as a lookup function.
pub fn elaborate_with(
    psi: &dyn Fn(&Label) -> Option<Type>,
    gamma: &BTreeMap<String, Type>,
    e: &CoreExpr,
) -> Result<(CoreExpr, Type), TypeError> {
    let mut c = Checker {
        psi,
        u: Unifier::default(),
        scope: gamma.iter().map(|(x, t)| (x.clone(), Ty::from(t))).collect(),
        empties: Vec::new(),
    };
    let t = c.infer(e)?;
    let ty = c.u.resolve(&t).ok_or_else(|| TypeError::EmptyNeedsAnnotation(e.to_string()))?;
    let anns: Vec<Type> = c.empties.iter().map(|m| c.u.resolve_or_int(m)).collect();
    Ok((fill_empties(e, &mut anns.into_iter()), ty))
}

/// `Ω ⊢ e : τ`.
pub fn typecheck(ctx: &Context, e: &CoreExpr) -> Result<Type, TypeError> {
    elaborate(ctx, e).map(|(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{anormalize, parse, parse_type};

    fn ctx() -> Context {
        let mut psi = StoreType::new();
        psi.insert(Label::new("r"), parse_type("{(A: int, B: int, C: int)}").unwrap());
        psi.insert(Label::new("s"), parse_type("{(C: int, D: int)}").unwrap());
        Context::with_store(psi)
    }

    fn check(src: &str) -> Result<Type, TypeError> {
        typecheck(&ctx(), &anormalize(&parse(src).unwrap()))
    }

    #[test]
    fn join_query_schema() {
        let q1 = "for (r in @r) for (s in @s) if r.C == s.C then {{A: r.A, B: r.B, D: s.D}} else {}";
        assert_eq!(check(q1).unwrap().to_string(), "{(A: int, B: int, D: int)}");
    }

    #[test]
    fn rejects_ill_typed() {
        assert!(matches!(check("true == true"), Err(TypeError::Mismatch { .. })));
        assert!(matches!(check("1 + true"), Err(TypeError::Mismatch { .. })));
        assert!(matches!(check("for (x in @s) x.E"), Err(TypeError::NoField { .. })));
        assert!(matches!(check("sum (x in @s) {x}"), Err(TypeError::Mismatch { .. })));
        assert!(matches!(check("y"), Err(TypeError::UnboundVar(_))));
        assert!(matches!(check("@q"), Err(TypeError::UnboundLabel(_))));
        assert!(matches!(check("if true then 1 else {1}"), Err(TypeError::Mismatch { .. })));
    }

    #[test]
    fn empty_annotations() {
        assert!(matches!(check("{}"), Err(TypeError::EmptyNeedsAnnotation(_))));
        assert_eq!(check("({} : {bool})").unwrap(), Type::coll(Type::Bool));
        assert_eq!(check("empty({})").unwrap(), Type::Bool);
        let (e, t) = elaborate(&ctx(), &anormalize(&parse("{1} union {}").unwrap())).unwrap();
        assert_eq!(t, Type::coll(Type::Int));
        assert!(e.to_string().contains("({} : {int})"), "{e}");
    }
}
