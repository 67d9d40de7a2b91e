use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// NRC types. Pairs are records with fields `1` and `2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Type {
    Int,
    Bool,
    Record(BTreeMap<String, Type>),
    Coll(Box<Type>),
}

impl Type {
    pub fn coll(elem: Type) -> Type {
        Type::Coll(Box::new(elem))
    }

    pub fn record<I, S>(fields: I) -> Type
    where
        I: IntoIterator<Item = (S, Type)>,
        S: Into<String>,
    {
        Type::Record(fields.into_iter().map(|(f, t)| (f.into(), t)).collect())
    }

    pub fn pair(a: Type, b: Type) -> Type {
        Type::record([("1", a), ("2", b)])
    }

    pub fn elem(&self) -> Option<&Type> {
        match self {
            Type::Coll(t) => Some(t),
            _ => None,
        }
    }

    pub fn field(&self, name: &str) -> Option<&Type> {
        match self {
            Type::Record(fs) => fs.get(name),
            _ => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Coll(t) => write!(f, "{{{t}}}"),
            Type::Record(fs) => {
                f.write_str("(")?;
                for (i, (n, t)) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{n}: {t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Types with unification variables, used while inferring the element
/// type of unannotated empty collections.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Ty {
    Int,
    Bool,
    Record(BTreeMap<String, Ty>),
    Coll(Box<Ty>),
    Meta(usize),
}

impl From<&Type> for Ty {
    fn from(t: &Type) -> Ty {
        match t {
            Type::Int => Ty::Int,
            Type::Bool => Ty::Bool,
            Type::Record(fs) => Ty::Record(fs.iter().map(|(n, t)| (n.clone(), t.into())).collect()),
            Type::Coll(t) => Ty::Coll(Box::new(t.as_ref().into())),
        }
    }
}

#[derive(Default, Debug, Clone)]
pub(crate) struct Unifier {
    slots: Vec<Option<Ty>>,
}

impl Unifier {
    pub fn fresh(&mut self) -> Ty {
        self.slots.push(None);
        Ty::Meta(self.slots.len() - 1)
    }

    pub fn shallow(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Meta(m) = t {
            match &self.slots[m] {
                Some(next) => t = next.clone(),
                None => break,
            }
        }
        t
    }

    pub fn zonk(&self, t: &Ty) -> Ty {
        match self.shallow(t) {
            Ty::Record(fs) => Ty::Record(fs.iter().map(|(n, t)| (n.clone(), self.zonk(t))).collect()),
            Ty::Coll(t) => Ty::Coll(Box::new(self.zonk(&t))),
            t => t,
        }
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.shallow(t) {
            Ty::Meta(n) => n == m,
            Ty::Record(fs) => fs.values().any(|t| self.occurs(m, t)),
            Ty::Coll(t) => self.occurs(m, &t),
            _ => false,
        }
    }

    pub fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => true,
            (Ty::Meta(m), t) | (t, Ty::Meta(m)) => {
                if self.occurs(*m, t) {
                    return false;
                }
                self.slots[*m] = Some(t.clone());
                true
            }
            (Ty::Int, Ty::Int) | (Ty::Bool, Ty::Bool) => true,
            (Ty::Coll(x), Ty::Coll(y)) => self.unify(x, y),
            (Ty::Record(xs), Ty::Record(ys)) => {
                xs.len() == ys.len()
                    && xs.keys().eq(ys.keys())
                    && xs.values().zip(ys.values()).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    /// Fully resolved type, or `None` if a variable remains.
    pub fn resolve(&self, t: &Ty) -> Option<Type> {
        match self.shallow(t) {
            Ty::Int => Some(Type::Int),
            Ty::Bool => Some(Type::Bool),
            Ty::Coll(t) => Some(Type::coll(self.resolve(&t)?)),
            Ty::Record(fs) => fs
                .iter()
                .map(|(n, t)| Some((n.clone(), self.resolve(t)?)))
                .collect::<Option<BTreeMap<_, _>>>()
                .map(Type::Record),
            Ty::Meta(_) => None,
        }
    }

    /// Resolve, defaulting unconstrained variables to `int`.
    pub fn resolve_or_int(&self, t: &Ty) -> Type {
        match self.shallow(t) {
            Ty::Int | Ty::Meta(_) => Type::Int,
            Ty::Bool => Type::Bool,
            Ty::Coll(t) => Type::coll(self.resolve_or_int(&t)),
            Ty::Record(fs) => Type::Record(fs.iter().map(|(n, t)| (n.clone(), self.resolve_or_int(t))).collect()),
        }
    }

    pub fn show(&self, t: &Ty) -> String {
        match self.zonk(t) {
            Ty::Int => "int".into(),
            Ty::Bool => "bool".into(),
            Ty::Meta(m) => format!("?{m}"),
            Ty::Coll(t) => format!("{{{}}}", self.show(&t)),
            Ty::Record(fs) => {
                let parts: Vec<String> = fs.iter().map(|(n, t)| format!("{n}: {}", self.show(t))).collect();
                format!("({})", parts.join(", "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_nested() {
        let t = Type::coll(Type::record([("A", Type::Int), ("B", Type::Bool)]));
        assert_eq!(t.to_string(), "{(A: int, B: bool)}");
    }

    #[test]
    fn unify_resolves_meta_inside_collection() {
        let mut u = Unifier::default();
        let m = u.fresh();
        let a = Ty::Coll(Box::new(m.clone()));
        let b = Ty::Coll(Box::new(Ty::Int));
        assert!(u.unify(&a, &b));
        assert_eq!(u.resolve(&m), Some(Type::Int));
    }

    #[test]
    fn unify_rejects_cycles_and_mismatches() {
        let mut u = Unifier::default();
        let m = u.fresh();
        assert!(!u.unify(&m, &Ty::Coll(Box::new(m.clone()))));
        assert!(!u.unify(&Ty::Int, &Ty::Bool));
        let r1 = Ty::Record([("A".to_string(), Ty::Int)].into());
        let r2 = Ty::Record([("B".to_string(), Ty::Int)].into());
        assert!(!u.unify(&r1, &r2));
    }
}
