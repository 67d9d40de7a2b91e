use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::lang::Type;

/// Primitive one-step operations. `A` is the argument type: labels in
/// traces and stores, labels or variables in expressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term<A> {
    Int(#[serde(with = "super::bigint_serde")] BigInt),
    Plus(A, A),
    Eq(A, A),
    Bool(bool),
    And(A, A),
    Not(A),
    Record(BTreeMap<String, A>),
    Copy(A),
    /// Empty collection, with an optional element type.
    Empty(Option<Type>),
    Singleton(A),
    Union(A, A),
    IsEmpty(A),
}

impl<A> Term<A> {
    pub fn args(&self) -> Vec<&A> {
        match self {
            Term::Int(_) | Term::Bool(_) | Term::Empty(_) => vec![],
            Term::Plus(a, b) | Term::Eq(a, b) | Term::And(a, b) | Term::Union(a, b) => vec![a, b],
            Term::Not(a) | Term::Copy(a) | Term::Singleton(a) | Term::IsEmpty(a) => vec![a],
            Term::Record(fs) => fs.values().collect(),
        }
    }

    pub fn map<B>(&self, mut f: impl FnMut(&A) -> B) -> Term<B> {
        match self {
            Term::Int(i) => Term::Int(i.clone()),
            Term::Bool(b) => Term::Bool(*b),
            Term::Empty(t) => Term::Empty(t.clone()),
            Term::Plus(a, b) => Term::Plus(f(a), f(b)),
            Term::Eq(a, b) => Term::Eq(f(a), f(b)),
            Term::And(a, b) => Term::And(f(a), f(b)),
            Term::Union(a, b) => Term::Union(f(a), f(b)),
            Term::Not(a) => Term::Not(f(a)),
            Term::Copy(a) => Term::Copy(f(a)),
            Term::Singleton(a) => Term::Singleton(f(a)),
            Term::IsEmpty(a) => Term::IsEmpty(f(a)),
            Term::Record(fs) => Term::Record(fs.iter().map(|(n, a)| (n.clone(), f(a))).collect()),
        }
    }

    pub fn try_map<B, E>(&self, mut f: impl FnMut(&A) -> Result<B, E>) -> Result<Term<B>, E> {
        Ok(match self {
            Term::Int(i) => Term::Int(i.clone()),
            Term::Bool(b) => Term::Bool(*b),
            Term::Empty(t) => Term::Empty(t.clone()),
            Term::Plus(a, b) => Term::Plus(f(a)?, f(b)?),
            Term::Eq(a, b) => Term::Eq(f(a)?, f(b)?),
            Term::And(a, b) => Term::And(f(a)?, f(b)?),
            Term::Union(a, b) => Term::Union(f(a)?, f(b)?),
            Term::Not(a) => Term::Not(f(a)?),
            Term::Copy(a) => Term::Copy(f(a)?),
            Term::Singleton(a) => Term::Singleton(f(a)?),
            Term::IsEmpty(a) => Term::IsEmpty(f(a)?),
            Term::Record(fs) => {
                let mut out = BTreeMap::new();
                for (n, a) in fs {
                    out.insert(n.clone(), f(a)?);
                }
                Term::Record(out)
            }
        })
    }

    /// Drop the element-type annotation of `Empty`.
    pub fn erase(&self) -> Term<A>
    where
        A: Clone,
    {
        match self {
            Term::Empty(_) => Term::Empty(None),
            t => t.clone(),
        }
    }
}
