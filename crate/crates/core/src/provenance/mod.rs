//! Where-, dependency- and semiring-provenance: annotated evaluation and
//! extraction from traces.

mod dep;
mod kcoll;
mod kprov;
pub mod oracle;
pub mod semiring;
mod where_prov;

use std::collections::BTreeSet;

use serde_json::{json, Map, Value as Json};

pub use dep::{dep_extract, dep_fn, dep_identity};
pub use kcoll::KCollection;
pub use kprov::{k_extract, k_identity, k_readback, semiring_fn, KReadbackError, KValue};
pub use oracle::{annotated_eval, dep_eval, k_eval, where_eval};
pub use semiring::{Boolean, Monomial, Nat, Poly, Semiring};
pub use where_prov::{chain_of_copies, where_extract, where_fn, where_identity};

use crate::store::{Label, Store, StoreError};
use crate::trace::Trace;

/// Per-label annotations.
pub type AnnMap<A> = im::OrdMap<Label, A>;
/// `A_⊥`: the token a value was copied from, if any.
pub type WhereAnn = Option<Label>;
/// A set of tokens.
pub type DepAnn = BTreeSet<Label>;
/// `𝒦(Lab)_⊥`: collection labels carry a K-collection over their elements.
pub type KAnn<K> = Option<KCollection<K>>;

/// `h(l)`, with unannotated labels read as ⊥ or ∅.
pub(crate) fn ann<A: Clone + Default>(h: &AnnMap<A>, l: &Label) -> A {
    h.get(l).cloned().unwrap_or_default()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Where,
    Dep,
    Nat,
    Bool,
    Poly,
}

impl Kind {
    /// From the `kind` and optional `instance` fields of the CLI and JSON.
    pub fn parse(kind: &str, instance: Option<&str>) -> Option<Kind> {
        match (kind, instance) {
            ("where", None) => Some(Kind::Where),
            ("dep", None) => Some(Kind::Dep),
            ("semiring", Some("nat")) => Some(Kind::Nat),
            ("semiring", Some("bool")) => Some(Kind::Bool),
            ("semiring", Some("poly") | None) => Some(Kind::Poly),
            _ => None,
        }
    }

    fn names(self) -> (&'static str, Option<&'static str>) {
        match self {
            Kind::Where => ("where", None),
            Kind::Dep => ("dep", None),
            Kind::Nat => ("semiring", Some(Nat::NAME)),
            Kind::Bool => ("semiring", Some(Boolean::NAME)),
            Kind::Poly => ("semiring", Some(Poly::NAME)),
        }
    }
}

/// An annotation map of any supported kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Annotations {
    Where(AnnMap<WhereAnn>),
    Dep(AnnMap<DepAnn>),
    Nat(AnnMap<KAnn<Nat>>),
    Bool(AnnMap<KAnn<Boolean>>),
    Poly(AnnMap<KAnn<Poly>>),
}

impl Annotations {
    /// The default input annotations of each kind.
    pub fn identity(kind: Kind, sigma: &Store) -> Annotations {
        match kind {
            Kind::Where => Annotations::Where(where_identity(sigma)),
            Kind::Dep => Annotations::Dep(dep_identity(sigma)),
            Kind::Nat => Annotations::Nat(k_identity(sigma)),
            Kind::Bool => Annotations::Bool(k_identity(sigma)),
            Kind::Poly => Annotations::Poly(k_identity(sigma)),
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Annotations::Where(_) => Kind::Where,
            Annotations::Dep(_) => Kind::Dep,
            Annotations::Nat(_) => Kind::Nat,
            Annotations::Bool(_) => Kind::Bool,
            Annotations::Poly(_) => Kind::Poly,
        }
    }

    pub fn extract(&self, t: &Trace) -> Annotations {
        match self {
            Annotations::Where(h) => Annotations::Where(where_extract(h, t)),
            Annotations::Dep(h) => Annotations::Dep(dep_extract(h, t)),
            Annotations::Nat(h) => Annotations::Nat(k_extract(h, t)),
            Annotations::Bool(h) => Annotations::Bool(k_extract(h, t)),
            Annotations::Poly(h) => Annotations::Poly(k_extract(h, t)),
        }
    }

    pub fn eval(
        &self,
        sigma: &Store,
        dest: &Label,
        e: &crate::lang::CoreExpr,
        supply: &mut crate::store::FreshSupply,
    ) -> Result<(Store, Annotations), crate::eval::EvalError> {
        Ok(match self {
            Annotations::Where(h) => {
                let (s, h) = where_eval(sigma, h, dest, e, supply)?;
                (s, Annotations::Where(h))
            }
            Annotations::Dep(h) => {
                let (s, h) = dep_eval(sigma, h, dest, e, supply)?;
                (s, Annotations::Dep(h))
            }
            Annotations::Nat(h) => {
                let (s, h) = k_eval(sigma, h, dest, e, supply)?;
                (s, Annotations::Nat(h))
            }
            Annotations::Bool(h) => {
                let (s, h) = k_eval(sigma, h, dest, e, supply)?;
                (s, Annotations::Bool(h))
            }
            Annotations::Poly(h) => {
                let (s, h) = k_eval(sigma, h, dest, e, supply)?;
                (s, Annotations::Poly(h))
            }
        })
    }

    /// Labels whose annotations differ between `self` and `other`.
    pub fn differences(&self, other: &Annotations) -> Vec<Label> {
        fn diff<A: PartialEq + Clone + Default>(a: &AnnMap<A>, b: &AnnMap<A>) -> Vec<Label> {
            let keys: BTreeSet<&Label> = a.keys().chain(b.keys()).collect();
            keys.into_iter().filter(|l| ann(a, l) != ann(b, l)).cloned().collect()
        }
        match (self, other) {
            (Annotations::Where(a), Annotations::Where(b)) => diff(a, b),
            (Annotations::Dep(a), Annotations::Dep(b)) => diff(a, b),
            (Annotations::Nat(a), Annotations::Nat(b)) => diff(a, b),
            (Annotations::Bool(a), Annotations::Bool(b)) => diff(a, b),
            (Annotations::Poly(a), Annotations::Poly(b)) => diff(a, b),
            _ => vec![],
        }
    }

    pub fn to_json(&self) -> Json {
        fn kjson<K: Semiring>(a: &KAnn<K>) -> Json {
            match a {
                None => Json::Null,
                Some(c) => Json::Object(c.iter().map(|(l, k)| (l.to_string(), k.to_json())).collect()),
            }
        }
        let assignments: Map<String, Json> = match self {
            Annotations::Where(h) => h.iter().map(|(l, a)| (l.to_string(), a.as_ref().map_or(Json::Null, |t| json!(t.as_str())))).collect(),
            Annotations::Dep(h) => h.iter().map(|(l, a)| (l.to_string(), json!(a.iter().map(Label::as_str).collect::<Vec<_>>()))).collect(),
            Annotations::Nat(h) => h.iter().map(|(l, a)| (l.to_string(), kjson(a))).collect(),
            Annotations::Bool(h) => h.iter().map(|(l, a)| (l.to_string(), kjson(a))).collect(),
            Annotations::Poly(h) => h.iter().map(|(l, a)| (l.to_string(), kjson(a))).collect(),
        };
        let (kind, instance) = self.kind().names();
        let mut obj = Map::new();
        obj.insert("kind".into(), json!(kind));
        if let Some(i) = instance {
            obj.insert("instance".into(), json!(i));
        }
        obj.insert("assignments".into(), Json::Object(assignments));
        Json::Object(obj)
    }

    pub fn from_json(v: &Json) -> Result<Annotations, StoreError> {
        let bad = |m: String| StoreError::Format(format!("annotations: {m}"));
        let kind = v.get("kind").and_then(Json::as_str).ok_or_else(|| bad("missing `kind`".into()))?;
        let instance = v.get("instance").and_then(Json::as_str);
        let kind = Kind::parse(kind, instance).ok_or_else(|| bad(format!("unknown kind `{kind}`")))?;
        let empty = Map::new();
        let assignments = match v.get("assignments") {
            None => &empty,
            Some(a) => a.as_object().ok_or_else(|| bad("`assignments` must be an object".into()))?,
        };
        let label = |s: &str| {
            if Label::is_valid_name(s) {
                Ok(Label::new(s))
            } else {
                Err(bad(format!("`{s}` is not a valid label")))
            }
        };
        fn kann<K: Semiring>(v: &Json, label: &dyn Fn(&str) -> Result<Label, StoreError>) -> Result<KAnn<K>, StoreError> {
            match v {
                Json::Null => Ok(None),
                Json::Object(m) => m
                    .iter()
                    .map(|(l, k)| {
                        let k = K::from_json(k).ok_or_else(|| StoreError::Format(format!("annotations: bad {} value for `{l}`", K::NAME)))?;
                        Ok((label(l)?, k))
                    })
                    .collect::<Result<KCollection<K>, _>>()
                    .map(Some),
                _ => Err(StoreError::Format("annotations: semiring annotations are null or objects".into())),
            }
        }
        fn collect<A: Clone>(
            m: &Map<String, Json>,
            label: &dyn Fn(&str) -> Result<Label, StoreError>,
            f: impl Fn(&Json) -> Result<A, StoreError>,
        ) -> Result<AnnMap<A>, StoreError> {
            m.iter().map(|(l, v)| Ok((label(l)?, f(v)?))).collect()
        }
        Ok(match kind {
            Kind::Where => Annotations::Where(collect(assignments, &label, |v| match v {
                Json::Null => Ok(None),
                Json::String(s) => Ok(Some(label(s)?)),
                _ => Err(bad("where annotations are labels or null".into())),
            })?),
            Kind::Dep => Annotations::Dep(collect(assignments, &label, |v| {
                v.as_array()
                    .ok_or_else(|| bad("dep annotations are arrays".into()))?
                    .iter()
                    .map(|t| t.as_str().ok_or_else(|| bad("tokens are strings".into())).and_then(&label))
                    .collect()
            })?),
            Kind::Nat => Annotations::Nat(collect(assignments, &label, |v| kann(v, &label))?),
            Kind::Bool => Annotations::Bool(collect(assignments, &label, |v| kann(v, &label))?),
            Kind::Poly => Annotations::Poly(collect(assignments, &label, |v| kann(v, &label))?),
        })
    }
}
