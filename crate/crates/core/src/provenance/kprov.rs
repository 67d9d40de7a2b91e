use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use super::kcoll::KCollection;
use super::semiring::Semiring;
use super::{AnnMap, KAnn};
use crate::store::{Constructor, Label, Store, StoreError};
use crate::trace::{IterKind, Theta, Trace};
use crate::store::Term;

fn kann<K: Semiring>(h: &AnnMap<KAnn<K>>, l: &Label) -> KAnn<K> {
    h.get(l).cloned().flatten()
}

/// A missing annotation on a collection is read as the empty K-collection.
fn kcoll<K: Semiring>(h: &AnnMap<KAnn<K>>, l: &Label) -> KCollection<K> {
    kann(h, l).unwrap_or_default()
}

/// `semiring(t, h)`.
pub fn semiring_fn<K: Semiring>(t: &Term<Label>, h: &AnnMap<KAnn<K>>) -> KAnn<K> {
    match t {
        Term::Copy(l) => kann(h, l),
        Term::Empty(_) => Some(KCollection::zero()),
        Term::Singleton(l) => Some(KCollection::eta(l)),
        Term::Union(a, b) => Some(kann(h, a)?.add(&kann(h, b)?)),
        _ => None,
    }
}

/// Annotates every collection label `l` with `[l_i ↦ token(l_i)]` over its
/// elements, and everything else with `⊥`.
pub fn k_identity<K: Semiring>(sigma: &Store) -> AnnMap<KAnn<K>> {
    sigma
        .iter()
        .map(|(l, k)| {
            let a = match k {
                Constructor::Coll(ls) => Some(ls.labels().map(|x| (x.clone(), K::token(x))).collect()),
                _ => None,
            };
            (l.clone(), a)
        })
        .collect()
}

/// `h ⊢ T ⇝ h'` for semiring provenance. Sums are outside the semiring
/// model: their entries are traversed and the integer result gets `⊥`.
pub fn k_extract<K: Semiring>(h: &AnnMap<KAnn<K>>, t: &Trace) -> AnnMap<KAnn<K>> {
    match t {
        Trace::Assign { out, term } => h.update(out.clone(), semiring_fn(term, h)),
        Trace::Seq { first, second } => k_extract(&k_extract(h, first), second),
        Trace::Proj { out, src, .. } => h.update(out.clone(), kann(h, src)),
        Trace::Cond { body, .. } => k_extract(h, body),
        Trace::Iter { iter, out, src, theta, .. } => {
            let (h2, k2) = k_extract_theta(h, &kcoll(h, src), theta);
            let a = match iter {
                IterKind::Comp => Some(k2.bind(|x| kcoll(&h2, x))),
                IterKind::Sum => None,
            };
            h2.update(out.clone(), a)
        }
    }
}

/// `h, k ⊢ Θ ⇝ h', k'`. Multiplicities of entries do not contribute.
fn k_extract_theta<K: Semiring>(h: &AnnMap<KAnn<K>>, k: &KCollection<K>, theta: &Theta) -> (AnnMap<KAnn<K>>, KCollection<K>) {
    let mut acc = h.clone();
    let mut k2 = KCollection::zero();
    for (l, (ti, _)) in theta {
        let hi = k_extract(h, ti);
        k2 = k2.add(&KCollection::eta(ti.out()).scale(&k.get(l)));
        for w in ti.written_labels() {
            if let Some(x) = hi.get(&w) {
                acc.insert(w, x.clone());
            }
        }
    }
    (acc, k2)
}

/// Values whose collections map elements to semiring annotations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KValue<K> {
    Int(BigInt),
    Bool(bool),
    Record(BTreeMap<String, KValue<K>>),
    Coll(BTreeMap<KValue<K>, K>),
}

impl<K: Semiring> fmt::Display for KValue<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KValue::Int(i) => write!(f, "{i}"),
            KValue::Bool(b) => f.write_str(if *b { "true" } else { "false" }),
            KValue::Record(fs) => {
                f.write_str("(")?;
                for (i, (n, v)) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{n}: {v}")?;
                }
                f.write_str(")")
            }
            KValue::Coll(m) => {
                f.write_str("{")?;
                for (i, (v, k)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v} : {k}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KReadbackError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("collection `{0}` has no semiring annotation")]
    Unannotated(Label),
}

/// `(σ, h) ⇑ l`. Each element label contributes `h(l)(l')` once, whatever
/// its multiplicity; elements with equal K-values are summed.
pub fn k_readback<K: Semiring>(sigma: &Store, h: &AnnMap<KAnn<K>>, l: &Label) -> Result<KValue<K>, KReadbackError> {
    Ok(match sigma.get(l)? {
        Constructor::Int(i) => KValue::Int(i.clone()),
        Constructor::Bool(b) => KValue::Bool(*b),
        Constructor::Record(fs) => KValue::Record(
            fs.iter()
                .map(|(n, x)| Ok((n.clone(), k_readback(sigma, h, x)?)))
                .collect::<Result<_, KReadbackError>>()?,
        ),
        Constructor::Coll(ls) => {
            let a = kann(h, l).ok_or_else(|| KReadbackError::Unannotated(l.clone()))?;
            let mut out: BTreeMap<KValue<K>, K> = BTreeMap::new();
            for x in ls.labels() {
                let v = k_readback(sigma, h, x)?;
                let k = a.get(x);
                let sum = out.get(&v).map_or(k.clone(), |old| old.add(&k));
                out.insert(v, sum);
            }
            out.retain(|_, k| !k.is_zero());
            KValue::Coll(out)
        }
    })
}
