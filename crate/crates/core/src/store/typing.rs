use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Constructor, Label, Store};
use crate::lang::types::{Ty, Unifier};
use crate::lang::Type;

pub type StoreType = BTreeMap<Label, Type>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreTypeError {
    #[error("label `{0}` is typed but not bound, or bound but not typed")]
    Domain(Label),
    #[error("label `{0}` refers to itself through the store")]
    Cyclic(Label),
    #[error("label `{0}` refers to unbound label `{1}`")]
    Dangling(Label, Label),
    #[error("label `{label}` does not have type {expected}")]
    Mismatch { label: Label, expected: String },
}

/// Fails with the first label found on a reference cycle or pointing outside the store.
pub fn check_acyclic(sigma: &Store) -> Result<(), StoreTypeError> {
    let mut done: BTreeSet<&Label> = BTreeSet::new();
    for (root, _) in sigma.iter() {
        if done.contains(root) {
            continue;
        }
        // iterative DFS; `on_path` tracks the grey set
        let mut on_path: BTreeSet<&Label> = BTreeSet::new();
        let mut stack: Vec<(&Label, Vec<&Label>)> = vec![(root, sigma.lookup(root).unwrap().labels())];
        on_path.insert(root);
        while let Some((l, pending)) = stack.last_mut() {
            let l = *l;
            match pending.pop() {
                Some(next) => {
                    if done.contains(next) {
                        continue;
                    }
                    if on_path.contains(next) {
                        return Err(StoreTypeError::Cyclic(next.clone()));
                    }
                    let Some(k) = sigma.lookup(next) else {
                        return Err(StoreTypeError::Dangling(l.clone(), next.clone()));
                    };
                    on_path.insert(next);
                    stack.push((next, k.labels()));
                }
                None => {
                    on_path.remove(l);
                    done.insert(l);
                    stack.pop();
                }
            }
        }
    }
    Ok(())
}

fn check_con(psi: &StoreType, k: &Constructor, tau: &Type) -> bool {
    match (k, tau) {
        (Constructor::Int(_), Type::Int) | (Constructor::Bool(_), Type::Bool) => true,
        (Constructor::Record(fs), Type::Record(ts)) => {
            fs.len() == ts.len()
                && fs.iter().zip(ts).all(|((f, l), (g, t))| f == g && psi.get(l) == Some(t))
        }
        (Constructor::Coll(m), Type::Coll(t)) => m.labels().all(|l| psi.get(l) == Some(t.as_ref())),
        _ => false,
    }
}

/// `⊢ σ : Ψ`.
pub fn store_typecheck(sigma: &Store, psi: &StoreType) -> Result<(), StoreTypeError> {
    for l in sigma.labels() {
        if !psi.contains_key(l) {
            return Err(StoreTypeError::Domain(l.clone()));
        }
    }
    for (l, tau) in psi {
        let k = sigma.lookup(l).ok_or_else(|| StoreTypeError::Domain(l.clone()))?;
        if !check_con(psi, k, tau) {
            return Err(StoreTypeError::Mismatch { label: l.clone(), expected: tau.to_string() });
        }
    }
    check_acyclic(sigma)
}

pub fn is_well_typed(sigma: &Store, psi: &StoreType) -> bool {
    store_typecheck(sigma, psi).is_ok()
}

/// Most general store type of `σ` agreeing with `fixed`. Element types of
/// collections that are empty everywhere default to `int`.
pub fn infer_store_type_with(sigma: &Store, fixed: &StoreType) -> Result<StoreType, StoreTypeError> {
    check_acyclic(sigma)?;
    let mut u = Unifier::default();
    let metas: BTreeMap<&Label, Ty> = sigma.labels().map(|l| (l, u.fresh())).collect();
    let mismatch = |l: &Label, u: &Unifier, t: &Ty| StoreTypeError::Mismatch { label: l.clone(), expected: u.show(t) };
    for (l, tau) in fixed {
        let m = metas.get(l).ok_or_else(|| StoreTypeError::Domain(l.clone()))?;
        let t = Ty::from(tau);
        if !u.unify(m, &t) {
            return Err(mismatch(l, &u, &t));
        }
    }
    for (l, k) in sigma.iter() {
        let t = match k {
            Constructor::Int(_) => Ty::Int,
            Constructor::Bool(_) => Ty::Bool,
            Constructor::Record(fs) => Ty::Record(fs.iter().map(|(f, l)| (f.clone(), metas[l].clone())).collect()),
            Constructor::Coll(m) => {
                let elem = u.fresh();
                for e in m.labels() {
                    if !u.unify(&elem, &metas[e]) {
                        return Err(mismatch(e, &u, &elem));
                    }
                }
                Ty::Coll(Box::new(elem))
            }
        };
        if !u.unify(&metas[l], &t) {
            return Err(mismatch(l, &u, &metas[l]));
        }
    }
    Ok(metas.into_iter().map(|(l, t)| (l.clone(), u.resolve_or_int(&t))).collect())
}

pub fn infer_store_type(sigma: &Store) -> Result<StoreType, StoreTypeError> {
    infer_store_type_with(sigma, &StoreType::new())
}

/// `σ` matches `Ψ` avoiding `S`: some `Ψ' ⊇ Ψ` with `dom(Ψ') ∩ S = ∅` types `σ`.
pub fn matches_avoiding(sigma: &Store, psi: &StoreType, avoid: &BTreeSet<Label>) -> bool {
    sigma.labels().all(|l| !avoid.contains(l)) && infer_store_type_with(sigma, psi).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::LabelMultiset;

    fn l(s: &str) -> Label {
        Label::new(s)
    }

    #[test]
    fn infers_and_checks_simple_store() {
        let sigma: Store = [
            (l("a"), Constructor::Int(1.into())),
            (l("r"), Constructor::Record([("A".to_string(), l("a"))].into_iter().collect())),
            (l("c"), Constructor::Coll(LabelMultiset::singleton(l("r")))),
            (l("e"), Constructor::Coll(LabelMultiset::new())),
        ]
        .into_iter()
        .collect();
        let psi = infer_store_type(&sigma).unwrap();
        assert_eq!(psi[&l("c")].to_string(), "{(A: int)}");
        assert_eq!(psi[&l("e")], Type::coll(Type::Int));
        store_typecheck(&sigma, &psi).unwrap();

        let mut fixed = StoreType::new();
        fixed.insert(l("e"), Type::coll(Type::Bool));
        let psi2 = infer_store_type_with(&sigma, &fixed).unwrap();
        assert_eq!(psi2[&l("e")], Type::coll(Type::Bool));
        fixed.insert(l("a"), Type::Bool);
        assert!(infer_store_type_with(&sigma, &fixed).is_err());
        assert!(!matches_avoiding(&sigma, &psi, &[l("e")].into_iter().collect()));
        assert!(matches_avoiding(&sigma, &StoreType::new(), &[l("z")].into_iter().collect()));
    }

    #[test]
    fn rejects_heterogeneous_and_cyclic_stores() {
        let het: Store = [
            (l("a"), Constructor::Int(1.into())),
            (l("b"), Constructor::Bool(true)),
            (l("c"), Constructor::Coll([(l("a"), 1), (l("b"), 1)].into_iter().collect())),
        ]
        .into_iter()
        .collect();
        assert!(infer_store_type(&het).is_err());
        let cyc: Store = [(l("c"), Constructor::Coll(LabelMultiset::singleton(l("c"))))].into_iter().collect();
        assert_eq!(check_acyclic(&cyc), Err(StoreTypeError::Cyclic(l("c"))));
        let dangling: Store = [(l("c"), Constructor::Coll(LabelMultiset::singleton(l("x"))))].into_iter().collect();
        assert!(matches!(check_acyclic(&dangling), Err(StoreTypeError::Dangling(..))));
    }
}
