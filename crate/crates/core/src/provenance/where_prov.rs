use std::collections::{BTreeMap, BTreeSet};

use super::{ann, AnnMap, WhereAnn};
use crate::store::{Label, Store, Term};
use crate::trace::{Theta, Trace};

/// `where(l, h) = h(l)`; any other term has no where-provenance.
pub fn where_fn(t: &Term<Label>, h: &AnnMap<WhereAnn>) -> WhereAnn {
    match t {
        Term::Copy(l) => ann(h, l),
        _ => None,
    }
}

/// `h = id_σ`, lifted.
pub fn where_identity(sigma: &Store) -> AnnMap<WhereAnn> {
    sigma.labels().map(|l| (l.clone(), Some(l.clone()))).collect()
}

/// `h ⊢ T ⇝ h'`.
pub fn where_extract(h: &AnnMap<WhereAnn>, t: &Trace) -> AnnMap<WhereAnn> {
    match t {
        Trace::Assign { out, term } => h.update(out.clone(), where_fn(term, h)),
        Trace::Seq { first, second } => where_extract(&where_extract(h, first), second),
        Trace::Proj { out, src, .. } => h.update(out.clone(), ann(h, src)),
        Trace::Cond { body, .. } => where_extract(h, body),
        Trace::Iter { out, theta, .. } => where_extract_theta(h, theta).update(out.clone(), None),
    }
}

fn where_extract_theta(h: &AnnMap<WhereAnn>, theta: &Theta) -> AnnMap<WhereAnn> {
    let mut acc = h.clone();
    for (ti, _) in theta.values() {
        let hi = where_extract(h, ti);
        for l in ti.written_labels() {
            if let Some(a) = hi.get(&l) {
                acc.insert(l, a.clone());
            }
        }
    }
    acc
}

/// Whether `t` contains a chain of copies (`l ← l'` or a projection reading
/// `l'`) leading from `src` to `dst`.
pub fn chain_of_copies(t: &Trace, src: &Label, dst: &Label) -> bool {
    let mut edges: BTreeMap<&Label, Vec<&Label>> = BTreeMap::new();
    t.visit(&mut |n| match n {
        Trace::Assign { out, term: Term::Copy(from) } => edges.entry(from).or_default().push(out),
        Trace::Proj { out, src, .. } => edges.entry(src).or_default().push(out),
        _ => {}
    });
    let mut seen = BTreeSet::new();
    let mut stack = vec![src];
    while let Some(l) = stack.pop() {
        if l == dst {
            return true;
        }
        if seen.insert(l) {
            stack.extend(edges.get(l).into_iter().flatten().copied());
        }
    }
    false
}
