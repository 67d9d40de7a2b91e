use super::{ann, AnnMap, DepAnn};
use crate::store::{Label, Store, Term};
use crate::trace::{Theta, Trace};

/// Union of the annotations of every label the term mentions.
pub fn dep_fn(t: &Term<Label>, h: &AnnMap<DepAnn>) -> DepAnn {
    t.args().into_iter().flat_map(|l| ann(h, l)).collect()
}

/// `h(l) = {l}` on every store label.
pub fn dep_identity(sigma: &Store) -> AnnMap<DepAnn> {
    sigma.labels().map(|l| (l.clone(), DepAnn::from([l.clone()]))).collect()
}

/// `h ⊢ T ⇝ h'` for dependency provenance.
pub fn dep_extract(h: &AnnMap<DepAnn>, t: &Trace) -> AnnMap<DepAnn> {
    match t {
        Trace::Assign { out, term } => h.update(out.clone(), dep_fn(term, h)),
        Trace::Seq { first, second } => dep_extract(&dep_extract(h, first), second),
        Trace::Proj { out, rec, src, .. } => {
            let a = ann(h, rec).union(&ann(h, src)).cloned().collect();
            h.update(out.clone(), a)
        }
        Trace::Cond { out, test, body, .. } => {
            let h2 = dep_extract(h, body);
            let a = ann(&h2, out).union(&ann(&h2, test)).cloned().collect();
            h2.update(out.clone(), a)
        }
        Trace::Iter { out, src, theta, .. } => {
            let (h2, a) = dep_extract_theta(h, theta);
            let top = ann(&h2, src).union(&a).cloned().collect();
            h2.update(out.clone(), top)
        }
    }
}

/// `h ⊢ Θ ⇝ h', a`: `a` collects the annotations of each entry's result.
fn dep_extract_theta(h: &AnnMap<DepAnn>, theta: &Theta) -> (AnnMap<DepAnn>, DepAnn) {
    let mut acc = h.clone();
    let mut a = DepAnn::new();
    for (ti, _) in theta.values() {
        let hi = dep_extract(h, ti);
        a.extend(ann(&hi, ti.out()));
        for l in ti.written_labels() {
            if let Some(x) = hi.get(&l) {
                acc.insert(l, x.clone());
            }
        }
    }
    (acc, a)
}
