//! Annotation-propagating operational semantics. These run on expressions
//! and stores, independently of traces, and serve as references for the
//! extraction functions.

use std::marker::PhantomData;

use super::dep::dep_fn;
use super::kcoll::KCollection;
use super::kprov::semiring_fn;
use super::semiring::Semiring;
use super::where_prov::where_fn;
use super::{ann, AnnMap, DepAnn, KAnn, WhereAnn};
use crate::eval::opsem::{close_atom, close_term};
use crate::eval::EvalError;
use crate::lang::CoreExpr;
use crate::store::{flatten, op_eval, orthogonal_merge, sum_ints, Constructor, FreshSupply, Label, LabelMultiset, Store, Term};

/// The rule-specific parts of an annotated semantics.
pub trait Propagation {
    type Ann: Clone + Default + PartialEq + std::fmt::Debug;
    /// What an iteration accumulates over its elements.
    type Acc;

    fn term(&self, t: &Term<Label>, h: &AnnMap<Self::Ann>) -> Self::Ann;
    fn proj(&self, h: &AnnMap<Self::Ann>, rec: &Label, src: &Label) -> Self::Ann;
    /// Annotation of a conditional's result after its branch ran.
    fn cond(&self, h: &AnnMap<Self::Ann>, out: &Label, test: &Label) -> Self::Ann;
    fn acc_zero(&self) -> Self::Acc;
    /// Contribution of element `elem` of `src`, whose body wrote `result`.
    fn acc_elem(&self, acc: Self::Acc, h0: &AnnMap<Self::Ann>, src: &Label, elem: &Label, result: &Label, hi: &AnnMap<Self::Ann>) -> Self::Acc;
    fn iter_out(&self, is_comp: bool, h: &AnnMap<Self::Ann>, src: &Label, acc: Self::Acc) -> Self::Ann;
}

pub struct Where;
pub struct Dep;
pub struct Semi<K>(PhantomData<K>);

impl<K> Default for Semi<K> {
    fn default() -> Self {
        Semi(PhantomData)
    }
}

impl Propagation for Where {
    type Ann = WhereAnn;
    type Acc = ();

    fn term(&self, t: &Term<Label>, h: &AnnMap<WhereAnn>) -> WhereAnn {
        where_fn(t, h)
    }
    fn proj(&self, h: &AnnMap<WhereAnn>, _: &Label, src: &Label) -> WhereAnn {
        ann(h, src)
    }
    fn cond(&self, h: &AnnMap<WhereAnn>, out: &Label, _: &Label) -> WhereAnn {
        ann(h, out)
    }
    fn acc_zero(&self) {}
    fn acc_elem(&self, _: (), _: &AnnMap<WhereAnn>, _: &Label, _: &Label, _: &Label, _: &AnnMap<WhereAnn>) {}
    fn iter_out(&self, _: bool, _: &AnnMap<WhereAnn>, _: &Label, _: ()) -> WhereAnn {
        None
    }
}

impl Propagation for Dep {
    type Ann = DepAnn;
    type Acc = DepAnn;

    fn term(&self, t: &Term<Label>, h: &AnnMap<DepAnn>) -> DepAnn {
        dep_fn(t, h)
    }
    fn proj(&self, h: &AnnMap<DepAnn>, rec: &Label, src: &Label) -> DepAnn {
        let mut a = ann(h, src);
        a.extend(ann(h, rec));
        a
    }
    fn cond(&self, h: &AnnMap<DepAnn>, out: &Label, test: &Label) -> DepAnn {
        let mut a = ann(h, out);
        a.extend(ann(h, test));
        a
    }
    fn acc_zero(&self) -> DepAnn {
        DepAnn::new()
    }
    fn acc_elem(&self, mut acc: DepAnn, _: &AnnMap<DepAnn>, _: &Label, _: &Label, result: &Label, hi: &AnnMap<DepAnn>) -> DepAnn {
        acc.extend(ann(hi, result));
        acc
    }
    fn iter_out(&self, _: bool, h: &AnnMap<DepAnn>, src: &Label, mut acc: DepAnn) -> DepAnn {
        acc.extend(ann(h, src));
        acc
    }
}

impl<K: Semiring> Propagation for Semi<K> {
    type Ann = KAnn<K>;
    type Acc = KCollection<K>;

    fn term(&self, t: &Term<Label>, h: &AnnMap<KAnn<K>>) -> KAnn<K> {
        semiring_fn(t, h)
    }
    fn proj(&self, h: &AnnMap<KAnn<K>>, _: &Label, src: &Label) -> KAnn<K> {
        ann(h, src)
    }
    fn cond(&self, h: &AnnMap<KAnn<K>>, out: &Label, _: &Label) -> KAnn<K> {
        ann(h, out)
    }
    fn acc_zero(&self) -> KCollection<K> {
        KCollection::zero()
    }
    fn acc_elem(
        &self,
        acc: KCollection<K>,
        h0: &AnnMap<KAnn<K>>,
        src: &Label,
        elem: &Label,
        result: &Label,
        _: &AnnMap<KAnn<K>>,
    ) -> KCollection<K> {
        let k = ann(h0, src).map_or_else(K::zero, |c| c.get(elem));
        acc.add(&KCollection::eta(result).scale(&k))
    }
    fn iter_out(&self, is_comp: bool, h: &AnnMap<KAnn<K>>, _: &Label, acc: KCollection<K>) -> KAnn<K> {
        is_comp.then(|| acc.bind(|x| ann(h, x).unwrap_or_default()))
    }
}

/// `σ, h, l, e ⇓ σ', h'` for the semantics `p`. Allocates labels exactly as
/// the plain evaluator does.
pub fn annotated_eval<P: Propagation>(
    p: &P,
    sigma: &Store,
    h: &AnnMap<P::Ann>,
    dest: &Label,
    e: &CoreExpr,
    supply: &mut FreshSupply,
) -> Result<(Store, AnnMap<P::Ann>), EvalError> {
    match e {
        CoreExpr::Term(t) => {
            let t = close_term(t)?;
            let mut out = sigma.clone();
            out.bind(dest.clone(), op_eval(&t, sigma)?)?;
            Ok((out, h.update(dest.clone(), p.term(&t, h))))
        }
        CoreExpr::Let(x, e1, e2) => {
            let l1 = supply.fresh();
            let (s1, h1) = annotated_eval(p, sigma, h, &l1, e1, supply)?;
            annotated_eval(p, &s1, &h1, dest, &e2.subst(x, &l1), supply)
        }
        CoreExpr::If(w, et, ef) => {
            let test = close_atom(w)?;
            let b = sigma.bool(&test)?;
            let (s1, h1) = annotated_eval(p, sigma, h, dest, if b { et } else { ef }, supply)?;
            let a = p.cond(&h1, dest, &test);
            Ok((s1, h1.update(dest.clone(), a)))
        }
        CoreExpr::Proj(field, w) => {
            let rec = close_atom(w)?;
            let src = sigma
                .record(&rec)?
                .get(field)
                .ok_or_else(|| EvalError::Shape(format!("record at `{rec}` has no field `{field}`")))?
                .clone();
            let mut out = sigma.clone();
            out.bind(dest.clone(), sigma.get(&src)?.clone())?;
            Ok((out, h.update(dest.clone(), p.proj(h, &rec, &src))))
        }
        CoreExpr::Comp(x, w, body) | CoreExpr::Sum(x, w, body) => {
            let is_comp = matches!(e, CoreExpr::Comp(..));
            let src = close_atom(w)?;
            let mut out = sigma.clone();
            let mut h2 = h.clone();
            let mut results = LabelMultiset::new();
            let mut acc = p.acc_zero();
            for (l, m) in sigma.coll(&src)?.iter() {
                let r = supply.fresh();
                let (si, hi) = annotated_eval(p, sigma, h, &r, &body.subst(x, l), supply)?;
                for (w, _) in si.extension_over(sigma) {
                    if let Some(a) = hi.get(w) {
                        h2.insert(w.clone(), a.clone());
                    }
                }
                out = orthogonal_merge(&out, &si, sigma)?;
                acc = p.acc_elem(acc, h, &src, l, &r, &hi);
                results = results.disjoint_union(&[(r, m)].into_iter().collect())?;
            }
            let k = if is_comp { Constructor::Coll(flatten(&out, &results)?) } else { Constructor::Int(sum_ints(&out, &results)?) };
            out.bind(dest.clone(), k)?;
            let a = p.iter_out(is_comp, &h2, &src, acc);
            Ok((out, h2.update(dest.clone(), a)))
        }
    }
}

pub fn where_eval(
    sigma: &Store,
    h: &AnnMap<WhereAnn>,
    dest: &Label,
    e: &CoreExpr,
    supply: &mut FreshSupply,
) -> Result<(Store, AnnMap<WhereAnn>), EvalError> {
    annotated_eval(&Where, sigma, h, dest, e, supply)
}

pub fn dep_eval(
    sigma: &Store,
    h: &AnnMap<DepAnn>,
    dest: &Label,
    e: &CoreExpr,
    supply: &mut FreshSupply,
) -> Result<(Store, AnnMap<DepAnn>), EvalError> {
    annotated_eval(&Dep, sigma, h, dest, e, supply)
}

pub fn k_eval<K: Semiring>(
    sigma: &Store,
    h: &AnnMap<KAnn<K>>,
    dest: &Label,
    e: &CoreExpr,
    supply: &mut FreshSupply,
) -> Result<(Store, AnnMap<KAnn<K>>), EvalError> {
    annotated_eval(&Semi::<K>::default(), sigma, h, dest, e, supply)
}
