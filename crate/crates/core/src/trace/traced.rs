use super::model::{IterKind, Theta, Trace};
use crate::eval::opsem::{close_atom, close_term};
use crate::eval::EvalError;
use crate::lang::CoreExpr;
use crate::store::{flatten, op_eval, orthogonal_merge, sum_ints, Constructor, FreshSupply, Label, LabelMultiset, Store};

/// `σ, l, e ⇓ σ', T`.
pub fn traced_eval(sigma: &Store, dest: &Label, e: &CoreExpr, supply: &mut FreshSupply) -> Result<(Store, Trace), EvalError> {
    match e {
        CoreExpr::Term(t) => {
            let t = close_term(t)?;
            let k = op_eval(&t, sigma)?;
            let mut out = sigma.clone();
            out.bind(dest.clone(), k)?;
            Ok((out, Trace::Assign { out: dest.clone(), term: t }))
        }
        CoreExpr::Let(x, e1, e2) => {
            let l1 = supply.fresh();
            let (s1, t1) = traced_eval(sigma, &l1, e1, supply)?;
            let (s2, t2) = traced_eval(&s1, dest, &e2.subst(x, &l1), supply)?;
            Ok((s2, Trace::seq(t1, t2)))
        }
        CoreExpr::If(w, et, ef) => {
            let test = close_atom(w)?;
            let b = sigma.bool(&test)?;
            let (out, body) = traced_eval(sigma, dest, if b { et } else { ef }, supply)?;
            let t = Trace::Cond {
                out: dest.clone(),
                test,
                branch: b,
                body: Box::new(body),
                then_e: Some(et.as_ref().clone()),
                else_e: Some(ef.as_ref().clone()),
            };
            Ok((out, t))
        }
        CoreExpr::Proj(field, w) => {
            let rec = close_atom(w)?;
            let src = sigma
                .record(&rec)?
                .get(field)
                .ok_or_else(|| EvalError::Shape(format!("record at `{rec}` has no field `{field}`")))?
                .clone();
            let k = sigma.get(&src)?.clone();
            let mut out = sigma.clone();
            out.bind(dest.clone(), k)?;
            Ok((out, Trace::Proj { out: dest.clone(), field: field.clone(), rec, src }))
        }
        CoreExpr::Comp(x, w, body) | CoreExpr::Sum(x, w, body) => {
            let iter = if let CoreExpr::Comp(..) = e { IterKind::Comp } else { IterKind::Sum };
            let src = close_atom(w)?;
            let (mut out, results, theta) = traced_iter(sigma, x, sigma.coll(&src)?, body, supply)?;
            out.bind(dest.clone(), iter_result(iter, &out, &results)?)?;
            let t = Trace::Iter {
                iter,
                out: dest.clone(),
                src,
                theta,
                binder: Some((x.clone(), body.as_ref().clone())),
            };
            Ok((out, t))
        }
    }
}

pub(crate) fn iter_result(iter: IterKind, sigma: &Store, results: &LabelMultiset) -> Result<Constructor, EvalError> {
    Ok(match iter {
        IterKind::Comp => Constructor::Coll(flatten(sigma, results)?),
        IterKind::Sum => Constructor::Int(sum_ints(sigma, results)?),
    })
}

/// `σ, x ∈ L, e ⇓ σ', L', Θ`.
pub fn traced_iter(
    sigma: &Store,
    x: &str,
    ls: &LabelMultiset,
    body: &CoreExpr,
    supply: &mut FreshSupply,
) -> Result<(Store, LabelMultiset, Theta), EvalError> {
    let mut out = sigma.clone();
    let mut results = LabelMultiset::new();
    let mut theta = Theta::new();
    for (l, m) in ls.iter() {
        let r = supply.fresh();
        let (si, ti) = traced_eval(sigma, &r, &body.subst(x, l), supply)?;
        out = orthogonal_merge(&out, &si, sigma)?;
        results = results.disjoint_union(&[(r, m)].into_iter().collect())?;
        theta.insert(l.clone(), (ti, m));
    }
    Ok((out, results, theta))
}
