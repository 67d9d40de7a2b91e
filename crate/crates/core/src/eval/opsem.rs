use super::EvalError;
use crate::lang::{Atom, CoreExpr};
use crate::store::{flatten, op_eval, orthogonal_merge, sum_ints, Constructor, FreshSupply, Label, LabelMultiset, Store, Term};

pub(crate) fn close_atom(w: &Atom) -> Result<Label, EvalError> {
    match w {
        Atom::Lab(l) => Ok(l.clone()),
        Atom::Var(x) => Err(EvalError::UnboundVar(x.clone())),
    }
}

pub(crate) fn close_term(t: &Term<Atom>) -> Result<Term<Label>, EvalError> {
    t.try_map(close_atom)
}

/// `σ, l, e ⇓ σ'`: destination-passing evaluation of a closed A-normal
/// expression. Fresh labels come from `supply`; every label is written once.
pub fn eval(sigma: &Store, dest: &Label, e: &CoreExpr, supply: &mut FreshSupply) -> Result<Store, EvalError> {
    match e {
        CoreExpr::Term(t) => {
            let k = op_eval(&close_term(t)?, sigma)?;
            let mut out = sigma.clone();
            out.bind(dest.clone(), k)?;
            Ok(out)
        }
        CoreExpr::Let(x, e1, e2) => {
            let l1 = supply.fresh();
            let s1 = eval(sigma, &l1, e1, supply)?;
            eval(&s1, dest, &e2.subst(x, &l1), supply)
        }
        CoreExpr::If(w, et, ef) => {
            let b = sigma.bool(&close_atom(w)?)?;
            eval(sigma, dest, if b { et } else { ef }, supply)
        }
        CoreExpr::Proj(field, w) => {
            let r = close_atom(w)?;
            let li = sigma
                .record(&r)?
                .get(field)
                .ok_or_else(|| EvalError::Shape(format!("record at `{r}` has no field `{field}`")))?;
            let k = sigma.get(li)?.clone();
            let mut out = sigma.clone();
            out.bind(dest.clone(), k)?;
            Ok(out)
        }
        CoreExpr::Comp(x, w, body) | CoreExpr::Sum(x, w, body) => {
            let src = close_atom(w)?;
            let (mut out, results) = eval_iter(sigma, x, sigma.coll(&src)?, body, supply)?;
            let k = if let CoreExpr::Comp(..) = e {
                Constructor::Coll(flatten(&out, &results)?)
            } else {
                Constructor::Int(sum_ints(&out, &results)?)
            };
            out.bind(dest.clone(), k)?;
            Ok(out)
        }
    }
}

/// `σ, x ∈ L, e ⇓ σ', L'`. Elements are visited in label order, each from
/// the base store, and the extensions merged orthogonally.
pub fn eval_iter(
    sigma: &Store,
    x: &str,
    ls: &LabelMultiset,
    body: &CoreExpr,
    supply: &mut FreshSupply,
) -> Result<(Store, LabelMultiset), EvalError> {
    let mut out = sigma.clone();
    let mut results = LabelMultiset::new();
    for (l, m) in ls.iter() {
        let r = supply.fresh();
        let si = eval(sigma, &r, &body.subst(x, l), supply)?;
        out = orthogonal_merge(&out, &si, sigma)?;
        results = results.disjoint_union(&[(r, m)].into_iter().collect())?;
    }
    Ok((out, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{anormalize, parse};
    use crate::store::readback;

    #[test]
    fn evaluates_and_extends() {
        let sigma: Store = [
            (Label::new("a"), Constructor::Int(1.into())),
            (Label::new("b"), Constructor::Int(2.into())),
            (Label::new("c"), Constructor::Coll([(Label::new("a"), 1), (Label::new("b"), 2)].into_iter().collect())),
        ]
        .into_iter()
        .collect();
        let e = anormalize(&parse("sum (x in @c) x + 10").unwrap());
        let mut supply = FreshSupply::default();
        let out = eval(&sigma, &Label::new("l"), &e, &mut supply).unwrap();
        assert_eq!(readback(&out, &Label::new("l")).unwrap().to_string(), "35");
        for (l, k) in sigma.iter() {
            assert_eq!(out.lookup(l), Some(k));
        }
    }

    #[test]
    fn destination_is_written_once() {
        let sigma: Store = [(Label::new("a"), Constructor::Int(1.into()))].into_iter().collect();
        let e = anormalize(&parse("1").unwrap());
        let err = eval(&sigma, &Label::new("a"), &e, &mut FreshSupply::default()).unwrap_err();
        assert!(matches!(err, EvalError::Store(crate::store::StoreError::Rebind(_))));
    }
}
