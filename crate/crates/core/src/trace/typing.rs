use std::collections::BTreeMap;

use thiserror::Error;

use super::model::{IterKind, Trace};
use crate::lang::{elaborate_with, Atom, CoreExpr, Type, TypeError};
use crate::store::{Label, StoreType};

/// `Ψ ⊢ T : l:τ`, without the store type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceType {
    pub out: Label,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ill-typed trace at `{at}`: {reason}")]
pub struct TraceTypeError {
    pub at: Label,
    pub reason: String,
}

type Psi = im::OrdMap<Label, Type>;

fn err<T>(at: &Label, reason: impl Into<String>) -> Result<T, TraceTypeError> {
    Err(TraceTypeError { at: at.clone(), reason: reason.into() })
}

fn expr_type(psi: &Psi, gamma: &BTreeMap<String, Type>, e: &CoreExpr, at: &Label) -> Result<Type, TraceTypeError> {
    elaborate_with(&|l| psi.get(l).cloned(), gamma, e)
        .map(|(_, t)| t)
        .map_err(|e: TypeError| TraceTypeError { at: at.clone(), reason: e.to_string() })
}

fn label_type<'a>(psi: &'a Psi, l: &Label, at: &Label) -> Result<&'a Type, TraceTypeError> {
    match psi.get(l) {
        Some(t) => Ok(t),
        None => err(at, format!("label `{l}` is not typed")),
    }
}

fn check(psi: &Psi, t: &Trace) -> Result<Type, TraceTypeError> {
    match t {
        Trace::Assign { out, term } => {
            let e = CoreExpr::Term(term.map(|l| Atom::Lab(l.clone())));
            expr_type(psi, &BTreeMap::new(), &e, out)
        }
        Trace::Proj { out, field, rec, .. } => match label_type(psi, rec, out)? {
            Type::Record(fs) => match fs.get(field) {
                Some(t) => Ok(t.clone()),
                None => err(out, format!("`{rec}` has no field `{field}`")),
            },
            other => err(out, format!("`{rec}` has type {other}, expected a record")),
        },
        Trace::Seq { first, second } => {
            let t1 = check(psi, first)?;
            check(&psi.update(first.out().clone(), t1), second)
        }
        Trace::Cond { out, test, body, then_e, else_e, .. } => {
            match label_type(psi, test, out)? {
                Type::Bool => {}
                other => return err(out, format!("test `{test}` has type {other}")),
            }
            if body.out() != out {
                return err(out, format!("branch writes `{}`", body.out()));
            }
            let ty = check(psi, body)?;
            for e in then_e.iter().chain(else_e) {
                let te = expr_type(psi, &BTreeMap::new(), e, out)?;
                if te != ty {
                    return err(out, format!("branch `{e}` has type {te}, trace has {ty}"));
                }
            }
            Ok(ty)
        }
        Trace::Iter { iter, out, src, theta, binder } => {
            let elem = match label_type(psi, src, out)? {
                Type::Coll(t) => t.as_ref().clone(),
                other => return err(out, format!("`{src}` has type {other}, expected a collection")),
            };
            let mut result: Option<Type> = None;
            let mut agree = |t: Type, what: &str| -> Result<(), TraceTypeError> {
                let ok = match iter {
                    IterKind::Comp => matches!(t, Type::Coll(_)),
                    IterKind::Sum => t == Type::Int,
                };
                if !ok {
                    return err(out, format!("{what} has type {t}"));
                }
                match &result {
                    Some(r) if *r != t => err(out, format!("{what} has type {t}, others have {r}")),
                    _ => {
                        result = Some(t);
                        Ok(())
                    }
                }
            };
            if let Some((x, e)) = binder {
                let gamma = [(x.clone(), elem.clone())].into_iter().collect();
                agree(expr_type(psi, &gamma, e, out)?, "body")?;
            }
            for (l, (t, _)) in theta {
                agree(check(&psi.update(l.clone(), elem.clone()), t)?, &format!("entry [{l}]"))?;
            }
            match result {
                Some(t) => Ok(t),
                None if *iter == IterKind::Sum => Ok(Type::Int),
                None => err(out, "cannot determine the element type of an empty comprehension without its body"),
            }
        }
    }
}

/// `Ψ ⊢ T : l:τ`.
pub fn trace_typecheck(psi: &StoreType, t: &Trace) -> Result<TraceType, TraceTypeError> {
    let psi: Psi = psi.iter().map(|(l, t)| (l.clone(), t.clone())).collect();
    let ty = check(&psi, t)?;
    Ok(TraceType { out: t.out().clone(), ty })
}
