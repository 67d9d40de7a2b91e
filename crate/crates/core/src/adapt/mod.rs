//! Trace adaptation and the fidelity harness.

use std::fmt;

use thiserror::Error;

use crate::eval::{EvalError, Value};
use crate::lang::CoreExpr;
use crate::pipeline::supply_for;
use crate::store::{
    constructor_from_json, constructor_to_json, infer_store_type, matches_avoiding, op_eval, orthogonal_merge, readback,
    Constructor, FreshSupply, Label, LabelMultiset, LabelSet, Store, StoreError,
};
use crate::trace::traced::iter_result;
use crate::trace::{check_consistency, trace_alpha_eq, traced_eval, Theta, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdaptError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("trace node writing `{0}` lacks the expression needed to re-evaluate it")]
    MissingAnnotation(Label),
}

impl From<StoreError> for AdaptError {
    fn from(e: StoreError) -> AdaptError {
        AdaptError::Eval(e.into())
    }
}

fn assign(sigma: &Store, l: &Label, k: Constructor) -> Store {
    let mut out = sigma.clone();
    out.set(l.clone(), k);
    out
}

/// `σ, T ↷ σ', T'`. `supply` must avoid `dom(σ)` and every label of `T`.
pub fn adapt(sigma: &Store, t: &Trace, supply: &mut FreshSupply) -> Result<(Store, Trace), AdaptError> {
    match t {
        Trace::Assign { out, term } => Ok((assign(sigma, out, op_eval(term, sigma)?), t.clone())),
        Trace::Seq { first, second } => {
            let (s1, t1) = adapt(sigma, first, supply)?;
            let (s2, t2) = adapt(&s1, second, supply)?;
            Ok((s2, Trace::seq(t1, t2)))
        }
        Trace::Proj { out, field, rec, .. } => {
            let src = sigma
                .record(rec)?
                .get(field)
                .ok_or_else(|| EvalError::Shape(format!("record at `{rec}` has no field `{field}`")))?
                .clone();
            let k = sigma.get(&src)?.clone();
            let t2 = Trace::Proj { out: out.clone(), field: field.clone(), rec: rec.clone(), src };
            Ok((assign(sigma, out, k), t2))
        }
        Trace::Cond { out, test, branch, body, then_e, else_e } => {
            let b = sigma.bool(test)?;
            let (s2, body2) = if b == *branch {
                adapt(sigma, body, supply)?
            } else {
                let e = if b { then_e } else { else_e };
                let e = e.as_ref().ok_or_else(|| AdaptError::MissingAnnotation(out.clone()))?;
                traced_eval(sigma, out, e, supply)?
            };
            let t2 = Trace::Cond {
                out: out.clone(),
                test: test.clone(),
                branch: b,
                body: Box::new(body2),
                then_e: then_e.clone(),
                else_e: else_e.clone(),
            };
            Ok((s2, t2))
        }
        Trace::Iter { iter, out, src, theta, binder } => {
            let ls = sigma.coll(src)?.clone();
            let (s2, results, theta2) = adapt_iter(sigma, &ls, theta, binder.as_ref(), out, supply)?;
            let k = iter_result(*iter, &s2, &results)?;
            let t2 = Trace::Iter { iter: *iter, out: out.clone(), src: src.clone(), theta: theta2, binder: binder.clone() };
            Ok((assign(&s2, out, k), t2))
        }
    }
}

/// `σ, x ∈ L, Θ ↷ σ', L', Θ'`: cached traces are re-run, new elements are
/// evaluated afresh; multiplicities come from `L`.
fn adapt_iter(
    sigma: &Store,
    ls: &LabelMultiset,
    theta: &Theta,
    binder: Option<&(String, CoreExpr)>,
    at: &Label,
    supply: &mut FreshSupply,
) -> Result<(Store, LabelMultiset, Theta), AdaptError> {
    let mut out = sigma.clone();
    let mut results = LabelMultiset::new();
    let mut theta2 = Theta::new();
    for (l, m) in ls.iter() {
        let (si, ti) = match theta.get(l) {
            Some((cached, _)) => adapt(sigma, cached, supply)?,
            None => {
                let (x, e) = binder.ok_or_else(|| AdaptError::MissingAnnotation(at.clone()))?;
                let r = supply.fresh();
                traced_eval(sigma, &r, &e.subst(x, l), supply)?
            }
        };
        out = orthogonal_merge(&out, &si, sigma)?;
        results = results.disjoint_union(&[(ti.out().clone(), m)].into_iter().collect())?;
        theta2.insert(l.clone(), (ti, m));
    }
    Ok((out, results, theta2))
}

/// Fresh-label supply for adapting `t` over `sigma`.
pub fn adapt_supply(sigma: &Store, t: &Trace) -> FreshSupply {
    let labels = t.all_labels();
    FreshSupply::avoiding(sigma.labels().chain(labels.iter()))
}

/// Whole-constructor replacements, applied in order. Labels not yet in the
/// store are added.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EditScript(pub Vec<(Label, Constructor)>);

impl EditScript {
    pub fn apply(&self, sigma: &Store) -> Store {
        let mut out = sigma.clone();
        for (l, k) in &self.0 {
            out.set(l.clone(), k.clone());
        }
        out
    }

    pub fn labels(&self) -> LabelSet {
        self.0.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<EditScript, StoreError> {
        let bad = |m: &str| StoreError::Format(format!("edit script: {m}"));
        let items = v.as_array().ok_or_else(|| bad("expected an array"))?;
        let mut out = Vec::new();
        for item in items {
            let obj = item.as_object().ok_or_else(|| bad("each edit must be an object"))?;
            let l = obj.get("label").and_then(|l| l.as_str()).ok_or_else(|| bad("missing `label`"))?;
            if !Label::is_valid_name(l) {
                return Err(bad(&format!("`{l}` is not a valid label")));
            }
            let k = constructor_from_json(obj.get("value").ok_or_else(|| bad("missing `value`"))?)?;
            out.push((Label::new(l), k));
        }
        Ok(EditScript(out))
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.0
            .iter()
            .map(|(l, k)| serde_json::json!({ "label": l.as_str(), "value": constructor_to_json(k) }))
            .collect::<Vec<_>>()
            .into()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IllegalEdit {
    #[error("edit writes `{0}`, which the trace writes")]
    WritesTraceLabel(Label),
    #[error("edited store no longer matches the input store type")]
    IllTyped,
}

/// Checks that `edited` matches the type of `original` avoiding `Wr(T) ∪ {dest}`.
pub fn check_edit(original: &Store, edited: &Store, t: &Trace, dest: &Label) -> Result<(), IllegalEdit> {
    let mut avoid = t.written_labels();
    avoid.insert(dest.clone());
    if let Some(l) = edited.labels().find(|l| avoid.contains(*l)) {
        return Err(IllegalEdit::WritesTraceLabel(l.clone()));
    }
    let psi = infer_store_type(original).map_err(|_| IllegalEdit::IllTyped)?;
    if !matches_avoiding(edited, &psi, &avoid) {
        return Err(IllegalEdit::IllTyped);
    }
    Ok(())
}

/// Outcome of one fidelity experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FidelityVerdict {
    pub pass: bool,
    pub adapted: Option<Value>,
    pub scratch: Option<Value>,
    pub detail: String,
}

impl fmt::Display for FidelityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", if self.pass { "PASS" } else { "FAIL" }, self.detail)
    }
}

/// Runs `e` on `sigma1`, edits the input, and compares adapting the trace
/// against evaluating from scratch on the edited input.
pub fn run_fidelity_check(e: &CoreExpr, sigma1: &Store, dest: &Label, edits: &EditScript) -> FidelityVerdict {
    let fail = |detail: String| FidelityVerdict { pass: false, adapted: None, scratch: None, detail };
    let (_, t1) = match traced_eval(sigma1, dest, e, &mut supply_for(sigma1, dest)) {
        Ok(r) => r,
        Err(err) => return fail(format!("initial run failed: {err}")),
    };
    let sigma2 = edits.apply(sigma1);
    if let Err(err) = check_edit(sigma1, &sigma2, &t1, dest) {
        return fail(format!("illegal edit: {err}"));
    }
    let (s_adapt, t_adapt) = match adapt(&sigma2, &t1, &mut adapt_supply(&sigma2, &t1)) {
        Ok(r) => r,
        Err(err) => return fail(format!("adaptation failed: {err}")),
    };
    let (s_scratch, t_scratch) = match traced_eval(&sigma2, dest, e, &mut supply_for(&sigma2, dest)) {
        Ok(r) => r,
        Err(err) => return fail(format!("evaluation on the edited store failed: {err}")),
    };
    let (va, vs) = match (readback(&s_adapt, dest), readback(&s_scratch, dest)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return fail(format!("readback failed: {a:?} / {b:?}")),
    };
    let mut frontier: LabelSet = sigma2.labels().cloned().collect();
    frontier.insert(dest.clone());
    let mut problems = Vec::new();
    if va != vs {
        problems.push(format!("adapted result {va} differs from {vs}"));
    }
    if !trace_alpha_eq(&t_adapt, &t_scratch, &frontier) {
        problems.push(format!("adapted trace\n{t_adapt}\nis not a renaming of\n{t_scratch}"));
    }
    if let Err(err) = check_consistency(&s_adapt, &t_adapt) {
        problems.push(format!("adapted trace is inconsistent: {err}"));
    }
    let pass = problems.is_empty();
    let detail = if pass { format!("result {va}") } else { problems.join("; ") };
    FidelityVerdict { pass, adapted: Some(va), scratch: Some(vs), detail }
}
