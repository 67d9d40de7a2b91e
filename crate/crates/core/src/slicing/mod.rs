//! Backward and forward trace slicing, and a readable simplification of
//! (sliced) traces.
//!
//! Dependency edges: an assignment or projection output depends on the
//! labels it reads; a conditional's output on its test; an iteration's
//! output on its source and on every element result. A slice keeps the
//! nodes whose outputs are in the closure, plus the context that makes
//! them readable: the conditionals and iteration entries enclosing a kept
//! node, and for a kept conditional its test's closure and the step
//! writing its result. Iterations keep only entries with kept nodes.

mod simplify;

use thiserror::Error;

pub use simplify::{residue, simplify, Residue, SimplifiedView};

use crate::store::{Label, LabelSet, Store};
use crate::trace::{Theta, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("`{0}` occurs neither in the trace nor in the store")]
    UnknownLabel(Label),
}

/// Focus labels must be mentioned by the trace or bound in the store.
pub fn check_focus(t: &Trace, focus: &LabelSet, sigma: Option<&Store>) -> Result<(), SliceError> {
    let known = t.all_labels();
    match focus.iter().find(|l| !known.contains(*l) && !sigma.is_some_and(|s| s.contains(l))) {
        Some(l) => Err(SliceError::UnknownLabel(l.clone())),
        None => Ok(()),
    }
}

fn reads(t: &Trace) -> Vec<&Label> {
    match t {
        Trace::Assign { term, .. } => term.args(),
        Trace::Proj { rec, src, .. } => vec![rec, src],
        Trace::Cond { test, .. } => vec![test],
        Trace::Iter { src, theta, .. } => std::iter::once(src).chain(theta.values().map(|(t, _)| t.out())).collect(),
        Trace::Seq { .. } => vec![],
    }
}

/// Labels the focus transitively depends on.
pub fn backward_closure(t: &Trace, focus: &LabelSet) -> LabelSet {
    let mut c = focus.clone();
    let mut nodes = Vec::new();
    t.visit(&mut |n| nodes.push(n));
    // Nodes are visited before their dependencies' consumers, so one reverse
    // sweep suffices except across iterations; loop to a fixpoint.
    loop {
        let before = c.len();
        for n in nodes.iter().rev() {
            if !matches!(n, Trace::Seq { .. }) && c.contains(n.out()) {
                c.extend(reads(n).into_iter().cloned());
            }
        }
        if c.len() == before {
            return c;
        }
    }
}

/// Labels that transitively depend on the focus.
pub fn forward_closure(t: &Trace, focus: &LabelSet) -> LabelSet {
    let mut f = focus.clone();
    let mut nodes = Vec::new();
    t.visit(&mut |n| nodes.push(n));
    loop {
        let before = f.len();
        for n in &nodes {
            if !matches!(n, Trace::Seq { .. }) && reads(n).into_iter().any(|l| f.contains(l)) {
                f.insert(n.out().clone());
            }
        }
        if f.len() == before {
            return f;
        }
    }
}

/// Adds the context of kept nodes to `c`. Returns whether `t` keeps anything.
fn add_context(t: &Trace, c: &mut LabelSet) -> bool {
    match t {
        Trace::Assign { out, .. } | Trace::Proj { out, .. } => c.contains(out),
        Trace::Seq { first, second } => {
            let b = add_context(second, c);
            add_context(first, c) || b
        }
        Trace::Cond { out, test, body, .. } => {
            if add_context(body, c) || c.contains(out) {
                c.insert(test.clone());
                c.insert(out.clone());
                true
            } else {
                false
            }
        }
        Trace::Iter { out, theta, .. } => {
            let mut any = false;
            for (ti, _) in theta.values() {
                any |= add_context(ti, c);
            }
            any || c.contains(out)
        }
    }
}

/// Removes nodes whose outputs are not in `keep`, and wrappers left empty.
pub fn prune(t: &Trace, keep: &LabelSet) -> Option<Trace> {
    match t {
        Trace::Assign { out, .. } | Trace::Proj { out, .. } => keep.contains(out).then(|| t.clone()),
        Trace::Seq { first, second } => match (prune(first, keep), prune(second, keep)) {
            (Some(a), Some(b)) => Some(Trace::seq(a, b)),
            (a, b) => a.or(b),
        },
        Trace::Cond { out, test, branch, body, then_e, else_e } => prune(body, keep).map(|body| Trace::Cond {
            out: out.clone(),
            test: test.clone(),
            branch: *branch,
            body: Box::new(body),
            then_e: then_e.clone(),
            else_e: else_e.clone(),
        }),
        Trace::Iter { iter, out, src, theta, binder } => {
            let theta2: Theta = theta
                .iter()
                .filter_map(|(l, (ti, m))| prune(ti, keep).map(|ti| (l.clone(), (ti, *m))))
                .collect();
            (keep.contains(out) || !theta2.is_empty()).then(|| Trace::Iter {
                iter: *iter,
                out: out.clone(),
                src: src.clone(),
                theta: theta2,
                binder: binder.clone(),
            })
        }
    }
}

/// Labels kept by the backward slice from `focus`.
pub fn backward_kept(t: &Trace, focus: &LabelSet) -> LabelSet {
    let mut c = backward_closure(t, focus);
    loop {
        let before = c.len();
        add_context(t, &mut c);
        c = backward_closure(t, &c);
        if c.len() == before {
            return c;
        }
    }
}

/// The part of `t` explaining how the focus labels were computed; `None`
/// if nothing in `t` contributes.
pub fn backward_slice(t: &Trace, focus: &LabelSet) -> Option<Trace> {
    prune(t, &backward_kept(t, focus))
}

/// The part of `t` influenced by the focus labels.
pub fn forward_slice(t: &Trace, focus: &LabelSet) -> Option<Trace> {
    prune(t, &forward_closure(t, focus))
}

/// Whether every node of `small` occurs in `big` (same node, possibly with
/// fewer iteration entries or steps).
pub fn is_subtrace(small: &Trace, big: &Trace) -> bool {
    let steps_small = small.steps();
    let steps_big = big.steps();
    let mut j = 0;
    for s in steps_small {
        loop {
            let Some(b) = steps_big.get(j) else { return false };
            j += 1;
            if node_within(s, b) {
                break;
            }
        }
    }
    true
}

fn node_within(s: &Trace, b: &Trace) -> bool {
    match (s, b) {
        (Trace::Cond { out, test, branch, body, .. }, Trace::Cond { out: o2, test: t2, branch: b2, body: body2, .. }) => {
            out == o2 && test == t2 && branch == b2 && is_subtrace(body, body2)
        }
        (Trace::Iter { iter, out, src, theta, .. }, Trace::Iter { iter: i2, out: o2, src: s2, theta: th2, .. }) => {
            iter == i2
                && out == o2
                && src == s2
                && theta.iter().all(|(l, (t, m))| th2.get(l).is_some_and(|(t2, m2)| m == m2 && is_subtrace(t, t2)))
        }
        _ => s == b,
    }
}

