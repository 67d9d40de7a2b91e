use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lang::CoreExpr;
use crate::store::{Label, LabelMultiset, LabelSet, Term};

/// Whether an iteration trace records a comprehension or a sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IterKind {
    Comp,
    Sum,
}

impl IterKind {
    pub fn keyword(self) -> &'static str {
        match self {
            IterKind::Comp => "comp",
            IterKind::Sum => "sum",
        }
    }
}

/// `Θ`: labeled traces keyed by input label, each with its multiplicity.
pub type Theta = BTreeMap<Label, (Trace, u64)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Trace {
    /// `l <- t`
    Assign { out: Label, term: Term<Label> },
    /// `l <- proj_F(rec, src)`
    Proj { out: Label, field: String, rec: Label, src: Label },
    Seq { first: Box<Trace>, second: Box<Trace> },
    /// `cond_l(test, b, T, e_t, e_f)`. The branch expressions are absent in
    /// traces written by hand without annotations.
    Cond {
        out: Label,
        test: Label,
        branch: bool,
        body: Box<Trace>,
        then_e: Option<CoreExpr>,
        else_e: Option<CoreExpr>,
    },
    /// `l <- comp(src, Θ, x.e)` or `l <- sum(src, Θ, x.e)`.
    Iter { iter: IterKind, out: Label, src: Label, theta: Theta, binder: Option<(String, CoreExpr)> },
}

impl Trace {
    pub fn seq(first: Trace, second: Trace) -> Trace {
        Trace::Seq { first: Box::new(first), second: Box::new(second) }
    }

    pub fn assign(out: &str, term: Term<Label>) -> Trace {
        Trace::Assign { out: Label::new(out), term }
    }

    /// `out(T)`.
    pub fn out(&self) -> &Label {
        match self {
            Trace::Assign { out, .. } | Trace::Proj { out, .. } | Trace::Cond { out, .. } | Trace::Iter { out, .. } => out,
            Trace::Seq { second, .. } => second.out(),
        }
    }

    /// `Wr(T)`.
    pub fn written_labels(&self) -> LabelSet {
        let mut out = LabelSet::new();
        self.collect_written(&mut out);
        out
    }

    fn collect_written(&self, acc: &mut LabelSet) {
        match self {
            Trace::Assign { out, .. } | Trace::Proj { out, .. } => {
                acc.insert(out.clone());
            }
            Trace::Seq { first, second } => {
                first.collect_written(acc);
                second.collect_written(acc);
            }
            Trace::Cond { out, body, .. } => {
                acc.insert(out.clone());
                body.collect_written(acc);
            }
            Trace::Iter { out, theta, .. } => {
                acc.insert(out.clone());
                for (t, _) in theta.values() {
                    t.collect_written(acc);
                }
            }
        }
    }

    /// Every label mentioned by the trace, including labels inside
    /// expression annotations.
    pub fn all_labels(&self) -> LabelSet {
        let mut acc = LabelSet::new();
        self.visit(&mut |t| match t {
            Trace::Assign { out, term } => {
                acc.insert(out.clone());
                acc.extend(term.args().into_iter().cloned());
            }
            Trace::Proj { out, rec, src, .. } => {
                acc.extend([out.clone(), rec.clone(), src.clone()]);
            }
            Trace::Seq { .. } => {}
            Trace::Cond { out, test, then_e, else_e, .. } => {
                acc.extend([out.clone(), test.clone()]);
                for e in then_e.iter().chain(else_e) {
                    acc.extend(e.labels());
                }
            }
            Trace::Iter { out, src, theta, binder, .. } => {
                acc.extend([out.clone(), src.clone()]);
                acc.extend(theta.keys().cloned());
                if let Some((_, e)) = binder {
                    acc.extend(e.labels());
                }
            }
        });
        acc
    }

    /// Pre-order traversal over every node, descending into `Θ`.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Trace)) {
        f(self);
        match self {
            Trace::Seq { first, second } => {
                first.visit(f);
                second.visit(f);
            }
            Trace::Cond { body, .. } => body.visit(f),
            Trace::Iter { theta, .. } => theta.values().for_each(|(t, _)| t.visit(f)),
            _ => {}
        }
    }

    /// Number of trace nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Flattens a right- or left-nested sequence into its steps.
    /// Renames every label, including those inside recorded expressions.
    pub fn rename(&self, f: &dyn Fn(&Label) -> Label) -> Trace {
        match self {
            Trace::Assign { out, term } => Trace::Assign { out: f(out), term: term.map(f) },
            Trace::Proj { out, field, rec, src } => Trace::Proj { out: f(out), field: field.clone(), rec: f(rec), src: f(src) },
            Trace::Seq { first, second } => Trace::seq(first.rename(f), second.rename(f)),
            Trace::Cond { out, test, branch, body, then_e, else_e } => Trace::Cond {
                out: f(out),
                test: f(test),
                branch: *branch,
                body: Box::new(body.rename(f)),
                then_e: then_e.as_ref().map(|e| e.map_labels(f)),
                else_e: else_e.as_ref().map(|e| e.map_labels(f)),
            },
            Trace::Iter { iter, out, src, theta, binder } => Trace::Iter {
                iter: *iter,
                out: f(out),
                src: f(src),
                theta: theta.iter().map(|(l, (t, m))| (f(l), (t.rename(f), *m))).collect(),
                binder: binder.as_ref().map(|(x, e)| (x.clone(), e.map_labels(f))),
            },
        }
    }

    pub fn steps(&self) -> Vec<&Trace> {
        match self {
            Trace::Seq { first, second } => {
                let mut v = first.steps();
                v.extend(second.steps());
                v
            }
            t => vec![t],
        }
    }
}

/// `in*(Θ)`.
pub fn in_star(theta: &Theta) -> LabelMultiset {
    theta.iter().map(|(l, (_, m))| (l.clone(), *m)).collect()
}

/// `out*(Θ)`. Distinct entries always have distinct outputs in traces
/// produced by evaluation; hand-written ones may not, and their
/// multiplicities add.
pub fn out_star(theta: &Theta) -> LabelMultiset {
    theta.values().map(|(t, m)| (t.out().clone(), *m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s)
    }

    #[test]
    fn out_and_written_labels() {
        let t1 = Trace::assign("a", Term::Int(1.into()));
        let t2 = Trace::assign("b", Term::Plus(l("a"), l("a")));
        let s = Trace::seq(t1.clone(), t2.clone());
        assert_eq!(s.out(), &l("b"));
        assert_eq!(s.written_labels(), [l("a"), l("b")].into_iter().collect());
        let c = Trace::Cond { out: l("b"), test: l("x"), branch: true, body: Box::new(s), then_e: None, else_e: None };
        assert_eq!(c.written_labels().len(), 2);
    }

    #[test]
    fn star_operators_keep_multiplicity() {
        let mut theta = Theta::new();
        theta.insert(l("l1"), (Trace::assign("o1", Term::Bool(true)), 2));
        theta.insert(l("l2"), (Trace::assign("o2", Term::Bool(true)), 1));
        assert_eq!(in_star(&theta), [(l("l1"), 2), (l("l2"), 1)].into_iter().collect());
        assert_eq!(out_star(&theta), [(l("o1"), 2), (l("o2"), 1)].into_iter().collect());
        let t = Trace::Iter { iter: IterKind::Comp, out: l("r"), src: l("s"), theta, binder: None };
        assert_eq!(t.written_labels(), [l("o1"), l("o2"), l("r")].into_iter().collect());
        assert_eq!(t.size(), 3);
    }
}
