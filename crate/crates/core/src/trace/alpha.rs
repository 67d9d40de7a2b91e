use super::model::{Theta, Trace};
use crate::lang::{Atom, CoreExpr};
use crate::store::{Label, LabelSet, Term};

#[derive(Clone, Default)]
struct Bij {
    fwd: im::OrdMap<Label, Label>,
    bwd: im::OrdMap<Label, Label>,
}

struct Ctx<'a> {
    frontier: &'a LabelSet,
}

impl Ctx<'_> {
    fn link(&self, bij: Bij, a: &Label, b: &Label) -> Option<Bij> {
        let (fa, fb) = (self.frontier.contains(a), self.frontier.contains(b));
        if fa || fb {
            return (a == b).then_some(bij);
        }
        match (bij.fwd.get(a), bij.bwd.get(b)) {
            (Some(x), Some(y)) => (x == b && y == a).then_some(bij),
            (None, None) => Some(Bij { fwd: bij.fwd.update(a.clone(), b.clone()), bwd: bij.bwd.update(b.clone(), a.clone()) }),
            _ => None,
        }
    }

    fn links<'b>(&self, mut bij: Bij, pairs: impl IntoIterator<Item = (&'b Label, &'b Label)>) -> Option<Bij> {
        for (a, b) in pairs {
            bij = self.link(bij, a, b)?;
        }
        Some(bij)
    }

    fn term(&self, bij: Bij, a: &Term<Label>, b: &Term<Label>) -> Option<Bij> {
        let same_shape = match (a, b) {
            (Term::Empty(x), Term::Empty(y)) => x.is_none() || y.is_none() || x == y,
            _ => a.map(|_| ()) == b.map(|_| ()),
        };
        if !same_shape {
            return None;
        }
        self.links(bij, a.args().into_iter().zip(b.args()))
    }

    fn atom(&self, bij: Bij, a: &Atom, b: &Atom, vars: &[(String, String)]) -> Option<Bij> {
        match (a, b) {
            (Atom::Lab(x), Atom::Lab(y)) => self.link(bij, x, y),
            (Atom::Var(x), Atom::Var(y)) => {
                let bx = vars.iter().rposition(|(v, _)| v == x);
                let by = vars.iter().rposition(|(_, w)| w == y);
                match (bx, by) {
                    (Some(i), Some(j)) => (i == j).then_some(bij),
                    (None, None) => (x == y).then_some(bij),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn expr(&self, bij: Bij, a: &CoreExpr, b: &CoreExpr, vars: &mut Vec<(String, String)>) -> Option<Bij> {
        match (a, b) {
            (CoreExpr::Term(s), CoreExpr::Term(t)) => {
                let same_shape = match (s, t) {
                    (Term::Empty(x), Term::Empty(y)) => x.is_none() || y.is_none() || x == y,
                    _ => s.map(|_| ()) == t.map(|_| ()),
                };
                if !same_shape {
                    return None;
                }
                let mut bij = bij;
                for (x, y) in s.args().into_iter().zip(t.args()) {
                    bij = self.atom(bij, x, y, vars)?;
                }
                Some(bij)
            }
            (CoreExpr::Let(x, a1, a2), CoreExpr::Let(y, b1, b2)) => {
                let bij = self.expr(bij, a1, b1, vars)?;
                vars.push((x.clone(), y.clone()));
                let r = self.expr(bij, a2, b2, vars);
                vars.pop();
                r
            }
            (CoreExpr::If(w, a1, a2), CoreExpr::If(v, b1, b2)) => {
                let bij = self.atom(bij, w, v, vars)?;
                let bij = self.expr(bij, a1, b1, vars)?;
                self.expr(bij, a2, b2, vars)
            }
            (CoreExpr::Proj(f, w), CoreExpr::Proj(g, v)) if f == g => self.atom(bij, w, v, vars),
            (CoreExpr::Comp(x, w, a1), CoreExpr::Comp(y, v, b1)) | (CoreExpr::Sum(x, w, a1), CoreExpr::Sum(y, v, b1)) => {
                let bij = self.atom(bij, w, v, vars)?;
                vars.push((x.clone(), y.clone()));
                let r = self.expr(bij, a1, b1, vars);
                vars.pop();
                r
            }
            _ => None,
        }
    }

    /// Absent annotations match anything.
    fn opt_expr(&self, bij: Bij, a: &Option<CoreExpr>, b: &Option<CoreExpr>) -> Option<Bij> {
        match (a, b) {
            (Some(x), Some(y)) => self.expr(bij, x, y, &mut Vec::new()),
            _ => Some(bij),
        }
    }

    fn trace(&self, bij: Bij, a: &Trace, b: &Trace) -> Option<Bij> {
        match (a, b) {
            (Trace::Assign { out: o1, term: t1 }, Trace::Assign { out: o2, term: t2 }) => {
                let bij = self.link(bij, o1, o2)?;
                self.term(bij, t1, t2)
            }
            (
                Trace::Proj { out: o1, field: f1, rec: r1, src: s1 },
                Trace::Proj { out: o2, field: f2, rec: r2, src: s2 },
            ) if f1 == f2 => self.links(bij, [(o1, o2), (r1, r2), (s1, s2)]),
            (Trace::Seq { first: a1, second: a2 }, Trace::Seq { first: b1, second: b2 }) => {
                let bij = self.trace(bij, a1, b1)?;
                self.trace(bij, a2, b2)
            }
            (
                Trace::Cond { out: o1, test: t1, branch: x1, body: b1, then_e: te1, else_e: ee1 },
                Trace::Cond { out: o2, test: t2, branch: x2, body: b2, then_e: te2, else_e: ee2 },
            ) if x1 == x2 => {
                let bij = self.links(bij, [(o1, o2), (t1, t2)])?;
                let bij = self.trace(bij, b1, b2)?;
                let bij = self.opt_expr(bij, te1, te2)?;
                self.opt_expr(bij, ee1, ee2)
            }
            (
                Trace::Iter { iter: k1, out: o1, src: s1, theta: th1, binder: bd1 },
                Trace::Iter { iter: k2, out: o2, src: s2, theta: th2, binder: bd2 },
            ) if k1 == k2 && th1.len() == th2.len() => {
                let mut bij = self.links(bij, [(o1, o2), (s1, s2)])?;
                if let (Some((x, e1)), Some((y, e2))) = (bd1, bd2) {
                    bij = self.expr(bij, e1, e2, &mut vec![(x.clone(), y.clone())])?;
                }
                let entries: Vec<_> = th1.iter().collect();
                self.theta(bij, &entries, th2, &mut Vec::new())
            }
            _ => None,
        }
    }

    /// Matches the remaining entries of `Θ1` against unused entries of
    /// `Θ2`, trying the mapped key first and backtracking otherwise.
    fn theta(
        &self,
        bij: Bij,
        rest: &[(&Label, &(Trace, u64))],
        th2: &Theta,
        used: &mut Vec<Label>,
    ) -> Option<Bij> {
        let Some(((k1, (t1, m1)), rest)) = rest.split_first() else {
            return Some(bij);
        };
        let fixed = if self.frontier.contains(*k1) { Some(*k1) } else { bij.fwd.get(*k1) };
        let candidates: Vec<&Label> = match fixed {
            Some(k2) => th2.contains_key(k2).then_some(k2).into_iter().collect(),
            None => th2.keys().filter(|k| !used.contains(k)).collect(),
        };
        for k2 in candidates {
            if used.contains(k2) {
                continue;
            }
            let (t2, m2) = &th2[k2];
            if m1 != m2 {
                continue;
            }
            let Some(b) = self.link(bij.clone(), k1, k2).and_then(|b| self.trace(b, t1, t2)) else {
                continue;
            };
            used.push(k2.clone());
            if let Some(done) = self.theta(b, rest, th2, used) {
                return Some(done);
            }
            used.pop();
        }
        None
    }
}

/// Whether some bijection on labels outside `frontier` makes the traces
/// equal. Bound variables of annotations are compared up to renaming;
/// missing annotations match anything.
pub fn trace_alpha_eq(t1: &Trace, t2: &Trace, frontier: &LabelSet) -> bool {
    Ctx { frontier }.trace(Bij::default(), t1, t2).is_some()
}

/// The label bijection witnessing [`trace_alpha_eq`], if any.
pub fn alpha_witness(t1: &Trace, t2: &Trace, frontier: &LabelSet) -> Option<Vec<(Label, Label)>> {
    Ctx { frontier }.trace(Bij::default(), t1, t2).map(|b| b.fwd.into_iter().collect())
}
