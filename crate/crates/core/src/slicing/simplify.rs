use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use crate::store::{Label, Term};
use crate::trace::{IterKind, Trace};

/// An expression over input labels, built by substituting the definitions
/// of intermediate labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Residue {
    Lab(Label),
    Node(Box<Term<Residue>>),
}

impl Residue {
    fn node(t: Term<Residue>) -> Residue {
        Residue::Node(Box::new(t))
    }

    fn is_compound(&self) -> bool {
        matches!(self, Residue::Node(t) if matches!(**t, Term::Plus(..) | Term::Eq(..) | Term::And(..) | Term::Union(..)))
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self {
            Residue::Lab(l) => return write!(f, "{l}"),
            Residue::Node(t) => t.as_ref(),
        };
        let sub = |r: &Residue| if r.is_compound() { format!("({r})") } else { r.to_string() };
        match t {
            Term::Int(i) => write!(f, "{i}"),
            Term::Bool(b) => f.write_str(if *b { "t" } else { "f" }),
            Term::Plus(a, b) => write!(f, "{} + {}", sub(a), sub(b)),
            Term::Eq(a, b) => write!(f, "{} = {}", sub(a), sub(b)),
            Term::And(a, b) => write!(f, "{} && {}", sub(a), sub(b)),
            Term::Union(a, b) => write!(f, "{} U {}", sub(a), sub(b)),
            Term::Not(a) => write!(f, "!{}", sub(a)),
            Term::Copy(a) => write!(f, "{a}"),
            Term::Empty(_) => f.write_str("{}"),
            Term::Singleton(a) => write!(f, "{{{a}}}"),
            Term::IsEmpty(a) => write!(f, "empty({a})"),
            Term::Record(fs) => {
                let parts: Vec<String> = fs.iter().map(|(n, r)| format!("{n}:{r}")).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

/// A trace with projection and scalar steps folded into the places that
/// use them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplifiedView {
    Step { out: Label, expr: Residue },
    Seq(Vec<SimplifiedView>),
    Cond { test: Residue, branch: bool, body: Box<SimplifiedView> },
    Iter { iter: IterKind, out: Label, src: Residue, entries: Vec<(Label, SimplifiedView, u64)> },
}

struct Defs<'a> {
    nodes: BTreeMap<&'a Label, &'a Trace>,
    inlined: BTreeSet<&'a Label>,
}

impl<'a> Defs<'a> {
    fn new(t: &'a Trace) -> Defs<'a> {
        let mut nodes = BTreeMap::new();
        let mut used = BTreeSet::new();
        let mut cond_outs = BTreeSet::new();
        t.visit(&mut |n| match n {
            Trace::Assign { out, term } => {
                nodes.insert(out, n);
                used.extend(term.args());
            }
            Trace::Proj { out, rec, src, .. } => {
                nodes.insert(out, n);
                used.insert(rec);
                used.insert(src);
            }
            Trace::Cond { out, test, .. } => {
                cond_outs.insert(out);
                used.insert(test);
            }
            Trace::Iter { out, src, .. } => {
                nodes.insert(out, n);
                used.insert(src);
            }
            Trace::Seq { .. } => {}
        });
        let inlined = nodes
            .iter()
            .filter(|(l, n)| {
                let scalar = match n {
                    Trace::Proj { .. } => true,
                    Trace::Assign { term, .. } => !matches!(term, Term::Record(_) | Term::Empty(_) | Term::Singleton(_) | Term::Union(..)),
                    _ => false,
                };
                scalar && used.contains(*l) && !cond_outs.contains(*l)
            })
            .map(|(l, _)| *l)
            .collect();
        Defs { nodes, inlined }
    }

    /// The expression a use of `l` stands for in the simplified view.
    fn expr(&self, l: &Label) -> Residue {
        if self.inlined.contains(l) {
            self.definition(self.nodes[l])
        } else {
            Residue::Lab(l.clone())
        }
    }

    fn definition(&self, n: &Trace) -> Residue {
        match n {
            Trace::Proj { src, .. } | Trace::Assign { term: Term::Copy(src), .. } => self.expr(src),
            Trace::Assign { term, .. } => Residue::node(term.map(|a| self.expr(a))),
            _ => unreachable!("only steps are defined"),
        }
    }

    fn view(&self, t: &Trace) -> Option<SimplifiedView> {
        match t {
            Trace::Assign { out, .. } | Trace::Proj { out, .. } => {
                (!self.inlined.contains(out)).then(|| SimplifiedView::Step { out: out.clone(), expr: self.definition(t) })
            }
            Trace::Seq { .. } => {
                let parts: Vec<SimplifiedView> = t.steps().into_iter().filter_map(|s| self.view(s)).collect();
                match parts.len() {
                    0 => None,
                    1 => parts.into_iter().next(),
                    _ => Some(SimplifiedView::Seq(parts)),
                }
            }
            Trace::Cond { test, branch, body, .. } => Some(SimplifiedView::Cond {
                test: self.expr(test),
                branch: *branch,
                body: Box::new(self.view(body).unwrap_or(SimplifiedView::Seq(vec![]))),
            }),
            Trace::Iter { iter, out, src, theta, .. } => Some(SimplifiedView::Iter {
                iter: *iter,
                out: out.clone(),
                src: self.expr(src),
                entries: theta
                    .iter()
                    .map(|(l, (ti, m))| (l.clone(), self.view(ti).unwrap_or(SimplifiedView::Seq(vec![])), *m))
                    .collect(),
            }),
        }
    }

    /// `l` with every definition in the trace substituted.
    fn full(&self, l: &Label) -> Residue {
        match self.nodes.get(l) {
            None => Residue::Lab(l.clone()),
            Some(Trace::Proj { src, .. }) | Some(Trace::Assign { term: Term::Copy(src), .. }) => self.full(src),
            Some(Trace::Assign { term, .. }) => Residue::node(term.map(|a| self.full(a))),
            Some(Trace::Iter { iter, theta, .. }) => {
                let (unit, join): (Term<Residue>, fn(Residue, Residue) -> Term<Residue>) = match iter {
                    IterKind::Comp => (Term::Empty(None), Term::Union),
                    IterKind::Sum => (Term::Int(0.into()), Term::Plus),
                };
                let unit = Residue::node(unit);
                theta
                    .values()
                    .flat_map(|(ti, m)| std::iter::repeat_n(ti.out(), *m as usize))
                    .map(|o| self.full(o))
                    .filter(|r| *r != unit)
                    .reduce(|a, b| Residue::node(join(a, b)))
                    .unwrap_or(unit)
            }
            Some(_) => unreachable!("only steps and iterations are defined"),
        }
    }
}

/// Folds projections, copies and scalar operations into their uses.
/// Constructors, conditional results and iteration results stay as steps.
pub fn simplify(t: &Trace) -> SimplifiedView {
    let defs = Defs::new(t);
    defs.view(t).unwrap_or(SimplifiedView::Seq(vec![]))
}

/// The result of `t` as a single expression over the labels it reads.
/// Conditionals contribute their taken branch only, so the expression need
/// not hold for other inputs.
pub fn residue(t: &Trace) -> Residue {
    Defs::new(t).full(t.out())
}

impl SimplifiedView {
    fn print(&self, out: &mut String, indent: usize) {
        let newline = |out: &mut String, n: usize| {
            out.push('\n');
            out.extend(std::iter::repeat(' ').take(n));
        };
        match self {
            SimplifiedView::Step { out: l, expr } => {
                let _ = write!(out, "{l} <- {expr}");
            }
            SimplifiedView::Seq(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push(';');
                        newline(out, indent);
                    }
                    p.print(out, indent);
                }
            }
            SimplifiedView::Cond { test, branch, body } => {
                let _ = write!(out, "cond({test},{},", if *branch { "t" } else { "f" });
                if matches!(**body, SimplifiedView::Seq(_)) {
                    newline(out, indent + 2);
                } else {
                    out.push(' ');
                }
                body.print(out, indent + 2);
                out.push(')');
            }
            SimplifiedView::Iter { iter, out: l, src, entries } => {
                let _ = write!(out, "{l} <- {}({src},{{", iter.keyword());
                for (i, (el, v, m)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    newline(out, indent + 2);
                    let _ = write!(out, "[{el}] ");
                    v.print(out, indent + 4);
                    if *m != 1 {
                        let _ = write!(out, " : {m}");
                    }
                }
                if !entries.is_empty() {
                    newline(out, indent);
                }
                out.push_str("})");
            }
        }
    }
}

impl fmt::Display for SimplifiedView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.print(&mut s, 0);
        f.write_str(&s)
    }
}
