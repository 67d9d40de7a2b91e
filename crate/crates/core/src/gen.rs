//! Seeded generators of well-typed programs, stores and legal edits.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::adapt::EditScript;
use crate::lang::{Expr, Type};
use crate::store::{infer_store_type, Constructor, Label, LabelMultiset, Store, StoreFile, StoreType};

/// Shape limits for generated cases.
#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_depth: u32,
    pub max_labels: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_depth: 4, max_labels: 12 }
    }
}

fn row_type() -> Type {
    Type::record([("A", Type::Int), ("B", Type::Int)])
}

/// Types generated programs compute with.
fn value_types() -> Vec<Type> {
    vec![
        Type::Int,
        Type::Bool,
        row_type(),
        Type::coll(Type::Int),
        Type::coll(row_type()),
        Type::coll(Type::coll(Type::Int)),
    ]
}

struct StoreBuilder<'r, R> {
    rng: &'r mut R,
    store: Store,
    budget: usize,
}

impl<R: Rng> StoreBuilder<'_, R> {
    fn int(&mut self, name: String) -> Label {
        let l = Label::new(name);
        self.store.set(l.clone(), Constructor::Int(self.rng.gen_range(-2i64..6).into()));
        l
    }

    fn row(&mut self, name: String) -> Label {
        let a = self.int(format!("{name}A"));
        let b = self.int(format!("{name}B"));
        let l = Label::new(name);
        self.store.set(l.clone(), Constructor::Record([("A".to_string(), a), ("B".to_string(), b)].into()));
        l
    }

    fn coll(&mut self, name: &str, elems: Vec<Label>) -> Label {
        let mut ms = LabelMultiset::new();
        for e in elems {
            ms.add(e, self.rng.gen_range(1..=2));
        }
        let l = Label::new(name);
        self.store.set(l.clone(), Constructor::Coll(ms));
        l
    }

    /// An input of type `ty` named `name`, or `None` if it would not fit.
    fn input(&mut self, name: &str, ty: &Type) -> Option<Label> {
        let cost = |n: usize| -> usize {
            match ty {
                Type::Int | Type::Bool => 1,
                Type::Record(_) => 3,
                Type::Coll(t) if **t == Type::Int => 1 + n,
                Type::Coll(_) if ty == &Type::coll(row_type()) => 1 + 3 * n,
                _ => 1 + n + 2 * n,
            }
        };
        // Collections of records keep at least one row so the store's
        // inferred type matches the schema.
        let min = usize::from(matches!(ty, Type::Coll(t) if matches!(**t, Type::Record(_) | Type::Coll(_))));
        let n = (min..=3).rev().find(|n| cost(*n) <= self.budget && (*n == min || self.rng.gen_bool(0.6)))?;
        self.budget -= cost(n);
        Some(match ty {
            Type::Int => self.int(name.to_string()),
            Type::Bool => {
                let l = Label::new(name);
                self.store.set(l.clone(), Constructor::Bool(self.rng.gen()));
                l
            }
            Type::Record(_) => self.row(name.to_string()),
            Type::Coll(t) if **t == Type::Int => {
                let elems = (1..=n).map(|i| self.int(format!("{name}{i}"))).collect();
                self.coll(name, elems)
            }
            Type::Coll(t) if matches!(**t, Type::Record(_)) => {
                let elems = (1..=n).map(|i| self.row(format!("{name}{i}"))).collect();
                self.coll(name, elems)
            }
            _ => {
                // {{int}}: inner collections share a pool of int labels.
                let pool: Vec<Label> = (1..=n).map(|i| self.int(format!("{name}e{i}"))).collect();
                let inner = (1..=n)
                    .map(|i| {
                        let k = self.rng.gen_range(0..=pool.len());
                        let elems = pool.choose_multiple(self.rng, k).cloned().collect();
                        self.coll(&format!("{name}c{i}"), elems)
                    })
                    .collect();
                self.coll(name, inner)
            }
        })
    }
}

/// A random store with one to four named inputs and its schema.
pub fn gen_store<R: Rng>(rng: &mut R, cfg: &GenConfig) -> (StoreFile, Vec<(String, Type)>) {
    let types = value_types();
    let mut b = StoreBuilder { rng, store: Store::new(), budget: cfg.max_labels };
    let mut schema = Vec::new();
    let mut env = BTreeMap::new();
    let count = b.rng.gen_range(1..=4);
    for i in 0..count {
        let ty = types.choose(b.rng).unwrap().clone();
        let name = ["r", "s", "u", "v"][i];
        if let Some(l) = b.input(name, &ty) {
            env.insert(name.to_uppercase(), l);
            schema.push((name.to_uppercase(), ty));
        }
    }
    if schema.is_empty() {
        let l = b.int("r".to_string());
        env.insert("R".to_string(), l);
        schema.push(("R".to_string(), Type::Int));
    }
    let root = env.get(&schema[0].0).cloned();
    (StoreFile { store: b.store, root, env }, schema)
}

struct ExprGen<'r, R> {
    rng: &'r mut R,
    vars: Vec<(String, Type)>,
    next: usize,
}

impl<R: Rng> ExprGen<'_, R> {
    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("x{}", self.next)
    }

    fn var_of(&mut self, ty: &Type) -> Option<Expr> {
        let vs: Vec<&String> = self.vars.iter().filter(|(_, t)| t == ty).map(|(x, _)| x).collect();
        vs.choose(self.rng).map(|x| Expr::var(x))
    }

    fn leaf(&mut self, ty: &Type) -> Expr {
        if self.rng.gen_bool(0.6) {
            if let Some(v) = self.var_of(ty) {
                return v;
            }
        }
        match ty {
            Type::Int => Expr::int(self.rng.gen_range(0..5)),
            Type::Bool => Expr::Bool(self.rng.gen()),
            Type::Record(fs) => Expr::Record(fs.iter().map(|(n, t)| (n.clone(), self.leaf(t))).collect()),
            Type::Coll(t) => {
                if self.rng.gen_bool(0.5) {
                    Expr::Empty(Some((**t).clone()))
                } else {
                    Expr::Singleton(Box::new(self.leaf(t)))
                }
            }
        }
    }

    fn under(&mut self, x: &str, ty: Type, body: impl FnOnce(&mut Self) -> Expr) -> Expr {
        self.vars.push((x.to_string(), ty));
        let e = body(self);
        self.vars.pop();
        e
    }

    fn source_type(&mut self) -> Type {
        [Type::coll(Type::Int), Type::coll(row_type()), Type::coll(Type::coll(Type::Int))].choose(self.rng).unwrap().clone()
    }

    fn expr(&mut self, ty: &Type, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf(ty);
        }
        let d = depth - 1;
        let b = |e: Expr| Box::new(e);
        match self.rng.gen_range(0..10) {
            0 => {
                let t = value_types().choose(self.rng).unwrap().clone();
                let x = self.fresh();
                let e1 = self.expr(&t, d);
                let e2 = self.under(&x, t, |g| g.expr(ty, d));
                return Expr::Let(x, b(e1), b(e2));
            }
            1 => return Expr::If(b(self.expr(&Type::Bool, d)), b(self.expr(ty, d)), b(self.expr(ty, d))),
            _ => {}
        }
        match ty {
            Type::Int => match self.rng.gen_range(0..3) {
                0 => Expr::Plus(b(self.expr(ty, d)), b(self.expr(ty, d))),
                1 => {
                    let st = self.source_type();
                    let src = self.expr(&st, d);
                    let x = self.fresh();
                    let body = self.under(&x, st.elem().unwrap().clone(), |g| g.expr(ty, d));
                    Expr::Sum(x, b(src), b(body))
                }
                _ => Expr::Field(b(self.expr(&row_type(), d)), if self.rng.gen() { "A" } else { "B" }.to_string()),
            },
            Type::Bool => match self.rng.gen_range(0..4) {
                0 => Expr::Not(b(self.expr(ty, d))),
                1 => Expr::And(b(self.expr(ty, d)), b(self.expr(ty, d))),
                2 => Expr::Eq(b(self.expr(&Type::Int, d)), b(self.expr(&Type::Int, d))),
                _ => {
                    let st = self.source_type();
                    Expr::IsEmpty(b(self.expr(&st, d)))
                }
            },
            Type::Record(fs) => Expr::Record(fs.iter().map(|(n, t)| (n.clone(), self.expr(t, d))).collect()),
            Type::Coll(t) => match self.rng.gen_range(0..4) {
                0 => Expr::Singleton(b(self.expr(t, d))),
                1 => Expr::Union(b(self.expr(ty, d)), b(self.expr(ty, d))),
                2 => {
                    let st = self.source_type();
                    let src = self.expr(&st, d);
                    let x = self.fresh();
                    let body = self.under(&x, st.elem().unwrap().clone(), |g| g.expr(ty, d));
                    Expr::For(x, b(src), b(body))
                }
                _ => {
                    let st = self.source_type();
                    let src = self.expr(&st, d);
                    let x = self.fresh();
                    let body = self.under(&x, st.elem().unwrap().clone(), |g| g.expr(t, d));
                    Expr::Comprehension(b(body), x, b(src))
                }
            },
        }
    }
}

/// A random program over `schema` of a random type, at most `max_depth`
/// constructors deep.
pub fn gen_program<R: Rng>(rng: &mut R, schema: &[(String, Type)], cfg: &GenConfig) -> Expr {
    let ty = value_types().choose(rng).unwrap().clone();
    gen_program_of(rng, schema, &ty, cfg)
}

pub fn gen_program_of<R: Rng>(rng: &mut R, schema: &[(String, Type)], ty: &Type, cfg: &GenConfig) -> Expr {
    ExprGen { rng, vars: schema.to_vec(), next: 0 }.expr(ty, cfg.max_depth)
}

fn labels_of_type<'a>(psi: &'a StoreType, ty: &'a Type) -> Vec<&'a Label> {
    psi.iter().filter(|(_, t)| *t == ty).map(|(l, _)| l).collect()
}

fn new_label(sigma: &Store, extra: &BTreeMap<Label, Constructor>, stem: &str) -> Label {
    (0..)
        .map(|i| Label::new(format!("{stem}{i}")))
        .find(|l| !sigma.contains(l) && !extra.contains_key(l))
        .unwrap()
}

/// One type-preserving change to an input label. Insertions into a
/// collection bring their new element labels along in the same script.
pub fn gen_edit<R: Rng>(rng: &mut R, sigma: &Store) -> EditScript {
    let psi = infer_store_type(sigma).expect("generated stores are well-typed");
    let labels: Vec<&Label> = sigma.labels().collect();
    let target = (*labels.choose(rng).unwrap()).clone();
    let mut extra = BTreeMap::new();
    let k = match sigma.get(&target).unwrap() {
        Constructor::Int(i) => Constructor::Int(i + rng.gen_range(1i64..4) * if rng.gen() { 1 } else { -1 }),
        Constructor::Bool(b) => Constructor::Bool(!b),
        Constructor::Record(fs) => {
            let mut fs = fs.clone();
            let field = fs.keys().cloned().collect::<Vec<_>>().choose(rng).unwrap().clone();
            let ty = &psi[&fs[&field]];
            let l = (*labels_of_type(&psi, ty).choose(rng).unwrap()).clone();
            fs.insert(field, l);
            Constructor::Record(fs)
        }
        Constructor::Coll(ms) => {
            let elem = psi[&target].elem().unwrap().clone();
            let mut ms = ms.clone();
            let present: Vec<Label> = ms.labels().cloned().collect();
            match rng.gen_range(0..4) {
                0 if !present.is_empty() => {
                    let l = present.choose(rng).unwrap().clone();
                    let mut out = LabelMultiset::new();
                    for (x, m) in ms.iter().filter(|(x, _)| **x != l) {
                        out.add(x.clone(), m);
                    }
                    ms = out;
                }
                1 if !present.is_empty() => ms.add(present.choose(rng).unwrap().clone(), 1),
                2 => {
                    let same = labels_of_type(&psi, &elem);
                    match same.choose(rng) {
                        Some(l) => ms.add((*l).clone(), 1),
                        None => ms.add(new_element(rng, sigma, &mut extra, &elem, &psi), 1),
                    }
                }
                _ => ms.add(new_element(rng, sigma, &mut extra, &elem, &psi), 1),
            }
            Constructor::Coll(ms)
        }
    };
    let mut edits: Vec<(Label, Constructor)> = extra.into_iter().collect();
    edits.push((target, k));
    EditScript(edits)
}

fn new_element<R: Rng>(rng: &mut R, sigma: &Store, extra: &mut BTreeMap<Label, Constructor>, ty: &Type, psi: &StoreType) -> Label {
    let k = match ty {
        Type::Int => Constructor::Int(rng.gen_range(-2i64..6).into()),
        Type::Bool => Constructor::Bool(rng.gen()),
        Type::Record(fs) => {
            let fields = fs.iter().map(|(n, t)| (n.clone(), new_element(rng, sigma, extra, t, psi))).collect();
            Constructor::Record(fields)
        }
        Type::Coll(t) => {
            let pool = labels_of_type(psi, t);
            let mut ms = LabelMultiset::new();
            if let Some(l) = pool.choose(rng) {
                ms.add((*l).clone(), 1);
            }
            Constructor::Coll(ms)
        }
    };
    let l = new_label(sigma, extra, "n");
    extra.insert(l.clone(), k);
    l
}
