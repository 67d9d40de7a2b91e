#![allow(dead_code)]

use std::collections::BTreeMap;

use nrc_core::pipeline::{compile, run_traced, Compiled};
use nrc_core::store::{Label, LabelSet, Store, StoreFile};
use nrc_core::trace::{alpha_witness, Trace};

pub struct Run {
    pub compiled: Compiled,
    pub out: Store,
    pub trace: Trace,
    pub dest: Label,
}

pub fn run(src: &str, file: &StoreFile, dest: &str) -> Run {
    let compiled = compile(src, file).expect("query compiles");
    let dest = Label::new(dest);
    let (out, trace) = run_traced(&file.store, &dest, &compiled.core).expect("query runs");
    Run { compiled, out, trace, dest }
}

pub fn l(s: &str) -> Label {
    Label::new(s)
}

pub fn labels(ls: &[&str]) -> LabelSet {
    ls.iter().map(|s| Label::new(s)).collect()
}

/// Input labels plus the destination.
pub fn frontier(file: &StoreFile, dest: &Label) -> LabelSet {
    let mut f: LabelSet = file.store.labels().cloned().collect();
    f.insert(dest.clone());
    f
}

/// The renaming taking our labels to those of `gold`.
pub fn renaming(ours: &Trace, gold: &Trace, frontier: &LabelSet) -> BTreeMap<Label, Label> {
    alpha_witness(ours, gold, frontier).expect("traces are alpha-equivalent").into_iter().collect()
}

pub fn rename(t: &Trace, map: &BTreeMap<Label, Label>) -> Trace {
    t.rename(&|x| map.get(x).cloned().unwrap_or_else(|| x.clone()))
}

/// Text without comment lines and whitespace.
pub fn squash(s: &str) -> String {
    s.lines().filter(|line| !line.trim_start().starts_with('#')).flat_map(|line| line.chars()).filter(|c| !c.is_whitespace()).collect()
}
