//! Labeled stores, constructors and the primitive operation table.

pub mod bigint_serde;
mod io;
mod label;
mod multiset;
mod readback;
mod term;
mod typing;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

pub use io::{constructor_from_json, constructor_to_json, load_table, store_from_json, store_to_json, StoreFile};
pub use label::{FreshSupply, Label, LabelSet, FRESH_PREFIX, RESERVED};
pub use multiset::LabelMultiset;
pub use readback::readback;
pub use term::Term;
pub use typing::{check_acyclic, infer_store_type, infer_store_type_with, is_well_typed, matches_avoiding, store_typecheck, StoreType, StoreTypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("label `{0}` is not bound")]
    Unbound(Label),
    #[error("label `{label}` holds {found}, expected {expected}")]
    Kind { label: Label, expected: &'static str, found: &'static str },
    #[error("multisets overlap at `{0}`")]
    DomainOverlap(Label),
    #[error("store does not extend the base store at `{0}`")]
    NotAnExtension(Label),
    #[error("extensions both define `{0}`")]
    OverlappingExtensions(Label),
    #[error("label `{0}` is already bound")]
    Rebind(Label),
    #[error("{0}")]
    Format(String),
}

/// One cell of the store.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constructor {
    Int(BigInt),
    Bool(bool),
    Record(BTreeMap<String, Label>),
    Coll(LabelMultiset),
}

impl Constructor {
    pub fn kind(&self) -> &'static str {
        match self {
            Constructor::Int(_) => "an int",
            Constructor::Bool(_) => "a bool",
            Constructor::Record(_) => "a record",
            Constructor::Coll(_) => "a collection",
        }
    }

    /// Labels this constructor points at.
    pub fn labels(&self) -> Vec<&Label> {
        match self {
            Constructor::Int(_) | Constructor::Bool(_) => vec![],
            Constructor::Record(fs) => fs.values().collect(),
            Constructor::Coll(m) => m.labels().collect(),
        }
    }
}

impl fmt::Display for Constructor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constructor::Int(i) => write!(f, "{i}"),
            Constructor::Bool(b) => f.write_str(if *b { "t" } else { "f" }),
            Constructor::Record(fs) => {
                let parts: Vec<String> = fs.iter().map(|(n, l)| format!("{n}:{l}")).collect();
                write!(f, "({})", parts.join(","))
            }
            Constructor::Coll(m) => write!(f, "{m}"),
        }
    }
}

/// Finite map from labels to constructors. Cloning is cheap.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Store {
    cells: im::OrdMap<Label, Constructor>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn get(&self, l: &Label) -> Result<&Constructor, StoreError> {
        self.cells.get(l).ok_or_else(|| StoreError::Unbound(l.clone()))
    }

    pub fn lookup(&self, l: &Label) -> Option<&Constructor> {
        self.cells.get(l)
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.cells.contains_key(l)
    }

    /// `σ[l := k]`, overwriting any previous binding.
    pub fn set(&mut self, l: Label, k: Constructor) {
        self.cells.insert(l, k);
    }

    /// Write-once binding: fails if `l` is already bound.
    pub fn bind(&mut self, l: Label, k: Constructor) -> Result<(), StoreError> {
        if self.cells.contains_key(&l) {
            return Err(StoreError::Rebind(l));
        }
        self.cells.insert(l, k);
        Ok(())
    }

    pub fn remove(&mut self, l: &Label) -> Option<Constructor> {
        self.cells.remove(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Constructor)> + '_ {
        self.cells.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> + '_ {
        self.cells.keys()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn int(&self, l: &Label) -> Result<&BigInt, StoreError> {
        match self.get(l)? {
            Constructor::Int(i) => Ok(i),
            k => Err(kind_error(l, "an int", k)),
        }
    }

    pub fn bool(&self, l: &Label) -> Result<bool, StoreError> {
        match self.get(l)? {
            Constructor::Bool(b) => Ok(*b),
            k => Err(kind_error(l, "a bool", k)),
        }
    }

    pub fn record(&self, l: &Label) -> Result<&BTreeMap<String, Label>, StoreError> {
        match self.get(l)? {
            Constructor::Record(fs) => Ok(fs),
            k => Err(kind_error(l, "a record", k)),
        }
    }

    pub fn coll(&self, l: &Label) -> Result<&LabelMultiset, StoreError> {
        match self.get(l)? {
            Constructor::Coll(m) => Ok(m),
            k => Err(kind_error(l, "a collection", k)),
        }
    }

    /// Labels bound here but not in `base`.
    pub fn extension_over<'a>(&'a self, base: &'a Store) -> impl Iterator<Item = (&'a Label, &'a Constructor)> + 'a {
        self.cells.iter().filter(move |(l, _)| !base.contains(l))
    }
}

impl FromIterator<(Label, Constructor)> for Store {
    fn from_iter<I: IntoIterator<Item = (Label, Constructor)>>(iter: I) -> Store {
        Store { cells: iter.into_iter().collect() }
    }
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (l, k)) in self.cells.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}:={k}")?;
        }
        f.write_str("]")
    }
}

fn kind_error(l: &Label, expected: &'static str, found: &Constructor) -> StoreError {
    StoreError::Kind { label: l.clone(), expected, found: found.kind() }
}

/// `σ1 ⊎_σ σ2` for orthogonal extensions `σ1`, `σ2` of `base`.
pub fn orthogonal_merge(sigma1: &Store, sigma2: &Store, base: &Store) -> Result<Store, StoreError> {
    for (l, k) in base.iter() {
        for s in [sigma1, sigma2] {
            if s.lookup(l) != Some(k) {
                return Err(StoreError::NotAnExtension(l.clone()));
            }
        }
    }
    let mut out = sigma1.clone();
    for (l, k) in sigma2.extension_over(base) {
        if sigma1.contains(l) {
            return Err(StoreError::OverlappingExtensions(l.clone()));
        }
        out.set(l.clone(), k.clone());
    }
    Ok(out)
}

/// `op(t, σ)`.
pub fn op_eval(t: &Term<Label>, sigma: &Store) -> Result<Constructor, StoreError> {
    Ok(match t {
        Term::Copy(l) => sigma.get(l)?.clone(),
        Term::Int(i) => Constructor::Int(i.clone()),
        Term::Plus(a, b) => Constructor::Int(sigma.int(a)? + sigma.int(b)?),
        Term::Eq(a, b) => Constructor::Bool(sigma.get(a)? == sigma.get(b)?),
        Term::Bool(b) => Constructor::Bool(*b),
        Term::And(a, b) => Constructor::Bool(sigma.bool(a)? && sigma.bool(b)?),
        Term::Not(a) => Constructor::Bool(!sigma.bool(a)?),
        Term::Record(fs) => Constructor::Record(fs.clone()),
        Term::Empty(_) => Constructor::Coll(LabelMultiset::new()),
        Term::Singleton(l) => Constructor::Coll(LabelMultiset::singleton(l.clone())),
        Term::Union(a, b) => Constructor::Coll(sigma.coll(a)?.union(sigma.coll(b)?)),
        Term::IsEmpty(l) => Constructor::Bool(sigma.coll(l)?.is_empty()),
    })
}

/// `⨆ σ[L]`: scaled union of the collections at the labels of `L`.
pub fn flatten(sigma: &Store, ls: &LabelMultiset) -> Result<LabelMultiset, StoreError> {
    let mut out = LabelMultiset::new();
    for (l, m) in ls.iter() {
        out = out.union(&sigma.coll(l)?.scale(m));
    }
    Ok(out)
}

/// `Σ σ[L]`: weighted sum of the integers at the labels of `L`.
pub fn sum_ints(sigma: &Store, ls: &LabelMultiset) -> Result<BigInt, StoreError> {
    let mut total = BigInt::from(0);
    for (l, m) in ls.iter() {
        total += sigma.int(l)? * BigInt::from(m);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s)
    }

    fn int(i: i64) -> Constructor {
        Constructor::Int(i.into())
    }

    #[test]
    fn op_table() {
        let sigma: Store = [(l("l1"), int(5)), (l("l2"), int(42)), (l("e"), Constructor::Coll(LabelMultiset::new()))]
            .into_iter()
            .collect();
        assert_eq!(op_eval(&Term::Plus(l("l1"), l("l2")), &sigma).unwrap(), int(47));
        assert_eq!(op_eval(&Term::IsEmpty(l("e")), &sigma).unwrap(), Constructor::Bool(true));
        assert_eq!(
            op_eval(&Term::Singleton(l("l1")), &sigma).unwrap(),
            Constructor::Coll(LabelMultiset::singleton(l("l1")))
        );
        assert_eq!(op_eval(&Term::Eq(l("l1"), l("l2")), &sigma).unwrap(), Constructor::Bool(false));
        assert!(matches!(op_eval(&Term::Not(l("l1")), &sigma), Err(StoreError::Kind { .. })));
        assert!(matches!(op_eval(&Term::Copy(l("zz")), &sigma), Err(StoreError::Unbound(_))));
    }

    #[test]
    fn merge_of_orthogonal_extensions() {
        let base: Store = [(l("x"), int(0))].into_iter().collect();
        assert_eq!(orthogonal_merge(&base, &base, &base).unwrap(), base);
        let mut s1 = base.clone();
        s1.set(l("a"), int(1));
        let mut s2 = base.clone();
        s2.set(l("b"), int(2));
        let merged = orthogonal_merge(&s1, &s2, &base).unwrap();
        assert_eq!(merged.len(), 3);
        let mut s3 = base.clone();
        s3.set(l("a"), int(2));
        assert_eq!(orthogonal_merge(&s1, &s3, &base), Err(StoreError::OverlappingExtensions(l("a"))));
        let mut s4 = base.clone();
        s4.set(l("x"), int(9));
        assert_eq!(orthogonal_merge(&s1, &s4, &base), Err(StoreError::NotAnExtension(l("x"))));
    }

    #[test]
    fn sums_and_flattening() {
        let sigma: Store = [
            (l("a"), int(3)),
            (l("b"), int(4)),
            (l("c"), int(0)),
            (l("k"), Constructor::Coll(LabelMultiset::singleton(l("a")))),
        ]
        .into_iter()
        .collect();
        let ls: LabelMultiset = [(l("a"), 1), (l("b"), 1), (l("c"), 1)].into_iter().collect();
        assert_eq!(sum_ints(&sigma, &ls).unwrap(), BigInt::from(7));
        assert_eq!(sum_ints(&sigma, &LabelMultiset::new()).unwrap(), BigInt::from(0));
        let two: LabelMultiset = [(l("k"), 2)].into_iter().collect();
        assert_eq!(flatten(&sigma, &two).unwrap(), [(l("a"), 2)].into_iter().collect());
    }
}
