use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Label, StoreError};

/// Finite multiset of labels with positive multiplicities.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelMultiset(BTreeMap<Label, u64>);

impl LabelMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(l: Label) -> Self {
        let mut m = Self::new();
        m.add(l, 1);
        m
    }

    /// Add `m` copies of `l`; zero is ignored.
    pub fn add(&mut self, l: Label, m: u64) {
        if m > 0 {
            let e = self.0.entry(l).or_insert(0);
            *e = e.checked_add(m).expect("multiplicity overflow");
        }
    }

    pub fn get(&self, l: &Label) -> u64 {
        self.0.get(l).copied().unwrap_or(0)
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.0.contains_key(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, u64)> + '_ {
        self.0.iter().map(|(l, m)| (l, *m))
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> + '_ {
        self.0.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct labels.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `M ⊔ N`: pointwise sum.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, m) in other.iter() {
            out.add(l.clone(), m);
        }
        out
    }

    /// `M ⊕ N`: defined only for disjoint domains.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, StoreError> {
        if let Some(l) = other.labels().find(|l| self.contains(l)) {
            return Err(StoreError::DomainOverlap(l.clone()));
        }
        Ok(self.union(other))
    }

    /// `m · L`.
    pub fn scale(&self, m: u64) -> Self {
        let mut out = Self::new();
        for (l, k) in self.iter() {
            out.add(l.clone(), k.checked_mul(m).expect("multiplicity overflow"));
        }
        out
    }
}

impl FromIterator<(Label, u64)> for LabelMultiset {
    fn from_iter<I: IntoIterator<Item = (Label, u64)>>(iter: I) -> Self {
        let mut m = Self::new();
        for (l, k) in iter {
            m.add(l, k);
        }
        m
    }
}

impl fmt::Debug for LabelMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LabelMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, m)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if m == 1 {
                write!(f, "{l}")?;
            } else {
                write!(f, "{l}:{m}")?;
            }
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(xs: &[(&str, u64)]) -> LabelMultiset {
        xs.iter().map(|(l, m)| (Label::new(l), *m)).collect()
    }

    #[test]
    fn union_adds_pointwise() {
        assert_eq!(ms(&[("l", 1)]).union(&ms(&[("l", 2)])), ms(&[("l", 3)]));
        assert_eq!(LabelMultiset::new().union(&ms(&[("a", 2)])), ms(&[("a", 2)]));
        assert_eq!(ms(&[("l1", 2)]).union(&ms(&[("l2", 1)])), ms(&[("l1", 2), ("l2", 1)]));
    }

    #[test]
    fn disjoint_union_rejects_overlap() {
        assert_eq!(ms(&[("l1", 1)]).disjoint_union(&ms(&[("l2", 1)])).unwrap(), ms(&[("l1", 1), ("l2", 1)]));
        assert!(matches!(ms(&[("l", 1)]).disjoint_union(&ms(&[("l", 1)])), Err(StoreError::DomainOverlap(_))));
        assert_eq!(LabelMultiset::new().disjoint_union(&ms(&[("m", 4)])).unwrap(), ms(&[("m", 4)]));
    }

    #[test]
    fn zero_multiplicity_is_not_stored() {
        let mut m = LabelMultiset::new();
        m.add(Label::new("l"), 0);
        assert!(m.is_empty());
    }
}
