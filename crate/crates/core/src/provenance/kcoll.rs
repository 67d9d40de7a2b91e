use std::collections::BTreeMap;
use std::fmt;

use super::semiring::Semiring;
use crate::store::Label;

/// A finitely-supported map `Lab → K`. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KCollection<K>(BTreeMap<Label, K>);

impl<K: Semiring> Default for KCollection<K> {
    fn default() -> Self {
        KCollection(BTreeMap::new())
    }
}

impl<K: Semiring> KCollection<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn eta(l: &Label) -> Self {
        Self::default().with(l.clone(), K::one())
    }

    fn with(mut self, l: Label, k: K) -> Self {
        if !k.is_zero() {
            self.0.insert(l, k);
        }
        self
    }

    pub fn get(&self, l: &Label) -> K {
        self.0.get(l).cloned().unwrap_or_else(K::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &K)> + '_ {
        self.0.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Label> + '_ {
        self.0.keys()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, k) in &other.0 {
            let sum = out.get(l).add(k);
            out.0.remove(l);
            out = out.with(l.clone(), sum);
        }
        out
    }

    pub fn scale(&self, k: &K) -> Self {
        self.0.iter().map(|(l, v)| (l.clone(), k.mul(v))).collect()
    }

    /// `f •_K g = λy. Σ_{x ∈ supp f} f(x) · g(x)(y)`.
    pub fn bind(&self, g: impl Fn(&Label) -> Self) -> Self {
        self.0.iter().fold(Self::zero(), |acc, (x, k)| acc.add(&g(x).scale(k)))
    }
}

impl<K: Semiring> FromIterator<(Label, K)> for KCollection<K> {
    fn from_iter<I: IntoIterator<Item = (Label, K)>>(iter: I) -> Self {
        iter.into_iter().fold(Self::zero(), |acc, (l, k)| acc.add(&Self::zero().with(l, k)))
    }
}

impl<K: Semiring> fmt::Display for KCollection<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (l, k)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l} ↦ {k}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::super::semiring::{Nat, Poly};
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s)
    }

    #[test]
    fn monad_operations() {
        let e: KCollection<Nat> = KCollection::eta(&l("a"));
        assert_eq!(e.get(&l("a")), Nat::one());
        assert_eq!(e.get(&l("b")), Nat::zero());
        assert_eq!(e.add(&KCollection::zero()), e);
        let f: KCollection<Poly> = [(l("l1"), Poly::var("k1"))].into_iter().collect();
        let g = |_: &Label| -> KCollection<Poly> { [(l("m"), Poly::var("k2"))].into_iter().collect() };
        assert_eq!(f.bind(g), [(l("m"), Poly::var("k1").mul(&Poly::var("k2")))].into_iter().collect());
    }

    #[test]
    fn zero_entries_are_dropped() {
        let f: KCollection<Nat> = [(l("a"), Nat::zero()), (l("b"), Nat::one())].into_iter().collect();
        assert_eq!(f.support().count(), 1);
        assert_eq!(f.scale(&Nat::zero()), KCollection::zero());
    }
}
