use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value as Json};

use crate::store::Label;

/// A commutative semiring with canonical equality.
pub trait Semiring: Clone + Eq + Ord + fmt::Debug + fmt::Display {
    const NAME: &'static str;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// The annotation an input collection element gets by default.
    fn token(l: &Label) -> Self;
    fn random<R: Rng>(rng: &mut R) -> Self;
    fn to_json(&self) -> Json;
    fn from_json(v: &Json) -> Option<Self>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

/// `(ℕ, 0, 1, +, ·)`: bag semantics.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nat(pub BigUint);

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Semiring for Nat {
    const NAME: &'static str = "nat";

    fn zero() -> Self {
        Nat(BigUint::zero())
    }
    fn one() -> Self {
        Nat(BigUint::one())
    }
    fn add(&self, o: &Self) -> Self {
        Nat(&self.0 + &o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Nat(&self.0 * &o.0)
    }
    fn token(_: &Label) -> Self {
        Nat::one()
    }
    fn random<R: Rng>(rng: &mut R) -> Self {
        // Mostly small, sometimes far beyond u64 to exercise carries.
        if rng.gen_bool(0.1) {
            Nat(BigUint::from(rng.gen::<u64>()) * BigUint::from(rng.gen::<u64>()))
        } else {
            Nat(BigUint::from(rng.gen_range(0u32..6)))
        }
    }
    fn to_json(&self) -> Json {
        match u64::try_from(&self.0) {
            Ok(n) => json!(n),
            Err(_) => json!(self.0.to_string()),
        }
    }
    fn from_json(v: &Json) -> Option<Self> {
        match v {
            Json::Number(n) => n.as_u64().map(|n| Nat(n.into())),
            Json::String(s) => s.parse().ok().map(Nat),
            _ => None,
        }
    }
}

/// `(𝔹, f, t, ∨, ∧)`: set semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Boolean(pub bool);

impl fmt::Display for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "t" } else { "f" })
    }
}

impl Semiring for Boolean {
    const NAME: &'static str = "bool";

    fn zero() -> Self {
        Boolean(false)
    }
    fn one() -> Self {
        Boolean(true)
    }
    fn add(&self, o: &Self) -> Self {
        Boolean(self.0 || o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Boolean(self.0 && o.0)
    }
    fn token(_: &Label) -> Self {
        Boolean(true)
    }
    fn random<R: Rng>(rng: &mut R) -> Self {
        Boolean(rng.gen())
    }
    fn to_json(&self) -> Json {
        json!(self.0)
    }
    fn from_json(v: &Json) -> Option<Self> {
        v.as_bool().map(Boolean)
    }
}

/// A monomial: indeterminates with positive exponents.
pub type Monomial = BTreeMap<String, u32>;

/// `ℕ[X]` in canonical form: monomials mapped to nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly(BTreeMap<Monomial, BigUint>);

impl Poly {
    pub fn var(x: impl Into<String>) -> Poly {
        Poly([([(x.into(), 1)].into_iter().collect(), BigUint::one())].into_iter().collect())
    }

    pub fn constant(n: impl Into<BigUint>) -> Poly {
        let n = n.into();
        if n.is_zero() {
            Poly::default()
        } else {
            Poly([(Monomial::new(), n)].into_iter().collect())
        }
    }

    /// Terms ordered by their monomials compared as sorted multisets, so
    /// `x^2` precedes `x*y`.
    pub fn terms(&self) -> Vec<(&Monomial, &BigUint)> {
        let mut terms: Vec<_> = self.0.iter().collect();
        terms.sort_by_cached_key(|(m, _)| factors(m));
        terms
    }

    fn add_term(&mut self, m: Monomial, c: BigUint) {
        if c.is_zero() {
            return;
        }
        *self.0.entry(m).or_default() += c;
    }
}

/// A monomial as the sorted list of its indeterminates, repeated by exponent.
fn factors(m: &Monomial) -> Vec<&str> {
    m.iter().flat_map(|(x, e)| std::iter::repeat_n(x.as_str(), *e as usize)).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() || m.is_empty() {
                factors.push(c.to_string());
            }
            for (x, e) in m {
                factors.push(if *e == 1 { x.clone() } else { format!("{x}^{e}") });
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl Semiring for Poly {
    const NAME: &'static str = "poly";

    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(1u32)
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Poly::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                let mut m = m1.clone();
                for (x, e) in m2 {
                    *m.entry(x.clone()).or_default() += e;
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
    fn token(l: &Label) -> Self {
        Poly::var(l.as_str())
    }
    fn random<R: Rng>(rng: &mut R) -> Self {
        const VARS: [&str; 4] = ["x", "y", "z", "w"];
        let mut out = Poly::default();
        for _ in 0..rng.gen_range(0..4) {
            let mut m = Monomial::new();
            for _ in 0..rng.gen_range(0..3) {
                *m.entry(VARS[rng.gen_range(0..VARS.len())].to_string()).or_default() += 1;
            }
            out.add_term(m, BigUint::from(rng.gen_range(1u32..4)));
        }
        out
    }
    fn to_json(&self) -> Json {
        self.terms()
            .into_iter()
            .map(|(m, c)| json!({ "coeff": Nat(c.clone()).to_json(), "monomial": factors(m) }))
            .collect::<Vec<_>>()
            .into()
    }
    fn from_json(v: &Json) -> Option<Self> {
        let mut out = Poly::default();
        for t in v.as_array()? {
            let c = Nat::from_json(t.get("coeff")?)?.0;
            let mut m = Monomial::new();
            for x in t.get("monomial")?.as_array()? {
                *m.entry(x.as_str()?.to_string()).or_default() += 1;
            }
            out.add_term(m, c);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_canonical_form() {
        let (x, y) = (Poly::var("x"), Poly::var("y"));
        let p = x.add(&y).mul(&x.add(&y));
        assert_eq!(p.to_string(), "x^2 + 2*x*y + y^2");
        assert_eq!(x.mul(&y), y.mul(&x));
        assert!(x.mul(&Poly::zero()).is_zero());
        assert_eq!(Poly::from_json(&p.to_json()), Some(p));
    }

    #[test]
    fn nat_json_handles_big_values() {
        let n = Nat(BigUint::from(u64::MAX) * BigUint::from(3u32));
        assert_eq!(Nat::from_json(&n.to_json()), Some(n));
    }
}
