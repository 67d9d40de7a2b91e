use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::store::bigint_serde;

/// Label-free values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Record(BTreeMap<String, Value>),
    Bag(Bag),
}

/// Finite multiset of values.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bag(BTreeMap<Value, u64>);

impl Bag {
    pub fn new() -> Bag {
        Bag::default()
    }

    pub fn add(&mut self, v: Value, m: u64) {
        if m > 0 {
            *self.0.entry(v).or_insert(0) += m;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Value, u64)> + '_ {
        self.0.iter().map(|(v, m)| (v, *m))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &Bag) -> Bag {
        let mut out = self.clone();
        for (v, m) in other.iter() {
            out.add(v.clone(), m);
        }
        out
    }

    pub fn scale(&self, k: u64) -> Bag {
        let mut out = Bag::new();
        for (v, m) in self.iter() {
            out.add(v.clone(), m * k);
        }
        out
    }

    /// Same elements, every multiplicity forced to one.
    pub fn support(&self) -> Bag {
        let mut out = Bag::new();
        for (v, _) in self.iter() {
            out.add(v.clone(), 1);
        }
        out
    }
}

impl FromIterator<(Value, u64)> for Bag {
    fn from_iter<I: IntoIterator<Item = (Value, u64)>>(iter: I) -> Bag {
        let mut b = Bag::new();
        for (v, m) in iter {
            b.add(v, m);
        }
        b
    }
}

impl Value {
    pub fn int(i: i64) -> Value {
        Value::Int(i.into())
    }

    pub fn record<I, S>(fields: I) -> Value
    where
        I: IntoIterator<Item = (S, Value)>,
        S: Into<String>,
    {
        Value::Record(fields.into_iter().map(|(f, v)| (f.into(), v)).collect())
    }

    pub fn bag<I: IntoIterator<Item = (Value, u64)>>(elems: I) -> Value {
        Value::Bag(elems.into_iter().collect())
    }

    /// Bags become arrays with each element repeated by its multiplicity.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => bigint_serde::to_json(i),
            Value::Bool(b) => (*b).into(),
            Value::Record(fs) => fs.iter().map(|(n, v)| (n.clone(), v.to_json())).collect::<serde_json::Map<_, _>>().into(),
            Value::Bag(b) => b
                .iter()
                .flat_map(|(v, m)| std::iter::repeat_n(v.to_json(), m as usize))
                .collect::<Vec<_>>()
                .into(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Record(fs) => {
                f.write_str("(")?;
                for (i, (n, v)) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{n}: {v}")?;
                }
                f.write_str(")")
            }
            Value::Bag(b) => {
                f.write_str("{")?;
                for (i, (v, m)) in b.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    if m == 1 {
                        write!(f, "{v}")?;
                    } else {
                        write!(f, "{v}:{m}")?;
                    }
                }
                f.write_str("}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bag_equality_ignores_insertion_order() {
        let a = Value::bag([(Value::int(2), 1), (Value::int(3), 1)]);
        let b = Value::bag([(Value::int(3), 1), (Value::int(2), 1)]);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "{2, 3}");
    }

    #[test]
    fn json_repeats_elements() {
        let v = Value::bag([(Value::record([("C", Value::int(42))]), 2)]);
        assert_eq!(v.to_json().to_string(), r#"[{"C":42},{"C":42}]"#);
        assert_eq!(v.to_string(), "{(C: 42):2}");
    }
}
