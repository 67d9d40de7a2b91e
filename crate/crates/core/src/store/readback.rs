use super::{Constructor, Label, Store, StoreError};
use crate::eval::value::{Bag, Value};

/// `σ ↑ l`: the label-free value reachable from `l`. The store must be acyclic.
pub fn readback(sigma: &Store, l: &Label) -> Result<Value, StoreError> {
    Ok(match sigma.get(l)? {
        Constructor::Int(i) => Value::Int(i.clone()),
        Constructor::Bool(b) => Value::Bool(*b),
        Constructor::Record(fs) => Value::Record(
            fs.iter()
                .map(|(f, l)| Ok((f.clone(), readback(sigma, l)?)))
                .collect::<Result<_, StoreError>>()?,
        ),
        Constructor::Coll(m) => {
            let mut bag = Bag::new();
            for (e, k) in m.iter() {
                bag.add(readback(sigma, e)?, k);
            }
            Value::Bag(bag)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::LabelMultiset;

    #[test]
    fn distinct_labels_with_equal_values_merge() {
        let l = Label::new;
        let sigma: Store = [
            (l("a"), Constructor::Int(2.into())),
            (l("b"), Constructor::Int(2.into())),
            (l("c"), Constructor::Coll([(l("a"), 1), (l("b"), 2)].into_iter().collect::<LabelMultiset>())),
        ]
        .into_iter()
        .collect();
        assert_eq!(readback(&sigma, &l("c")).unwrap(), Value::bag([(Value::int(2), 3)]));
    }
}
