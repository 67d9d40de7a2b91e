use std::collections::BTreeMap;

use super::value::{Bag, Value};
use super::EvalError;
use crate::lang::Expr;

/// `γ`.
pub type ValueEnv = BTreeMap<String, Value>;

fn int(v: Value, e: &Expr) -> Result<num_bigint::BigInt, EvalError> {
    match v {
        Value::Int(i) => Ok(i),
        v => Err(EvalError::Shape(format!("`{e}` gave {v}, expected an int"))),
    }
}

fn boolean(v: Value, e: &Expr) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(b),
        v => Err(EvalError::Shape(format!("`{e}` gave {v}, expected a bool"))),
    }
}

fn bag(v: Value, e: &Expr) -> Result<Bag, EvalError> {
    match v {
        Value::Bag(b) => Ok(b),
        v => Err(EvalError::Shape(format!("`{e}` gave {v}, expected a collection"))),
    }
}

/// `⟦e⟧γ`, the reference semantics over label-free values.
pub fn denote(e: &Expr, gamma: &ValueEnv) -> Result<Value, EvalError> {
    let d = |e: &Expr| denote(e, gamma);
    let under = |x: &str, v: Value, body: &Expr| {
        let mut g = gamma.clone();
        g.insert(x.to_string(), v);
        denote(body, &g)
    };
    Ok(match e {
        Expr::Var(x) => gamma.get(x).cloned().ok_or_else(|| EvalError::UnboundVar(x.clone()))?,
        Expr::Lab(l) => return Err(EvalError::Shape(format!("label `@{l}` has no denotation"))),
        Expr::Int(i) => Value::Int(i.clone()),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Let(x, e1, e2) => under(x, d(e1)?, e2)?,
        Expr::Record(fs) => Value::Record(fs.iter().map(|(n, e)| Ok((n.clone(), d(e)?))).collect::<Result<_, EvalError>>()?),
        Expr::Field(r, n) => match d(r)? {
            Value::Record(mut fs) => fs.remove(n).ok_or_else(|| EvalError::Shape(format!("no field `{n}` in `{r}`")))?,
            v => return Err(EvalError::Shape(format!("`{r}` gave {v}, expected a record"))),
        },
        Expr::Not(a) => Value::Bool(!boolean(d(a)?, a)?),
        Expr::And(a, b) => {
            let x = boolean(d(a)?, a)?;
            let y = boolean(d(b)?, b)?;
            Value::Bool(x && y)
        }
        Expr::If(c, t, f) => {
            if boolean(d(c)?, c)? {
                d(t)?
            } else {
                d(f)?
            }
        }
        Expr::Plus(a, b) => Value::Int(int(d(a)?, a)? + int(d(b)?, b)?),
        Expr::Eq(a, b) => {
            let x = int(d(a)?, a)?;
            Value::Bool(x == int(d(b)?, b)?)
        }
        Expr::Empty(_) => Value::Bag(Bag::new()),
        Expr::Singleton(a) => Value::Bag([(d(a)?, 1)].into_iter().collect()),
        Expr::Union(a, b) => {
            let x = bag(d(a)?, a)?;
            Value::Bag(x.union(&bag(d(b)?, b)?))
        }
        Expr::IsEmpty(a) => Value::Bool(bag(d(a)?, a)?.is_empty()),
        Expr::For(x, e0, body) => {
            let mut out = Bag::new();
            for (v, m) in bag(d(e0)?, e0)?.iter() {
                out = out.union(&bag(under(x, v.clone(), body)?, body)?.scale(m));
            }
            Value::Bag(out)
        }
        Expr::Sum(x, e0, body) => {
            let mut total = num_bigint::BigInt::from(0);
            for (v, m) in bag(d(e0)?, e0)?.iter() {
                total += int(under(x, v.clone(), body)?, body)? * m;
            }
            Value::Int(total)
        }
        Expr::Comprehension(body, x, e0) => {
            let mut out = Bag::new();
            for (v, m) in bag(d(e0)?, e0)?.iter() {
                out.add(under(x, v.clone(), body)?, m);
            }
            Value::Bag(out)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn row(a: i64, b: i64) -> Value {
        Value::record([("A", Value::int(a)), ("B", Value::int(b))])
    }

    #[test]
    fn projection_of_a_table() {
        let gamma: ValueEnv = [("R".to_string(), Value::bag([(row(1, 2), 1), (row(2, 3), 1)]))].into_iter().collect();
        let v = denote(&parse("{x.B | x in R}").unwrap(), &gamma).unwrap();
        assert_eq!(v, Value::bag([(Value::int(2), 1), (Value::int(3), 1)]));
    }

    #[test]
    fn bag_semantics_multiplies() {
        let gamma: ValueEnv = [("R".to_string(), Value::bag([(row(1, 2), 2)]))].into_iter().collect();
        let v = denote(&parse("for (x in R) {x.A} union {x.A}").unwrap(), &gamma).unwrap();
        assert_eq!(v, Value::bag([(Value::int(1), 4)]));
        let s = denote(&parse("sum (x in R) x.B").unwrap(), &gamma).unwrap();
        assert_eq!(s, Value::int(4));
    }

    #[test]
    fn conditional() {
        let gamma: ValueEnv = [("x".to_string(), Value::int(5)), ("y".to_string(), Value::int(1))].into_iter().collect();
        assert_eq!(denote(&parse("if x == 5 then y + 42 else x").unwrap(), &gamma).unwrap(), Value::int(43));
    }
}
