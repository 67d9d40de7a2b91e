use std::fmt;

use super::model::{in_star, out_star, Trace};
use super::traced::iter_result;
use crate::store::{op_eval, Constructor, Label, Store};

/// The first trace node found not to hold, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconsistency {
    pub at: Label,
    pub reason: String,
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trace node writing `{}` does not hold: {}", self.at, self.reason)
    }
}

impl std::error::Error for Inconsistency {}

fn fail(at: &Label, reason: impl Into<String>) -> Result<(), Inconsistency> {
    Err(Inconsistency { at: at.clone(), reason: reason.into() })
}

fn expect_at(sigma: &Store, at: &Label, l: &Label, want: &Constructor) -> Result<(), Inconsistency> {
    match sigma.lookup(l) {
        Some(k) if k == want => Ok(()),
        Some(k) => fail(at, format!("`{l}` holds {k}, expected {want}")),
        None => fail(at, format!("`{l}` is unbound")),
    }
}

/// `σ ⊨ T`.
pub fn check_consistency(sigma: &Store, t: &Trace) -> Result<(), Inconsistency> {
    match t {
        Trace::Assign { out, term } => match op_eval(term, sigma) {
            Ok(k) => expect_at(sigma, out, out, &k),
            Err(e) => fail(out, e.to_string()),
        },
        Trace::Proj { out, field, rec, src } => {
            match sigma.record(rec) {
                Ok(fs) if fs.get(field) == Some(src) => {}
                Ok(_) => return fail(out, format!("field `{field}` of `{rec}` is not `{src}`")),
                Err(e) => return fail(out, e.to_string()),
            }
            match sigma.lookup(src) {
                Some(k) => expect_at(sigma, out, out, k),
                None => fail(out, format!("`{src}` is unbound")),
            }
        }
        Trace::Seq { first, second } => {
            check_consistency(sigma, first)?;
            check_consistency(sigma, second)
        }
        Trace::Cond { out, test, branch, body, .. } => {
            expect_at(sigma, out, test, &Constructor::Bool(*branch))?;
            check_consistency(sigma, body)?;
            if body.out() != out {
                return fail(out, format!("branch writes `{}`", body.out()));
            }
            Ok(())
        }
        Trace::Iter { iter, out, src, theta, .. } => {
            expect_at(sigma, out, src, &Constructor::Coll(in_star(theta)))?;
            for (t, _) in theta.values() {
                check_consistency(sigma, t)?;
            }
            match iter_result(*iter, sigma, &out_star(theta)) {
                Ok(k) => expect_at(sigma, out, out, &k),
                Err(e) => fail(out, e.to_string()),
            }
        }
    }
}
