//! Reference evaluators: the denotational semantics over values and the
//! untraced operational semantics over stores.

pub mod denote;
pub mod opsem;
pub mod value;

use thiserror::Error;

use crate::store::StoreError;

pub use denote::{denote, ValueEnv};
pub use opsem::{eval, eval_iter};
pub use value::{Bag, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("{0}")]
    Shape(String),
}
