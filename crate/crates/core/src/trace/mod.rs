//! Traces: data model, traced evaluation, consistency, typing and
//! textual, JSON and Graphviz forms.

use serde::Deserialize;

pub mod alpha;
pub mod consistency;
pub mod dot;
pub mod model;
pub mod text;
pub mod traced;
pub mod typing;

pub use alpha::{alpha_witness, trace_alpha_eq};
pub use consistency::{check_consistency, Inconsistency};
pub use dot::trace_to_dot;
pub use model::{in_star, out_star, IterKind, Theta, Trace};
pub use text::{parse_trace, print_trace, term_text};
pub use traced::{traced_eval, traced_iter};
pub use typing::{trace_typecheck, TraceType, TraceTypeError};

/// Lossless JSON form of a trace.
pub fn trace_to_json(t: &Trace) -> serde_json::Value {
    serde_json::to_value(t).expect("traces always serialize")
}

pub fn trace_from_json(v: &serde_json::Value) -> Result<Trace, serde_json::Error> {
    Trace::deserialize(v)
}

