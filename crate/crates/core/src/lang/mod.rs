//! Surface syntax, A-normalization and typing of the query language.

pub mod anf;
pub mod core;
pub mod desugar;
pub mod lexer;
pub mod parser;
pub mod surface;
pub mod typeck;
pub mod types;

pub use anf::anormalize;
pub use core::{Atom, CoreExpr};
pub use desugar::desugar;
pub use parser::{parse, parse_type};
pub use surface::Expr;
pub use typeck::{elaborate, elaborate_with, typecheck, Context, TypeError};
pub use types::Type;
