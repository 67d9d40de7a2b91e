//! From program text and a store file to an elaborated core expression.

use thiserror::Error;

use crate::eval::EvalError;
use crate::lang::lexer::ParseError;
use crate::lang::{anormalize, desugar, elaborate, parse, Context, CoreExpr, Expr, Type, TypeError};
use crate::store::{infer_store_type, FreshSupply, Label, Store, StoreFile, StoreType, StoreTypeError};
use crate::trace::{traced_eval, Trace};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error("free variable `{0}` is not bound by the store's env")]
    UnboundVar(String),
    #[error("store is ill-typed: {0}")]
    Store(#[from] StoreTypeError),
}

#[derive(Debug, Clone)]
pub struct Compiled {
    /// Desugared surface program, free variables still named.
    pub surface: Expr,
    /// A-normal form with free variables replaced by labels and empty
    /// collections annotated.
    pub core: CoreExpr,
    pub ty: Type,
    pub psi: StoreType,
}

/// Label bound to free variable `x`: the env entry, else a store label of
/// the same name, else the root when it is the only free variable.
fn resolve_var(x: &str, file: &StoreFile, only: bool) -> Option<Label> {
    if let Some(l) = file.env.get(x) {
        return Some(l.clone());
    }
    if Label::is_valid_name(x) && file.store.contains(&Label::new(x)) {
        return Some(Label::new(x));
    }
    if only {
        return file.root.clone();
    }
    None
}

pub fn compile_expr(e: &Expr, file: &StoreFile) -> Result<Compiled, CompileError> {
    let surface = desugar(e);
    let free = surface.free_vars();
    let only = free.len() == 1;
    for x in &free {
        if resolve_var(x, file, only).is_none() {
            return Err(CompileError::UnboundVar(x.clone()));
        }
    }
    let closed = surface.subst_labels(&|x| resolve_var(x, file, only));
    let psi = infer_store_type(&file.store)?;
    let (core, ty) = elaborate(&Context::with_store(psi.clone()), &anormalize(&closed))?;
    Ok(Compiled { surface, core, ty, psi })
}

pub fn compile(src: &str, file: &StoreFile) -> Result<Compiled, CompileError> {
    compile_expr(&parse(src)?, file)
}

/// Fresh-label supply for evaluating into `dest` over `sigma`.
pub fn supply_for(sigma: &Store, dest: &Label) -> FreshSupply {
    FreshSupply::avoiding(sigma.labels().chain(std::iter::once(dest)))
}

/// Traced evaluation with the default fresh-label supply.
pub fn run_traced(sigma: &Store, dest: &Label, e: &CoreExpr) -> Result<(Store, Trace), EvalError> {
    traced_eval(sigma, dest, e, &mut supply_for(sigma, dest))
}
