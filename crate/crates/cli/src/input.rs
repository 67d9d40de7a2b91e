//! Loading store files, queries and traces.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use nrc_core::pipeline::{compile, run_traced, CompileError, Compiled};
use nrc_core::store::{store_from_json, Label, StoreFile};
use nrc_core::trace::{parse_trace, trace_from_json, Trace};

use crate::failure::{Failure, OrExit, INVARIANT, STORE_FORMAT, TYPECHECK};

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).or_exit(STORE_FORMAT)
}

pub fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display())).or_exit(STORE_FORMAT)
}

pub fn read_store(path: &Path) -> Result<StoreFile, Failure> {
    store_from_json(&read_json(path)?).with_context(|| format!("loading {}", path.display())).or_exit(STORE_FORMAT)
}

pub fn compile_query(path: &Path, file: &StoreFile) -> Result<Compiled, Failure> {
    let src = read(path)?;
    compile(&src, file).map_err(|e| {
        let code = if matches!(e, CompileError::Store(_)) { STORE_FORMAT } else { TYPECHECK };
        Failure::new(code, anyhow!(e).context(format!("compiling {}", path.display())))
    })
}

/// The destination label, which must be a fresh name for the store.
pub fn dest_label(dest: &str, file: &StoreFile) -> Result<Label, Failure> {
    if !Label::is_valid_name(dest) {
        return Err(Failure::msg(STORE_FORMAT, format!("`{dest}` is not a valid label")));
    }
    let l = Label::new(dest);
    if file.store.contains(&l) {
        return Err(Failure::msg(STORE_FORMAT, format!("destination `{dest}` is already bound in the store")));
    }
    Ok(l)
}

pub fn read_trace(path: &Path) -> Result<Trace, Failure> {
    if path.extension().is_some_and(|e| e == "json") {
        trace_from_json(&read_json(path)?).with_context(|| format!("decoding trace {}", path.display())).or_exit(STORE_FORMAT)
    } else {
        parse_trace(&read(path)?).map_err(|e| Failure::msg(STORE_FORMAT, format!("parsing trace {}: {e}", path.display())))
    }
}

/// A trace together with whatever produced it.
pub struct Traced {
    pub trace: Trace,
    pub file: Option<StoreFile>,
    pub compiled: Option<Compiled>,
}

/// Runs a `.nrc` query over `store`, or reads a recorded trace.
pub fn traced(input: &Path, store: Option<&Path>, dest: &str) -> Result<Traced, Failure> {
    let file = store.map(read_store).transpose()?;
    if input.extension().is_none_or(|e| e != "nrc") {
        return Ok(Traced { trace: read_trace(input)?, file, compiled: None });
    }
    let file = file.ok_or_else(|| Failure::msg(STORE_FORMAT, "a query input needs a store file"))?;
    let compiled = compile_query(input, &file)?;
    let dest = dest_label(dest, &file)?;
    let (_, trace) = run_traced(&file.store, &dest, &compiled.core).or_exit(INVARIANT)?;
    Ok(Traced { trace, file: Some(file), compiled: Some(compiled) })
}
