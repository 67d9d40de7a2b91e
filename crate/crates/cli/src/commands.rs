use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use nrc_core::adapt::{adapt, adapt_supply, check_edit, EditScript};
use nrc_core::check::run_all;
use nrc_core::pipeline::{run_traced, supply_for};
use nrc_core::provenance::{k_readback, Annotations, Kind};
use nrc_core::slicing::{backward_kept, check_focus, forward_closure, prune, simplify};
use nrc_core::store::{load_table as load_csv, readback, store_to_json, Label, LabelSet, Store, StoreFile};
use nrc_core::trace::{check_consistency, print_trace, trace_alpha_eq, trace_to_dot, trace_to_json, Trace};

use crate::failure::{Failure, OrExit, ILLEGAL_EDIT, INVARIANT, STORE_FORMAT, USAGE};
use crate::input::{compile_query, dest_label, read, read_json, read_store, traced};
use crate::Emit;

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always print");
    s.push('\n');
    s
}

/// Everything a run or an adaptation produces.
struct Artifacts {
    store: StoreFile,
    dest: Label,
    trace: Trace,
}

impl Artifacts {
    fn render(&self, emit: Emit) -> Result<String, Failure> {
        Ok(match emit {
            Emit::Value => format!("{}\n", readback(&self.store.store, &self.dest).or_exit(INVARIANT)?),
            Emit::ValueJson => pretty(&readback(&self.store.store, &self.dest).or_exit(INVARIANT)?.to_json()),
            Emit::Trace => format!("{}\n", print_trace(&self.trace, false)),
            Emit::TraceJson => pretty(&trace_to_json(&self.trace)),
            Emit::Store => pretty(&store_to_json(&self.store)),
            Emit::Dot => trace_to_dot(&self.trace, None),
        })
    }

    fn write_all(&self, dir: &Path) -> Result<(), Failure> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).or_exit(STORE_FORMAT)?;
        let files = [
            ("value.txt", Emit::Value),
            ("value.json", Emit::ValueJson),
            ("trace.txt", Emit::Trace),
            ("trace.json", Emit::TraceJson),
            ("store.json", Emit::Store),
            ("trace.dot", Emit::Dot),
        ];
        for (name, emit) in files {
            write_file(&dir.join(name), &self.render(emit)?)?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display())).or_exit(STORE_FORMAT)
}

fn output_file(input: &StoreFile, store: Store, dest: &Label) -> StoreFile {
    StoreFile { store, root: Some(dest.clone()), env: input.env.clone() }
}

pub fn run(query: &Path, store: &Path, dest: &str, emit: Emit, out_dir: Option<&Path>) -> Result<(), Failure> {
    let file = read_store(store)?;
    let compiled = compile_query(query, &file)?;
    let dest = dest_label(dest, &file)?;
    let (out, trace) = run_traced(&file.store, &dest, &compiled.core).or_exit(INVARIANT)?;
    check_consistency(&out, &trace).or_exit(INVARIANT)?;
    let a = Artifacts { store: output_file(&file, out, &dest), dest, trace };
    if let Some(dir) = out_dir {
        a.write_all(dir)?;
    }
    print!("{}", a.render(emit)?);
    Ok(())
}

pub fn adapt_trace(
    trace_path: &Path,
    store: &Path,
    edits: &Path,
    query: Option<&Path>,
    emit: Emit,
    out_dir: Option<&Path>,
) -> Result<(), Failure> {
    let t = crate::input::read_trace(trace_path)?;
    let file = read_store(store)?;
    let edits = EditScript::from_json(&read_json(edits)?).with_context(|| format!("loading {}", edits.display())).or_exit(STORE_FORMAT)?;
    let dest = t.out().clone();
    let edited = edits.apply(&file.store);
    check_edit(&file.store, &edited, &t, &dest).or_exit(ILLEGAL_EDIT)?;

    let (before, _) = adapt(&file.store, &t, &mut adapt_supply(&file.store, &t)).or_exit(INVARIANT)?;
    let (after, t2) = adapt(&edited, &t, &mut adapt_supply(&edited, &t)).or_exit(INVARIANT)?;
    check_consistency(&after, &t2).or_exit(INVARIANT)?;
    let old = readback(&before, &dest).or_exit(INVARIANT)?;
    let new = readback(&after, &dest).or_exit(INVARIANT)?;

    let mut report = vec![if t2 == t && old == new { "unchanged".to_string() } else { format!("changed: {old} -> {new}") }];
    let mut fidelity_failed = false;
    match query {
        None => report.push("fidelity not checked (no --query)".into()),
        Some(q) => {
            let edited_file = StoreFile { store: edited.clone(), ..file.clone() };
            let compiled = compile_query(q, &edited_file)?;
            let (scratch, ts) = run_traced(&edited, &dest, &compiled.core).or_exit(INVARIANT)?;
            let fresh = readback(&scratch, &dest).or_exit(INVARIANT)?;
            let mut frontier: LabelSet = edited.labels().cloned().collect();
            frontier.insert(dest.clone());
            if fresh != new {
                fidelity_failed = true;
                report.push(format!("fidelity FAIL: re-evaluation gives {fresh}"));
            } else if !trace_alpha_eq(&t2, &ts, &frontier) {
                fidelity_failed = true;
                report.push("fidelity FAIL: adapted trace differs from the re-evaluated trace".into());
            } else {
                report.push("fidelity PASS".into());
            }
        }
    }
    let report = report.join("; ");

    let a = Artifacts { store: output_file(&file, after, &dest), dest, trace: t2 };
    if let Some(dir) = out_dir {
        a.write_all(dir)?;
        write_file(&dir.join("report.txt"), &format!("{report}\n"))?;
    }
    print!("{}", a.render(emit)?);
    eprintln!("{report}");
    if fidelity_failed {
        return Err(Failure::msg(INVARIANT, "adaptation disagrees with re-evaluation"));
    }
    Ok(())
}

pub struct ProvenanceOpts {
    pub kind: String,
    pub instance: Option<String>,
    pub annotations: Option<PathBuf>,
    pub check_oracle: bool,
    pub all: bool,
    pub readback: bool,
}

/// Identity annotations on the store, or on the labels the trace reads
/// when no store is given.
fn identity(kind: Kind, file: Option<&StoreFile>, t: &Trace) -> Result<Annotations, Failure> {
    if let Some(f) = file {
        return Ok(Annotations::identity(kind, &f.store));
    }
    let written = t.written_labels();
    let inputs = t.all_labels().into_iter().filter(|l| !written.contains(l));
    match kind {
        Kind::Where => Ok(Annotations::Where(inputs.map(|l| (l.clone(), Some(l))).collect())),
        Kind::Dep => Ok(Annotations::Dep(inputs.map(|l| (l.clone(), std::collections::BTreeSet::from([l]))).collect())),
        _ => Err(Failure::msg(USAGE, "semiring identity annotations need the input store")),
    }
}

pub fn provenance(input: &Path, store: Option<&Path>, dest: &str, opts: &ProvenanceOpts) -> Result<(), Failure> {
    let kind = Kind::parse(&opts.kind, opts.instance.as_deref())
        .ok_or_else(|| Failure::msg(USAGE, format!("unknown provenance kind `{}` / instance `{}`", opts.kind, opts.instance.as_deref().unwrap_or("-"))))?;
    let src = traced(input, store, dest)?;
    let t = &src.trace;
    let h = match &opts.annotations {
        None => identity(kind, src.file.as_ref(), t)?,
        Some(p) => {
            let h = Annotations::from_json(&read_json(p)?).or_exit(STORE_FORMAT)?;
            if h.kind() != kind {
                return Err(Failure::msg(USAGE, format!("{} holds annotations of another kind", p.display())));
            }
            h
        }
    };
    let extracted = h.extract(t);
    let dest = t.out().clone();

    if opts.check_oracle {
        let (Some(file), Some(compiled)) = (&src.file, &src.compiled) else {
            return Err(Failure::msg(USAGE, "--check-oracle needs a query and a store"));
        };
        let (_, evaluated) = h.eval(&file.store, &dest, &compiled.core, &mut supply_for(&file.store, &dest)).or_exit(INVARIANT)?;
        let diff = extracted.differences(&evaluated);
        if !diff.is_empty() {
            let names: Vec<_> = diff.iter().map(Label::as_str).collect();
            println!("MISMATCH at {}", names.join(", "));
            return Err(Failure::msg(INVARIANT, "extraction disagrees with annotated evaluation"));
        }
        println!("MATCH");
        return Ok(());
    }

    if opts.readback {
        let file = src.file.as_ref().ok_or_else(|| Failure::msg(USAGE, "--readback needs the input store"))?;
        let (out, _) = adapt(&file.store, t, &mut adapt_supply(&file.store, t)).or_exit(INVARIANT)?;
        let text = match &extracted {
            Annotations::Nat(m) => k_readback(&out, m, &dest).map(|v| v.to_string()),
            Annotations::Bool(m) => k_readback(&out, m, &dest).map(|v| v.to_string()),
            Annotations::Poly(m) => k_readback(&out, m, &dest).map(|v| v.to_string()),
            _ => return Err(Failure::msg(USAGE, "--readback applies to semiring provenance")),
        }
        .or_exit(INVARIANT)?;
        println!("{text}");
        return Ok(());
    }

    let mut json = extracted.to_json();
    if !opts.all {
        let written = t.written_labels();
        if let Some(serde_json::Value::Object(m)) = json.get_mut("assignments") {
            m.retain(|l, _| written.contains(&Label::new(l)));
        }
    }
    print!("{}", pretty(&json));
    Ok(())
}

pub fn slice(
    input: &Path,
    store: Option<&Path>,
    dest: &str,
    forward: bool,
    focus: &[String],
    simplified: bool,
    dot: bool,
) -> Result<(), Failure> {
    let src = traced(input, store, dest)?;
    let t = &src.trace;
    let mut labels = LabelSet::new();
    for name in focus {
        if !Label::is_valid_name(name) {
            return Err(Failure::msg(USAGE, format!("`{name}` is not a valid label")));
        }
        labels.insert(Label::new(name));
    }
    check_focus(t, &labels, src.file.as_ref().map(|f| &f.store)).or_exit(USAGE)?;
    let kept = if forward { forward_closure(t, &labels) } else { backward_kept(t, &labels) };
    if dot {
        print!("{}", trace_to_dot(t, Some(&kept)));
        return Ok(());
    }
    match prune(t, &kept) {
        None => eprintln!("empty slice"),
        Some(s) if simplified => println!("{}", simplify(&s)),
        Some(s) => println!("{}", print_trace(&s, false)),
    }
    Ok(())
}

pub fn check(seed: u64, size: usize) -> Result<(), Failure> {
    let reports = run_all(seed, size);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(Failure::msg(INVARIANT, format!("{failed} of {} properties failed", reports.len())));
    }
    Ok(())
}

pub fn load_table(name: &str, csv: &Path, into: Option<&Path>, var: Option<String>) -> Result<(), Failure> {
    let mut file = into.map(read_store).transpose()?.unwrap_or_default();
    if !Label::is_valid_name(name) {
        return Err(Failure::msg(USAGE, format!("`{name}` is not a valid label")));
    }
    let (l, _) = load_csv(name, read(csv)?.as_bytes(), &mut file.store)
        .with_context(|| format!("loading {}", csv.display()))
        .or_exit(STORE_FORMAT)?;
    file.env.insert(var.unwrap_or_else(|| name.to_uppercase()), l);
    print!("{}", pretty(&store_to_json(&file)));
    Ok(())
}
