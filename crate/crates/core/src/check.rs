//! Randomized property checks over generated programs, shared by the test
//! suite and `nrc check`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adapt::{adapt, adapt_supply, run_fidelity_check};
use crate::eval::{denote, eval, Value, ValueEnv};
use crate::gen::{gen_edit, gen_program, gen_program_of, gen_store, GenConfig};
use crate::lang::{Expr, Type};
use crate::pipeline::{compile_expr, run_traced, supply_for, Compiled};
use crate::provenance::{chain_of_copies, k_readback, AnnMap, Annotations, KAnn, KCollection, KValue, Kind, Nat, Semiring};
use crate::provenance::{Boolean, Poly};
use crate::slicing::{backward_closure, backward_kept, backward_slice, forward_closure, is_subtrace};
use crate::store::{flatten, op_eval, readback, sum_ints, Constructor, Label, LabelSet, Store, StoreFile};
use crate::trace::{check_consistency, in_star, out_star, IterKind, parse_trace, trace_from_json, trace_to_json, trace_typecheck, Trace};

/// Outcome of one property over a batch of cases.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// The first counterexample, if any.
    pub example: Option<String>,
}

impl PropertyReport {
    fn new(name: impl Into<String>) -> Self {
        PropertyReport { name: name.into(), cases: 0, failures: 0, example: None }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, outcome: Result<(), String>) {
        self.cases += 1;
        if let Err(msg) = outcome {
            self.failures += 1;
            self.example.get_or_insert(msg);
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({}/{} cases)", self.name, self.cases - self.failures, self.cases)?;
        if let Some(ex) = &self.example {
            write!(f, "\n  counterexample: {ex}")?;
        }
        Ok(())
    }
}

/// A generated program compiled against a generated store.
pub struct Case {
    pub file: StoreFile,
    pub program: Expr,
    pub compiled: Compiled,
    pub dest: Label,
}

impl Case {
    pub fn describe(&self) -> String {
        format!("program `{}` on store {}", self.program, crate::store::store_to_json(&self.file))
    }
}

/// A fresh case whose result has type `ty`, or a random type.
pub fn gen_case<R: Rng>(rng: &mut R, cfg: &GenConfig, ty: Option<&Type>) -> Result<Case, String> {
    let (file, schema) = gen_store(rng, cfg);
    let program = match ty {
        Some(ty) => gen_program_of(rng, &schema, ty, cfg),
        None => gen_program(rng, &schema, cfg),
    };
    let compiled = compile_expr(&program, &file).map_err(|e| format!("generated program `{program}` does not compile: {e}"))?;
    Ok(Case { file, program, compiled, dest: Label::new("out") })
}

fn rng_for(seed: u64, name: &str) -> ChaCha8Rng {
    let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

/// The `n` cases of the corpus for `seed`. Properties over random programs
/// all see this same sequence.
pub fn corpus(seed: u64, n: usize) -> impl Iterator<Item = Result<Case, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GenConfig::default();
    (0..n).map(move |_| gen_case(&mut rng, &cfg, None))
}

fn run_cases(name: &str, seed: u64, n: usize, mut prop: impl FnMut(&mut ChaCha8Rng, &Case) -> Result<(), String>) -> PropertyReport {
    let mut rng = rng_for(seed, name);
    let mut report = PropertyReport::new(name);
    for case in corpus(seed, n) {
        let outcome = case.and_then(|case| prop(&mut rng, &case).map_err(|e| format!("{e}\n  on {}", case.describe())));
        report.record(outcome);
    }
    report
}

fn traced(case: &Case) -> Result<(Store, Trace), String> {
    run_traced(&case.file.store, &case.dest, &case.compiled.core).map_err(|e| format!("evaluation failed: {e}"))
}

/// `σ' ⊨ T`, the trace is well-typed with its output at the program type,
/// and traced evaluation agrees with plain evaluation.
pub fn consistency(seed: u64, n: usize) -> PropertyReport {
    run_cases("consistency", seed, n, |_, case| {
        let (out, t) = traced(case)?;
        check_consistency(&out, &t).map_err(|e| format!("inconsistent: {e}"))?;
        if t.out() != &case.dest {
            return Err(format!("trace writes `{}`, not the destination", t.out()));
        }
        let tt = trace_typecheck(&case.compiled.psi, &t).map_err(|e| format!("trace ill-typed: {e}"))?;
        if tt.ty != case.compiled.ty {
            return Err(format!("trace output type {} differs from program type {}", tt.ty, case.compiled.ty));
        }
        let plain = eval(&case.file.store, &case.dest, &case.compiled.core, &mut supply_for(&case.file.store, &case.dest))
            .map_err(|e| format!("plain evaluation failed: {e}"))?;
        if plain != out {
            return Err("traced and plain evaluation produce different stores".into());
        }
        Ok(())
    })
}

/// Adapting to a random legal edit matches evaluation from scratch.
pub fn fidelity(seed: u64, n: usize) -> PropertyReport {
    run_cases("fidelity", seed, n, |rng, case| {
        let edits = gen_edit(rng, &case.file.store);
        let v = run_fidelity_check(&case.compiled.core, &case.file.store, &case.dest, &edits);
        if v.pass {
            Ok(())
        } else {
            Err(format!("edit {}: {}", edits.to_json(), v.detail))
        }
    })
}

/// Re-adapting a trace to the store it produced changes nothing.
pub fn idempotence(seed: u64, n: usize) -> PropertyReport {
    run_cases("adaptation idempotence", seed, n, |_, case| {
        let (out, t) = traced(case)?;
        let (again, t2) = adapt(&out, &t, &mut adapt_supply(&out, &t)).map_err(|e| format!("adaptation failed: {e}"))?;
        if again != out || t2 != t {
            return Err("adapting to the output store changed it".into());
        }
        Ok(())
    })
}

/// Printing and parsing, and JSON encoding, round-trip the trace.
pub fn trace_roundtrip(seed: u64, n: usize) -> PropertyReport {
    run_cases("trace round-trip", seed, n, |_, case| {
        let (_, t) = traced(case)?;
        let text = t.to_string();
        if parse_trace(&text).as_ref() != Ok(&t) {
            return Err(format!("text form does not parse back:\n{text}"));
        }
        if trace_from_json(&trace_to_json(&t)).ok().as_ref() != Some(&t) {
            return Err("JSON form does not decode back".into());
        }
        Ok(())
    })
}

/// The value environment induced by a store file's free-variable bindings.
pub fn value_env(file: &StoreFile, program: &Expr) -> Result<ValueEnv, String> {
    let free = crate::lang::desugar(program).free_vars();
    let mut env = ValueEnv::new();
    for x in free {
        let l = file.env.get(&x).cloned().ok_or_else(|| format!("`{x}` has no env binding"))?;
        env.insert(x, readback(&file.store, &l).map_err(|e| e.to_string())?);
    }
    Ok(env)
}

/// Reading back the operational result gives the denotation of the
/// surface program.
pub fn opsem_denot(seed: u64, n: usize) -> PropertyReport {
    run_cases("operational = denotational", seed, n, |_, case| {
        let (out, _) = traced(case)?;
        let got = readback(&out, &case.dest).map_err(|e| format!("readback failed: {e}"))?;
        let want = denote(&case.program, &value_env(&case.file, &case.program)?).map_err(|e| format!("denotation failed: {e}"))?;
        if got != want {
            return Err(format!("operational {got}, denotational {want}"));
        }
        Ok(())
    })
}

fn collection_types() -> Vec<Type> {
    let row = Type::record([("A", Type::Int), ("B", Type::Int)]);
    vec![Type::coll(Type::Int), Type::coll(row), Type::coll(Type::coll(Type::Int))]
}

/// Extraction from the trace agrees with the annotation-propagating
/// evaluator. Semiring kinds run on collection-typed programs.
pub fn extraction(kind: Kind, seed: u64, n: usize) -> PropertyReport {
    let name = format!("extraction {}", kind_name(kind));
    let mut rng = rng_for(seed, &name);
    let cfg = GenConfig::default();
    let tys = collection_types();
    let mut report = PropertyReport::new(name);
    for _ in 0..n {
        let ty = matches!(kind, Kind::Nat | Kind::Bool | Kind::Poly).then(|| tys.choose(&mut rng).unwrap().clone());
        let outcome = gen_case(&mut rng, &cfg, ty.as_ref()).and_then(|case| {
            extraction_case(kind, &case).map_err(|e| format!("{e}\n  on {}", case.describe()))
        });
        report.record(outcome);
    }
    report
}

pub fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Where => "where",
        Kind::Dep => "dep",
        Kind::Nat => "semiring/nat",
        Kind::Bool => "semiring/bool",
        Kind::Poly => "semiring/poly",
    }
}

fn extraction_case(kind: Kind, case: &Case) -> Result<(), String> {
    let sigma = &case.file.store;
    let (out, t) = traced(case)?;
    let h = Annotations::identity(kind, sigma);
    let extracted = h.extract(&t);
    let (s2, evaluated) = h
        .eval(sigma, &case.dest, &case.compiled.core, &mut supply_for(sigma, &case.dest))
        .map_err(|e| format!("annotated evaluation failed: {e}"))?;
    if s2 != out {
        return Err("annotated evaluation produced a different store".into());
    }
    let diff = extracted.differences(&evaluated);
    if !diff.is_empty() {
        return Err(format!("annotations differ at {diff:?}"));
    }
    if let Annotations::Where(hw) = &extracted {
        where_matches_copies(sigma, &out, &t, hw)?;
    }
    Ok(())
}

/// A written label has a where-annotation exactly when a chain of copies
/// leads to it from that input label.
fn where_matches_copies(sigma: &Store, out: &Store, t: &Trace, h: &AnnMap<Option<Label>>) -> Result<(), String> {
    for l in out.labels().filter(|l| !sigma.contains(l)) {
        match h.get(l).cloned().flatten() {
            Some(a) if !chain_of_copies(t, &a, l) => return Err(format!("`{l}` annotated `{a}` without a chain of copies")),
            None => {
                if let Some(a) = sigma.labels().find(|a| chain_of_copies(t, a, l)) {
                    return Err(format!("`{l}` is unannotated but copied from `{a}`"));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Input annotations counting occurrences: each collection maps its elements
/// to their multiplicities in ℕ.
pub fn counting_annotations(sigma: &Store) -> AnnMap<KAnn<Nat>> {
    sigma
        .iter()
        .filter_map(|(l, k)| match k {
            Constructor::Coll(ms) => {
                let kc: KCollection<Nat> = ms.iter().map(|(x, m)| (x.clone(), Nat(m.into()))).collect();
                Some((l.clone(), Some(kc)))
            }
            _ => None,
        })
        .collect()
}

/// A ℕ-annotated value as a bag of values.
pub fn nat_value(v: &KValue<Nat>) -> Value {
    match v {
        KValue::Int(i) => Value::Int(i.clone()),
        KValue::Bool(b) => Value::Bool(*b),
        KValue::Record(fs) => Value::Record(fs.iter().map(|(n, v)| (n.clone(), nat_value(v))).collect()),
        KValue::Coll(m) => Value::bag(m.iter().map(|(v, k)| (nat_value(v), u64::try_from(&k.0).expect("count fits")))),
    }
}

/// With ℕ annotations counting input multiplicities, the annotated readback
/// of the output is its bag readback.
pub fn bag_semantics(seed: u64, n: usize) -> PropertyReport {
    let tys = collection_types();
    let mut report = PropertyReport::new("bag semantics");
    let mut rng = rng_for(seed, &report.name);
    let cfg = GenConfig::default();
    for _ in 0..n {
        let ty = tys.choose(&mut rng).unwrap().clone();
        let outcome = gen_case(&mut rng, &cfg, Some(&ty)).and_then(|case| {
            let (out, t) = traced(&case)?;
            let h = crate::provenance::k_extract(&counting_annotations(&case.file.store), &t);
            let kv = k_readback(&out, &h, &case.dest).map_err(|e| e.to_string())?;
            let v = readback(&out, &case.dest).map_err(|e| e.to_string())?;
            if nat_value(&kv) != v {
                return Err(format!("annotated readback {kv} differs from {v}\n  on {}", case.describe()));
            }
            Ok(())
        });
        report.record(outcome);
    }
    report
}

/// Backward slices replay to the same focus values, closures are dual, and
/// provenance read off the slice agrees with the full trace at the focus.
pub fn slicing(seed: u64, n: usize) -> PropertyReport {
    run_cases("slicing", seed, n, |rng, case| {
        let (out, t) = traced(case)?;
        let written: Vec<Label> = t.written_labels().into_iter().collect();
        let pick = |rng: &mut ChaCha8Rng| -> LabelSet {
            let k = rng.gen_range(1..=2.min(written.len()));
            written.choose_multiple(rng, k).cloned().collect()
        };
        let focus = pick(rng);
        let slice = backward_slice(&t, &focus).ok_or("backward slice of a written label is empty")?;
        if !is_subtrace(&slice, &t) {
            return Err("slice is not a subtrace".into());
        }
        let mut replayed = case.file.store.clone();
        replay(&slice, &backward_kept(&t, &focus), &mut replayed).map_err(|e| format!("replaying the slice failed: {e}\n{slice}"))?;
        for l in &focus {
            let (a, b) = (readback(&replayed, l), readback(&out, l));
            if a != b {
                return Err(format!("slice for {focus:?} replays `{l}` as {a:?}, not {b:?}\n{slice}"));
            }
        }
        let mut wider = focus.clone();
        wider.extend(pick(rng));
        let big = backward_slice(&t, &wider).unwrap();
        if !is_subtrace(&slice, &big) {
            return Err(format!("slice for {focus:?} is not inside the slice for {wider:?}"));
        }
        let inputs: Vec<&Label> = case.file.store.labels().collect();
        for o in &written {
            let back = backward_closure(&t, &[o.clone()].into());
            for a in &inputs {
                let fwd = forward_closure(&t, &[(*a).clone()].into());
                if back.contains(*a) != fwd.contains(o) {
                    return Err(format!("closures disagree on `{a}` → `{o}`"));
                }
            }
        }
        for kind in [Kind::Where, Kind::Dep] {
            let h = Annotations::identity(kind, &case.file.store);
            let (full, part) = (h.extract(&t), h.extract(&slice));
            if let Some(l) = full.differences(&part).into_iter().find(|l| focus.contains(l)) {
                return Err(format!("{} provenance of `{l}` differs on the slice", kind_name(kind)));
            }
        }
        Ok(())
    })
}

/// Re-executes the steps of a slice over the input store. Iterations whose
/// output is not in `kept` only run their surviving entries.
fn replay(t: &Trace, kept: &LabelSet, store: &mut Store) -> Result<(), String> {
    match t {
        Trace::Seq { first, second } => {
            replay(first, kept, store)?;
            replay(second, kept, store)
        }
        Trace::Assign { out, term } => {
            let k = op_eval(term, store).map_err(|e| e.to_string())?;
            store.set(out.clone(), k);
            Ok(())
        }
        Trace::Proj { out, field, rec, .. } => {
            let src = store.record(rec).map_err(|e| e.to_string())?.get(field).cloned().ok_or("missing field")?;
            let k = store.get(&src).map_err(|e| e.to_string())?.clone();
            store.set(out.clone(), k);
            Ok(())
        }
        Trace::Cond { test, branch, body, .. } => {
            if store.bool(test).map_err(|e| e.to_string())? != *branch {
                return Err(format!("`{test}` no longer selects the recorded branch"));
            }
            replay(body, kept, store)
        }
        Trace::Iter { iter, out, src, theta, .. } => {
            for (ti, _) in theta.values() {
                replay(ti, kept, store)?;
            }
            if kept.contains(out) {
                if store.coll(src).map_err(|e| e.to_string())? != &in_star(theta) {
                    return Err(format!("slice lacks entries of `{src}`"));
                }
                let results = out_star(theta);
                let k = match iter {
                    IterKind::Comp => Constructor::Coll(flatten(store, &results).map_err(|e| e.to_string())?),
                    IterKind::Sum => Constructor::Int(sum_ints(store, &results).map_err(|e| e.to_string())?),
                };
                store.set(out.clone(), k);
            }
            Ok(())
        }
    }
}

/// The eight commutative-semiring axioms on random triples.
pub fn semiring_laws<K: Semiring>(seed: u64, n: usize) -> PropertyReport {
    let name = format!("semiring laws {}", K::NAME);
    let mut rng = rng_for(seed, &name);
    let mut report = PropertyReport::new(name);
    for _ in 0..n {
        let (a, b, c) = (K::random(&mut rng), K::random(&mut rng), K::random(&mut rng));
        report.record(check_laws(&a, &b, &c).map_err(|law| format!("{law} fails for a={a}, b={b}, c={c}")));
    }
    report
}

/// The first axiom `a, b, c` violate, by name.
pub fn check_laws<K: Semiring>(a: &K, b: &K, c: &K) -> Result<(), &'static str> {
    let (zero, one) = (K::zero(), K::one());
    let laws: [(&str, bool); 8] = [
        ("+ associative", a.add(b).add(c) == a.add(&b.add(c))),
        ("+ commutative", a.add(b) == b.add(a)),
        ("0 neutral for +", a.add(&zero) == *a),
        ("· associative", a.mul(b).mul(c) == a.mul(&b.mul(c))),
        ("· commutative", a.mul(b) == b.mul(a)),
        ("1 neutral for ·", a.mul(&one) == *a),
        ("0 annihilates", a.mul(&zero) == zero),
        ("· distributes over +", a.mul(&b.add(c)) == a.mul(b).add(&a.mul(c))),
    ];
    match laws.iter().find(|(_, ok)| !ok) {
        Some((law, _)) => Err(law),
        None => Ok(()),
    }
}

/// Every property, `n` cases each (semiring laws get `2n`).
pub fn run_all(seed: u64, n: usize) -> Vec<PropertyReport> {
    let mut out = vec![consistency(seed, n), fidelity(seed, n), idempotence(seed, n), trace_roundtrip(seed, n), opsem_denot(seed, n)];
    for kind in [Kind::Where, Kind::Dep, Kind::Nat, Kind::Bool, Kind::Poly] {
        out.push(extraction(kind, seed, n));
    }
    out.push(bag_semantics(seed, n));
    out.push(slicing(seed, n));
    out.push(semiring_laws::<Nat>(seed, 2 * n));
    out.push(semiring_laws::<Boolean>(seed, 2 * n));
    out.push(semiring_laws::<Poly>(seed, 2 * n));
    out
}
