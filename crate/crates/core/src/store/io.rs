use std::collections::BTreeMap;
use std::io::Read;

use num_bigint::BigInt;
use serde_json::{json, Map, Value as Json};

use super::typing::{check_acyclic, infer_store_type};
use super::{bigint_serde, Constructor, Label, LabelMultiset, Store, StoreError};
use crate::lang::Type;

/// Contents of a store file: the store, its designated root and the
/// variable-to-label environment for free program variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StoreFile {
    pub store: Store,
    pub root: Option<Label>,
    pub env: BTreeMap<String, Label>,
}

fn format_err(msg: impl Into<String>) -> StoreError {
    StoreError::Format(msg.into())
}

fn label_of(s: &str) -> Result<Label, StoreError> {
    if Label::is_valid_name(s) {
        Ok(Label::new(s))
    } else {
        Err(format_err(format!("`{s}` is not a valid label name")))
    }
}

pub fn constructor_to_json(k: &Constructor) -> Json {
    match k {
        Constructor::Int(i) => json!({ "int": bigint_serde::to_json(i) }),
        Constructor::Bool(b) => json!({ "bool": b }),
        Constructor::Record(fs) => {
            let m: Map<String, Json> = fs.iter().map(|(f, l)| (f.clone(), Json::from(l.as_str()))).collect();
            json!({ "record": m })
        }
        Constructor::Coll(ms) => {
            let m: Map<String, Json> = ms.iter().map(|(l, n)| (l.as_str().to_string(), Json::from(n))).collect();
            json!({ "coll": m })
        }
    }
}

pub fn constructor_from_json(v: &Json) -> Result<Constructor, StoreError> {
    let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| format_err(format!("expected a one-key constructor object, found {v}")))?;
    let (tag, body) = obj.iter().next().unwrap();
    match tag.as_str() {
        "int" => bigint_serde::from_json(body).map(Constructor::Int).ok_or_else(|| format_err(format!("bad int {body}"))),
        "bool" => body.as_bool().map(Constructor::Bool).ok_or_else(|| format_err(format!("bad bool {body}"))),
        "record" => {
            let fs = body.as_object().ok_or_else(|| format_err("record body must be an object"))?;
            let mut out = BTreeMap::new();
            for (f, l) in fs {
                let l = l.as_str().ok_or_else(|| format_err(format!("field `{f}` must name a label")))?;
                out.insert(f.clone(), label_of(l)?);
            }
            Ok(Constructor::Record(out))
        }
        "coll" => {
            let ms = body.as_object().ok_or_else(|| format_err("coll body must be an object"))?;
            let mut out = LabelMultiset::new();
            for (l, n) in ms {
                let n = n.as_u64().filter(|n| *n > 0).ok_or_else(|| format_err(format!("multiplicity of `{l}` must be a positive integer")))?;
                out.add(label_of(l)?, n);
            }
            Ok(Constructor::Coll(out))
        }
        other => Err(format_err(format!("unknown constructor tag `{other}`"))),
    }
}

pub fn store_to_json(file: &StoreFile) -> Json {
    let labels: Map<String, Json> = file.store.iter().map(|(l, k)| (l.as_str().to_string(), constructor_to_json(k))).collect();
    let mut out = Map::new();
    if let Some(r) = &file.root {
        out.insert("root".into(), r.as_str().into());
    }
    out.insert("labels".into(), labels.into());
    if !file.env.is_empty() {
        let env: Map<String, Json> = file.env.iter().map(|(x, l)| (x.clone(), Json::from(l.as_str()))).collect();
        out.insert("env".into(), env.into());
    }
    out.into()
}

/// Parses and validates a store file: every referenced label is bound,
/// the store is acyclic and well typed.
pub fn store_from_json(v: &Json) -> Result<StoreFile, StoreError> {
    let obj = v.as_object().ok_or_else(|| format_err("store file must be a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "root" | "labels" | "env") {
            return Err(format_err(format!("unknown key `{key}`")));
        }
    }
    let labels = obj.get("labels").and_then(Json::as_object).ok_or_else(|| format_err("missing `labels` object"))?;
    let mut store = Store::new();
    for (l, k) in labels {
        store.set(label_of(l)?, constructor_from_json(k)?);
    }
    let root = match obj.get("root") {
        None | Some(Json::Null) => None,
        Some(Json::String(s)) => Some(label_of(s)?),
        Some(other) => return Err(format_err(format!("bad root {other}"))),
    };
    let mut env = BTreeMap::new();
    if let Some(e) = obj.get("env") {
        let e = e.as_object().ok_or_else(|| format_err("`env` must be an object"))?;
        for (x, l) in e {
            let l = l.as_str().ok_or_else(|| format_err(format!("env entry `{x}` must name a label")))?;
            env.insert(x.clone(), label_of(l)?);
        }
    }
    check_acyclic(&store).map_err(|e| format_err(e.to_string()))?;
    infer_store_type(&store).map_err(|e| format_err(e.to_string()))?;
    for l in root.iter().chain(env.values()) {
        if !store.contains(l) {
            return Err(format_err(format!("label `{l}` is not bound")));
        }
    }
    Ok(StoreFile { store, root, env })
}

fn parse_cell(s: &str) -> Result<(Constructor, Type), StoreError> {
    let s = s.trim();
    match s {
        "true" => Ok((Constructor::Bool(true), Type::Bool)),
        "false" => Ok((Constructor::Bool(false), Type::Bool)),
        _ => s
            .parse::<BigInt>()
            .map(|i| (Constructor::Int(i), Type::Int))
            .map_err(|_| format_err(format!("cell `{s}` is neither an integer nor a boolean"))),
    }
}

/// Loads a CSV table with a header row of field names. Row `i` is stored at
/// `NAMEi` and its `j`-th column at `NAMEij`; `NAME` holds the collection.
pub fn load_table(name: &str, input: impl Read, store: &mut Store) -> Result<(Label, Type), StoreError> {
    let table = label_of(name)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = rdr.headers().map_err(|e| format_err(e.to_string()))?.iter().map(str::to_string).collect();
    if header.is_empty() {
        return Err(format_err("table has no columns"));
    }
    let mut row_type: Option<Type> = None;
    let mut coll = LabelMultiset::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| format_err(e.to_string()))?;
        let row = label_of(&format!("{name}{}", i + 1))?;
        let mut fields = BTreeMap::new();
        let mut types = BTreeMap::new();
        for (j, (field, cell)) in header.iter().zip(rec.iter()).enumerate() {
            let (k, t) = parse_cell(cell)?;
            let cl = label_of(&format!("{name}{}{}", i + 1, j + 1))?;
            store.bind(cl.clone(), k)?;
            fields.insert(field.clone(), cl);
            types.insert(field.clone(), t);
        }
        let t = Type::Record(types);
        match &row_type {
            Some(rt) if *rt != t => return Err(format_err(format!("row {} has type {t}, expected {rt}", i + 1))),
            _ => row_type = Some(t),
        }
        store.bind(row.clone(), Constructor::Record(fields))?;
        coll.add(row, 1);
    }
    store.bind(table.clone(), Constructor::Coll(coll))?;
    let elem = row_type.unwrap_or_else(|| Type::Record(header.iter().map(|h| (h.clone(), Type::Int)).collect()));
    Ok((table, Type::coll(elem)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::readback;

    #[test]
    fn json_round_trip() {
        let text = r#"{"root":"c","labels":{"a":{"int":1},"b":{"bool":false},
            "r":{"record":{"A":"a","B":"b"}},"c":{"coll":{"r":2}}},"env":{"X":"c"}}"#;
        let f = store_from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(f.store.len(), 4);
        assert_eq!(f.env["X"], Label::new("c"));
        let back = store_from_json(&store_to_json(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn json_rejects_bad_input() {
        for bad in [
            r#"{"labels":{"a":{"int":1,"bool":true}}}"#,
            r#"{"labels":{"c":{"coll":{"x":1}}}}"#,
            r#"{"labels":{"c":{"coll":{"c":1}}}}"#,
            r#"{"labels":{"a":{"int":"x"}}}"#,
            r#"{"labels":{"a":{"int":1}},"root":"b"}"#,
            r#"{"labels":{"c":{"coll":{"a":0}},"a":{"int":1}}}"#,
        ] {
            let v: Json = serde_json::from_str(bad).unwrap();
            assert!(matches!(store_from_json(&v), Err(StoreError::Format(_))), "{bad}");
        }
    }

    #[test]
    fn csv_table_labels() {
        let mut store = Store::new();
        let (t, ty) = load_table("s", "C,D\n2,3\n2,4\n3,7\n".as_bytes(), &mut store).unwrap();
        assert_eq!(ty.to_string(), "{(C: int, D: int)}");
        assert_eq!(store.int(&Label::new("s32")).unwrap(), &BigInt::from(7));
        assert_eq!(readback(&store, &t).unwrap().to_string(), "{(C: 2, D: 3), (C: 2, D: 4), (C: 3, D: 7)}");
    }
}
