//! Aggregation of JSON artifacts into CSV and text tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{cell, render};
use crate::{Format, Global, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Columns per artifact kind: `(header, JSON pointer)`. `file` is special.
fn layout(kind: &str) -> Option<Vec<(&'static str, &'static str)>> {
    let cols = match kind {
        "acceptance" => vec![("id", "/id"), ("criterion", "/criterion"), ("pass", "/pass"), ("detail", "/detail")],
        "ramsey_verdict" => vec![("file", ""), ("N", "/N"), ("lengths", "/lengths"), ("outcome", "/outcome"), ("nodes", "/nodes")],
        "ramsey_value" => vec![("file", ""), ("lengths", "/lengths"), ("value", "/value"), ("lower", "/lower"), ("upper", "/upper")],
        "cycle_search" => vec![("file", ""), ("color", "/color"), ("length", "/length"), ("outcome", "/outcome")],
        "pipeline_run" => vec![
            ("file", ""),
            ("N", "/N"),
            ("n", "/n"),
            ("k", "/k"),
            ("targets", "/targets"),
            ("color", "/certificate/color"),
            ("length", "/certificate/length"),
        ],
        "construction_grid" => vec![("r", "/r"), ("lengths", "/lengths"), ("color", "/color"), ("cycle_free", "/cycle_free")],
        "matching_grid" => vec![("grid", "/grid"), ("k", "/k"), ("runs", "/runs"), ("met", "/met"), ("threshold", "/threshold")],
        _ => return None,
    };
    Some(cols)
}

fn field(v: &Value, pointer: &str) -> String {
    match v.pointer(pointer) {
        Some(Value::Array(items)) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            items.iter().map(cell).collect::<Vec<_>>().join(",")
        }
        Some(x) => cell(x),
        None => String::new(),
    }
}

/// Reads every `*.json` / `*.jsonl` file of `dir` (sorted by name) and groups
/// the artifacts by `kind`.
pub fn collect(dir: &Path) -> Result<Vec<Table>> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "jsonl")))
        .collect();
    files.sort();
    let mut groups: BTreeMap<String, Vec<(String, Value)>> = BTreeMap::new();
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let values: Vec<Value> = if path.extension().is_some_and(|e| e == "json") {
            vec![serde_json::from_str(&text).with_context(|| format!("malformed JSON in {name}"))?]
        } else {
            text.lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("malformed JSON in {name} line {}", i + 1)))
                .collect::<Result<_>>()?
        };
        for v in values {
            let Some(kind) = v.get("kind").and_then(Value::as_str) else {
                bail!("artifact without a kind field in {name}");
            };
            groups.entry(kind.to_string()).or_default().push((name.clone(), v));
        }
    }
    Ok(groups.into_iter().map(|(kind, items)| table(&kind, &items)).collect())
}

fn table(kind: &str, items: &[(String, Value)]) -> Table {
    let cols: Vec<(String, String)> = match layout(kind) {
        Some(l) => l.into_iter().map(|(h, p)| (h.to_string(), p.to_string())).collect(),
        None => {
            // Scalar top-level fields, in key order.
            let mut keys: Vec<String> = items
                .iter()
                .flat_map(|(_, v)| v.as_object().into_iter().flatten())
                .filter(|(k, v)| *k != "kind" && !v.is_object() && !v.is_array())
                .map(|(k, _)| k.clone())
                .collect();
            keys.sort();
            keys.dedup();
            std::iter::once(("file".to_string(), String::new())).chain(keys.into_iter().map(|k| (k.clone(), format!("/{k}")))).collect()
        }
    };
    let rows = items
        .iter()
        .map(|(file, v)| cols.iter().map(|(_, p)| if p.is_empty() { file.clone() } else { field(v, p) }).collect())
        .collect();
    Table { name: kind.to_string(), columns: cols.into_iter().map(|(h, _)| h).collect(), rows }
}

pub fn to_text(tables: &[Table]) -> String {
    if tables.is_empty() {
        return "no artifacts\n".to_string();
    }
    tables.iter().map(|t| format!("{} ({} rows)\n{}", t.name, t.rows.len(), render(&t.columns, &t.rows))).collect::<Vec<_>>().join("\n")
}

pub fn to_csv(t: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn report(g: &Global, dir: &Path) -> Result<Status> {
    let tables = collect(dir)?;
    let text = to_text(&tables);
    if let Some(out) = &g.output {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        for t in &tables {
            let path = out.join(format!("{}.csv", t.name));
            fs::write(&path, to_csv(t)?).with_context(|| format!("writing {}", path.display()))?;
        }
        fs::write(out.join("report.txt"), &text).with_context(|| format!("writing {}", out.display()))?;
    }
    match g.format {
        Format::Table => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string(&json!({ "kind": "report", "tables": tables }))?),
    }
    Ok(Status::Ok)
}
