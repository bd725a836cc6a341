use std::fs;
use std::io::Write;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::{Format, Global};

/// Prints an artifact and, with `--output`, writes it as one JSON line.
pub fn emit(global: &Global, artifact: &Value) -> Result<()> {
    let line = serde_json::to_string(artifact)?;
    if let Some(path) = &global.output {
        fs::write(path, format!("{line}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut out = std::io::stdout().lock();
    match global.format {
        Format::Json => writeln!(out, "{line}")?,
        Format::Table => write!(out, "{}", key_value_table(artifact))?,
    }
    Ok(())
}

/// Two-column view of an object's top-level fields.
pub fn key_value_table(v: &Value) -> String {
    let Some(obj) = v.as_object() else {
        return format!("{}\n", cell(v));
    };
    let rows: Vec<(String, String)> = obj.iter().map(|(k, v)| (k.clone(), cell(v))).collect();
    render(&["field".into(), "value".into()], &rows.into_iter().map(|(a, b)| vec![a, b]).collect::<Vec<_>>())
}

/// Scalar text for a table cell; nested values are shortened JSON.
pub fn cell(v: &Value) -> String {
    const WIDTH: usize = 72;
    let s = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if s.chars().count() > WIDTH {
        let head: String = s.chars().take(WIDTH - 3).collect();
        format!("{head}...")
    } else {
        s
    }
}

/// Left-aligned plain-text table with a header rule.
pub fn render(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, c) in row.iter().enumerate() {
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut s = line(header);
    s.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    for row in rows {
        s.push_str(&line(row));
    }
    s
}
