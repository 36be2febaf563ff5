//! JSON and CSV emission. Rationals appear as `"p/q"` strings; CSV adds a
//! 15-significant-digit decimal column next to every rational.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use qfa_core::Rational;
use serde_json::Value;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

pub fn decimal(s: &str) -> String {
    match s.parse::<Rational>() {
        Ok(r) if s.contains('/') || s.chars().all(|c| c.is_ascii_digit() || c == '-') => r.to_decimal_string(15),
        _ => String::new(),
    }
}

/// Flattens a JSON document into `(path, value)` pairs.
pub fn flatten(v: &Value, prefix: &str, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(v, &join(k), out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(v, &join(&i.to_string()), out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// `key,value,decimal` rows for any document.
pub fn flat_csv(doc: &Value) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    flatten(doc, "", &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value", "decimal"])?;
    for (k, v) in rows {
        let d = decimal(&v);
        w.write_record([k.as_str(), v.as_str(), d.as_str()])?;
    }
    Ok(w.into_inner()?)
}

pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner()?)
}

pub fn json_bytes(doc: &Value) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(doc)?;
    s.push(b'\n');
    Ok(s)
}

/// Writes to `path`, or stdout when absent.
pub fn write(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_only_for_rationals() {
        assert_eq!(decimal("1/3"), "3.33333333333333e-1");
        assert_eq!(decimal("7"), "7.00000000000000e0");
        assert_eq!(decimal("Yes"), "");
    }

    #[test]
    fn flattening() {
        let v: Value = serde_json::json!({"a": {"b": "1/2"}, "c": [true, null]});
        let mut out = Vec::new();
        flatten(&v, "", &mut out);
        assert_eq!(out, vec![("a.b".into(), "1/2".into()), ("c.0".into(), "true".into()), ("c.1".into(), String::new())]);
    }
}
