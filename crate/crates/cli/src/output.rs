//! Serialization of command results.
//!
//! JSON is written by hand so that every float carries 17 significant
//! digits; non-finite values become `null`. CSV output flattens nested
//! objects into dotted column names.

use std::fmt::Write as _;

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result: one record, or a table of homogeneous rows.
pub enum Output {
    Record(Value),
    Table { schema: String, rows: Vec<Value> },
}

impl Output {
    /// A record with a leading `"schema"` field.
    pub fn record(schema: &str, body: Value) -> Output {
        let mut map = Map::new();
        map.insert("schema".into(), Value::String(schema.into()));
        match body {
            Value::Object(fields) => map.extend(fields),
            other => {
                map.insert("value".into(), other);
            }
        }
        Output::Record(Value::Object(map))
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Record(v), Format::Json) => json(v) + "\n",
            (Output::Table { schema, rows }, Format::Json) => {
                let mut map = Map::new();
                map.insert("schema".into(), Value::String(schema.clone()));
                map.insert("rows".into(), Value::Array(rows.clone()));
                json(&Value::Object(map)) + "\n"
            }
            (Output::Record(v), Format::Csv) => csv(std::slice::from_ref(v)),
            (Output::Table { rows, .. }, Format::Csv) => csv(rows),
        }
    }
}

pub fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_number(out: &mut String, n: &serde_json::Number) {
    if let Some(i) = n.as_i64() {
        write!(out, "{i}").unwrap();
    } else if let Some(u) = n.as_u64() {
        write!(out, "{u}").unwrap();
    } else {
        out.push_str(&number(n.as_f64().unwrap_or(f64::NAN)));
    }
}

pub fn json(v: &Value) -> String {
    let mut out = String::new();
    write_json(&mut out, v);
    out
}

fn write_json(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => write!(out, "{b}").unwrap(),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push(':');
                write_json(out, item);
            }
            out.push('}');
        }
    }
}

fn flatten(prefix: &str, v: &Value, cols: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                flatten(&key(k), item, cols);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), item, cols);
            }
        }
        Value::Null => cols.push((prefix.into(), String::new())),
        Value::Bool(b) => cols.push((prefix.into(), b.to_string())),
        Value::Number(n) => {
            let mut s = String::new();
            write_number(&mut s, n);
            cols.push((prefix.into(), s));
        }
        Value::String(s) => cols.push((prefix.into(), quote(s))),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header from the first row; later rows are matched by column name.
fn csv(rows: &[Value]) -> String {
    let flat: Vec<Vec<(String, String)>> = rows
        .iter()
        .map(|r| {
            let mut cols = Vec::new();
            flatten("", r, &mut cols);
            cols
        })
        .collect();
    let Some(first) = flat.first() else { return String::new() };
    let header: Vec<&str> = first.iter().map(|c| c.0.as_str()).collect();
    let mut out = header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in &flat {
        let line: Vec<&str> = header
            .iter()
            .map(|h| row.iter().find(|c| c.0 == *h).map_or("", |c| c.1.as_str()))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_keep_seventeen_digits() {
        let v = json!({"x": std::f64::consts::PI, "n": 3, "inf": null});
        let s = json(&v);
        assert_eq!(s, r#"{"x":3.1415926535897931e0,"n":3,"inf":null}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn csv_flattens_nested_fields() {
        let rows = vec![json!({"a": 1.5, "b": {"lo": 1, "hi": null}, "v": [2, 3]})];
        assert_eq!(csv(&rows), "a,b.lo,b.hi,v.0,v.1\n1.5000000000000000e0,1,,2,3\n");
    }
}
