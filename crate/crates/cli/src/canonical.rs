//! Canonical text output: sorted keys and floats at 17 significant digits.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// `x` with 17 significant digits, enough to round-trip every `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_number(n: &serde_json::Number, out: &mut String) {
    if let Some(i) = n.as_i64() {
        out.push_str(&i.to_string());
    } else if let Some(u) = n.as_u64() {
        out.push_str(&u.to_string());
    } else {
        out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}

fn write_value(v: &Value, indent: Option<usize>, level: usize, out: &mut String) {
    let newline = |out: &mut String, level: usize| {
        if let Some(step) = indent {
            out.push('\n');
            out.push_str(&" ".repeat(step * level));
        }
    };
    let sep = if indent.is_some() { ": " } else { ":" };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => write_string(s, out),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items.iter().all(|i| !matches!(i, Value::Array(_) | Value::Object(_)));
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                    if flat && indent.is_some() {
                        out.push(' ');
                    }
                }
                if !flat {
                    newline(out, level + 1);
                }
                write_value(item, indent, level + 1, out);
            }
            if !flat {
                newline(out, level);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                newline(out, level + 1);
                write_string(key, out);
                out.push_str(sep);
                write_value(&map[*key], indent, level + 1, out);
            }
            newline(out, level);
            out.push('}');
        }
    }
}

/// Compact canonical form, used for hashing.
pub fn compact(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, None, 0, &mut out);
    out
}

/// Indented canonical form with a trailing newline, used for reports.
pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, Some(2), 0, &mut out);
    out.push('\n');
    out
}

pub fn to_pretty<T: Serialize>(t: &T) -> String {
    pretty(&serde_json::to_value(t).expect("report types serialize to JSON"))
}

/// SHA-256 of the compact canonical form, hex encoded.
pub fn content_hash(v: &Value) -> String {
    hex::encode(Sha256::digest(compact(v).as_bytes()))
}
