//! Number formatting and the JSON envelope.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use hhverify::verify::digest_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// A float with 17 significant digits, positional when the exponent is
/// moderate.
pub fn sig17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0.0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        let decimals = (16 - exp).max(1) as usize;
        let s = format!("{v:.decimals$}");
        // log10 can land one off near powers of ten
        let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
        let significant = digits.trim_start_matches('0').len();
        if significant > 17 && decimals > 1 {
            return format!("{v:.prec$}", prec = decimals - 1);
        }
        s
    } else {
        format!("{v:.16e}")
    }
}

/// Rendering for text tables: `precision` decimals, scientific for tiny
/// magnitudes.
pub fn fixed(v: f64, precision: usize) -> String {
    if v != 0.0 && v.is_finite() && v.abs() < 1e-4 {
        format!("{v:.precision$e}")
    } else {
        format!("{v:.precision$}")
    }
}

fn emit(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let f = n.as_f64().unwrap_or(f64::NAN);
                out.push_str(&sig17(f));
            } else {
                write!(out, "{n}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                emit(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                emit(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    emit(&mut out, v, 0);
    out.push('\n');
    out
}

/// `{tool_version, config: {..., digest}, result}`. The digest covers the
/// config object before the digest field is added, unless one is supplied.
pub fn envelope<R: Serialize>(config: Value, digest: Option<String>, result: &R) -> Value {
    let mut config = match config {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    let digest = digest.unwrap_or_else(|| digest_json(&config));
    config.insert("digest".into(), Value::String(digest));
    let mut top = Map::new();
    top.insert(
        "tool_version".into(),
        Value::String(hhverify::TOOL_VERSION.into()),
    );
    top.insert("config".into(), Value::Object(config));
    top.insert(
        "result".into(),
        serde_json::to_value(result).expect("report serializes"),
    );
    Value::Object(top)
}
