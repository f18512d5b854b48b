use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;
use tacit_core::ScanCell;

/// Rounds every float in `v` to 9 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            serde_json::Number::from_f64(round9(x)).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn round9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn emit(bytes: &[u8], output: Option<&Path>) -> io::Result<()> {
    match output {
        Some(path) => fs::write(path, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

pub fn write_json(report: Value, output: Option<&Path>) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(&round_json(report)).map_err(io::Error::other)?;
    text.push('\n');
    emit(text.as_bytes(), output)
}

pub fn write_csv(cells: &[ScanCell], output: Option<&Path>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in cells {
        w.serialize(ScanCell { p: round9(c.p), beta: round9(c.beta), value: round9(c.value) })
            .map_err(io::Error::other)?;
    }
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    emit(&bytes, output)
}
