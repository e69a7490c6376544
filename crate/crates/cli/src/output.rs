use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Summary object plus optional per-round records.
#[derive(Debug, Default)]
pub struct Report {
    pub summary: Map<String, Value>,
    pub records: Vec<Value>,
}

impl Report {
    pub fn insert(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Rounds every float in `v` to [`SIGNIFICANT_DIGITS`].
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

fn render_json(summary: &Value) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(summary)? + "\n")
}

/// One header row and one value row; nested values are embedded as JSON.
fn render_csv(summary: &Map<String, Value>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(summary.keys())?;
    let cells = summary
        .values()
        .map(|v| match v {
            Value::String(s) => Ok(s.clone()),
            Value::Null => Ok(String::new()),
            other => serde_json::to_string(other),
        })
        .collect::<Result<Vec<_>, _>>()?;
    w.write_record(&cells)?;
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

pub fn emit(
    report: Report,
    format: Format,
    out: Option<&Path>,
    transcript: Option<&Path>,
) -> Result<(), CliError> {
    let summary = match round_value(Value::Object(report.summary)) {
        Value::Object(m) => m,
        _ => unreachable!("rounding preserves objects"),
    };
    let text = match format {
        Format::Json => render_json(&Value::Object(summary))?,
        Format::Csv => render_csv(&summary)?,
    };
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if let Some(path) = transcript {
        let mut lines = String::new();
        for r in report.records {
            lines.push_str(&serde_json::to_string(&round_value(r))?);
            lines.push('\n');
        }
        fs::write(path, lines)?;
    }
    Ok(())
}
