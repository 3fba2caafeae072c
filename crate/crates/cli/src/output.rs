//! Output formatting: JSON with every float rounded to 12 significant
//! digits, and the versioned CSV grid format.

use bregman_core::probes::GridRow;
use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::CliError;

/// Version written in the first CSV column; bump when columns change.
pub const CSV_VERSION: u32 = 1;

const SIGNIFICANT_DIGITS: usize = 12;

pub fn round(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .unwrap_or(v)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Number::from_f64(round(x)).map_or(Value::Number(n), Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// Pretty JSON with rounded floats.
pub fn json(doc: &impl Serialize) -> Result<String, CliError> {
    let v = serde_json::to_value(doc)
        .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?;
    serde_json::to_string_pretty(&round_value(v)).map_err(|e| CliError::usage(e.to_string()))
}

/// Number or `"inf"`/`"-inf"`/`"nan"` for JSON.
pub fn extended(v: f64) -> Value {
    if v.is_finite() {
        Number::from_f64(round(v)).map_or(Value::Null, Value::Number)
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// Columns `version,map,index,coords,value,tied`; `coords` is the query
/// point with coordinates separated by spaces.
pub fn csv(rows: &[(&str, Vec<GridRow>)]) -> Result<String, CliError> {
    let fail = |e: csv::Error| CliError::usage(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["version", "map", "index", "coords", "value", "tied"])
        .map_err(fail)?;
    for (map, grid) in rows {
        for (i, row) in grid.iter().enumerate() {
            let coords: Vec<String> = row.point.iter().map(|&c| round(c).to_string()).collect();
            w.write_record([
                CSV_VERSION.to_string(),
                map.to_string(),
                i.to_string(),
                coords.join(" "),
                round(row.value).to_string(),
                row.tied.to_string(),
            ])
            .map_err(fail)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::usage(e.to_string()))
}
