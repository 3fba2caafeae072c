//! Parsing of command-line problem descriptions into library objects.
//!
//! Every failure is reported as a [`CliError`] naming the offending flag
//! (and, inside JSON documents, the path to the bad field).

use std::path::Path;

use bregman_core::probes::GridSpec;
use bregman_core::proxlab::{Form, Piece, PiecewiseFunction};
use bregman_core::{CompactSet, LegendreFunction, Vector};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

/// Parses `1`, `1,2`, `1 2` or `[1, 2]`.
pub fn point(field: &str, text: &str) -> Result<Vector, CliError> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let coords = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>()
                .map_err(|e| CliError::parse(format!("{field}[{i}]"), format!("{s:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Vector::new(coords).map_err(|e| CliError::parse(field, e.to_string()))
}

pub fn function(field: &str, text: &str, dim: usize) -> Result<LegendreFunction, CliError> {
    let f =
        LegendreFunction::parse(text, dim).map_err(|e| CliError::parse(field, e.to_string()))?;
    if f.dim() != dim {
        return Err(CliError::parse(
            field,
            format!(
                "function has dimension {}, the problem has dimension {dim}",
                f.dim()
            ),
        ));
    }
    Ok(f)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntervalSpec {
    Pair([f64; 2]),
    Named { a: f64, b: f64 },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum SetSpec {
    Finite(Vec<Vec<f64>>),
    Interval(IntervalSpec),
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Segment { c0: Vec<f64>, c1: Vec<f64> },
}

fn vector(field: &str, coords: Vec<f64>) -> Result<Vector, CliError> {
    Vector::new(coords).map_err(|e| CliError::parse(field, e.to_string()))
}

/// `{"finite": [[..], ..]}`, `{"interval": [a, b]}` or `{"interval": {"a": .., "b": ..}}`,
/// `{"box": {"lo": [..], "hi": [..]}}`, `{"segment": {"c0": [..], "c1": [..]}}`.
pub fn set(field: &str, text: &str) -> Result<CompactSet, CliError> {
    let spec: SetSpec =
        serde_json::from_str(text).map_err(|e| CliError::parse(field, e.to_string()))?;
    let built = match spec {
        SetSpec::Finite(points) => {
            let points = points
                .into_iter()
                .enumerate()
                .map(|(i, p)| vector(&format!("{field}.finite[{i}]"), p))
                .collect::<Result<_, _>>()?;
            CompactSet::finite(points)
        }
        SetSpec::Interval(IntervalSpec::Pair([a, b]) | IntervalSpec::Named { a, b }) => {
            CompactSet::interval(a, b)
        }
        SetSpec::Box { lo, hi } => CompactSet::boxed(
            vector(&format!("{field}.box.lo"), lo)?,
            vector(&format!("{field}.box.hi"), hi)?,
        ),
        SetSpec::Segment { c0, c1 } => CompactSet::segment(
            vector(&format!("{field}.segment.c0"), c0)?,
            vector(&format!("{field}.segment.c1"), c1)?,
        ),
    };
    built.map_err(|e| CliError::parse(field, e.to_string()))
}

/// `{"lo": [..], "hi": [..], "resolution": [..]}`; a scalar resolution is
/// used on every axis.
pub fn grid(field: &str, text: &str) -> Result<GridSpec, CliError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Resolution {
        One(usize),
        PerAxis(Vec<usize>),
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        lo: Vec<f64>,
        hi: Vec<f64>,
        resolution: Resolution,
    }
    let raw: Raw = serde_json::from_str(text).map_err(|e| CliError::parse(field, e.to_string()))?;
    let resolution = match raw.resolution {
        Resolution::One(n) => vec![n; raw.lo.len()],
        Resolution::PerAxis(v) => v,
    };
    GridSpec::new(raw.lo, raw.hi, resolution).map_err(|e| CliError::parse(field, e.to_string()))
}

fn extended(path: &str, v: Option<&Value>, default: f64) -> Result<f64, CliError> {
    match v {
        None | Some(Value::Null) => Ok(default),
        Some(Value::Number(n)) => n
            .as_f64()
            .ok_or_else(|| CliError::parse(path, "number out of range")),
        Some(Value::String(s)) => match s.as_str() {
            "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
            "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
            other => Err(CliError::parse(
                path,
                format!("expected a number or \"inf\", got {other:?}"),
            )),
        },
        Some(other) => Err(CliError::parse(
            path,
            format!("expected a number, got {other}"),
        )),
    }
}

fn number(path: &str, v: Option<&Value>) -> Result<f64, CliError> {
    match v {
        Some(Value::Number(n)) => n
            .as_f64()
            .ok_or_else(|| CliError::parse(path, "number out of range")),
        Some(other) => Err(CliError::parse(
            path,
            format!("expected a number, got {other}"),
        )),
        None => Err(CliError::parse(path, "missing")),
    }
}

fn pair(path: &str, v: &Value) -> Result<(f64, f64), CliError> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((
            number(&format!("{path}[0]"), Some(a))?,
            number(&format!("{path}[1]"), Some(b))?,
        )),
        _ => Err(CliError::parse(path, "expected [a, b]")),
    }
}

fn form(path: &str, v: Option<&Value>) -> Result<Form, CliError> {
    match v {
        Some(Value::String(s)) if s == "indicator" => Ok(Form::Indicator),
        Some(Value::Object(m)) if m.len() == 1 => {
            let (key, body) = m.iter().next().expect("one entry");
            match key.as_str() {
                "constant" => Ok(Form::Constant(number(
                    &format!("{path}.constant"),
                    Some(body),
                )?)),
                "quadratic" => {
                    let get = |k: &str| -> Result<f64, CliError> {
                        let p = format!("{path}.quadratic.{k}");
                        body.get(k).map_or(Ok(0.0), |x| number(&p, Some(x)))
                    };
                    Ok(Form::Quadratic {
                        curvature: get("curvature")?,
                        linear: get("linear")?,
                        constant: get("constant")?,
                    })
                }
                other => Err(CliError::parse(path, format!("unknown form {other:?}"))),
            }
        }
        _ => Err(CliError::parse(
            path,
            "expected \"indicator\", {\"constant\": c} or {\"quadratic\": {...}}",
        )),
    }
}

/// Named functions (`q`, `step01`) or JSON: `{"indicator": [a, b]}`,
/// `{"step": [a, b]}`, `{"pieces": [{"lo", "hi", "lo_closed", "hi_closed", "form"}, ..]}`.
pub fn piecewise(field: &str, text: &str) -> Result<PiecewiseFunction, CliError> {
    let lib = |e: bregman_core::Error| CliError::parse(field, e.to_string());
    match text.trim() {
        "q" => return Ok(PiecewiseFunction::quadratic()),
        "step01" => return PiecewiseFunction::step(0.0, 1.0).map_err(lib),
        _ => {}
    }
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::parse(field, e.to_string()))?;
    if let Some(p) = v.get("indicator") {
        let (a, b) = pair(&format!("{field}.indicator"), p)?;
        return PiecewiseFunction::indicator(a, b).map_err(lib);
    }
    if let Some(p) = v.get("step") {
        let (a, b) = pair(&format!("{field}.step"), p)?;
        return PiecewiseFunction::step(a, b).map_err(lib);
    }
    let Some(pieces) = v.get("pieces").and_then(Value::as_array) else {
        return Err(CliError::parse(
            field,
            "expected q, step01, indicator, step or pieces",
        ));
    };
    let pieces = pieces
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let path = format!("{field}.pieces[{i}]");
            let lo = extended(&format!("{path}.lo"), p.get("lo"), f64::NEG_INFINITY)?;
            let hi = extended(&format!("{path}.hi"), p.get("hi"), f64::INFINITY)?;
            let flag = |k: &str, finite: bool| p.get(k).and_then(Value::as_bool).unwrap_or(finite);
            Ok(Piece {
                lo,
                hi,
                lo_closed: flag("lo_closed", lo.is_finite()),
                hi_closed: flag("hi_closed", hi.is_finite()),
                form: form(&format!("{path}.form"), p.get("form"))?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    PiecewiseFunction::new(pieces).map_err(lib)
}

/// Defaults read from the JSON file named by `BREGMAN_CONFIG`.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub tie_tol: Option<f64>,
    pub segment_resolution: Option<usize>,
    pub certificate_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub jobs: Option<usize>,
    pub format: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let field = "BREGMAN_CONFIG";
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(field, format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(field, e.to_string()))
    }

    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var_os("BREGMAN_CONFIG") {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_in_several_spellings() {
        assert_eq!(point("x", "1").unwrap().as_slice(), &[1.0]);
        assert_eq!(point("x", "[1, 2.5]").unwrap().as_slice(), &[1.0, 2.5]);
        assert_eq!(point("x", "1 2").unwrap().as_slice(), &[1.0, 2.0]);
        let e = point("--x", "1,foo").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("--x[1]"));
    }

    #[test]
    fn sets() {
        assert_eq!(
            set("s", r#"{"interval":[1,2]}"#).unwrap(),
            CompactSet::interval(1.0, 2.0).unwrap()
        );
        assert_eq!(
            set("s", r#"{"interval":{"a":1,"b":2}}"#).unwrap(),
            CompactSet::interval(1.0, 2.0).unwrap()
        );
        assert_eq!(
            set("s", r#"{"segment":{"c0":[1,3],"c1":[3,1]}}"#)
                .unwrap()
                .dim(),
            2
        );
        assert!(set("s", r#"{"circle":1}"#).is_err());
        let e = set("--set", r#"{"finite":[[1],[]]}"#).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("--set.finite[1]"));
    }

    #[test]
    fn piecewise_specs() {
        assert_eq!(piecewise("g", "q").unwrap(), PiecewiseFunction::quadratic());
        assert_eq!(
            piecewise("g", r#"{"indicator":[0,1]}"#).unwrap(),
            PiecewiseFunction::indicator(0.0, 1.0).unwrap()
        );
        let g = piecewise(
            "g",
            r#"{"pieces":[{"lo":"-inf","hi":"inf","form":{"quadratic":{"curvature":1}}}]}"#,
        )
        .unwrap();
        assert_eq!(g, PiecewiseFunction::quadratic());
        let e = piecewise("--g", r#"{"pieces":[{"lo":0,"hi":1,"form":"circle"}]}"#).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("--g.pieces[0].form"));
    }

    #[test]
    fn grids() {
        let g = grid("grid", r#"{"lo":[0,0],"hi":[1,1],"resolution":3}"#).unwrap();
        assert_eq!(g.len(), 9);
        assert!(grid("grid", r#"{"lo":[0],"hi":[1],"resolution":0}"#).is_err());
    }
}
