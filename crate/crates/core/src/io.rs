//! JSON and CSV serialization of metric spaces.
//!
//! JSON: `{"points": ["a", ...], "matrix": [["0", "1/2", ...], ...]}` with
//! entries as integer, `p/q` or exact decimal strings (bare JSON integers are
//! accepted too). CSV: a header row of labels followed by the matrix rows;
//! a leading label column is tolerated.
//!
//! Non-integer JSON *numbers* are binary floats and are rejected unless
//! [`ParseOptions::rationalize`] is set, in which case they are replaced by
//! their best continued-fraction convergent under the denominator bound.

use serde_json::{json, Value};
use thiserror::Error;

use crate::metric::{default_labels, validate_metric, FiniteMetricSpace, MetricError};
use crate::scalar::{Scalar, ScalarParseError, DEFAULT_DENOMINATOR_BOUND};

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub rationalize: bool,
    pub denominator_bound: u64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { rationalize: false, denominator_bound: DEFAULT_DENOMINATOR_BOUND }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Format(String),
    #[error("entry ({row},{col}): {source}")]
    Scalar { row: usize, col: usize, source: ScalarParseError },
    #[error("entry ({row},{col}) is a floating-point number `{value}`; pass --rationalize to accept it")]
    Float { row: usize, col: usize, value: String },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Labels and matrix as read, before any metric validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSpace {
    pub points: Vec<String>,
    pub matrix: Vec<Vec<Scalar>>,
}

impl RawSpace {
    pub fn validate(self) -> Result<FiniteMetricSpace, MetricError> {
        validate_metric(self.points, self.matrix)
    }
}

fn entry_from_json(v: &Value, row: usize, col: usize, opts: &ParseOptions) -> Result<Scalar, IoError> {
    match v {
        Value::String(s) => s.parse().map_err(|source| IoError::Scalar { row, col, source }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Scalar::from_integer(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Scalar::from(num_bigint::BigInt::from(u)))
            } else {
                let x = n.as_f64().unwrap_or(f64::NAN);
                match (opts.rationalize, Scalar::from_f64_exact(x)) {
                    (true, Some(exact)) => Ok(exact.rationalize(opts.denominator_bound)),
                    _ => Err(IoError::Float { row, col, value: n.to_string() }),
                }
            }
        }
        other => Err(IoError::Format(format!("entry ({row},{col}) has unsupported type: {other}"))),
    }
}

pub fn parse_json_raw(text: &str, opts: &ParseOptions) -> Result<RawSpace, IoError> {
    let doc: Value = serde_json::from_str(text)?;
    let rows = doc
        .get("matrix")
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::Format("missing `matrix` array".into()))?;
    let mut matrix = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| IoError::Format(format!("matrix row {r} is not an array")))?;
        matrix.push(
            row.iter()
                .enumerate()
                .map(|(c, v)| entry_from_json(v, r, c, opts))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let points = match doc.get("points") {
        None | Some(Value::Null) => default_labels(matrix.len()),
        Some(Value::Array(ps)) => ps
            .iter()
            .map(|p| match p {
                Value::String(s) => Ok(s.clone()),
                other => Err(IoError::Format(format!("point label {other} is not a string"))),
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(IoError::Format("`points` must be an array of strings".into())),
    };
    Ok(RawSpace { points, matrix })
}

pub fn parse_csv_raw(text: &str, _opts: &ParseOptions) -> Result<RawSpace, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    // Leading empty header cell means a label column.
    let label_column = points.first().is_some_and(|h| h.is_empty());
    if label_column {
        points.remove(0);
    }
    let mut matrix = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let cells: Vec<&str> = record.iter().skip(usize::from(label_column)).collect();
        matrix.push(
            cells
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    cell.parse::<Scalar>().map_err(|source| IoError::Scalar { row: r, col: c, source })
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(RawSpace { points, matrix })
}

/// Dispatches on the first non-blank character: `{` means JSON, else CSV.
pub fn parse_raw(text: &str, opts: &ParseOptions) -> Result<RawSpace, IoError> {
    if text.trim_start().starts_with('{') {
        parse_json_raw(text, opts)
    } else {
        parse_csv_raw(text, opts)
    }
}

pub fn parse_space(text: &str, opts: &ParseOptions) -> Result<FiniteMetricSpace, IoError> {
    Ok(parse_raw(text, opts)?.validate()?)
}

pub fn space_to_json_value(space: &FiniteMetricSpace) -> Value {
    json!({
        "points": space.labels(),
        "matrix": space
            .matrix()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn space_to_json(space: &FiniteMetricSpace) -> String {
    let mut s = serde_json::to_string_pretty(&space_to_json_value(space)).unwrap();
    s.push('\n');
    s
}

pub fn space_to_csv(space: &FiniteMetricSpace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(space.labels()).unwrap();
    for row in space.matrix() {
        w.write_record(row.iter().map(ToString::to_string)).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
