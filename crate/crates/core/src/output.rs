//! Serialized result rows and tables.
//!
//! CSV output is UTF-8 with LF line endings, and reals are written in the
//! shortest decimal form that round-trips (`f64`'s `Display`). JSON output is
//! an array of objects keyed by the same column names.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::ghost::ClassifiedTrial;

pub const RESULT_HEADER: [&str; 6] = ["l", "epsilon", "magnitude", "class", "seed", "term_count"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("nothing to emit: no rows")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed CSV on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// One serialized trial factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub l: String,
    pub epsilon: f64,
    pub magnitude: f64,
    pub class: String,
    pub seed: Option<u64>,
    pub term_count: u64,
}

impl ResultRow {
    pub fn from_trial(trial: &ClassifiedTrial) -> Self {
        ResultRow {
            l: trial.l.to_string(),
            epsilon: trial.epsilon.value(),
            magnitude: trial.sum.magnitude,
            class: trial.class.to_string(),
            seed: trial.spec.seed(),
            term_count: trial.sum.term_count,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.l,
            self.epsilon,
            self.magnitude,
            self.class,
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.term_count
        )
    }
}

/// A cell of a generic table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Column-named rows for figure data and study summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> Result<String, OutputError> {
        if self.rows.is_empty() {
            return Err(OutputError::Empty);
        }
        Ok(match format {
            OutputFormat::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let objects: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let map: Map<String, Value> = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| (k.to_string(), v.json()))
                            .collect();
                        Value::Object(map)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&objects).expect("JSON values serialize");
                s.push('\n');
                s
            }
        })
    }
}

/// Renders result rows in the requested format.
pub fn render_rows(rows: &[ResultRow], format: OutputFormat) -> Result<String, OutputError> {
    if rows.is_empty() {
        return Err(OutputError::Empty);
    }
    Ok(match format {
        OutputFormat::Csv => {
            let mut out = RESULT_HEADER.join(",");
            out.push('\n');
            for row in rows {
                out.push_str(&row.csv_line());
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
            s.push('\n');
            s
        }
    })
}

/// Writes `rows` to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[ResultRow], format: OutputFormat, path: Option<&Path>) -> Result<(), OutputError> {
    let text = render_rows(rows, format)?;
    write_text(&text, path)
}

pub fn write_text(text: &str, path: Option<&Path>) -> Result<(), OutputError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| OutputError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| OutputError::Io {
                path: "<stdout>".to_string(),
                source,
            }),
    }
}

/// Parses CSV written by [`emit`] back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, OutputError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h).unwrap_or_default();
    if header != RESULT_HEADER.join(",") {
        return Err(OutputError::Parse {
            line: 1,
            reason: format!("unexpected header {header:?}"),
        });
    }
    lines
        .map(|(i, line)| {
            let line_no = i + 1;
            let err = |reason: String| OutputError::Parse { line: line_no, reason };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != RESULT_HEADER.len() {
                return Err(err(format!("expected 6 fields, found {}", fields.len())));
            }
            let real = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
            Ok(ResultRow {
                l: fields[0].to_string(),
                epsilon: real(fields[1])?,
                magnitude: real(fields[2])?,
                class: fields[3].to_string(),
                seed: match fields[4] {
                    "" => None,
                    s => Some(s.parse().map_err(|e| err(format!("seed {s:?}: {e}")))?),
                },
                term_count: fields[5]
                    .parse()
                    .map_err(|e| err(format!("term_count {:?}: {e}", fields[5])))?,
            })
        })
        .collect()
}
