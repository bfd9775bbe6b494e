//! JSON and CSV rendering. Every number is written as a decimal string.

use std::io::Write;
use std::path::Path;

use cantorlab::numerics::{default_precision, BigScalar, Real};
use cantorlab::ultrametrics::ValuationEstimate;
use serde_json::{json, Value};

use crate::args::Format;
use crate::CliError;

/// A table emitted in CSV mode.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Result of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub value: Value,
    pub table: Option<Table>,
    /// Exit code to report after the output is written.
    pub status: u8,
}

impl Report {
    pub fn json(value: Value) -> Self {
        Report {
            value,
            table: None,
            status: 0,
        }
    }

    pub fn with_table(value: Value, table: Table) -> Self {
        Report {
            value,
            table: Some(table),
            status: 0,
        }
    }

    pub fn with_status(mut self, status: u8) -> Self {
        self.status = status;
        self
    }
}

/// Decimal string at the working precision; wider intermediates are rounded.
pub fn num(x: &BigScalar) -> Value {
    let prec = x.prec().min(default_precision());
    Value::String(x.with_prec(prec).to_decimal_string())
}

pub fn real(x: &Real) -> Value {
    Value::String(x.to_exact_or_decimal())
}

pub fn valuation_json(operation: &str, inputs: Value, est: &ValuationEstimate) -> Value {
    json!({
        "operation": operation,
        "inputs": inputs,
        "estimate": num(&est.value),
        "error_bound": num(&est.error_bound),
        "terms_used": est.terms_used,
        "converged": est.converged,
        "schedule": est.schedule,
        "trace": est.trace,
    })
}

pub fn trace_table(est: &ValuationEstimate) -> Table {
    let mut t = Table::new(&["n", "scale", "term"]);
    for row in &est.trace {
        t.push(vec![row.n.to_string(), row.scale.clone(), row.term.clone()]);
    }
    t
}

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&decimal_floats(report.value.clone())).map_err(|e| CliError::Io(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let table = match &report.table {
                Some(t) => t.clone(),
                None => flatten(&report.value),
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).map_err(|e| CliError::Io(e.to_string()))?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Replaces floating-point JSON numbers by their decimal strings.
fn decimal_floats(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => Value::String(n.to_string()),
        Value::Array(items) => Value::Array(items.into_iter().map(decimal_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, decimal_floats(v))).collect()),
        other => other,
    }
}

/// `key,value` rows for every leaf of a JSON document.
fn flatten(value: &Value) -> Table {
    let mut table = Table::new(&["key", "value"]);
    walk(value, String::new(), &mut table);
    table
}

fn walk(value: &Value, path: String, table: &mut Table) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                walk(v, join(k), table);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(v, join(&i.to_string()), table);
            }
        }
        Value::String(s) => table.push(vec![path, s.clone()]),
        Value::Null => table.push(vec![path, String::new()]),
        other => table.push(vec![path, other.to_string()]),
    }
}

pub fn emit(bytes: &[u8], output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
