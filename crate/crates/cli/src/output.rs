use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// A command's result before it is written out.
pub struct Outcome {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    /// Human-readable descriptions of failed checks; empty means pass.
    pub failures: Vec<String>,
    /// Extra summary fields merged into `summary.json`.
    pub summary: Value,
    /// Resolved settings echoed into `summary.json`.
    pub settings: Value,
}

pub fn fmt_f(v: f64) -> String {
    format!("{v:e}")
}

pub fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn schema(command: &str) -> String {
    format!("zetalab/{command}/v1")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_all(
    dir: &Path,
    command: &str,
    outcome: &Outcome,
    exit_code: i32,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let csv_path = dir.join(format!("{command}.csv"));
    let file = File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
    let mut buf = BufWriter::new(file);
    writeln!(buf, "#schema={}", schema(command)).map_err(|e| io_err(&csv_path, e))?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&outcome.header)
            .map_err(|e| io_err(&csv_path, e))?;
        for row in &outcome.rows {
            w.write_record(row).map_err(|e| io_err(&csv_path, e))?;
        }
        w.flush().map_err(|e| io_err(&csv_path, e))?;
    }
    buf.flush().map_err(|e| io_err(&csv_path, e))?;

    write_json(&dir.join(format!("{command}.json")), &outcome.json)?;

    let mut summary = serde_json::json!({
        "schema": schema(command),
        "command": command,
        "pass": outcome.failures.is_empty(),
        "exit_code": exit_code,
        "rows": outcome.rows.len(),
        "failures": outcome.failures,
        "settings": outcome.settings,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut summary, &outcome.summary) {
        for (k, v) in src {
            dst.insert(k.clone(), v.clone());
        }
    }
    write_json(&dir.join("summary.json"), &summary)
}
