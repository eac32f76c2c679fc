use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;
use trichoderma_core::{lyapunov_z, ModelParams, Trajectory};

use crate::error::{HarnessError, Result};
use crate::summary::RunSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    #[default]
    Json,
    Table,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            _ => Err(HarnessError::Validation(format!("unknown format '{s}' (csv, json or table)"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Table => "txt",
        }
    }
}

/// Trajectory as CSV: `t,X,B,s,P`, plus `Z` when `with_z` is set.
pub fn trajectory_csv(traj: &Trajectory, params: &ModelParams, with_z: bool) -> Result<String> {
    let mut out = String::from(if with_z { "t,X,B,s,P,Z\n" } else { "t,X,B,s,P\n" });
    for (t, st) in traj.samples() {
        write!(out, "{t},{},{},{},{}", st.x, st.b, st.s, st.p).unwrap();
        if with_z {
            let z = lyapunov_z(st, params).map_err(|e| HarnessError::Validation(format!("--with-z: {e}")))?;
            write!(out, ",{z}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn rows(summaries: &[RunSummary]) -> Result<Vec<serde_json::Map<String, Value>>> {
    if summaries.is_empty() {
        return Err(HarnessError::Validation("no results to write".into()));
    }
    Ok(summaries
        .iter()
        .map(|s| match serde_json::to_value(s).expect("summary serializes") {
            Value::Object(m) => m,
            _ => unreachable!(),
        })
        .collect())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders summaries; field order follows [`RunSummary`].
pub fn render_summaries(summaries: &[RunSummary], format: Format) -> Result<String> {
    let rows = rows(summaries)?;
    let keys: Vec<&String> = rows[0].keys().collect();
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("summary serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
            out.push('\n');
            for r in &rows {
                let line: Vec<_> = keys.iter().map(|k| csv_field(&cell(&r[k.as_str()]))).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
        Format::Table => {
            // transposed: one line per field, one column per scenario;
            // free-text warnings go below the grid
            let keys: Vec<&String> = keys.into_iter().filter(|k| *k != "hypothesis_warnings").collect();
            let cols: Vec<Vec<String>> = rows
                .iter()
                .map(|r| keys.iter().map(|k| table_cell(&r[k.as_str()])).collect())
                .collect();
            let key_w = keys.iter().map(|k| k.len()).max().unwrap_or(0);
            let col_w: Vec<usize> = cols.iter().map(|c| c.iter().map(String::len).max().unwrap_or(0)).collect();
            let mut out = String::new();
            for (i, k) in keys.iter().enumerate() {
                write!(out, "{k:<key_w$}").unwrap();
                for (c, w) in cols.iter().zip(&col_w) {
                    write!(out, "  {:>w$}", c[i]).unwrap();
                }
                out.push('\n');
            }
            for r in &rows {
                if let Some(Value::String(w)) = r.get("hypothesis_warnings").filter(|w| w != &"") {
                    write!(out, "\nwarnings for {}: {w}", cell(&r["name"])).unwrap();
                }
            }
            if out.ends_with(|c| c != '\n') {
                out.push('\n');
            }
            out
        }
    })
}

fn table_cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() && x != 0.0 && !(1e-3..1e6).contains(&x.abs()) => format!("{x:.4e}"),
            Some(x) if n.is_f64() => format!("{x:.6}"),
            _ => n.to_string(),
        },
        Value::String(s) if s.is_empty() => "-".into(),
        other => cell(other),
    }
}

/// Writes `contents` to `dir/file`, creating `dir` as needed.
pub fn write_file(dir: &Path, file: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let path = dir.join(file);
    fs::write(&path, contents).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}
