//! Versioned report envelope and its JSON, table and CSV renderings.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const SCHEMA_NAME: &str = "dynzsig-report";
pub const SCHEMA_VERSION: u32 = 1;

/// The JSON schema every emitted report validates against.
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: u32,
    pub command: String,
    pub config: Value,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, config: &impl Serialize, result: &impl Serialize) -> Result<Self> {
        let enc = |e: serde_json::Error| Error::Invariant(format!("report serialization: {e}"));
        Ok(Report {
            schema: SCHEMA_NAME.into(),
            version: SCHEMA_VERSION,
            command: command.into(),
            config: serde_json::to_value(config).map_err(enc)?,
            result: serde_json::to_value(result).map_err(enc)?,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{} ({} v{})\n", self.command, self.schema, self.version);
        let (scalars, table) = split_result(&self.result);
        let width = scalars.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &scalars {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        if let Some((name, header, rows)) = table {
            out.push_str(&format!("\n{name}:\n"));
            let mut widths: Vec<usize> = header.iter().map(String::len).collect();
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            out.push_str(&line(&header));
            for row in &rows {
                out.push_str(&line(row));
            }
        }
        out
    }

    /// The main per-item table of the result; key/value pairs when there is none.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        match split_result(&self.result) {
            (_, Some((_, header, rows))) => {
                w.write_record(&header).map_err(csv_err)?;
                for row in rows {
                    w.write_record(&row).map_err(csv_err)?;
                }
            }
            (scalars, None) => {
                w.write_record(["key", "value"]).map_err(csv_err)?;
                for (k, v) in scalars {
                    w.write_record([k, v]).map_err(csv_err)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
    }
}

const TABLE_KEYS: [&str; 4] = ["records", "rows", "samples", "disc_checks"];

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

type Table = (String, Vec<String>, Vec<Vec<String>>);

fn split_result(result: &Value) -> (Vec<(String, String)>, Option<Table>) {
    let Value::Object(obj) = result else {
        return (vec![("result".into(), cell(result))], None);
    };
    let table_key = TABLE_KEYS
        .iter()
        .find(|k| matches!(obj.get(**k), Some(Value::Array(a)) if a.iter().all(Value::is_object)))
        .map(|k| k.to_string());
    let scalars = obj
        .iter()
        .filter(|(k, _)| Some(*k) != table_key.as_ref())
        .map(|(k, v)| (k.clone(), cell(v)))
        .collect();
    let table = table_key.map(|key| {
        let items: Vec<&Map<String, Value>> = obj[&key]
            .as_array()
            .unwrap()
            .iter()
            .filter_map(Value::as_object)
            .collect();
        let mut header: Vec<String> = Vec::new();
        for item in &items {
            for k in item.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let rows = items
            .iter()
            .map(|item| header.iter().map(|h| item.get(h).map(cell).unwrap_or_default()).collect())
            .collect();
        (key, header, rows)
    });
    (scalars, table)
}
