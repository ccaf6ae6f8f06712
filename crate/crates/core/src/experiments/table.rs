use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

use super::ExperimentName;

/// Where a result came from. Wall time and timestamp are the only fields
/// that vary between identical runs, and they never reach the CSV body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub experiment: ExperimentName,
    pub seed: u64,
    pub n: u64,
    pub alpha: f64,
    pub upsilon: f64,
    pub mu: String,
    pub replicates: u64,
    pub horizon: f64,
    pub workers: Option<usize>,
    pub build_id: String,
    pub wall_time_s: f64,
    pub unix_time_s: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Ok,
    /// Some replicates hit a resource budget; the table holds what finished.
    BudgetExceeded { detail: String },
    /// A structural diagnostic fired.
    StructuralFailure { detail: String },
}

impl Outcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, Outcome::Ok)
    }
}

/// Extra output file produced alongside the main table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub name: ExperimentName,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: serde_json::Value,
    pub provenance: Provenance,
    pub outcome: Outcome,
    #[serde(skip)]
    pub attachments: Vec<Attachment>,
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

impl ResultTable {
    pub fn new(name: ExperimentName, columns: &[&str], provenance: Provenance) -> Self {
        Self {
            name,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: serde_json::Value::Null,
            provenance,
            outcome: Outcome::Ok,
            attachments: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(SimError::Precondition(format!(
                "row has {} fields, schema has {}",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn csv_file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn json_file_name(&self) -> String {
        format!("{}.json", self.name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    /// Summary, outcome, schema and provenance; the rows live in the CSV.
    pub fn to_json(&self) -> String {
        let v = serde_json::json!({
            "experiment": self.name,
            "columns": self.columns,
            "row_count": self.rows.len(),
            "outcome": self.outcome,
            "summary": self.summary,
            "provenance": self.provenance,
            "files": std::iter::once(self.csv_file_name())
                .chain(self.attachments.iter().map(|a| a.file_name.clone()))
                .collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&v).expect("summary serialises")
    }

    /// Column by name, parsed as `f64`; empty cells give `None`.
    pub fn column_f64(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k].parse().ok()).collect())
    }
}
