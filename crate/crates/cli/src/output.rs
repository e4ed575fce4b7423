//! Tabular output in CSV or JSON. Column lists are versioned constants;
//! changing one means bumping [`SCHEMA_VERSION`] and the schema file.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub const RECURSE_RATIO_V1: &[&str] = &["level", "u", "v", "log_partition"];
pub const RECURSE_FULL_V1: &[&str] = &[
    "level", "log_scale", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11", "x12", "x13", "x14",
    "x15", "x16", "x17", "x18",
];
pub const FIXED_POINTS_V1: &[&str] = &[
    "theta", "theta1", "region", "has_transition", "label", "root", "phase", "u", "v", "eigen_1_re", "eigen_1_im",
    "eigen_2_re", "eigen_2_im", "spectral_radius", "line_slope", "attracting",
];
pub const PHASE_DIAGRAM_V1: &[&str] =
    &["j_ratio", "t_ratio", "theta", "theta1", "has_transition", "fixed_points", "region"];
pub const CRITICAL_CURVE_V1: &[&str] = &["j_ratio", "t_ratio", "phi_inverse", "zeta_inverse", "binding"];
pub const GROUND_STATES_V1: &[&str] = &["jp", "j1p", "region", "family", "spec", "depth", "ground_state", "first_violation"];
pub const FREE_ENERGY_V1: &[&str] = &[
    "beta", "theta", "theta1", "u", "beta_free_energy", "series_limit", "internal_energy", "magnetization",
    "root_marginal_1",
];
pub const VERIFY_V1: &[&str] = &["id", "name", "passed", "detail"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    pub command: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &'static [&'static str]) -> Self {
        Table { command, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(csv_cell))?;
        }
        Ok(w.into_inner()?)
    }

    fn to_json(&self) -> anyhow::Result<Vec<u8>> {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut out = serde_json::to_vec_pretty(&doc)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
        let bytes = match format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json()?,
        };
        match out {
            Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(&bytes)?;
                Ok(stdout.flush()?)
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A finite float as a JSON number, anything else as null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}
