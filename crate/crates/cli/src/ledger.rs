//! Ledger and audit-summary tables, written as CSV or JSON.
//!
//! CSV cells use `{:.16e}` (17 significant digits), a header row and LF line
//! endings; non-finite values print as `inf`, `-inf` or `NaN`. JSON writes
//! non-finite values as `null`.

use std::io::Write;
use std::path::Path;

use effthermo_core::dynamics::Trajectory;
use effthermo_core::laws::{AuditSummary, LimitTable};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) => Value::Null,
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Column names plus rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let write_err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.columns).map_err(write_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(write_err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn to_json(&self, name: &str) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = json!({ "name": name, "columns": self.columns, "rows": rows });
        let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn write(&self, path: &Path, format: Format, name: &str) -> Result<(), CliError> {
        let bytes = match format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json(name)?,
        };
        let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        f.write_all(&bytes).map_err(|e| CliError::io(path, e))
    }
}

/// One row per snapshot: `t`; per subsystem `E, S, beta, T, zeta, Eth, Q, W`;
/// then `E_int, S_total, correlation`, per subsystem `D`, and `sigma,
/// identity_residual`. `correlation` is the mutual information for two
/// subsystems and the total correlation otherwise.
pub fn ledger(traj: &Trajectory) -> Table {
    let labels: Vec<&str> = traj.system.subsystems().iter().map(|s| s.label.as_str()).collect();
    let mut columns = vec!["t".to_string()];
    for l in &labels {
        for q in ["E", "S", "beta", "T", "zeta", "Eth", "Q", "W"] {
            columns.push(format!("{q}_{l}"));
        }
    }
    columns.extend(["E_int", "S_total", "correlation"].map(String::from));
    columns.extend(labels.iter().map(|l| format!("D_{l}")));
    columns.extend(["sigma", "identity_residual"].map(String::from));

    let rows = traj
        .snapshots
        .iter()
        .map(|s| {
            let mut row = vec![Cell::Num(s.t)];
            for r in &s.subsystems {
                row.extend(
                    [r.energy, r.entropy, r.beta, r.temperature, r.zeta, r.thermal_energy, r.heat, r.work].map(Cell::Num),
                );
            }
            row.extend([s.interaction_energy, s.total_entropy, s.correlation].map(Cell::Num));
            row.extend(s.subsystems.iter().map(|r| Cell::Num(r.divergence)));
            row.extend([s.sigma, s.identity_residual].map(Cell::Num));
            row
        })
        .collect();
    Table { columns, rows }
}

pub fn status(s: &AuditSummary) -> &'static str {
    if s.informational {
        "INFO"
    } else if s.passed() {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn audit_table(summaries: &[AuditSummary]) -> Table {
    let columns = ["audit", "status", "checks", "violations", "max_residual", "first_violation_row", "first_violation_t", "detail"]
        .map(String::from)
        .to_vec();
    let rows = summaries
        .iter()
        .map(|s| {
            let (row, t, detail) = match &s.first_violation {
                Some(v) => (Cell::Int(v.row), Cell::Num(v.t), Cell::Text(v.detail.clone())),
                None => (Cell::Text(String::new()), Cell::Text(String::new()), Cell::Text(String::new())),
            };
            vec![
                Cell::Text(s.name.clone()),
                Cell::Text(status(s).into()),
                Cell::Int(s.checks),
                Cell::Int(s.violations),
                Cell::Num(s.max_residual),
                row,
                t,
                detail,
            ]
        })
        .collect();
    Table { columns, rows }
}

pub fn limit_table(table: &LimitTable) -> Table {
    let columns = [
        "T0",
        "scaled_divergence",
        "limit",
        "deviation",
        "thermal_energy_change",
        "increment_deviation",
        "scaled_zeta_change",
        "zeta_bounded",
    ]
    .map(String::from)
    .to_vec();
    let rows = table
        .rows
        .iter()
        .map(|r| {
            let mut row: Vec<Cell> = [
                r.temperature,
                r.scaled_divergence,
                r.limit,
                r.deviation,
                r.thermal_energy_change,
                r.increment_deviation,
                r.scaled_zeta_change,
            ]
            .map(Cell::Num)
            .to_vec();
            row.push(Cell::Text(r.zeta_bounded.to_string()));
            row
        })
        .collect();
    Table { columns, rows }
}
