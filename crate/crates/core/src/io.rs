//! File formats: state-file JSON, ray tables (CSV and JSON), and functional
//! triples.
//!
//! State files carry `dims` as an ordered list of `[label, dim]` pairs and
//! `matrix` as an array of rows with `[re, im]` entries. The writer emits 17
//! significant digits so values round-trip exactly.

use crate::exact::Int;
use crate::quantum::linalg::C64;
use crate::quantum::{DensityMatrix, QuantumError};
use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed state file: {0}")]
    MalformedState(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    File(#[from] std::io::Error),
    #[error("table entry does not fit in i64")]
    EntryOverflow,
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize a state to the state-file JSON format.
pub fn state_to_json(rho: &DensityMatrix) -> String {
    let mut out = String::from("{\n  \"dims\": [");
    for (i, (label, dim)) in rho.dims().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format!("[{}, {}]", serde_json::to_string(label).unwrap(), dim));
    }
    out.push_str("],\n  \"matrix\": [\n");
    let n = rho.total_dim();
    let m = rho.matrix();
    for i in 0..n {
        out.push_str("    [");
        for j in 0..n {
            if j > 0 {
                out.push_str(", ");
            }
            let z = m[(i, j)];
            out.push_str(&format!("[{}, {}]", fmt_f64(z.re), fmt_f64(z.im)));
        }
        out.push(']');
        if i + 1 < n {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

/// Parse the state-file JSON format; validation errors name the violated
/// density-matrix invariant.
pub fn state_from_json(text: &str) -> Result<DensityMatrix, IoError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let dims_value = value
        .get("dims")
        .and_then(|d| d.as_array())
        .ok_or_else(|| IoError::MalformedState("missing `dims` array".into()))?;
    let mut dims = Vec::new();
    for pair in dims_value {
        let arr = pair
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| IoError::MalformedState("`dims` entries are [label, dim]".into()))?;
        let label = arr[0]
            .as_str()
            .ok_or_else(|| IoError::MalformedState("label must be a string".into()))?;
        let dim = arr[1]
            .as_u64()
            .ok_or_else(|| IoError::MalformedState("dim must be a positive integer".into()))?;
        dims.push((label.to_string(), dim as usize));
    }
    let rows = value
        .get("matrix")
        .and_then(|m| m.as_array())
        .ok_or_else(|| IoError::MalformedState("missing `matrix` array".into()))?;
    let n: usize = dims.iter().map(|(_, d)| d).product();
    if rows.len() != n {
        return Err(IoError::MalformedState(format!(
            "matrix has {} rows, expected {n}",
            rows.len()
        )));
    }
    let mut mat = DMatrix::<C64>::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| IoError::MalformedState(format!("row {i} must have {n} entries")))?;
        for (j, entry) in row.iter().enumerate() {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| IoError::MalformedState("entries are [re, im]".into()))?;
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| IoError::MalformedState("re must be a number".into()))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| IoError::MalformedState("im must be a number".into()))?;
            mat[(i, j)] = C64::new(re, im);
        }
    }
    Ok(DensityMatrix::new(dims, mat)?)
}

pub fn write_state_file(path: &std::path::Path, rho: &DensityMatrix) -> Result<(), IoError> {
    Ok(std::fs::write(path, state_to_json(rho))?)
}

pub fn read_state_file(path: &std::path::Path) -> Result<DensityMatrix, IoError> {
    state_from_json(&std::fs::read_to_string(path)?)
}

/// One ray-table row: cone label, integer entries in ambient order, optional
/// classification tag.
#[derive(Debug, Clone, Serialize)]
pub struct RayRow {
    pub cone: String,
    pub entries: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
}

/// Ray table with named columns, serializable to CSV and JSON.
#[derive(Debug, Clone, Serialize)]
pub struct RayTable {
    pub columns: Vec<String>,
    pub rows: Vec<RayRow>,
}

impl RayTable {
    pub fn from_int_rows(
        cone_label: &str,
        columns: &[&str],
        rays: &[Vec<Int>],
        classifications: Option<&[Option<String>]>,
    ) -> Result<RayTable, IoError> {
        use num::ToPrimitive;
        let mut rows = Vec::with_capacity(rays.len());
        for (i, ray) in rays.iter().enumerate() {
            let entries: Result<Vec<i64>, IoError> = ray
                .iter()
                .map(|x| x.to_i64().ok_or(IoError::EntryOverflow))
                .collect();
            rows.push(RayRow {
                cone: cone_label.to_string(),
                entries: entries?,
                classification: classifications
                    .and_then(|c| c.get(i).cloned())
                    .flatten(),
            });
        }
        Ok(RayTable {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows,
        })
    }

    pub fn to_csv(&self) -> String {
        let with_class = self.rows.iter().any(|r| r.classification.is_some());
        let mut out = String::from("cone");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        if with_class {
            out.push_str(",classification");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.cone);
            for e in &row.entries {
                out.push(',');
                out.push_str(&e.to_string());
            }
            if with_class {
                out.push(',');
                if let Some(c) = &row.classification {
                    out.push_str(c);
                }
            }
            out.push('\n');
        }
        out
    }

    /// Fixed-width plain-text rendering for terminal output.
    pub fn to_text(&self) -> String {
        let with_class = self.rows.iter().any(|r| r.classification.is_some());
        let mut header: Vec<String> = vec!["cone".to_string()];
        header.extend(self.columns.clone());
        if with_class {
            header.push("classification".to_string());
        }
        let mut table: Vec<Vec<String>> = vec![header];
        for row in &self.rows {
            let mut cells = vec![row.cone.clone()];
            cells.extend(row.entries.iter().map(|e| e.to_string()));
            if with_class {
                cells.push(row.classification.clone().unwrap_or_default());
            }
            table.push(cells);
        }
        let ncols = table[0].len();
        let widths: Vec<usize> = (0..ncols)
            .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &table {
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    out.push_str("  ");
                }
                for _ in 0..widths[c].saturating_sub(cell.chars().count()) {
                    out.push(' ');
                }
                out.push_str(cell);
            }
            out.push('\n');
        }
        out
    }
}

/// Functional serialization: nonzero coefficients as
/// (subset-label, numerator, denominator) triples.
pub fn functional_to_json(
    f: &crate::entropy_space::EntropyFunctional,
) -> Result<serde_json::Value, IoError> {
    let triples = f
        .to_triples()
        .map_err(|e| IoError::MalformedState(e.to_string()))?;
    Ok(serde_json::json!(triples))
}
