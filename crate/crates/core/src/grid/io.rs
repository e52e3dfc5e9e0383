//! ScalarField files: a CSV of `(x0, .., value)` rows plus a JSON sidecar.
//!
//! Values are written with the shortest representation that parses back to
//! the same `f64`, so a write/read cycle is exact.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{build_domain, GridDomain, ScalarField, ShapeSpec};
use crate::error::{Error, Result};

pub const SIDECAR_SCHEMA_VERSION: &str = "1";

/// Metadata stored next to a field CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub schema_version: String,
    pub dim: usize,
    pub h: f64,
    pub shape: ShapeSpec,
    pub nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl FieldSidecar {
    pub fn for_field(field: &ScalarField) -> Self {
        let d = field.domain();
        FieldSidecar {
            schema_version: SIDECAR_SCHEMA_VERSION.to_string(),
            dim: d.dim(),
            h: d.h(),
            shape: d.shape().clone(),
            nodes: d.len(),
            label: None,
            q: None,
            residual: None,
            iterations: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Parses and validates a sidecar document.
    pub fn from_json(text: &str) -> Result<Self> {
        let sc: FieldSidecar = serde_json::from_str(text).map_err(|e| Error::Parse(format!("sidecar: {e}")))?;
        if sc.schema_version != SIDECAR_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported sidecar schema `{}`", sc.schema_version)));
        }
        sc.shape.validate()?;
        if sc.shape.dim() != sc.dim {
            return Err(Error::Parse(format!(
                "sidecar dimension {} disagrees with shape dimension {}",
                sc.dim,
                sc.shape.dim()
            )));
        }
        if !(sc.h.is_finite() && sc.h > 0.0) {
            return Err(Error::Parse(format!("sidecar spacing must be positive, got {}", sc.h)));
        }
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes")
    }

    /// Rebuilds the grid this sidecar describes and checks the node count.
    pub fn domain(&self) -> Result<Arc<GridDomain>> {
        let d = build_domain(&self.shape, self.h)?;
        if d.len() != self.nodes {
            return Err(Error::Parse(format!(
                "sidecar promises {} nodes, grid has {}",
                self.nodes,
                d.len()
            )));
        }
        Ok(d)
    }
}

/// CSV text with one row per interior node, in node order.
pub fn field_to_csv(field: &ScalarField) -> String {
    let d = field.domain();
    let dim = d.dim();
    let mut out = String::with_capacity(field.len() * 16 * (dim + 1));
    for k in 0..dim {
        out.push_str(&format!("x{k},"));
    }
    out.push_str("value\n");
    for (i, v) in field.values().iter().enumerate() {
        let x = d.coords(i);
        for xk in &x[..dim] {
            out.push_str(&format!("{xk},"));
        }
        out.push_str(&format!("{v}\n"));
    }
    out
}

/// Decodes CSV rows onto `domain`. Every interior node must appear exactly once.
pub fn field_from_csv(domain: &Arc<GridDomain>, text: &str) -> Result<ScalarField> {
    let dim = domain.dim();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse(format!("csv header: {e}")))?.clone();
    let expected: Vec<String> = (0..dim).map(|k| format!("x{k}")).chain(["value".to_string()]).collect();
    if headers.len() != expected.len() || headers.iter().zip(&expected).any(|(a, b)| a != b) {
        return Err(Error::Parse(format!("csv header must be `{}`", expected.join(","))));
    }
    let mut values = vec![f64::NAN; domain.len()];
    let mut seen = vec![false; domain.len()];
    let h = domain.h();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| Error::Parse(format!("csv line {line}: {e}")))?;
        if record.len() != dim + 1 {
            return Err(Error::Parse(format!("csv line {line}: expected {} columns", dim + 1)));
        }
        let mut nums = [0.0; 4];
        for (k, cell) in record.iter().enumerate() {
            nums[k] = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("csv line {line}: bad number `{cell}`")))?;
        }
        let mut lattice = [0i64; 3];
        for k in 0..dim {
            let s = nums[k] / h;
            let r = s.round();
            if (s - r).abs() > 1e-6 || r.abs() > 1e15 {
                return Err(Error::Parse(format!("csv line {line}: coordinate off the grid")));
            }
            lattice[k] = r as i64;
        }
        let i = domain
            .node_at(&lattice[..dim])
            .ok_or_else(|| Error::Parse(format!("csv line {line}: point is not an interior node")))?;
        if seen[i] {
            return Err(Error::Parse(format!("csv line {line}: duplicate node")));
        }
        seen[i] = true;
        values[i] = nums[dim];
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Parse(format!("csv misses node {missing}")));
    }
    ScalarField::new(domain, values)
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`.
pub fn write_field(dir: &Path, stem: &str, field: &ScalarField, sidecar: &FieldSidecar) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    fs::write(&csv_path, field_to_csv(field))?;
    fs::write(&json_path, sidecar.to_json())?;
    Ok((csv_path, json_path))
}

/// Reads a field from its CSV path; the sidecar is the same path with a `.json` extension.
pub fn read_field(csv_path: &Path) -> Result<(ScalarField, FieldSidecar)> {
    let sidecar = FieldSidecar::from_json(&fs::read_to_string(csv_path.with_extension("json"))?)?;
    let domain = sidecar.domain()?;
    let field = field_from_csv(&domain, &fs::read_to_string(csv_path)?)?;
    Ok((field, sidecar))
}
