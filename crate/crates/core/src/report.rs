//! Certificate and sweep output in JSON, CSV and plain text.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::hardy::{BoundCertificate, HardyCheck};

/// First line of every text report.
pub const PLATFORM_NOTE: &str =
    "# deterministic for a fixed config and seed; last-digit float differences across platforms are possible";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Text => "txt",
        }
    }
}

pub fn certificate_json(cert: &BoundCertificate) -> String {
    serde_json::to_string_pretty(cert).expect("certificate serializes")
}

/// `delta,test_id,lhs,rhs,margin,pass` rows sorted by `(delta, test_id)`.
pub fn hardy_csv(checks: &[HardyCheck]) -> String {
    let mut rows: Vec<&HardyCheck> = checks.iter().collect();
    rows.sort_by(|a, b| a.delta.total_cmp(&b.delta).then_with(|| a.test_id.cmp(&b.test_id)));
    let mut out = String::from("delta,test_id,lhs,rhs,margin,pass\n");
    for c in rows {
        let _ = writeln!(out, "{},{},{},{},{},{}", c.delta, c.test_id, c.lhs, c.rhs, c.margin, c.pass);
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

pub fn certificate_text(cert: &BoundCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{PLATFORM_NOTE}");
    let _ = writeln!(s, "shape          {:?}", cert.shape);
    let _ = writeln!(s, "N, q, h        {}, {}, {}", cert.dim, cert.q, cert.h);
    let _ = writeln!(s, "nodes          {}", cert.nodes);
    let _ = writeln!(s, "potential      {}", cert.potential);
    let _ = writeln!(s, "sup w          {}", opt(cert.sup_norm));
    let _ = writeln!(s, "lambda1        {}", opt(cert.lambda1));
    let _ = writeln!(s, "lambda1(V)     {}", opt(cert.schrodinger_eigenvalue));
    let _ = writeln!(s, "theorem bound  {}", opt(cert.theorem_bound));
    let _ = writeln!(s, "corollary      {}", cert.corollary_bound.map_or("-".into(), |v| format!("{v:.6e}")));
    if let Some(a) = &cert.admissibility {
        let _ = writeln!(s, "admissible     {:.6} ({} violating)", a.fraction, a.violating_nodes);
    }
    let failed = cert.hardy_checks.iter().filter(|c| !c.pass).count();
    let positive = cert.hardy_checks.iter().filter(|c| c.margin > 0.0).count();
    let _ = writeln!(
        s,
        "hardy checks   {} ({} failed, {} strictly positive)",
        cert.hardy_checks.len(),
        failed,
        positive
    );
    let _ = writeln!(s, "verdict        {}", cert.verdict);
    s
}

/// Writes the certificate in `format` as `<dir>/certificate.<ext>`.
pub fn emit_report(cert: &BoundCertificate, format: ReportFormat, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (name, body) = match format {
        ReportFormat::Json => ("certificate.json", certificate_json(cert)),
        ReportFormat::Csv => ("hardy_checks.csv", hardy_csv(&cert.hardy_checks)),
        ReportFormat::Text => ("certificate.txt", certificate_text(cert)),
    };
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path)
}
