//! Tabular output shared by the CLI and the acceptance suite.
//!
//! CSV is canonical; JSON carries the same rows as an array of objects.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub instance: String,
    pub residual: f64,
    pub eps: f64,
    pub ms: u128,
    #[serde(skip)]
    pub pass: bool,
}

impl CheckRecord {
    /// Times `f`, which returns `(residual, eps, pass)`.
    pub fn timed(
        check: &str,
        instance: impl Into<String>,
        f: impl FnOnce() -> Result<(f64, f64, bool)>,
    ) -> Result<Self> {
        let start = Instant::now();
        let (residual, eps, pass) = f()?;
        Ok(Self {
            check: check.into(),
            instance: instance.into(),
            residual,
            eps,
            ms: start.elapsed().as_millis(),
            pass,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("format: unknown value {other:?} (expected csv or json)"))),
        }
    }
}

/// CSV with a header row taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Resource(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Resource(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Resource(e.to_string()))
}

/// Header-only CSV for an empty table.
pub fn csv_header(fields: &[&str]) -> String {
    format!("{}\n", fields.join(","))
}

pub fn to_json<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows).map_err(|e| Error::Resource(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Renders `rows`; an empty CSV table still gets `header`.
pub fn render<T: Serialize>(rows: &[T], header: &[&str], format: Format) -> Result<String> {
    match format {
        Format::Csv if rows.is_empty() => Ok(csv_header(header)),
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}

pub const HYDRO_HEADER: [&str; 5] = ["y", "rho_hat", "stderr", "rho_limit", "n_traj"];
pub const SECOND_CLASS_HEADER: [&str; 5] = ["x", "count_direct", "stderr_direct", "rho0_shifted", "stderr_shifted"];
pub const CHECK_HEADER: [&str; 5] = ["check", "instance", "residual", "eps", "ms"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::{DensityRow, SecondClassRow};

    #[test]
    fn headers_match_fields() {
        let row = DensityRow { y: 0.0, rho_hat: 0.5, stderr: 0.1, rho_limit: 0.5, n_traj: 3 };
        let csv = to_csv(&[row]).unwrap();
        assert_eq!(csv.lines().next().unwrap(), HYDRO_HEADER.join(","));
        let row =
            SecondClassRow { x: 0, count_direct: 1.0, stderr_direct: 0.0, rho0_shifted: 1.0, stderr_shifted: 0.0 };
        assert_eq!(to_csv(&[row]).unwrap().lines().next().unwrap(), SECOND_CLASS_HEADER.join(","));
        let rec =
            CheckRecord { check: "c".into(), instance: "a, b".into(), residual: 0.0, eps: 0.0, ms: 1, pass: true };
        let csv = to_csv(&[rec]).unwrap();
        assert_eq!(csv, "check,instance,residual,eps,ms\nc,\"a, b\",0.0,0.0,1\n");
        assert_eq!(render::<CheckRecord>(&[], &CHECK_HEADER, Format::Csv).unwrap(), "check,instance,residual,eps,ms\n");
    }

    #[test]
    fn json_mirrors_csv() {
        let row = DensityRow { y: 0.25, rho_hat: 0.5, stderr: 0.1, rho_limit: 0.5, n_traj: 3 };
        let v: serde_json::Value = serde_json::from_str(&to_json(&[row]).unwrap()).unwrap();
        assert_eq!(v[0]["y"], 0.25);
        assert_eq!(v[0]["n_traj"], 3);
        assert!("xml".parse::<Format>().is_err());
    }
}
