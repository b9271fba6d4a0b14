//! On-disk results: per-run trace CSV and record, per-sweep summary CSV.

use std::path::Path;

use anslab_core::solver::{DiagnosticTrace, TraceRow};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Trace CSV header, in column order.
pub const TRACE_COLUMNS: [&str; 12] = TraceRow::<f64>::COLUMNS;

/// Summary CSV header, in column order.
pub const SUMMARY_COLUMNS: [&str; 8] = [
    "sweep_value",
    "Psi0",
    "sup_Psi",
    "sup_XY",
    "theta_final",
    "radius_final",
    "largeness",
    "verdict",
];

/// Result of one solver run, stored as `record.json` in its directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    /// `null` for single runs.
    pub sweep_value: Option<f64>,
    pub verdict: String,
    pub message: Option<String>,
    pub steps: usize,
    pub psi0: f64,
    pub sup_psi: f64,
    pub xy0: f64,
    pub sup_xy: f64,
    pub theta_final: f64,
    pub radius_final: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub eps: f64,
    pub eta: f64,
    pub n: usize,
    /// Largeness meter of the slowly varying family member; `null` when `ε`
    /// is not an inverse power of two.
    pub largeness: Option<f64>,
    pub max_div_residual: f64,
    /// Largest one-step energy increase relative to the initial energy.
    pub max_energy_increase: f64,
    pub zero_symbol_modes: usize,
    pub divergence_warnings: usize,
    /// Relative to the run directory.
    pub trace: String,
    pub snapshots: Vec<String>,
}

impl RunRecord {
    pub fn completed(&self) -> bool {
        self.verdict == "completed"
    }

    pub fn summary(&self) -> SummaryRow {
        SummaryRow {
            sweep_value: self.sweep_value.unwrap_or(f64::NAN),
            psi0: self.psi0,
            sup_psi: self.sup_psi,
            sup_xy: self.sup_xy,
            theta_final: self.theta_final,
            radius_final: self.radius_final,
            largeness: self.largeness.unwrap_or(f64::NAN),
            verdict: self.verdict.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One line of a summary CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub sweep_value: f64,
    pub psi0: f64,
    pub sup_psi: f64,
    pub sup_xy: f64,
    pub theta_final: f64,
    pub radius_final: f64,
    pub largeness: f64,
    pub verdict: String,
}

/// Shortest round-trip float text; `nan` for NaN.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:e}")
    }
}

fn parse_float(s: &str, line: usize) -> Result<f64> {
    if s == "nan" {
        return Ok(f64::NAN);
    }
    s.parse()
        .map_err(|_| HarnessError::Other(format!("line {line}: bad number {s:?}")))
}

fn check_header(reader: &mut csv::Reader<impl std::io::Read>, expect: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expect.iter().copied()) {
        return Err(HarnessError::Other(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    Ok(())
}

pub fn write_trace(path: &Path, trace: &DiagnosticTrace<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_COLUMNS)?;
    for row in &trace.rows {
        w.write_record(row.values().iter().map(|&v| fmt_float(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a trace CSV in column order.
pub fn read_trace(path: &Path) -> Result<Vec<[f64; 12]>> {
    let mut r = csv::Reader::from_path(path)?;
    check_header(&mut r, &TRACE_COLUMNS)?;
    let mut out = vec![];
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut row = [0.0; 12];
        if rec.len() != 12 {
            return Err(HarnessError::Other(format!("line {}: {} fields", i + 2, rec.len())));
        }
        for (c, field) in rec.iter().enumerate() {
            row[c] = parse_float(field, i + 2)?;
        }
        out.push(row);
    }
    Ok(out)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        let mut fields: Vec<String> = [
            r.sweep_value,
            r.psi0,
            r.sup_psi,
            r.sup_xy,
            r.theta_final,
            r.radius_final,
            r.largeness,
        ]
        .iter()
        .map(|&v| fmt_float(v))
        .collect();
        fields.push(r.verdict.clone());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    check_header(&mut r, &SUMMARY_COLUMNS)?;
    let mut out = vec![];
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 8 {
            return Err(HarnessError::Other(format!("line {}: {} fields", i + 2, rec.len())));
        }
        let f = |c: usize| parse_float(&rec[c], i + 2);
        out.push(SummaryRow {
            sweep_value: f(0)?,
            psi0: f(1)?,
            sup_psi: f(2)?,
            sup_xy: f(3)?,
            theta_final: f(4)?,
            radius_final: f(5)?,
            largeness: f(6)?,
            verdict: rec[7].to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn same(a: f64, b: f64) -> bool {
        a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
    }

    proptest! {
        #[test]
        fn summary_round_trips(vals in proptest::collection::vec(proptest::num::f64::ANY, 7), verdict in "[a-z_]{1,24}") {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("s.csv");
            let row = SummaryRow {
                sweep_value: vals[0], psi0: vals[1], sup_psi: vals[2], sup_xy: vals[3],
                theta_final: vals[4], radius_final: vals[5], largeness: vals[6], verdict,
            };
            write_summary(&path, std::slice::from_ref(&row)).unwrap();
            let back = read_summary(&path).unwrap();
            prop_assert_eq!(back.len(), 1);
            let b = &back[0];
            for (x, y) in [
                (row.sweep_value, b.sweep_value), (row.psi0, b.psi0), (row.sup_psi, b.sup_psi),
                (row.sup_xy, b.sup_xy), (row.theta_final, b.theta_final),
                (row.radius_final, b.radius_final), (row.largeness, b.largeness),
            ] {
                prop_assert!(same(x, y), "{} vs {}", x, y);
            }
            prop_assert_eq!(&row.verdict, &b.verdict);
        }
    }

    #[test]
    fn trace_header_is_fixed() {
        assert_eq!(
            TRACE_COLUMNS.join(","),
            "t,radius,theta,energy,div_residual,Bh_main,Bn_main,L1_accum,cross_accum,X,Y,Psi"
        );
    }
}
