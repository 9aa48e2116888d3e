use crate::error::CliError;
use serde::Serialize;
use serde_json::Value;
use std::io::Write;
use std::path::{Path, PathBuf};
use taulab::acceptance::CriterionReport;
use taulab::TauCurve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits round-trip every f64
            Cell::Float(v) => format!("{v:.16e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// `t,tau,sigma`, with `tau_im,sigma_im` appended when any value is complex.
    pub fn from_curve(c: &TauCurve) -> Table {
        let complex = !c.is_real(0.0);
        let mut header = vec!["t", "tau", "sigma"];
        if complex {
            header.extend(["tau_im", "sigma_im"]);
        }
        let rows = (0..c.len())
            .map(|i| {
                let mut r = vec![
                    Cell::Float(c.ts[i]),
                    Cell::Float(c.taus[i].re),
                    Cell::Float(c.sigmas[i].re),
                ];
                if complex {
                    r.extend([Cell::Float(c.taus[i].im), Cell::Float(c.sigmas[i].im)]);
                }
                r
            })
            .collect();
        Table { header, rows }
    }

    pub fn check_finite(&self) -> Result<(), CliError> {
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in r.iter().enumerate() {
                if let Cell::Float(v) = c {
                    if !v.is_finite() {
                        return Err(CliError::NonFinite(format!("row {i}, column {}: {v}", self.header[j])));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        wr.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            wr.write_record(r.iter().map(Cell::render)).map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub subcommand: &'static str,
    /// Effective flag values; accepted back by `--config`.
    pub config: Value,
    pub config_file: Option<Value>,
    pub tolerances: Value,
    /// Every truncation chosen at run time.
    pub truncation: Value,
    pub invariants: Value,
    pub threads: usize,
    pub parallel: bool,
    pub wall_time_s: f64,
    pub checks_passed: Option<bool>,
    pub checks: Option<Vec<CriterionReport>>,
    pub output: Option<PathBuf>,
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use taulab::C64;

    #[test]
    fn seventeen_digits_round_trip() {
        let v = 0.1 + 0.2;
        let s = Cell::Float(v).render();
        assert_eq!(s.parse::<f64>().unwrap(), v);
        assert_eq!(Cell::Int(8).render(), "8");
    }

    #[test]
    fn complex_columns_only_when_needed() {
        let real = TauCurve::new(vec![0.0], vec![C64::new(0.5, 0.0)], vec![C64::new(0.5, 0.0)]).unwrap();
        assert_eq!(Table::from_curve(&real).header, ["t", "tau", "sigma"]);
        let cx = TauCurve::new(vec![0.0], vec![C64::new(0.5, 1e-3)], vec![C64::new(0.5, 0.0)]).unwrap();
        assert_eq!(Table::from_curve(&cx).header.len(), 5);
    }

    #[test]
    fn non_finite_is_rejected() {
        let t = Table {
            header: vec!["t", "tau"],
            rows: vec![vec![Cell::Float(0.0), Cell::Float(f64::NAN)]],
        };
        assert!(matches!(t.check_finite(), Err(CliError::NonFinite(_))));
    }
}
