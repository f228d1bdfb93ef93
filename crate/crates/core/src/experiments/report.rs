//! Study reports: measurement tables, fits and verdicts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub outcome: Outcome,
    pub measured: f64,
    /// The criterion the measurement was judged by, e.g. `"slope in [0.40, 0.50]"`.
    pub tolerance: String,
}

impl Verdict {
    pub fn check(name: &str, measured: f64, passed: bool, tolerance: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            outcome: if passed { Outcome::Pass } else { Outcome::Fail },
            measured,
            tolerance: tolerance.into(),
        }
    }

    /// `lo ≤ measured ≤ hi`.
    pub fn within(name: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Self::check(
            name,
            measured,
            measured >= lo && measured <= hi,
            format!("in [{lo}, {hi}]"),
        )
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::InputShape {
            expected: x.len(),
            got: y.len(),
        });
    }
    let n = x.len();
    if n < 2 || x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput(
            "a fit needs at least two finite points".into(),
        ));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
        points: n,
    })
}

/// Fit of `ln y` against `ln x`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::DegenerateInput(
            "log-log fit needs positive data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    least_squares(&lx, &ly)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: LinearFit,
}

/// Plot-ready `(x, y)` data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub study: String,
    pub inputs: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fits: Vec<NamedFit>,
    pub verdicts: Vec<Verdict>,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(study: &str, inputs: serde_json::Value, columns: &[&str]) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            study: study.into(),
            inputs,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fits: Vec::new(),
            verdicts: Vec::new(),
            series: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn fit(&self, name: &str) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.name == name).map(|f| &f.fit)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub(crate) fn push_fit(&mut self, name: &str, fit: LinearFit) {
        self.fits.push(NamedFit {
            name: name.into(),
            fit,
        });
    }

    /// Writes `<stem>.json`, `<stem>.csv` and one `<stem>_<series>.csv` per series.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = Vec::new();

        let json_path = dir.join(format!("{stem}.json"));
        fs::write(&json_path, serde_json::to_string_pretty(self)?)
            .map_err(|e| Error::io(&json_path, e))?;
        files.push(json_path);

        let csv_path = dir.join(format!("{stem}.csv"));
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush().map_err(|e| Error::io(&csv_path, e))?;
        files.push(csv_path);

        for s in &self.series {
            let p = dir.join(format!("{stem}_{}.csv", s.name));
            let mut w = csv::Writer::from_path(&p)?;
            w.write_record(["x", "y"])?;
            for (x, y) in s.x.iter().zip(&s.y) {
                w.write_record([format!("{x:.16e}"), format!("{y:.16e}")])?;
            }
            w.flush().map_err(|e| Error::io(&p, e))?;
            files.push(p);
        }
        Ok(files)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let f = least_squares(&x, &y).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-14);
        assert!((f.intercept + 1.0).abs() < 1e-14);
        assert!(f.residual < 1e-14);
    }

    #[test]
    fn power_law() {
        let x = [10.0, 100.0, 1000.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.45)).collect();
        assert!((log_log_fit(&x, &y).unwrap().slope - 0.45).abs() < 1e-14);
    }

    #[test]
    fn degenerate_fits() {
        assert!(least_squares(&[1.0], &[1.0]).is_err());
        assert!(least_squares(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(log_log_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn verdict_cites_tolerance() {
        let v = Verdict::within("slope", 0.46, 0.4, 0.5);
        assert!(v.passed());
        assert_eq!(v.tolerance, "in [0.4, 0.5]");
        assert!(!Verdict::within("slope", 0.6, 0.4, 0.5).passed());
    }

    #[test]
    fn csv_keeps_digits() {
        let mut r = ExperimentReport::new("t", serde_json::json!({}), &["a"]);
        r.rows.push(vec![std::f64::consts::PI]);
        r.series.push(Series {
            name: "s".into(),
            x: vec![1.0],
            y: vec![1.0 / 3.0],
        });
        let dir = tempfile::tempdir().unwrap();
        let files = r.write(dir.path(), "rep").unwrap();
        assert_eq!(files.len(), 3);
        let text = fs::read_to_string(&files[1]).unwrap();
        let v: f64 = text.lines().nth(1).unwrap().parse().unwrap();
        assert_eq!(v, std::f64::consts::PI);
    }
}
