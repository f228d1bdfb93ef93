//! On-disk trajectory format: `manifest.json`, `coefficients.bin`, `diagnostics.csv`.
//!
//! `coefficients.bin` is headerless little-endian f64. For every component
//! (`v`, or `low` then `residual`) and every snapshot in order it holds the
//! `n` real parts followed by the `n` imaginary parts, FFT ordering.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Diagnostics, EquationKind, SolverConfig, State, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

pub const TRAJECTORY_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub schema_version: u32,
    pub kind: EquationKind,
    pub config: SolverConfig,
    pub components: Vec<String>,
    pub snapshots: usize,
    pub mode_count: usize,
    pub times: Vec<f64>,
    pub coefficients_file: String,
    pub diagnostics_file: String,
}

const MANIFEST: &str = "manifest.json";
const COEFFS: &str = "coefficients.bin";
const DIAGNOSTICS: &str = "diagnostics.csv";

fn component_names(kind: EquationKind) -> Vec<String> {
    if kind.is_coupled() {
        vec!["low".into(), "residual".into()]
    } else {
        vec!["v".into()]
    }
}

/// Writes the three files into `dir` (created if missing) and returns their paths.
pub fn write_trajectory(record: &TrajectoryRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let n = record.config.grid.mode_count();
    let manifest = TrajectoryManifest {
        schema_version: TRAJECTORY_SCHEMA_VERSION,
        kind: record.kind,
        config: record.config,
        components: component_names(record.kind),
        snapshots: record.snapshots.len(),
        mode_count: n,
        times: record.times.clone(),
        coefficients_file: COEFFS.into(),
        diagnostics_file: DIAGNOSTICS.into(),
    };

    let coeff_path = dir.join(COEFFS);
    let file = fs::File::create(&coeff_path).map_err(|e| Error::io(&coeff_path, e))?;
    let mut w = BufWriter::new(file);
    for comp in 0..manifest.components.len() {
        for snap in &record.snapshots {
            let c = snap.components()[comp].coeffs();
            for part in [0, 1] {
                for z in c {
                    let v = if part == 0 { z.re } else { z.im };
                    w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(&coeff_path, e))?;
                }
            }
        }
    }
    w.flush().map_err(|e| Error::io(&coeff_path, e))?;

    let diag_path = dir.join(DIAGNOSTICS);
    write_diagnostics_csv(&record.diagnostics, &diag_path)?;

    let manifest_path = dir.join(MANIFEST);
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&manifest_path, json).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(vec![manifest_path, coeff_path, diag_path])
}

fn write_diagnostics_csv(rows: &[Diagnostics], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "time",
        "l2",
        "hs",
        "edge_fraction",
        "high_band_mass",
        "mean",
        "residual_l2",
    ])?;
    for d in rows {
        let vals = [
            d.time,
            d.l2,
            d.hs,
            d.edge_fraction,
            d.high_band_mass,
            d.mean,
            d.residual_l2,
        ];
        w.write_record(vals.iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn read_diagnostics_csv(path: &Path) -> Result<Vec<Diagnostics>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Inverse of [`write_trajectory`].
pub fn read_trajectory(dir: &Path) -> Result<TrajectoryRecord> {
    let manifest_path = dir.join(MANIFEST);
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: TrajectoryManifest = serde_json::from_str(&text)?;
    if manifest.schema_version != TRAJECTORY_SCHEMA_VERSION {
        return Err(Error::Serialize(format!(
            "unsupported trajectory schema version {}",
            manifest.schema_version
        )));
    }
    let grid = manifest.config.grid;
    let n = manifest.mode_count;
    if n != grid.mode_count() || manifest.times.len() != manifest.snapshots {
        return Err(Error::Serialize("inconsistent trajectory manifest".into()));
    }
    let comps = component_names(manifest.kind).len();

    let coeff_path = dir.join(&manifest.coefficients_file);
    let bytes = fs::read(&coeff_path).map_err(|e| Error::io(&coeff_path, e))?;
    let expected = comps * manifest.snapshots * 2 * n * 8;
    if bytes.len() != expected {
        return Err(Error::InputShape {
            expected,
            got: bytes.len(),
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    let field = |comp: usize, snap: usize| -> Result<SpectralField> {
        let base = (comp * manifest.snapshots + snap) * 2 * n;
        let c = (0..n)
            .map(|i| Complex64::new(values[base + i], values[base + n + i]))
            .collect();
        SpectralField::from_coeffs(grid, c)
    };
    let mut snapshots = Vec::with_capacity(manifest.snapshots);
    for s in 0..manifest.snapshots {
        snapshots.push(if comps == 2 {
            State::Coupled {
                low: field(0, s)?,
                residual: field(1, s)?,
            }
        } else {
            State::Single(field(0, s)?)
        });
    }
    let diagnostics = read_diagnostics_csv(&dir.join(&manifest.diagnostics_file))?;
    Ok(TrajectoryRecord {
        kind: manifest.kind,
        config: manifest.config,
        times: manifest.times,
        snapshots,
        diagnostics,
    })
}
