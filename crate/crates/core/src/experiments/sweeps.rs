//! Seeded resonance sweeps collected into one report.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Series, Verdict};
use crate::error::{Error, Result};
use crate::resonance::sweep::{
    bx5_sweep, comparability_sweep, gap_sweep, identity_sweep, jacobian_sweep,
    series_direct_sweep, write_rows_csv,
};
use crate::resonance::SERIES_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonanceSweepSpec {
    pub deltas: Vec<f64>,
    pub identity_samples: usize,
    pub oracle_samples: usize,
    pub bx5_samples: usize,
    pub comparability_per_delta: usize,
    pub jacobian_per_delta: usize,
    pub gap_samples: usize,
}

impl Default for ResonanceSweepSpec {
    fn default() -> Self {
        Self {
            deltas: (0..=10).map(|j| 2f64.powi(-j)).collect(),
            identity_samples: 100_000,
            oracle_samples: 10_000,
            bx5_samples: 100_000,
            comparability_per_delta: 20_000,
            jacobian_per_delta: 2_000,
            gap_samples: 20_000,
        }
    }
}

impl ResonanceSweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::Parameter(
                "deltas must be non-empty and satisfy delta > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Runs every sweep with `seed` (sub-seeds `seed + 1 …`). When `rows_dir` is
/// given the per-sample comparability ratios are written there as CSV.
pub fn run_resonance_sweep(
    spec: &ResonanceSweepSpec,
    seed: u64,
    rows_dir: Option<&Path>,
) -> Result<ExperimentReport> {
    spec.validate()?;
    let mut report = ExperimentReport::new(
        "resonance-sweep",
        serde_json::json!({ "spec": spec, "seed": seed }),
        &["delta", "low_min", "low_max", "high_min", "high_max", "jacobian_lower_constant"],
    );

    let id = identity_sweep(spec.identity_samples, seed);
    report.verdicts.push(Verdict::check(
        "kdv_identity",
        id.max_rel_kdv,
        id.max_rel_kdv < 1e-12,
        "max relative error < 1e-12",
    ));
    report.verdicts.push(Verdict::check(
        "bo_identity",
        id.max_rel_bo,
        id.max_rel_bo < 1e-12,
        "max relative error < 1e-12",
    ));

    let oracle = series_direct_sweep(&spec.deltas, spec.oracle_samples, seed + 1, SERIES_TOL)?;
    report.verdicts.push(Verdict::check(
        "series_vs_direct",
        oracle.max_rel_quiet,
        oracle.max_rel_quiet < 1e-8,
        "max relative error < 1e-8 over samples without a cancellation warning",
    ));
    report
        .notes
        .push(format!("{} oracle samples raised the cancellation warning", oracle.warnings));

    let bx5 = bx5_sweep(spec.bx5_samples, seed + 2)?;
    report.verdicts.push(Verdict::within("bx5_supremum", bx5.sup, 5.0 - 1e-9, 5.68));
    report.verdicts.push(Verdict::check("bx5_below_six", bx5.sup, bx5.sup < 6.0, "< 6"));

    let comp = comparability_sweep(
        &spec.deltas,
        spec.comparability_per_delta,
        seed + 3,
        rows_dir.is_some(),
    )?;
    for high in [false, true] {
        let band = if high { "high" } else { "low" };
        let spread = comp.worst_spread(high);
        report.verdicts.push(Verdict::check(
            &format!("{band}_band_spread"),
            spread,
            spread <= 10.0,
            "C/c <= 10",
        ));
        let var = comp.endpoint_variation(high);
        report.verdicts.push(Verdict::check(
            &format!("{band}_band_stability"),
            var,
            var <= 0.2,
            "endpoints within 20% across delta",
        ));
    }

    let jac = jacobian_sweep(&spec.deltas, spec.jacobian_per_delta, seed + 4)?;
    let mismatches: usize = jac.iter().map(|j| j.sign_mismatches).sum();
    let fd = jac.iter().map(|j| j.max_rel_fd).fold(0.0, f64::max);
    report.verdicts.push(Verdict::check(
        "jacobian_sign",
        mismatches as f64,
        mismatches == 0,
        "sign(mu') = sign(xi (xi - 2 xi1)) on every sample",
    ));
    report.verdicts.push(Verdict::check(
        "jacobian_fd",
        fd,
        fd < 1e-6,
        "series vs finite difference relative error < 1e-6",
    ));

    let gap = gap_sweep(spec.gap_samples, seed + 5)?;
    report.verdicts.push(Verdict::check(
        "kdv_gap_bound",
        gap.violations as f64,
        gap.violations == 0,
        "|Xi_tilde - Xi_KdV| <= 3 delta^2 xi_max^5 on every sample",
    ));

    for (c, j) in comp.per_delta.iter().zip(&jac) {
        report.rows.push(vec![
            c.delta,
            c.low.min,
            c.low.max,
            c.high.min,
            c.high.max,
            j.lower_constant,
        ]);
    }
    report.series.push(Series {
        name: "high_band_max".into(),
        x: spec.deltas.clone(),
        y: comp.per_delta.iter().map(|c| c.high.max).collect(),
    });
    if let Some(dir) = rows_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_rows_csv(&comp.rows, &dir.join("comparability_samples.csv"))?;
    }
    Ok(report)
}
