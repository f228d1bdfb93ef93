//! Shallow-water convergence and uniform tail studies on the periodic box.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::Profile;
use super::report::{ExperimentReport, Series, Verdict};
use crate::dynamics::{evolve_from, EquationKind, SolverConfig, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::spectral::RealGrid;
use crate::symbols::DepthParameter;

/// Discretisation shared by the periodic studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    pub box_length: f64,
    pub modes: usize,
    pub dt: f64,
    pub record_every: usize,
    pub dealias_fraction: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            box_length: 40.0 * PI,
            modes: 1024,
            dt: 5e-3,
            record_every: 10,
            dealias_fraction: 2.0 / 3.0,
        }
    }
}

impl RunSettings {
    pub fn grid(&self) -> Result<RealGrid> {
        RealGrid::new(self.box_length, self.modes)
    }

    pub fn solver_config(&self, delta: f64, horizon: f64, s: f64) -> Result<SolverConfig> {
        let cfg = SolverConfig::new(self.grid()?, DepthParameter::new(delta)?, self.dt, horizon)?
            .with_record_every(self.record_every)
            .with_dealias_fraction(self.dealias_fraction)
            .with_sobolev_index(s);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_delta_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Parameter("delta_grid must not be empty".into()));
    }
    if let Some(d) = grid.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::Parameter(format!("delta must satisfy delta ≥ 0, got {d}")));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("delta_grid must be strictly decreasing".into()));
    }
    Ok(())
}

fn check_sobolev(s: f64) -> Result<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Parameter(format!("s must satisfy s ≥ 0, got {s}")));
    }
    Ok(())
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Parameter(format!("horizon must be > 0, got {t}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceStudySpec {
    pub profile: Profile,
    pub s: f64,
    pub horizon: f64,
    pub delta_grid: Vec<f64>,
    pub settings: RunSettings,
    /// Allowed relative increase between consecutive `E(δ)`.
    pub monotone_slack: f64,
    /// Required `E(δ_min) / E(δ_max)`.
    pub final_ratio: f64,
}

impl Default for ConvergenceStudySpec {
    fn default() -> Self {
        Self {
            profile: Profile::default(),
            s: 0.0,
            horizon: 1.0,
            delta_grid: (2..=8).map(|j| 2f64.powi(-j)).collect(),
            settings: RunSettings::default(),
            monotone_slack: 0.2,
            final_ratio: 0.05,
        }
    }
}

impl ConvergenceStudySpec {
    pub fn validate(&self) -> Result<()> {
        check_delta_grid(&self.delta_grid)?;
        check_sobolev(self.s)?;
        check_horizon(self.horizon)?;
        self.settings.solver_config(0.0, self.horizon, self.s)?;
        Ok(())
    }
}

/// `sup` over recorded snapshots of `‖a(t) - b(t)‖_{H^s}`.
fn sup_distance(a: &TrajectoryRecord, b: &TrajectoryRecord, s: f64) -> f64 {
    a.snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(x, y)| x.total().sub(&y.total()).sobolev_norm(s))
        .fold(0.0, f64::max)
}

/// `E(δ) = sup_t ‖v(t) - v_δ^low(t)‖_{H^s}` for each δ in the grid.
pub fn run_convergence(spec: &ConvergenceStudySpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let grid = spec.settings.grid()?;
    let phi = spec.profile.sample(grid);
    let kdv_cfg = spec.settings.solver_config(0.0, spec.horizon, spec.s)?;
    let kdv = evolve_from(EquationKind::KdV, &phi, &kdv_cfg);

    let runs: Vec<Result<f64>> = spec
        .delta_grid
        .par_iter()
        .map(|&d| {
            let kdv = kdv.as_ref().map_err(|e| Error::Regime(format!("reference KdV run failed: {e}")))?;
            let cfg = spec.settings.solver_config(d, spec.horizon, spec.s)?;
            let low = evolve_from(EquationKind::LowFrequency, &phi, &cfg)?;
            Ok(sup_distance(kdv, &low, spec.s))
        })
        .collect();

    let mut report = ExperimentReport::new(
        "converge",
        serde_json::to_value(spec)?,
        &["delta", "sup_error", "failed"],
    );
    report.notes.push(format!(
        "sup over t is the max over {} recorded snapshots",
        kdv_cfg.steps() / kdv_cfg.record_every + 1
    ));
    let mut errors = Vec::with_capacity(runs.len());
    for (d, r) in spec.delta_grid.iter().zip(runs) {
        let (e, failed) = match r {
            Ok(e) => (e, 0.0),
            Err(err) => {
                report.notes.push(format!("delta = {d}: {err}"));
                (f64::NAN, 1.0)
            }
        };
        errors.push(e);
        report.rows.push(vec![*d, e, failed]);
    }
    report.series.push(Series {
        name: "sup_error".into(),
        x: spec.delta_grid.clone(),
        y: errors.clone(),
    });

    let all_ran = errors.iter().all(|e| e.is_finite());
    report.verdicts.push(Verdict::check(
        "all_runs_completed",
        errors.iter().filter(|e| !e.is_finite()).count() as f64,
        all_ran,
        "0 failed runs",
    ));
    let worst_step = errors
        .windows(2)
        .map(|w| if w[0] == 0.0 && w[1] == 0.0 { 0.0 } else { w[1] / w[0] })
        .fold(0.0, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) });
    let slack = 1.0 + spec.monotone_slack;
    report.verdicts.push(Verdict::check(
        "monotone_decrease",
        worst_step,
        all_ran && worst_step <= slack,
        format!("E(delta_next)/E(delta) <= {slack}"),
    ));
    let first = errors[0];
    let last = *errors.last().expect("grid not empty");
    let ratio = if first == 0.0 && last == 0.0 { 0.0 } else { last / first };
    report.verdicts.push(Verdict::check(
        "final_ratio",
        ratio,
        all_ran && (ratio < spec.final_ratio || (first == 0.0 && last == 0.0)),
        format!("E(delta_min)/E(delta_max) < {}", spec.final_ratio),
    ));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquicontinuitySpec {
    pub profile: Profile,
    pub s: f64,
    pub horizon: f64,
    pub delta_grid: Vec<f64>,
    /// Increasing frequency thresholds `N`.
    pub n_grid: Vec<f64>,
    pub settings: RunSettings,
    /// Required `sup_δ τ` at the largest `N`.
    pub threshold: f64,
    /// Each step of the N grid must shrink `sup_δ τ` by at least this factor.
    pub decay_ratio: f64,
    /// Frozen `sup_δ τ(N)` from a reference run, one per `N`.
    #[serde(default)]
    pub reference: Option<Vec<f64>>,
    /// Relative allowance above the reference curve.
    pub reference_tolerance: f64,
}

impl Default for EquicontinuitySpec {
    fn default() -> Self {
        Self {
            profile: Profile::default(),
            s: 0.0,
            horizon: 1.0,
            delta_grid: (0..=6).map(|j| 2f64.powi(-j)).collect(),
            n_grid: (0..=4).map(|j| 2f64.powi(j)).collect(),
            settings: RunSettings::default(),
            threshold: 1e-3,
            decay_ratio: 0.5,
            reference: None,
            reference_tolerance: 1e-3,
        }
    }
}

impl EquicontinuitySpec {
    pub fn validate(&self) -> Result<()> {
        check_delta_grid(&self.delta_grid)?;
        check_sobolev(self.s)?;
        check_horizon(self.horizon)?;
        if self.n_grid.is_empty()
            || self.n_grid.iter().any(|n| !(n.is_finite() && *n >= 0.0))
            || self.n_grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Parameter(
                "n_grid must be non-empty, non-negative and strictly increasing".into(),
            ));
        }
        if let Some(r) = &self.reference {
            if r.len() != self.n_grid.len() {
                return Err(Error::InputShape {
                    expected: self.n_grid.len(),
                    got: r.len(),
                });
            }
        }
        if !(self.decay_ratio > 0.0 && self.decay_ratio <= 1.0) {
            return Err(Error::Parameter("decay_ratio must lie in (0, 1]".into()));
        }
        self.settings.solver_config(0.0, self.horizon, self.s)?;
        Ok(())
    }
}

/// `τ(N, δ) = sup_t ‖P_N^⊥ v_δ^low(t)‖_{H^s}` for one trajectory.
pub fn tail_profile(record: &TrajectoryRecord, n_grid: &[f64], s: f64) -> Vec<f64> {
    n_grid
        .iter()
        .map(|&n| {
            record
                .snapshots
                .iter()
                .map(|st| st.total().project_high(n).sobolev_norm(s))
                .fold(0.0, f64::max)
        })
        .collect()
}

pub fn run_equicontinuity(spec: &EquicontinuitySpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let grid = spec.settings.grid()?;
    let phi = spec.profile.sample(grid);
    let tails: Vec<Result<Vec<f64>>> = spec
        .delta_grid
        .par_iter()
        .map(|&d| {
            let cfg = spec.settings.solver_config(d, spec.horizon, spec.s)?;
            let rec = evolve_from(EquationKind::LowFrequency, &phi, &cfg)?;
            Ok(tail_profile(&rec, &spec.n_grid, spec.s))
        })
        .collect();

    let mut report = ExperimentReport::new(
        "equicont",
        serde_json::to_value(spec)?,
        &["delta", "n", "tail"],
    );
    let mut sup = vec![0.0f64; spec.n_grid.len()];
    let mut failed = 0;
    for (d, t) in spec.delta_grid.iter().zip(tails) {
        match t {
            Ok(t) => {
                for (j, (n, v)) in spec.n_grid.iter().zip(&t).enumerate() {
                    report.rows.push(vec![*d, *n, *v]);
                    sup[j] = sup[j].max(*v);
                }
            }
            Err(e) => {
                failed += 1;
                report.notes.push(format!("delta = {d}: {e}"));
            }
        }
    }
    report.series.push(Series {
        name: "sup_tail".into(),
        x: spec.n_grid.clone(),
        y: sup.clone(),
    });
    report.verdicts.push(Verdict::check(
        "all_runs_completed",
        failed as f64,
        failed == 0,
        "0 failed runs",
    ));

    let worst = sup
        .windows(2)
        .map(|w| if w[0] == 0.0 { if w[1] == 0.0 { 0.0 } else { f64::INFINITY } } else { w[1] / w[0] })
        .fold(0.0, f64::max);
    report.verdicts.push(Verdict::check(
        "geometric_decay",
        worst,
        worst <= spec.decay_ratio,
        format!("sup_tail(N_next)/sup_tail(N) <= {}", spec.decay_ratio),
    ));
    let last = *sup.last().expect("n grid not empty");
    report.verdicts.push(Verdict::check(
        "tail_below_threshold",
        last,
        last < spec.threshold,
        format!("sup_tail(N_max) < {}", spec.threshold),
    ));
    if let Some(reference) = &spec.reference {
        let excess = sup
            .iter()
            .zip(reference)
            .map(|(v, r)| if *r == 0.0 { if *v == 0.0 { 0.0 } else { f64::INFINITY } } else { v / r - 1.0 })
            .fold(f64::NEG_INFINITY, f64::max);
        report.verdicts.push(Verdict::check(
            "below_reference_curve",
            excess,
            excess <= spec.reference_tolerance,
            format!("sup_tail/reference - 1 <= {}", spec.reference_tolerance),
        ));
    }
    Ok(report)
}
