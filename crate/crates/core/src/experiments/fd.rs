//! Finite-difference check of the second Gâteaux derivative of the residual flow.
//!
//! Expanding `v_res(ε) = ε a + ε² b + ε³ c + …` gives
//! `(v_res(2ε) - 2 v_res(ε))/ε² = 2b + 6εc`, where
//! `b = I((P⊥Sφ)²) + 2 I(PSφ · P⊥Sφ) + I(P⊥(PSφ)²)` and
//! `I(F)(t) = ∫_0^t S(t - t') ∂x F(t') dt'`. The second derivative is `2b`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::Profile;
use super::report::{log_log_fit, ExperimentReport, Series, Verdict};
use super::shallow::RunSettings;
use crate::dynamics::{evolve_from, EquationKind, Solver};
use crate::error::{Error, Result};
use crate::quadrature::CompositeGauss;
use crate::spectral::{SpectralField, Transformer};
use crate::symbols::{p_tilde, DepthParameter};

/// Time-quadrature refinement levels must agree to this relative accuracy.
pub const TIME_QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Below this discrepancy slope the ε list is outside the quadratic regime.
pub const MIN_REGIME_SLOPE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdCheckSpec {
    pub delta: f64,
    pub t: f64,
    /// Initial data is the sum of these profiles.
    pub packets: Vec<Profile>,
    pub epsilons: Vec<f64>,
    pub settings: RunSettings,
    pub time_order: usize,
    pub time_panels: usize,
    pub slope_range: [f64; 2],
}

impl Default for FdCheckSpec {
    fn default() -> Self {
        Self {
            delta: 0.5,
            t: 0.5,
            packets: vec![
                Profile::WavePacket {
                    amplitude: 1.0,
                    width: 4.0,
                    wavenumber: 1.0,
                },
                Profile::WavePacket {
                    amplitude: 1.0,
                    width: 4.0,
                    wavenumber: 4.0,
                },
            ],
            epsilons: vec![1e-2, 5e-3, 2.5e-3],
            settings: RunSettings {
                dt: 2.5e-3,
                record_every: 1_000_000,
                ..RunSettings::default()
            },
            time_order: 16,
            time_panels: 32,
            slope_range: [0.8, 1.2],
        }
    }
}

impl FdCheckSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::Parameter(format!(
                "delta must satisfy delta ≥ 0, got {}",
                self.delta
            )));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::Parameter(format!("t must be > 0, got {}", self.t)));
        }
        if self.epsilons.len() < 2 || self.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::Parameter(
                "epsilons must hold at least two positive values".into(),
            ));
        }
        if self.time_order == 0 || self.time_panels == 0 {
            return Err(Error::Parameter(
                "time_order and time_panels must be >= 1".into(),
            ));
        }
        self.settings.solver_config(self.delta, self.t, 0.0)?;
        Ok(())
    }

    pub fn sample(&self) -> Result<SpectralField> {
        let grid = self.settings.grid()?;
        Ok(SpectralField::from_fn(grid, |x| {
            self.packets.iter().map(|p| p.eval(x)).sum()
        }))
    }
}

/// The three Duhamel terms `I((P⊥Sφ)²)`, `2 I(PSφ · P⊥Sφ)`, `I(P⊥(PSφ)²)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondDerivativeTerms {
    pub residual_square: SpectralField,
    pub cross: SpectralField,
    pub low_forcing: SpectralField,
}

impl SecondDerivativeTerms {
    pub fn sum(&self) -> SpectralField {
        self.residual_square.add(&self.cross).add(&self.low_forcing)
    }

    /// `∂²_ε v_res |_{ε=0}`, twice the sum of the terms.
    pub fn second_derivative(&self) -> SpectralField {
        self.sum().scale(2.0)
    }
}

fn duhamel_terms(spec: &FdCheckSpec, phi: &SpectralField, panels: usize) -> Result<SecondDerivativeTerms> {
    let cfg = spec.settings.solver_config(spec.delta, spec.t, 0.0)?;
    let solver = Solver::new(EquationKind::CoupledLowResidual, cfg)?;
    let grid = cfg.grid;
    let n = grid.mode_count();
    let delta = DepthParameter::new(spec.delta)?;
    let kmax = solver.dealias_limit();
    let low_limit = grid.low_band_limit(delta.cutoff());
    let in_band = |i: usize| grid.wavenumber(i).unsigned_abs() as usize <= kmax;
    let is_low = |i: usize| grid.wavenumber(i).unsigned_abs() as usize <= low_limit;
    let symbol: Vec<f64> = (0..n).map(|i| p_tilde(delta, grid.frequency(i))).collect();
    let phi = solver.initial_state(phi).total();

    let nodes = CompositeGauss::new(spec.time_order).points(0.0, spec.t, panels);
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let zero3 = || [zero.clone(), zero.clone(), zero.clone()];
    // fixed chunks summed in order keep the result independent of the thread count
    let partial: Vec<[Vec<Complex64>; 3]> = nodes
        .par_chunks(8)
        .map(|chunk| {
            let mut tr = Transformer::new(grid);
            let mut acc = zero3();
            let mut lo = zero.clone();
            let mut hi = zero.clone();
            let mut ul = vec![0.0; n];
            let mut uh = vec![0.0; n];
            let mut prod = vec![0.0; n];
            let mut buf = zero.clone();
            for &(tp, w) in chunk {
                for (i, c) in phi.coeffs().iter().enumerate() {
                    let v = c * Complex64::cis(tp * symbol[i]);
                    let (a, b) = if is_low(i) { (v, Complex64::new(0.0, 0.0)) } else { (Complex64::new(0.0, 0.0), v) };
                    lo[i] = a;
                    hi[i] = b;
                }
                tr.inverse_into(&lo, &mut ul);
                tr.inverse_into(&hi, &mut uh);
                for m in 0..3 {
                    for j in 0..n {
                        prod[j] = match m {
                            0 => uh[j] * uh[j],
                            1 => 2.0 * ul[j] * uh[j],
                            _ => ul[j] * ul[j],
                        };
                    }
                    tr.forward_into(&prod, &mut buf);
                    for i in 0..n {
                        if !in_band(i) || (m == 2 && is_low(i)) {
                            continue;
                        }
                        let phase = Complex64::cis((spec.t - tp) * symbol[i]);
                        acc[m][i] += phase * Complex64::new(0.0, grid.frequency(i)) * buf[i] * w;
                    }
                }
            }
            acc
        })
        .collect();
    let mut acc = zero3();
    for part in partial {
        for m in 0..3 {
            for i in 0..n {
                acc[m][i] += part[m][i];
            }
        }
    }
    let [a, b, c] = acc;
    Ok(SecondDerivativeTerms {
        residual_square: SpectralField::from_coeffs_unchecked(grid, a),
        cross: SpectralField::from_coeffs_unchecked(grid, b),
        low_forcing: SpectralField::from_coeffs_unchecked(grid, c),
    })
}

/// Duhamel terms by composite Gauss quadrature in time, checked against a
/// level with half the panels.
pub fn second_derivative_terms(spec: &FdCheckSpec, phi: &SpectralField) -> Result<SecondDerivativeTerms> {
    spec.validate()?;
    let fine = duhamel_terms(spec, phi, spec.time_panels)?;
    let coarse = duhamel_terms(spec, phi, spec.time_panels.div_ceil(2).max(1))?;
    let scale = fine.sum().l2_norm();
    if scale > 0.0 {
        let change = fine.sum().sub(&coarse.sum()).l2_norm() / scale;
        if change > TIME_QUADRATURE_TOLERANCE {
            return Err(Error::Quadrature { rel_diff: change });
        }
    }
    Ok(fine)
}

fn residual_at(spec: &FdCheckSpec, phi: &SpectralField, eps: f64) -> Result<SpectralField> {
    let cfg = spec.settings.solver_config(spec.delta, spec.t, 0.0)?;
    let rec = evolve_from(EquationKind::CoupledLowResidual, &phi.scale(eps), &cfg)?;
    Ok(rec
        .final_state()
        .residual()
        .expect("coupled state")
        .clone())
}

pub fn gateaux_fd_crosscheck(spec: &FdCheckSpec, phi: &SpectralField) -> Result<ExperimentReport> {
    spec.validate()?;
    let exact = second_derivative_terms(spec, phi)?.second_derivative();
    let exact_norm = exact.l2_norm();

    let quotients: Vec<Result<SpectralField>> = spec
        .epsilons
        .par_iter()
        .map(|&e| {
            let one = residual_at(spec, phi, e)?;
            let two = residual_at(spec, phi, 2.0 * e)?;
            Ok(two.sub(&one.scale(2.0)).scale(1.0 / (e * e)))
        })
        .collect();
    let quotients: Vec<SpectralField> = quotients.into_iter().collect::<Result<_>>()?;

    let mut report = ExperimentReport::new(
        "fd-check",
        serde_json::to_value(spec)?,
        &["epsilon", "discrepancy", "fd_norm", "quadrature_norm"],
    );
    let disc: Vec<f64> = quotients.iter().map(|q| q.sub(&exact).l2_norm()).collect();
    for ((e, d), q) in spec.epsilons.iter().zip(&disc).zip(&quotients) {
        report.rows.push(vec![*e, *d, q.l2_norm(), exact_norm]);
    }
    report.series.push(Series {
        name: "discrepancy".into(),
        x: spec.epsilons.clone(),
        y: disc.clone(),
    });
    if exact_norm == 0.0 && disc.iter().all(|d| *d == 0.0) {
        report.notes.push("both sides vanish identically".into());
        report.verdicts.push(Verdict::check("discrepancy_slope", 0.0, true, "both sides zero"));
        return Ok(report);
    }
    let fit = log_log_fit(&spec.epsilons, &disc)?;
    if fit.slope < MIN_REGIME_SLOPE {
        return Err(Error::Regime(format!(
            "discrepancy slope {} below {MIN_REGIME_SLOPE}: epsilon too large for the quadratic regime",
            fit.slope
        )));
    }
    report.push_fit("discrepancy_vs_epsilon", fit);
    let [lo, hi] = spec.slope_range;
    report
        .verdicts
        .push(Verdict::within("discrepancy_slope", fit.slope, lo, hi));
    Ok(report)
}

pub fn run_fd_check(spec: &FdCheckSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    gateaux_fd_crosscheck(spec, &spec.sample()?)
}
